"""Engine configuration: packaged defaults, file overrides, config digest.

The engine resolves its configuration from the packaged data files
(latency table, topology, NF profiles, catalog seed, runtime defaults)
and optionally merges a user-supplied JSON override file on top. The
digest of the fully-resolved configuration tags every exported dataset so
runs are traceable to the exact inputs that produced them.

Override file shape: any subset of the top-level sections
``{"seed", "latency", "topology", "nf_profiles", "catalog_seed",
"runtime", "classification"}``; nested keys replace defaults key-by-key.
The path can also be supplied through the ``NASP_CONFIG`` environment
variable.
"""

from __future__ import annotations

import json
import os
from importlib import resources
from pathlib import Path

from .digest import digest_obj

CONFIG_ENV_VAR = "NASP_CONFIG"

_DATA_FILES = {
    "latency": "latency_table.json",
    "topology": "topology.json",
    "nf_profiles": "nf_profiles.json",
    "catalog_seed": "catalog_seed.json",
    "runtime": "runtime.json",
}

DEFAULT_CLASSIFICATION = {
    "urllc_pdb_ceiling_ms": 10.0,
    "mmtc_density_floor": 50000.0,
    "mmtc_pdb_floor_ms": 100.0,
}

DEFAULT_SEED = 20260310


def _load_packaged(name: str) -> dict:
    ref = resources.files("nsaas.data").joinpath(name)
    with ref.open("r", encoding="utf-8") as fh:
        return json.load(fh)


def packaged_price_table_text() -> str:
    ref = resources.files("nsaas.data").joinpath("price_table.csv")
    return ref.read_text(encoding="utf-8")


def _deep_merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = value
    return out


class EngineConfig:
    """Fully-resolved, immutable engine configuration."""

    def __init__(self, resolved: dict):
        self._resolved = resolved
        self.seed: int = resolved["seed"]
        self.latency: dict = resolved["latency"]
        self.topology: dict = resolved["topology"]
        self.nf_profiles: dict = resolved["nf_profiles"]
        self.catalog_seed: dict = resolved["catalog_seed"]
        self.runtime: dict = resolved["runtime"]
        self.classification: dict = resolved["classification"]

    @classmethod
    def load(cls, path: str | Path | None = None,
             overrides: dict | None = None) -> "EngineConfig":
        resolved: dict = {
            "seed": DEFAULT_SEED,
            "classification": dict(DEFAULT_CLASSIFICATION),
        }
        for section, filename in _DATA_FILES.items():
            resolved[section] = _load_packaged(filename)

        if path is None:
            env_path = os.environ.get(CONFIG_ENV_VAR)
            if env_path:
                path = env_path
        if path is not None:
            file_overrides = json.loads(Path(path).read_text(encoding="utf-8"))
            resolved = _deep_merge(resolved, file_overrides)
        if overrides:
            resolved = _deep_merge(resolved, overrides)
        return cls(resolved)

    def with_overrides(self, overrides: dict) -> "EngineConfig":
        return EngineConfig(_deep_merge(self._resolved, overrides))

    def to_dict(self) -> dict:
        return json.loads(json.dumps(self._resolved))

    def digest(self) -> str:
        return digest_obj(self._resolved)

    # -- convenience accessors ----------------------------------------------

    def scenario_latencies(self, scenario: str) -> dict:
        try:
            return self.latency["scenarios"][scenario]
        except KeyError:
            raise KeyError(f"no latency table for scenario {scenario!r}") from None

    @property
    def tn_rule_install_s(self) -> float:
        return float(self.latency["tn_rule_install_s"])

    @property
    def reconfig_latencies(self) -> dict:
        return self.latency["reconfiguration"]

    @property
    def admission_cap(self) -> int:
        return int(self.runtime["admission"]["cap"])

    def attach_model(self, scenario: str) -> dict:
        return self.runtime["attach"]["models"][scenario]

    @property
    def attach_noise_pct(self) -> float:
        return float(self.runtime["attach"]["noise_pct"])
