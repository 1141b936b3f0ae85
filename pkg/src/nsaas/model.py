"""Core domain vocabulary: identifiers, requests, profiles, templates and
runtime instance records shared by every other module.

All timestamps in these records are virtual-clock seconds, never wall clock.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace

from .errors import SchemaError, UnclassifiableRequest

SD_SPACE = 2 ** 24  # slice differentiator is a 24-bit field


class Domain(str, enum.Enum):
    CN = "cn"
    RAN = "ran"
    TN = "tn"


class ScenarioClass(str, enum.Enum):
    URLLC = "urllc"
    MMTC = "mmtc"
    SHARED_EMBB = "shared-embb"
    NON3GPP = "non3gpp"


# Slice/service type codes: 1=eMBB, 2=URLLC, 3=mMTC, 4=custom/non-3GPP access.
SST_BY_SCENARIO = {
    ScenarioClass.SHARED_EMBB: 1,
    ScenarioClass.URLLC: 2,
    ScenarioClass.MMTC: 3,
    ScenarioClass.NON3GPP: 4,
}


class NsiState(str, enum.Enum):
    REQUESTED = "Requested"
    DEPLOYING = "Deploying"
    ACTIVE = "Active"
    RECONFIGURING = "Reconfiguring"
    DEGRADED = "Degraded"
    TERMINATED = "Terminated"


# Legal lifecycle transitions (from -> allowed targets).
NSI_TRANSITIONS = {
    NsiState.REQUESTED: {NsiState.DEPLOYING},
    NsiState.DEPLOYING: {NsiState.ACTIVE, NsiState.DEGRADED},
    NsiState.ACTIVE: {NsiState.RECONFIGURING, NsiState.TERMINATED},
    NsiState.RECONFIGURING: {NsiState.ACTIVE, NsiState.DEGRADED},
    NsiState.DEGRADED: {NsiState.TERMINATED},
    NsiState.TERMINATED: set(),
}


class NssiState(str, enum.Enum):
    PENDING = "Pending"
    DEPLOYING = "Deploying"
    READY = "Ready"
    FAILED = "Failed"
    REMOVED = "Removed"


@dataclass(frozen=True, order=True)
class SNssai:
    """Single network slice selection assistance information: (SST, SD)."""

    sst: int
    sd: int

    def __post_init__(self):
        if not 0 <= self.sd < SD_SPACE:
            raise ValueError(f"sd {self.sd} outside [0, 2^24)")

    def key(self) -> str:
        return f"{self.sst}-{self.sd:06x}"


@dataclass(frozen=True)
class Ssq:
    """Slice service quality block of a request (SI units on the wire)."""

    packet_delay_budget_s: float
    packet_error_rate: float
    max_data_burst_volume_mb: float

    def validate(self) -> None:
        if self.packet_delay_budget_s <= 0:
            raise SchemaError("Packet Delay Budget must be > 0",
                              "NST.Slice Attributes.SSQ.Packet Delay Budget")
        if not 0 < self.packet_error_rate < 1:
            raise SchemaError("Packet Error Rate must be in (0,1)",
                              "NST.Slice Attributes.SSQ.Packet Error Rate")
        if self.max_data_burst_volume_mb < 0:
            raise SchemaError("Maximum Data Burst Volume must be >= 0",
                              "NST.Slice Attributes.SSQ.Maximum Data Burts Volume")


@dataclass(frozen=True)
class NfOverride:
    """Explicit NF entry from a request's resource_description."""

    name: str
    nf_type: str = ""
    replicas: int = 1

    def validate(self, path: str) -> None:
        if not self.name:
            raise SchemaError("nf name missing", path)
        if self.replicas < 1:
            raise SchemaError("replicas must be >= 1", f"{path}.replicas")


@dataclass(frozen=True)
class SliceRequest:
    """Tenant intent as submitted northbound (Listing-style JSON shape)."""

    name: str
    nst_type: str  # embb | urllc | mmtc | non3gpp | custom
    tenant: str = "default"
    availability: float | None = None  # fraction in [0, 1]
    supported_data_network: str | None = None
    ssq: Ssq | None = None
    ue_density_per_km2: float | None = None
    non3gpp_access: bool = False
    core_nfs: tuple[NfOverride, ...] = ()
    ran_nfs: tuple[NfOverride, ...] = ()
    tn_routes: tuple[str, ...] = ()

    VALID_TYPES = ("embb", "urllc", "mmtc", "non3gpp", "custom")

    def validate(self) -> None:
        if not self.name:
            raise SchemaError("request name missing", "name")
        if self.nst_type not in self.VALID_TYPES:
            raise SchemaError(f"unknown NST type {self.nst_type!r}", "NST.type")
        if self.nst_type == "custom" and not self.has_slice_attributes():
            raise SchemaError("custom request must carry Slice Attributes",
                              "NST.Slice Attributes")
        if self.availability is not None and not 0 <= self.availability <= 1:
            raise SchemaError("availability must be in [0,1]",
                              "NST.Slice Attributes.availability")
        if self.ssq is not None:
            self.ssq.validate()
        for i, nf in enumerate(self.core_nfs):
            nf.validate(f"NST.resource_description.core.nfs[{i}]")
        for i, nf in enumerate(self.ran_nfs):
            nf.validate(f"NST.resource_description.ran.nfs[{i}]")

    def has_slice_attributes(self) -> bool:
        return any(v is not None for v in
                   (self.availability, self.supported_data_network,
                    self.ssq, self.ue_density_per_km2)) or self.non3gpp_access

    # -- wire format -------------------------------------------------------

    @classmethod
    def from_json(cls, payload: dict) -> "SliceRequest":
        """Parse the northbound JSON shape. Field names follow the tenant
        wire contract verbatim, including the ``Maximum Data Burts Volume``
        spelling (the canonical spelling is accepted on input too)."""
        if not isinstance(payload, dict):
            raise SchemaError("request body must be a JSON object", "")
        name = payload.get("name")
        if not isinstance(name, str) or not name:
            raise SchemaError("missing request name", "name")
        nst = payload.get("NST")
        if not isinstance(nst, dict):
            raise SchemaError("missing NST object", "NST")
        nst_type = str(nst.get("type", "")).lower().replace("-", "")
        attrs = nst.get("Slice Attributes") or {}
        if not isinstance(attrs, dict):
            raise SchemaError("Slice Attributes must be an object",
                              "NST.Slice Attributes")

        ssq = None
        raw_ssq = attrs.get("SSQ")
        if raw_ssq is not None:
            if not isinstance(raw_ssq, dict):
                raise SchemaError("SSQ must be an object", "NST.Slice Attributes.SSQ")
            burst = raw_ssq.get("Maximum Data Burts Volume",
                                raw_ssq.get("Maximum Data Burst Volume"))
            try:
                ssq = Ssq(
                    packet_delay_budget_s=float(raw_ssq["Packet Delay Budget"]),
                    packet_error_rate=float(raw_ssq["Packet Error Rate"]),
                    max_data_burst_volume_mb=float(burst),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaError(f"invalid SSQ: {exc}",
                                  "NST.Slice Attributes.SSQ") from None

        def _nfs(section: str) -> tuple[NfOverride, ...]:
            desc = nst.get("resource_description") or {}
            block = desc.get(section) or {}
            out = []
            for raw in block.get("nfs", []):
                out.append(NfOverride(name=str(raw.get("name", "")).lower(),
                                      nf_type=str(raw.get("type", "")),
                                      replicas=int(raw.get("replicas", 1))))
            return tuple(out)

        desc = nst.get("resource_description") or {}
        routes = tuple(str(r.get("name", "")) for r in
                       (desc.get("tn") or {}).get("routes", []))

        req = cls(
            name=name,
            nst_type=nst_type,
            tenant=str(payload.get("tenant", "default")),
            availability=(None if "availability" not in attrs
                          else float(attrs["availability"])),
            supported_data_network=attrs.get("Supported Data Network"),
            ssq=ssq,
            ue_density_per_km2=(None if "UE density" not in attrs
                                else float(attrs["UE density"])),
            non3gpp_access=bool(attrs.get("Non-3GPP Access", False)),
            core_nfs=_nfs("core"),
            ran_nfs=_nfs("ran"),
            tn_routes=routes,
        )
        req.validate()
        return req

    def to_json(self) -> dict:
        attrs: dict = {}
        if self.availability is not None:
            attrs["availability"] = self.availability
        if self.supported_data_network is not None:
            attrs["Supported Data Network"] = self.supported_data_network
        if self.ssq is not None:
            attrs["SSQ"] = {
                "Packet Delay Budget": self.ssq.packet_delay_budget_s,
                "Packet Error Rate": self.ssq.packet_error_rate,
                "Maximum Data Burts Volume": self.ssq.max_data_burst_volume_mb,
            }
        if self.ue_density_per_km2 is not None:
            attrs["UE density"] = self.ue_density_per_km2
        if self.non3gpp_access:
            attrs["Non-3GPP Access"] = True

        desc: dict = {}
        if self.core_nfs:
            desc["core"] = {"nfs": [_nf_json(nf) for nf in self.core_nfs]}
        if self.ran_nfs:
            desc["ran"] = {"nfs": [_nf_json(nf) for nf in self.ran_nfs]}
        if self.tn_routes:
            desc["tn"] = {"routes": [{"name": r} for r in self.tn_routes]}

        nst: dict = {"type": self.nst_type}
        if attrs:
            nst["Slice Attributes"] = attrs
        if desc:
            nst["resource_description"] = desc
        return {"name": self.name, "tenant": self.tenant, "NST": nst}

    def digest_payload(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def _nf_json(nf: NfOverride) -> dict:
    out: dict = {"name": nf.name}
    if nf.nf_type:
        out["type"] = nf.nf_type
    if nf.replicas != 1:
        out["replicas"] = nf.replicas
    return out


@dataclass(frozen=True)
class NormalizedRequirements:
    """Unit-canonical requirement set: milliseconds, megabytes, percent."""

    delay_budget_ms: float
    error_rate: float
    burst_volume_mb: float
    availability_pct: float
    ue_density_per_km2: float
    data_network: str
    non3gpp_access: bool = False
    core_overrides: tuple[NfOverride, ...] = ()
    ran_overrides: tuple[NfOverride, ...] = ()
    tn_routes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "delay_budget_ms": self.delay_budget_ms,
            "error_rate": self.error_rate,
            "burst_volume_mb": self.burst_volume_mb,
            "availability_pct": self.availability_pct,
            "ue_density_per_km2": self.ue_density_per_km2,
            "data_network": self.data_network,
            "non3gpp_access": self.non3gpp_access,
        }


@dataclass(frozen=True)
class SlaTarget:
    """One committed, immutable target per quantitative GST attribute."""

    attribute: str
    target: float
    direction: str  # "<=" or ">="
    source_request: str
    version: int

    def __post_init__(self):
        if self.direction not in ("<=", ">="):
            raise ValueError(f"bad comparison direction {self.direction!r}")


@dataclass(frozen=True)
class NfSpec:
    """One network function entry of a subnet template."""

    role: str                     # amf, smf, upf, upf_lite, gnb, n3iwf, ...
    sharing: str                  # "dedicated" deploys per slice, "shared" reuses
    replicas: int = 1
    vcpu_request: float = 0.0
    ram_mb_request: float = 0.0

    def footprint(self) -> tuple[float, float]:
        if self.sharing == "shared":
            return (0.0, 0.0)
        return (self.vcpu_request * self.replicas,
                self.ram_mb_request * self.replicas)


@dataclass(frozen=True)
class NSST:
    """Versioned per-domain subnet template."""

    id: str
    domain: Domain
    scenario: ScenarioClass
    version: int = 0              # assigned by the catalog on registration
    nfs: tuple[NfSpec, ...] = ()
    variables: dict = field(default_factory=dict)
    artifacts: tuple[str, ...] = ()

    def footprint(self) -> tuple[float, float]:
        vcpu = sum(nf.footprint()[0] for nf in self.nfs)
        ram = sum(nf.footprint()[1] for nf in self.nfs)
        return (round(vcpu, 6), round(ram, 6))

    def reuse_count(self) -> int:
        return sum(1 for nf in self.nfs if nf.sharing == "shared")

    def content(self) -> dict:
        """Version-independent canonical content used for digests."""
        return {
            "id": self.id,
            "domain": self.domain.value,
            "scenario": self.scenario.value,
            "nfs": [{"role": nf.role, "sharing": nf.sharing,
                     "replicas": nf.replicas, "vcpu_request": nf.vcpu_request,
                     "ram_mb_request": nf.ram_mb_request} for nf in self.nfs],
            "variables": self.variables,
            "artifacts": list(self.artifacts),
        }

    @classmethod
    def from_content(cls, content: dict, version: int = 0) -> "NSST":
        return cls(
            id=content["id"],
            domain=Domain(content["domain"]),
            scenario=ScenarioClass(content["scenario"]),
            version=version,
            nfs=tuple(NfSpec(**nf) for nf in content["nfs"]),
            variables=dict(content.get("variables", {})),
            artifacts=tuple(content.get("artifacts", ())),
        )


@dataclass(frozen=True)
class NST:
    """End-to-end slice template composed from one NSST per domain."""

    id: str
    scenario: ScenarioClass
    version: int = 0
    nsst_refs: dict = field(default_factory=dict)   # domain value -> (id, version)
    bindings: dict = field(default_factory=dict)    # consolidated variable values
    descriptors: dict = field(default_factory=dict) # rendered per-domain resources

    def content(self) -> dict:
        return {
            "id": self.id,
            "scenario": self.scenario.value,
            "nsst_refs": {k: list(v) for k, v in sorted(self.nsst_refs.items())},
            "bindings": self.bindings,
            "descriptors": self.descriptors,
        }

    @classmethod
    def from_content(cls, content: dict, version: int = 0) -> "NST":
        return cls(
            id=content["id"],
            scenario=ScenarioClass(content["scenario"]),
            version=version,
            nsst_refs={k: tuple(v) for k, v in content["nsst_refs"].items()},
            bindings=dict(content.get("bindings", {})),
            descriptors=dict(content.get("descriptors", {})),
        )


@dataclass
class NSSI:
    """Runtime subnet instance owned by one NSI.

    ``resource_ids`` are resources this subnet owns; ``shared_refs`` are
    pre-existing shared resources it binds to (reference-counted, never
    owned).
    """

    domain: Domain
    state: NssiState = NssiState.PENDING
    resource_ids: list[str] = field(default_factory=list)
    shared_refs: list[str] = field(default_factory=list)
    endpoints: dict = field(default_factory=dict)

    def mark_ready(self) -> None:
        if self.domain == Domain.CN and not self.endpoints.get("amf_n2"):
            raise ValueError("CN subnet cannot be Ready without an AMF endpoint")
        self.state = NssiState.READY

    def snapshot(self) -> dict:
        return {
            "domain": self.domain.value,
            "state": self.state.value,
            "resource_ids": sorted(self.resource_ids),
            "shared_refs": sorted(self.shared_refs),
            "endpoints": dict(sorted(self.endpoints.items())),
        }


@dataclass
class NSI:
    """Runtime slice instance with lifecycle state and identity."""

    id: str
    snssai: SNssai
    tenant: str
    scenario: ScenarioClass
    state: NsiState = NsiState.REQUESTED
    nssis: dict = field(default_factory=dict)  # Domain -> NSSI
    sla_targets: tuple[SlaTarget, ...] = ()
    nst_ref: tuple[str, int] | None = None
    created_at: float = 0.0
    activated_at: float | None = None
    vlan: int | None = None
    kpis: dict = field(default_factory=dict)

    def transition(self, target: NsiState) -> None:
        allowed = NSI_TRANSITIONS[self.state]
        if target not in allowed:
            raise ValueError(f"illegal NSI transition {self.state.value} -> {target.value}")
        if target == NsiState.ACTIVE:
            not_ready = [n.domain.value for n in self.nssis.values()
                         if n.state != NssiState.READY]
            if not_ready:
                raise ValueError(f"cannot activate with non-ready subnets: {not_ready}")
        self.state = target

    def snapshot(self) -> dict:
        return {
            "id": self.id,
            "snssai": {"sst": self.snssai.sst, "sd": self.snssai.sd},
            "tenant": self.tenant,
            "scenario": self.scenario.value,
            "state": self.state.value,
            "nssis": {d.value: n.snapshot() for d, n in sorted(
                self.nssis.items(), key=lambda kv: kv[0].value)},
            "sla_targets": [
                {"attribute": t.attribute, "target": t.target,
                 "direction": t.direction, "source_request": t.source_request,
                 "version": t.version} for t in self.sla_targets],
            "nst_ref": list(self.nst_ref) if self.nst_ref else None,
            "created_at": self.created_at,
            "activated_at": self.activated_at,
            "vlan": self.vlan,
            "kpis": dict(sorted(self.kpis.items())),
        }


# ---------------------------------------------------------------------------
# Scenario classification
# ---------------------------------------------------------------------------

EXPLICIT_TYPE_MAP = {
    "embb": ScenarioClass.SHARED_EMBB,
    "urllc": ScenarioClass.URLLC,
    "mmtc": ScenarioClass.MMTC,
    "non3gpp": ScenarioClass.NON3GPP,
}

# Rule-table thresholds; overridable through engine config.
URLLC_PDB_CEILING_MS = 10.0
MMTC_DENSITY_FLOOR = 50_000.0
MMTC_PDB_FLOOR_MS = 100.0


def classify_slice_type(req: SliceRequest,
                        urllc_pdb_ms: float = URLLC_PDB_CEILING_MS,
                        mmtc_density: float = MMTC_DENSITY_FLOOR,
                        mmtc_pdb_ms: float = MMTC_PDB_FLOOR_MS) -> ScenarioClass:
    """Derive the scenario class for a request.

    An explicit NST type wins outright. Custom requests go through the rule
    table: a sub-``urllc_pdb_ms`` delay budget selects URLLC, high device
    density with a relaxed budget selects mMTC, a non-3GPP access flag
    selects the non-3GPP offload profile, anything else falls back to the
    shared eMBB baseline. A request that both demands URLLC-grade delay and
    flags non-3GPP access is contradictory and rejected.
    """
    req.validate()
    if req.nst_type != "custom":
        return EXPLICIT_TYPE_MAP[req.nst_type]

    pdb_ms = req.ssq.packet_delay_budget_s * 1000.0 if req.ssq else None
    wants_urllc = pdb_ms is not None and pdb_ms < urllc_pdb_ms
    if req.non3gpp_access and wants_urllc:
        raise UnclassifiableRequest(
            "non-3GPP access cannot satisfy an URLLC-grade delay budget",
            delay_budget_ms=pdb_ms)
    if wants_urllc:
        return ScenarioClass.URLLC
    if (req.ue_density_per_km2 is not None and req.ue_density_per_km2 > mmtc_density
            and pdb_ms is not None and pdb_ms >= mmtc_pdb_ms):
        return ScenarioClass.MMTC
    if req.non3gpp_access:
        return ScenarioClass.NON3GPP
    return ScenarioClass.SHARED_EMBB


# Scenario defaults applied when a request omits attributes (unit-canonical).
SCENARIO_DEFAULTS = {
    ScenarioClass.SHARED_EMBB: {
        "delay_budget_ms": 100.0, "error_rate": 1e-6, "burst_volume_mb": 10.0,
        "availability_pct": 99.9, "ue_density_per_km2": 1000.0,
        "data_network": "internet",
    },
    ScenarioClass.URLLC: {
        "delay_budget_ms": 1.0, "error_rate": 1e-5, "burst_volume_mb": 0.01,
        "availability_pct": 99.999, "ue_density_per_km2": 1000.0,
        "data_network": "internet",
    },
    ScenarioClass.MMTC: {
        "delay_budget_ms": 500.0, "error_rate": 1e-2, "burst_volume_mb": 0.001,
        "availability_pct": 99.0, "ue_density_per_km2": 100_000.0,
        "data_network": "internet",
    },
    ScenarioClass.NON3GPP: {
        "delay_budget_ms": 200.0, "error_rate": 1e-4, "burst_volume_mb": 1.0,
        "availability_pct": 99.0, "ue_density_per_km2": 1000.0,
        "data_network": "internet",
    },
}


def normalize_requirements(req: SliceRequest,
                           scenario: ScenarioClass) -> NormalizedRequirements:
    """Convert request attributes to canonical units, filling scenario
    defaults for anything the tenant left unspecified."""
    req.validate()
    defaults = SCENARIO_DEFAULTS[scenario]
    if req.ssq is not None:
        delay_ms = req.ssq.packet_delay_budget_s * 1000.0
        error = req.ssq.packet_error_rate
        burst = req.ssq.max_data_burst_volume_mb
    else:
        delay_ms = defaults["delay_budget_ms"]
        error = defaults["error_rate"]
        burst = defaults["burst_volume_mb"]
    return NormalizedRequirements(
        delay_budget_ms=delay_ms,
        error_rate=error,
        burst_volume_mb=burst,
        availability_pct=(req.availability * 100.0 if req.availability is not None
                          else defaults["availability_pct"]),
        ue_density_per_km2=(req.ue_density_per_km2
                            if req.ue_density_per_km2 is not None
                            else defaults["ue_density_per_km2"]),
        data_network=(req.supported_data_network
                      if req.supported_data_network is not None
                      else defaults["data_network"]),
        non3gpp_access=req.non3gpp_access,
        core_overrides=req.core_nfs,
        ran_overrides=req.ran_nfs,
        tn_routes=req.tn_routes,
    )


def denormalize_requirements(norm: NormalizedRequirements,
                             name: str = "denormalized",
                             nst_type: str = "custom") -> SliceRequest:
    """Inverse of :func:`normalize_requirements` for round-trip checks."""
    return SliceRequest(
        name=name,
        nst_type=nst_type,
        availability=norm.availability_pct / 100.0,
        supported_data_network=norm.data_network,
        ssq=Ssq(packet_delay_budget_s=norm.delay_budget_ms / 1000.0,
                packet_error_rate=norm.error_rate,
                max_data_burst_volume_mb=norm.burst_volume_mb),
        ue_density_per_km2=norm.ue_density_per_km2,
        non3gpp_access=norm.non3gpp_access,
        core_nfs=norm.core_overrides,
        ran_nfs=norm.ran_overrides,
        tn_routes=norm.tn_routes,
    )


def with_replicas(nf: NfSpec, replicas: int) -> NfSpec:
    return replace(nf, replicas=replicas)
