"""Instance price table, per-tier least-squares cost fitting, cost
prediction from usage traces, and tier comparison.

The shipped price table lists three instance sizes per deployment tier
(Edge, Metropolitan, Central). Prices use comma-decimal notation on disk
and are parsed into dot-decimal dollars. The regression uses vCPU and
RAM only; size and storage columns are carried but excluded (storage is
identical across rows).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .config import packaged_price_table_text
from .errors import RankDeficient

TIERS = ("Edge", "Metropolitan", "Central")


@dataclass(frozen=True)
class InstanceSpec:
    tier: str
    size: str
    vcpu: float
    ram_gb: float
    storage_gb: float
    price_month: float

    def __post_init__(self):
        if self.price_month <= 0:
            raise ValueError("price must be > 0")


@dataclass(frozen=True)
class TierCostModel:
    tier: str
    vcpu_coeff: float        # $/vCPU-month
    ram_coeff: float         # $/GB-month
    intercept: float         # $
    residual_norm: float = 0.0

    def predict(self, vcpu: float, ram_gb: float) -> float:
        return self.vcpu_coeff * vcpu + self.ram_coeff * ram_gb + self.intercept


def parse_price(text: str) -> float:
    cleaned = text.strip().replace("$", "").replace(" ", "")
    if "," in cleaned and "." not in cleaned:
        cleaned = cleaned.replace(",", ".")
    return float(cleaned)


def parse_price_table(text: str | None = None) -> list[InstanceSpec]:
    if text is None:
        text = packaged_price_table_text()
    reader = csv.DictReader(io.StringIO(text))
    out = []
    for row in reader:
        out.append(InstanceSpec(
            tier=row["type"].strip(),
            size=row["size"].strip(),
            vcpu=float(row["vcpu"]),
            ram_gb=float(row["ram_gb"]),
            storage_gb=float(row["storage_gb"]),
            price_month=parse_price(row["price_month"]),
        ))
    return out


def fit_cost_model(table: list[InstanceSpec], tier: str) -> TierCostModel:
    """Ordinary least squares of price on (vCPU, RAM, 1) for one tier.

    With exactly three non-collinear rows the fit is exact and the
    residual norm is ~0.
    """
    rows = [r for r in table if r.tier == tier]
    if len(rows) < 3:
        raise RankDeficient(f"tier {tier!r} has {len(rows)} rows, need >= 3",
                            tier=tier)
    design = np.array([[r.vcpu, r.ram_gb, 1.0] for r in rows])
    prices = np.array([r.price_month for r in rows])
    if np.linalg.matrix_rank(design) < 3:
        raise RankDeficient(f"design matrix for {tier!r} is rank deficient",
                            tier=tier)
    coeffs, _, _, _ = np.linalg.lstsq(design, prices, rcond=None)
    residual = float(np.linalg.norm(design @ coeffs - prices))
    return TierCostModel(tier=tier, vcpu_coeff=float(coeffs[0]),
                         ram_coeff=float(coeffs[1]), intercept=float(coeffs[2]),
                         residual_norm=residual)


def fit_all_tiers(table: list[InstanceSpec] | None = None
                  ) -> dict[str, TierCostModel]:
    if table is None:
        table = parse_price_table()
    return {tier: fit_cost_model(table, tier) for tier in TIERS}


def predict_cost(model: TierCostModel, vcpu: float, ram_gb: float) -> float:
    return model.predict(vcpu, ram_gb)


def cost_trace(models: dict[str, TierCostModel],
               usage_series: list[tuple[float, float, float]]
               ) -> list[dict]:
    """Pointwise monthly-cost prediction per tier from a
    (t, vcpu, ram_gb) usage series."""
    out = []
    for t, vcpu, ram_gb in usage_series:
        row = {"t": t}
        for tier, model in models.items():
            row[tier] = model.predict(vcpu, ram_gb)
        out.append(row)
    return out


def tier_variation(models: dict[str, TierCostModel], vcpu: float,
                   ram_gb: float, high: str = "Edge",
                   low: str = "Central") -> float:
    """Percent cost difference between two tiers at an operating point."""
    high_cost = models[high].predict(vcpu, ram_gb)
    low_cost = models[low].predict(vcpu, ram_gb)
    return (high_cost - low_cost) / low_cost * 100.0


# Rounded reference equations for the default price table, kept alongside
# the exact fits for comparison. Edge and Metropolitan agree with the
# exact fit to two decimals; the Central entry carries a unit RAM
# coefficient that an exact three-point fit does not reproduce (the fit
# gives a RAM coefficient of ~0), so both variants are exposed.
ROUNDED_REFERENCE_MODELS = {
    "Edge": TierCostModel("Edge", 39.42, 3.65, -22.56),
    "Metropolitan": TierCostModel("Metropolitan", 33.58, -1.46, 6.63),
    "Central": TierCostModel("Central", 15.19, 1.0, 15.99),
}
