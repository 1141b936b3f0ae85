"""Closed-loop quality assurance: telemetry normalization, UE attach and
registration simulation, availability tracking, admission control and
rule-based corrective actions.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from .errors import NoCapacity
from .model import NSI, NsiState, ScenarioClass


@dataclass(frozen=True)
class KpiRecord:
    t: float
    snssai: str
    metric: str
    value: float
    domain: str

    def to_dict(self) -> dict:
        return {"t": self.t, "snssai": self.snssai, "metric": self.metric,
                "value": self.value, "domain": self.domain}


class TelemetryStream:
    """Normalized, slice-enriched KPI stream.

    Records without a slice identifier are rejected at the enrichment
    stage; aggregate statistics drop samples beyond ``outlier_sigma``
    standard deviations while the raw log keeps everything.
    """

    def __init__(self, outlier_sigma: float = 3.0):
        self.outlier_sigma = outlier_sigma
        self.records: list[KpiRecord] = []
        self.rejected = 0

    def ingest(self, record: KpiRecord) -> bool:
        if not record.snssai:
            self.rejected += 1
            return False
        self.records.append(record)
        return True

    def series(self, metric: str, snssai: str | None = None) -> list[KpiRecord]:
        return [r for r in self.records if r.metric == metric
                and (snssai is None or r.snssai == snssai)]

    def aggregate(self, metric: str, snssai: str | None = None) -> dict:
        values = np.array([r.value for r in self.series(metric, snssai)])
        if values.size == 0:
            return {"count": 0, "mean": float("nan"), "median": float("nan")}
        mean, std = float(values.mean()), float(values.std())
        if std > 0:
            kept = values[np.abs(values - mean) <= self.outlier_sigma * std]
        else:
            kept = values
        return {
            "count": int(kept.size),
            "discarded": int(values.size - kept.size),
            "mean": float(kept.mean()),
            "median": float(np.median(kept)),
            "p95": float(np.percentile(kept, 95)),
        }


class AvailabilityTracker:
    """Binary availability series per slice: 1 operable, 0 outage."""

    def __init__(self, start_t: float, initial: int = 1):
        self.transitions: list[tuple[float, int]] = [(start_t, initial)]

    def mark(self, t: float, value: int) -> None:
        if self.transitions and self.transitions[-1][1] == value:
            return
        self.transitions.append((t, value))

    def value_at(self, t: float) -> int:
        value = self.transitions[0][1]
        for when, v in self.transitions:
            if when <= t:
                value = v
            else:
                break
        return value

    def sample(self, t0: float, t1: float, period: float) -> list[tuple[float, int]]:
        out = []
        steps = int(round((t1 - t0) / period))
        for i in range(steps + 1):
            t = t0 + i * period
            out.append((round(t, 9), self.value_at(t)))
        return out

    def zero_runs(self, until: float) -> list[tuple[float, float]]:
        """Closed outage intervals [start, end) up to ``until``."""
        runs = []
        open_at = None
        for when, value in self.transitions:
            if value == 0 and open_at is None:
                open_at = when
            elif value == 1 and open_at is not None:
                runs.append((open_at, when))
                open_at = None
        if open_at is not None:
            runs.append((open_at, until))
        return runs

    def fraction(self, t0: float, t1: float) -> float:
        """Integral of the series over [t0, t1] divided by the duration."""
        if t1 <= t0:
            return 1.0
        total = 0.0
        points = [(t0, self.value_at(t0))] + \
            [(t, v) for t, v in self.transitions if t0 < t < t1] + [(t1, None)]
        for (ta, va), (tb, _) in zip(points, points[1:]):
            total += va * (tb - ta)
        return total / (t1 - t0)


@dataclass
class AttachModel:
    """Per-scenario registration latency components, milliseconds."""

    base_path_ms: float
    control_plane_ms: float
    queue_ms_per_ue: float = 0.0
    backoff_prob: float = 0.0
    backoff_mean_ms: float = 0.0
    tunnel_ms: float = 0.0

    def __post_init__(self):
        for name in ("base_path_ms", "control_plane_ms", "queue_ms_per_ue",
                     "backoff_prob", "backoff_mean_ms", "tunnel_ms"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


class AttachSimulator:
    """Computes UE attach/registration latency from the scenario model,
    current load, and post-outage recovery surges."""

    def __init__(self, models: dict[str, dict], noise_pct: float,
                 recovery_surge_ms: float, recovery_tau_s: float,
                 rng: random.Random):
        self.models = {k: AttachModel(**v) for k, v in models.items()}
        self.noise_pct = noise_pct
        self.recovery_surge_ms = recovery_surge_ms
        self.recovery_tau_s = recovery_tau_s
        self.rng = rng
        self.last_recovery: dict[str, float] = {}   # nsi id -> t of AMF return

    def note_recovery(self, nsi_id: str, t: float) -> None:
        self.last_recovery[nsi_id] = t

    def latency_ms(self, scenario: ScenarioClass, t: float,
                   concurrent_shared_ues: int = 0,
                   nsi_id: str | None = None) -> float:
        model = self.models[scenario.value]
        latency = model.base_path_ms + model.control_plane_ms
        latency += model.queue_ms_per_ue * concurrent_shared_ues
        if model.backoff_prob > 0 and self.rng.random() < model.backoff_prob:
            latency += self.rng.expovariate(1.0 / model.backoff_mean_ms)
        if self.noise_pct > 0:
            latency *= 1.0 + self.rng.uniform(-self.noise_pct, self.noise_pct)
        if nsi_id is not None and nsi_id in self.last_recovery:
            dt = t - self.last_recovery[nsi_id]
            if dt >= 0:
                latency += self.recovery_surge_ms * math.exp(
                    -dt / self.recovery_tau_s)
        latency += model.tunnel_ms
        return latency


class AdmissionController:
    """Caps concurrent UE connections per slice and redirects overflow
    to the next slice of the same scenario (slice transition)."""

    def __init__(self, cap: int, emit=None):
        self.cap = cap
        self.counts: dict[str, int] = {}
        self.ue_slice: dict[str, str] = {}
        self._transitioned: set[tuple[str, str]] = set()
        self._emit = emit or (lambda kind, payload, nsi=None, substep=None: None)

    def register_slice(self, nsi_id: str) -> None:
        self.counts.setdefault(nsi_id, 0)

    def admit(self, ue_id: str, candidates: list[str], t: float) -> str:
        """Admit to the first candidate below cap, in activation order."""
        for index, nsi_id in enumerate(candidates):
            count = self.counts.setdefault(nsi_id, 0)
            if count < self.cap:
                if index > 0:
                    edge = (candidates[index - 1], nsi_id)
                    if edge not in self._transitioned:
                        self._transitioned.add(edge)
                        self._emit("slice_transition",
                                   {"from": edge[0], "to": edge[1], "t": t},
                                   nsi=nsi_id)
                self.counts[nsi_id] = count + 1
                self.ue_slice[ue_id] = nsi_id
                return nsi_id
        raise NoCapacity(f"all {len(candidates)} slices at cap {self.cap}",
                         cap=self.cap)

    def release(self, ue_id: str) -> str | None:
        nsi_id = self.ue_slice.pop(ue_id, None)
        if nsi_id is not None:
            self.counts[nsi_id] = max(0, self.counts[nsi_id] - 1)
        return nsi_id

    def count(self, nsi_id: str) -> int:
        return self.counts.get(nsi_id, 0)


@dataclass(frozen=True)
class AssuranceRule:
    metric: str
    threshold: float
    direction: str              # "above" breaches when value > threshold
    sustain_s: float
    action: str                 # scale | replace_amf | redirect_admission | alert

    VALID_ACTIONS = ("scale", "replace_amf", "redirect_admission", "alert")

    def __post_init__(self):
        if self.sustain_s <= 0:
            raise ValueError("sustain window must be > 0")
        if self.direction not in ("above", "below"):
            raise ValueError("direction must be 'above' or 'below'")
        if self.action not in self.VALID_ACTIONS:
            raise ValueError(f"unknown corrective action {self.action!r}")

    def breached(self, value: float) -> bool:
        return value > self.threshold if self.direction == "above" \
            else value < self.threshold


@dataclass
class _EpisodeState:
    breach_since: float | None = None
    clear_since: float | None = None
    active: bool = False


class ClosedLoop:
    """Threshold rule evaluation with episode deduplication.

    A breach sustained for at least the rule's window dispatches exactly
    one corrective action; the episode stays latched until the metric is
    back in band for a full window, so overlapping breaches cannot storm
    the orchestrator. Every action is logged immutably with before and
    after metric values.
    """

    def __init__(self, rules: list[AssuranceRule], dispatch, emit=None):
        self.rules = rules
        self.dispatch = dispatch
        self.action_log: list[dict] = []
        self._states: dict[tuple[str, str], _EpisodeState] = {}
        self._emit = emit or (lambda kind, payload, nsi=None, substep=None: None)

    def observe(self, t: float, target: str, metric: str, value: float) -> None:
        for rule in self.rules:
            if rule.metric != metric:
                continue
            state = self._states.setdefault((target, rule.action),
                                            _EpisodeState())
            if rule.breached(value):
                state.clear_since = None
                if state.breach_since is None:
                    state.breach_since = t
                sustained = t - state.breach_since >= rule.sustain_s
                if sustained and not state.active:
                    state.active = True
                    outcome = self.dispatch(rule.action, target, value)
                    entry = {"t": t, "target": target, "metric": metric,
                             "action": rule.action, "before": value,
                             "after": outcome}
                    self.action_log.append(entry)
                    self._emit("corrective_action", entry, nsi=target)
            else:
                state.breach_since = None
                if state.active:
                    if state.clear_since is None:
                        state.clear_since = t
                    if t - state.clear_since >= rule.sustain_s:
                        state.active = False
                        state.clear_since = None


def latency_medians(samples: dict[str, list[float]]) -> dict[str, float]:
    return {k: float(np.median(v)) for k, v in samples.items()}


def resource_attribution(infra, nsi: NSI, t: float) -> tuple[float, float]:
    """Per-slice usage view: the slice's own workloads plus the shared
    control-plane footprint it depends on."""
    ids: set[str] = set()
    for nssi in nsi.nssis.values():
        ids.update(nssi.resource_ids)
        ids.update(nssi.shared_refs)
    return infra.usage_of(ids, t)


def active_slices(nsis: dict[str, NSI],
                  scenario: ScenarioClass | None = None) -> list[NSI]:
    """Slices eligible to serve traffic, in activation order. A slice under
    reconfiguration still serves (attaches fail only while its AMF is down)."""
    serving = (NsiState.ACTIVE, NsiState.RECONFIGURING)
    out = [n for n in nsis.values() if n.state in serving
           and (scenario is None or n.scenario == scenario)]
    out.sort(key=lambda n: (n.activated_at if n.activated_at is not None else 0.0,
                            n.id))
    return out
