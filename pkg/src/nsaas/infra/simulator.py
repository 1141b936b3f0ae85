"""Simulated container platform and transport controller state.

Workloads, isolation domains, flow rules, the subscriber data store and
the autoscaler all live here. Readiness is event-driven over the shared
virtual clock; every mutation can emit a structured event through the
engine-provided callback so runs are fully replayable.
"""

from __future__ import annotations

import math
import zlib
from collections import deque
from dataclasses import dataclass, field

from ..digest import digest_obj
from ..errors import DomainDeployFailure, QuotaExceeded
from .clock import VirtualClock
from .topology import FlowRule, FlowTable, Topology

PLATFORM_OWNER = "platform"


@dataclass
class SimWorkload:
    id: str
    role: str
    isolation_domain: str
    site: str
    replicas: int
    vcpu_request: float
    ram_mb_request: float
    vcpu_usage: float
    ram_gb_usage: float
    ready: bool = False
    generation: int = 1
    endpoints: dict = field(default_factory=dict)
    owners: set = field(default_factory=set)
    utilization_window: deque = field(default_factory=lambda: deque(maxlen=3))

    def spec_key(self) -> tuple:
        return (self.role, self.replicas, self.vcpu_request, self.ram_mb_request)

    def usage(self, t: float, wobble_pct: float, period_s: float) -> tuple[float, float]:
        if not self.ready:
            return (0.0, 0.0)
        factor = 1.0
        if wobble_pct > 0:
            phase = (zlib.crc32(self.id.encode()) % 1000) / 1000.0
            factor = 1.0 + wobble_pct * math.sin(2 * math.pi * (t / period_s + phase))
        return (self.vcpu_usage * self.replicas * factor,
                self.ram_gb_usage * self.replicas * factor)


class InfraSimulator:
    def __init__(self, clock: VirtualClock, topology_spec: dict,
                 nf_profiles: dict, autoscaler_cfg: dict, emit=None):
        self.clock = clock
        self.topology = Topology(topology_spec)
        self.flows = FlowTable()
        self.profiles = nf_profiles["roles"]
        self.baseline = nf_profiles.get("platform_baseline",
                                        {"vcpu": 0.0, "ram_gb": 0.0})
        self.wobble_pct = float(nf_profiles.get("usage_wobble_pct", 0.0))
        self.wobble_period = float(nf_profiles.get("usage_wobble_period_s", 20.0))
        self.autoscaler_cfg = autoscaler_cfg
        self._emit = emit or (lambda kind, payload, nsi=None, substep=None: None)

        self.domains: set[str] = set()
        self.workloads: dict[str, SimWorkload] = {}
        self._by_domain_role: dict[tuple[str, str], str] = {}
        self._next_wl = 0
        self._udr: dict[str, dict[str, dict]] = {}
        self._failure_points: dict[str, int] = {}

    # -- isolation domains ---------------------------------------------------

    def create_isolation_domain(self, name: str) -> None:
        self.domains.add(name)

    # -- workloads -------------------------------------------------------

    def _profile(self, role: str) -> dict:
        try:
            return self.profiles[role]
        except KeyError:
            raise KeyError(f"no resource profile for NF role {role!r}") from None

    def _site_headroom(self, site: str) -> tuple[float, float]:
        quota = self.topology.sites.get(site)
        if quota is None:
            raise KeyError(f"unknown site {site!r}")
        used_cpu = sum(w.vcpu_request * w.replicas
                       for w in self.workloads.values() if w.site == site)
        used_ram = sum(w.ram_mb_request * w.replicas / 1024.0
                       for w in self.workloads.values() if w.site == site)
        return (quota["vcpu_quota"] - used_cpu, quota["ram_gb_quota"] - used_ram)

    def deploy_workload(self, isolation_domain: str, role: str, site: str,
                        owner: str, replicas: int = 1, delay: float = 0.0,
                        profile_override: dict | None = None) -> SimWorkload:
        """Create (or idempotently return) a workload. Readiness fires after
        ``delay`` seconds of pull/apply/probe time."""
        self.domains.add(isolation_domain)
        existing_id = self._by_domain_role.get((isolation_domain, role))
        profile = dict(self._profile(role))
        if profile_override:
            profile.update(profile_override)
        if existing_id:
            existing = self.workloads[existing_id]
            if existing.spec_key() == (role, replicas,
                                       profile["vcpu_request"],
                                       profile["ram_mb_request"]):
                existing.owners.add(owner)
                return existing

        cpu_need = profile["vcpu_request"] * replicas
        ram_need = profile["ram_mb_request"] * replicas / 1024.0
        headroom_cpu, headroom_ram = self._site_headroom(site)
        if cpu_need > headroom_cpu or ram_need > headroom_ram:
            raise QuotaExceeded(
                f"site {site} cannot host {role} x{replicas}",
                site=site, role=role)

        self._next_wl += 1
        workload = SimWorkload(
            id=f"wl-{self._next_wl}",
            role=role,
            isolation_domain=isolation_domain,
            site=site,
            replicas=replicas,
            vcpu_request=profile["vcpu_request"],
            ram_mb_request=profile["ram_mb_request"],
            vcpu_usage=profile["vcpu_usage"],
            ram_gb_usage=profile["ram_gb_usage"],
            owners={owner},
        )
        workload.utilization_window = deque(
            maxlen=int(self.autoscaler_cfg.get("window", 3)))
        self.workloads[workload.id] = workload
        self._by_domain_role[(isolation_domain, role)] = workload.id

        def _ready(wl=workload):
            wl.ready = True
            wl.endpoints = self._endpoints_for(wl)
            self._emit("workload_ready", {"workload": wl.id, "role": wl.role,
                                          "domain": wl.isolation_domain})

        if delay <= 0:
            _ready()
        else:
            self.clock.schedule(delay, _ready)
        return workload

    def _endpoints_for(self, workload: SimWorkload) -> dict:
        index = int(workload.id.split("-")[1])
        if workload.role == "amf":
            return {"n2": f"10.0.{index % 250}.{workload.generation}:38412"}
        if workload.role in ("upf", "upf_lite"):
            return {"n3": f"10.1.{index % 250}.{workload.generation}:2152"}
        if workload.role == "n3iwf":
            return {"ike": f"10.2.{index % 250}.{workload.generation}:500"}
        return {}

    def apply_release(self, isolation_domain: str, roles: list[tuple[str, int]],
                      site: str, owner: str, delays: list[float] | None = None,
                      scenario_latencies: dict | None = None) -> list[SimWorkload]:
        """Apply a bundle of workloads sequentially. Per-workload delays
        default to the scenario latency table entries for the role's
        deployment substep (image pull + apply + readiness probe)."""
        if delays is None:
            table = scenario_latencies or {}
            delays = [table.get(ROLE_DEPLOY_SUBSTEP.get(role, ""), 0.0)
                      for role, _ in roles]
        out = []
        offset = 0.0
        for (role, replicas), delay in zip(roles, delays):
            offset += delay
            out.append(self.deploy_workload(isolation_domain, role, site, owner,
                                            replicas=replicas, delay=offset))
        return out

    def workload_by_role(self, isolation_domain: str, role: str) -> SimWorkload | None:
        wl_id = self._by_domain_role.get((isolation_domain, role))
        return self.workloads.get(wl_id) if wl_id else None

    def release_owner(self, owner: str) -> list[str]:
        """Drop ``owner`` from every workload; workloads left with no owner
        are torn down. Returns removed workload ids."""
        removed = []
        for wl_id in list(self.workloads):
            workload = self.workloads[wl_id]
            workload.owners.discard(owner)
            if not workload.owners:
                removed.append(wl_id)
                del self.workloads[wl_id]
                del self._by_domain_role[(workload.isolation_domain, workload.role)]
                self._emit("workload_removed", {"workload": wl_id,
                                                "role": workload.role})
        return removed

    def set_workload_down(self, workload_id: str) -> None:
        self.workloads[workload_id].ready = False

    def replace_workload(self, workload_id: str, delay: float,
                         profile_override: dict | None = None,
                         replicas: int | None = None) -> None:
        """Delete-then-create in place: the workload goes not-ready now and
        a new generation comes up after ``delay`` seconds."""
        workload = self.workloads[workload_id]
        workload.ready = False
        workload.generation += 1
        if profile_override:
            for key in ("vcpu_request", "ram_mb_request"):
                if key in profile_override:
                    setattr(workload, key, float(profile_override[key]))
            if "vcpu_usage" in profile_override:
                workload.vcpu_usage = float(profile_override["vcpu_usage"])
            if "ram_gb_usage" in profile_override:
                workload.ram_gb_usage = float(profile_override["ram_gb_usage"])
        if replicas is not None:
            workload.replicas = int(replicas)

        def _ready(wl=workload):
            wl.ready = True
            wl.endpoints = self._endpoints_for(wl)
            self._emit("workload_ready", {"workload": wl.id, "role": wl.role,
                                          "generation": wl.generation,
                                          "domain": wl.isolation_domain})

        if delay <= 0:
            _ready()
        else:
            self.clock.schedule(delay, _ready)

    # -- transport -------------------------------------------------------

    def compute_path(self, src: str, dst: str, policy: str) -> list[str]:
        return self.topology.compute_path(src, dst, policy)

    def install_slice_routes(self, rules: list[FlowRule], owner: str) -> list[str]:
        return self.flows.install(rules, owner)

    def withdraw_routes(self, owner: str) -> list[str]:
        return self.flows.remove_owner(owner)

    # -- subscriber store --------------------------------------------------

    def udr_add_subscriber(self, snssai_key: str, ue_id: str, t: float) -> None:
        self._udr.setdefault(snssai_key, {})[ue_id] = {"ue": ue_id, "since": t}

    def udr_remove_subscriber(self, snssai_key: str, ue_id: str) -> None:
        self._udr.get(snssai_key, {}).pop(ue_id, None)

    def udr_count(self, snssai_key: str) -> int:
        return len(self._udr.get(snssai_key, {}))

    def udr_digest(self) -> str:
        canonical = {k: dict(sorted(v.items())) for k, v in sorted(self._udr.items())}
        return digest_obj(canonical)

    # -- resource accounting ---------------------------------------------

    def total_usage(self, t: float | None = None) -> tuple[float, float]:
        t = self.clock.now if t is None else t
        vcpu = float(self.baseline["vcpu"])
        ram = float(self.baseline["ram_gb"])
        for workload in self.workloads.values():
            c, r = workload.usage(t, self.wobble_pct, self.wobble_period)
            vcpu += c
            ram += r
        return (vcpu, ram)

    def usage_of(self, workload_ids: set[str] | list[str],
                 t: float | None = None) -> tuple[float, float]:
        t = self.clock.now if t is None else t
        vcpu = ram = 0.0
        for wl_id in workload_ids:
            workload = self.workloads.get(wl_id)
            if workload is None:
                continue
            c, r = workload.usage(t, self.wobble_pct, self.wobble_period)
            vcpu += c
            ram += r
        return (vcpu, ram)

    def live_workload_ids(self, exclude_platform: bool = True) -> set[str]:
        out = set()
        for workload in self.workloads.values():
            if exclude_platform and PLATFORM_OWNER in workload.owners:
                continue
            out.add(workload.id)
        return out

    # -- autoscaler --------------------------------------------------------

    def observe_utilization(self, workload_id: str, utilization: float) -> None:
        self.workloads[workload_id].utilization_window.append(float(utilization))

    def autoscale_tick(self) -> dict[str, int]:
        """One reconciliation pass: each workload whose utilization window
        is full and sustained out of band changes by exactly one replica."""
        up = float(self.autoscaler_cfg.get("scale_up", 0.80))
        down = float(self.autoscaler_cfg.get("scale_down", 0.20))
        floor = int(self.autoscaler_cfg.get("min_replicas", 1))
        changes: dict[str, int] = {}
        for workload in self.workloads.values():
            window = workload.utilization_window
            if len(window) < window.maxlen:
                continue
            avg = sum(window) / len(window)
            delta = 0
            if avg >= up:
                delta = 1
            elif avg <= down and workload.replicas > floor:
                delta = -1
            if delta:
                workload.replicas += delta
                window.clear()
                changes[workload.id] = delta
                self._emit("autoscale", {"workload": workload.id,
                                         "delta": delta,
                                         "replicas": workload.replicas})
        return changes

    # -- failure injection -------------------------------------------------

    def arm_failure(self, substep_id: str, count: int = 1) -> None:
        self._failure_points[substep_id] = count

    def check_failure_point(self, domain: str, substep_id: str) -> None:
        remaining = self._failure_points.get(substep_id, 0)
        if remaining > 0:
            self._failure_points[substep_id] = remaining - 1
            raise DomainDeployFailure(domain, substep_id,
                                      f"injected failure at {substep_id}")


# Role -> creation substep whose latency covers pull/apply/probe.
ROLE_DEPLOY_SUBSTEP = {
    "amf": "2.2",
    "smf": "2.3",
    "upf": "2.4",
    "upf_lite": "2.4",
    "gnb": "3.2",
    "n3iwf": "3.2",
}
