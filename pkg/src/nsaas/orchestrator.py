"""Hierarchical lifecycle engine executing slice creation, reconfiguration
and decommissioning over the simulated infrastructure.

Deployment follows the CN -> RAN -> TN ordering: the core comes up first
so the AMF endpoint can be published, the RAN attaches to that endpoint,
and only then are the slice-aware transport routes programmed. Every
state change is committed to the inventory through idempotent, optimistic
transactions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .config import EngineConfig
from .errors import (
    ConcurrentModification,
    DomainDeployFailure,
    NotFound,
    NsaasError,
    PoolExhausted,
    UnknownScenario,
)
from .infra import InfraSimulator, build_route_rules
from .infra.clock import VirtualClock
from .model import (
    NSI,
    NSSI,
    SD_SPACE,
    SST_BY_SCENARIO,
    Domain,
    NsiState,
    NssiState,
    ScenarioClass,
    SNssai,
)
from .onboard import OnboardResult
from .store import Inventory

SHARED_CORE_DOMAIN = "shared-core"

# CN control-plane substeps 2.5-2.8 each configure one shared NF.
CONFIG_SUBSTEP_ROLE = {"2.5": "nrf", "2.6": "ausf", "2.7": "udr", "2.8": "pcf"}
DEPLOY_SUBSTEP_ROLE = {"2.2": "amf", "2.3": "smf", "2.4": "upf"}

EFFICIENCY_EPSILON = 1e-3


class SnssaiAllocator:
    """Sequential slice-differentiator allocation per service type."""

    def __init__(self, pool_size: int = SD_SPACE - 1):
        self.pool_size = pool_size
        self._next: dict[int, int] = {}
        self._issued: set[tuple[int, int]] = set()

    def allocate(self, scenario: ScenarioClass) -> SNssai:
        sst = SST_BY_SCENARIO[scenario]
        sd = self._next.get(sst, 1)
        if sd > self.pool_size:
            raise PoolExhausted(f"sd pool exhausted for sst={sst}",
                                sst=sst, pool_size=self.pool_size)
        self._next[sst] = sd + 1
        snssai = SNssai(sst=sst, sd=sd)
        self._issued.add((sst, sd))
        return snssai


@dataclass(frozen=True)
class Substep:
    id: str
    name: str
    step: int
    domain: str            # cn | ran | tn | nsmf
    kind: str
    action_count: int
    expected_s: float
    depends_on: str | None


@dataclass
class DeploymentPlan:
    nsi_id: str
    scenario: ScenarioClass
    substeps: list[Substep]
    path: list[str]
    vlan: int

    def total_expected_s(self) -> float:
        return sum(s.expected_s for s in self.substeps)

    def step_ids(self, step: int) -> list[str]:
        return [s.id for s in self.substeps if s.step == step]

    def validate(self) -> None:
        ids = [s.id for s in self.substeps]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate substep ids")
        seen: set[str] = set()
        for sub in self.substeps:
            if sub.depends_on is not None and sub.depends_on not in seen:
                raise ValueError(f"substep {sub.id} depends on unseen "
                                 f"{sub.depends_on}")
            seen.add(sub.id)
        first_ran = next((i for i, s in enumerate(self.substeps)
                          if s.domain == "ran"), len(self.substeps))
        first_tn = next((i for i, s in enumerate(self.substeps)
                         if s.domain == "tn"), len(self.substeps))
        last_cn = max((i for i, s in enumerate(self.substeps)
                       if s.domain == "cn"), default=-1)
        last_ran = max((i for i, s in enumerate(self.substeps)
                        if s.domain == "ran"), default=-1)
        if not (last_cn < first_ran and last_ran < first_tn):
            raise ValueError("domain ordering violated in plan")
        expected = 18 + 2 * len(self.path)
        if len(self.substeps) != expected:
            raise ValueError(f"plan has {len(self.substeps)} substeps, "
                             f"expected {expected}")


def build_deployment_plan(nsi_id: str, scenario: ScenarioClass,
                          descriptors: dict, config: EngineConfig,
                          path: list[str]) -> DeploymentPlan:
    """Instantiate the substep catalog for a scenario.

    Steps: 1 preparation (identifier + CN batch dispatch), 2 CN control
    plane (ten substeps ending in endpoint publication), 3 RAN, 4 one
    route install per switch per direction, 5 verification, 6 activation.
    Reused control-plane substeps carry zero expected latency.
    """
    try:
        table = config.scenario_latencies(scenario.value)
    except KeyError:
        raise UnknownScenario(f"no substep catalog for {scenario.value}") from None

    cn_nfs = {nf["role"]: nf for nf in descriptors["cn"]["nfs"]}
    dedicated_cn = [nf for nf in descriptors["cn"]["nfs"]
                    if nf["sharing"] == "dedicated"]
    non3gpp = scenario == ScenarioClass.NON3GPP

    def _cn_kind(role: str) -> str:
        nf = cn_nfs.get(role) or (cn_nfs.get("upf_lite") if role == "upf" else None)
        if nf is not None and nf["sharing"] == "dedicated":
            return "deploy"
        return "reuse"

    subs: list[Substep] = []
    prev: str | None = None

    def add(sid: str, name: str, step: int, domain: str, kind: str,
            actions: int, expected: float):
        nonlocal prev
        subs.append(Substep(id=sid, name=name, step=step, domain=domain,
                            kind=kind, action_count=actions,
                            expected_s=expected, depends_on=prev))
        prev = sid

    add("1.1", "reserve-snssai", 1, "nsmf", "reserve", 2, table["1.1"])
    add("1.2", "dispatch-cn-batch", 1, "cn", "dispatch",
        max(1, len(dedicated_cn)), table["1.2"])

    add("2.1", "cn-isolation-domain", 2, "cn",
        "create" if dedicated_cn else "reuse", 1, table["2.1"])
    for sid, role in DEPLOY_SUBSTEP_ROLE.items():
        kind = _cn_kind(role)
        add(sid, f"{'deploy' if kind == 'deploy' else 'reuse'}-{role}", 2, "cn",
            kind, 2 if kind == "deploy" else 1, table[sid])
    for sid, role in CONFIG_SUBSTEP_ROLE.items():
        kind = "config" if dedicated_cn else "reuse"
        add(sid, f"configure-{role}", 2, "cn", kind, 1, table[sid])
    add("2.9", "cn-readiness-check", 2, "cn",
        "check" if dedicated_cn else "reuse", 1, table["2.9"])
    add("2.10", "publish-amf-endpoint", 2, "cn", "publish", 2, table["2.10"])

    add("3.1", "render-ran-config", 3, "ran", "config", 1, table["3.1"])
    if non3gpp:
        add("3.2", "deploy-n3iwf", 3, "ran", "deploy", 2, table["3.2"])
        add("3.3", "establish-ipsec-tunnel", 3, "ran", "tunnel", 1, table["3.3"])
    else:
        add("3.2", "deploy-gnb", 3, "ran", "deploy", 2, table["3.2"])
        add("3.3", "ng-setup-attach", 3, "ran", "attach", 1, table["3.3"])
    add("3.4", "ran-readiness-check", 3, "ran", "check", 1, table["3.4"])

    rule_count = 2 * len(path)
    for k in range(1, rule_count + 1):
        add(f"4.{k}", f"install-route-{k}", 4, "tn", "install", 1,
            config.tn_rule_install_s)

    add("5.1", "e2e-verification", 5, "nsmf", "verify", 1, table["5.1"])
    add("6.1", "activation-handshake", 6, "nsmf", "activate", 2, table["6.1"])

    plan = DeploymentPlan(nsi_id=nsi_id, scenario=scenario, substeps=subs,
                          path=path, vlan=descriptors["tn"]["vlan"])
    plan.validate()
    return plan


@dataclass
class SubstepRecord:
    substep: str
    step: int
    domain: str
    kind: str
    actions: int
    start: float
    end: float

    @property
    def duration(self) -> float:
        return self.end - self.start


@dataclass
class DeploymentReport:
    nsi_id: str
    scenario: ScenarioClass
    rows: list[SubstepRecord] = field(default_factory=list)

    def grand_total_s(self) -> float:
        if not self.rows:
            return 0.0
        return self.rows[-1].end - self.rows[0].start

    def domain_totals(self) -> dict[str, float]:
        out: dict[str, float] = {}
        for row in self.rows:
            out[row.domain] = out.get(row.domain, 0.0) + row.duration
        return out

    def step_totals(self) -> dict[int, float]:
        out: dict[int, float] = {}
        for row in self.rows:
            out[row.step] = out.get(row.step, 0.0) + row.duration
        return out

    def total_actions(self) -> int:
        return sum(row.actions for row in self.rows)


def step_efficiency(report: DeploymentReport,
                    epsilon: float = EFFICIENCY_EPSILON) -> dict:
    """Actions per second per substep, per step group and for the plan.

    Zero-duration reuse substeps are guarded by ``epsilon`` and flagged so
    downstream consumers can tell real throughput from reuse shortcuts.
    """
    substeps = {}
    for row in report.rows:
        substeps[row.substep] = {
            "actions": row.actions,
            "duration_s": row.duration,
            "actions_per_s": row.actions / max(row.duration, epsilon),
            "reuse": row.duration < epsilon,
        }
    steps = {}
    for step in sorted({row.step for row in report.rows}):
        rows = [r for r in report.rows if r.step == step]
        actions = sum(r.actions for r in rows)
        duration = sum(r.duration for r in rows)
        steps[step] = {
            "actions": actions,
            "duration_s": duration,
            "actions_per_s": actions / max(duration, epsilon),
        }
    total_actions = report.total_actions()
    total_duration = sum(r.duration for r in report.rows)
    return {
        "substeps": substeps,
        "steps": steps,
        "plan": {
            "actions": total_actions,
            "duration_s": total_duration,
            "actions_per_s": total_actions / max(total_duration, epsilon),
        },
    }


class Orchestrator:
    """Drives per-slice substep chains over the shared virtual clock.

    Distinct slices progress concurrently; each slice's own chain is
    strictly ordered. External effects go through the infrastructure
    simulator and the inventory, which provide their own synchronization.
    """

    def __init__(self, clock: VirtualClock, infra: InfraSimulator,
                 inventory: Inventory, config: EngineConfig, emit,
                 rng: random.Random):
        self.clock = clock
        self.infra = infra
        self.inventory = inventory
        self.config = config
        self.emit = emit
        self.rng = rng
        self.allocator = SnssaiAllocator()
        self.nsis: dict[str, NSI] = {}
        self.plans: dict[str, DeploymentPlan] = {}
        self.reports: dict[str, DeploymentReport] = {}
        self.onboarded: dict[str, OnboardResult] = {}
        self.amf_ref: dict[str, str] = {}     # nsi id -> amf workload id
        self._reconfiguring: set[str] = set()
        self._rules_cache: dict[str, list] = {}
        self._next_nsi = 0

    # -- helpers -----------------------------------------------------------

    def _new_nsi_id(self) -> str:
        self._next_nsi += 1
        return f"nsi-{self._next_nsi}"

    def _commit(self, nsi: NSI) -> None:
        expected = self.inventory.sequence(nsi.id)
        self.inventory.commit_state(nsi.id, nsi.snapshot(), expected)

    def _namespace(self, nsi: NSI) -> str:
        cn_policy = self.onboarded[nsi.id].nst.descriptors["cn"]["sharing_policy"]
        if cn_policy == "reuse":
            return SHARED_CORE_DOMAIN
        return f"slice-{nsi.id}"

    def _latency(self, expected: float) -> float:
        jitter = float(self.config.latency.get("jitter_pct", 0.0))
        if jitter <= 0 or expected <= 0:
            return expected
        return expected * (1.0 + jitter * self.rng.uniform(-1.0, 1.0))

    # -- creation -----------------------------------------------------------

    def begin_creation(self, result: OnboardResult) -> NSI:
        """Allocate identity, build the plan and schedule the substep chain
        starting at the current virtual time."""
        nsi_id = self._new_nsi_id()
        snssai = self.allocator.allocate(result.scenario)
        nsi = NSI(id=nsi_id, snssai=snssai, tenant=result.request.tenant,
                  scenario=result.scenario, sla_targets=result.sla_targets,
                  nst_ref=(result.nst.id, result.nst.version),
                  created_at=self.clock.now)
        nsi.nssis = {
            Domain.CN: NSSI(domain=Domain.CN),
            Domain.RAN: NSSI(domain=Domain.RAN),
            Domain.TN: NSSI(domain=Domain.TN),
        }
        self.nsis[nsi_id] = nsi
        self.onboarded[nsi_id] = result

        tn = result.nst.descriptors["tn"]
        path = self.infra.compute_path(tn["src"], tn["dst"], tn["policy"])
        plan = build_deployment_plan(nsi_id, result.scenario,
                                     result.nst.descriptors, self.config, path)
        self.plans[nsi_id] = plan
        self.reports[nsi_id] = DeploymentReport(nsi_id=nsi_id,
                                                scenario=result.scenario)
        nsi.vlan = plan.vlan
        self._commit(nsi)
        self.emit("nsi_requested", {"scenario": result.scenario.value,
                                    "snssai": snssai.key()}, nsi=nsi_id)
        self._rules_cache[nsi_id] = build_route_rules(
            path, plan.vlan, tn["src"], tn["dst"],
            priority=200 if tn.get("priority") == "high" else 100)
        self._schedule_substep(nsi, plan, 0)
        return nsi

    def _schedule_substep(self, nsi: NSI, plan: DeploymentPlan, index: int) -> None:
        sub = plan.substeps[index]

        def start():
            if index == 0 and nsi.state == NsiState.REQUESTED:
                nsi.transition(NsiState.DEPLOYING)
                self._commit(nsi)
            started = self.clock.now
            self.emit("substep_start", {"name": sub.name, "kind": sub.kind},
                      nsi=nsi.id, substep=sub.id)

            def end():
                try:
                    self.infra.check_failure_point(sub.domain, sub.id)
                    self._execute_creation_effect(nsi, plan, sub)
                except NsaasError as exc:
                    self._fail_creation(nsi, sub, started, exc)
                    return
                self.reports[nsi.id].rows.append(SubstepRecord(
                    substep=sub.id, step=sub.step, domain=sub.domain,
                    kind=sub.kind, actions=sub.action_count,
                    start=started, end=self.clock.now))
                self.emit("substep_end",
                          {"name": sub.name, "kind": sub.kind,
                           "actions": sub.action_count,
                           "duration_s": round(self.clock.now - started, 9)},
                          nsi=nsi.id, substep=sub.id)
                if index + 1 < len(plan.substeps):
                    self._schedule_substep(nsi, plan, index + 1)

            self.clock.schedule(self._latency(sub.expected_s), end)

        self.clock.schedule(0.0, start)

    def _execute_creation_effect(self, nsi: NSI, plan: DeploymentPlan,
                                 sub: Substep) -> None:
        descriptors = self.onboarded[nsi.id].nst.descriptors
        cn_nssi = nsi.nssis[Domain.CN]
        ran_nssi = nsi.nssis[Domain.RAN]
        tn_nssi = nsi.nssis[Domain.TN]
        namespace = self._namespace(nsi)

        if sub.id == "1.1":
            self.emit("snssai_reserved", {"snssai": nsi.snssai.key(),
                                          "nst": list(nsi.nst_ref)},
                      nsi=nsi.id, substep=sub.id)

        elif sub.id == "1.2":
            cn_nssi.state = NssiState.DEPLOYING
            roles = [nf["role"] for nf in descriptors["cn"]["nfs"]
                     if nf["sharing"] == "dedicated"]
            self.emit("cn_batch_dispatched", {"roles": roles},
                      nsi=nsi.id, substep=sub.id)

        elif sub.id == "2.1":
            if sub.kind == "create":
                self.infra.create_isolation_domain(namespace)

        elif sub.id in DEPLOY_SUBSTEP_ROLE:
            role = DEPLOY_SUBSTEP_ROLE[sub.id]
            self._deploy_or_bind_cn(nsi, cn_nssi, descriptors, namespace,
                                    sub, role)

        elif sub.id in CONFIG_SUBSTEP_ROLE:
            role = CONFIG_SUBSTEP_ROLE[sub.id]
            shared = self.infra.workload_by_role(SHARED_CORE_DOMAIN, role)
            if shared is not None:
                shared.owners.add(nsi.id)
                if shared.id not in cn_nssi.shared_refs:
                    cn_nssi.shared_refs.append(shared.id)
            self.emit("cn_nf_configured", {"role": role,
                                           "snssai": nsi.snssai.key()},
                      nsi=nsi.id, substep=sub.id)

        elif sub.id == "2.9":
            for wl_id in cn_nssi.resource_ids:
                workload = self.infra.workloads.get(wl_id)
                if workload is None or not workload.ready:
                    raise DomainDeployFailure("cn", sub.id,
                                              f"workload {wl_id} not ready")

        elif sub.id == "2.10":
            amf = (self.infra.workload_by_role(namespace, "amf")
                   or self.infra.workload_by_role(SHARED_CORE_DOMAIN, "amf"))
            if amf is None or not amf.ready:
                raise DomainDeployFailure("cn", sub.id, "no AMF to publish")
            cn_nssi.endpoints["amf_n2"] = amf.endpoints["n2"]
            self.amf_ref[nsi.id] = amf.id
            cn_nssi.mark_ready()
            self._commit(nsi)
            self.emit("amf_endpoint_published",
                      {"endpoint": amf.endpoints["n2"], "workload": amf.id},
                      nsi=nsi.id, substep=sub.id)

        elif sub.id == "3.1":
            if not cn_nssi.endpoints.get("amf_n2"):
                raise DomainDeployFailure("ran", sub.id,
                                          "AMF endpoint not published")
            ran_nssi.state = NssiState.DEPLOYING
            self.emit("ran_config_rendered",
                      {"amf_n2": cn_nssi.endpoints["amf_n2"]},
                      nsi=nsi.id, substep=sub.id)

        elif sub.id == "3.2":
            role = "n3iwf" if plan.scenario == ScenarioClass.NON3GPP else "gnb"
            nf = next((n for n in descriptors["ran"]["nfs"]
                       if n["role"] == role), None)
            replicas = nf["replicas"] if nf else 1
            workload = self.infra.deploy_workload(
                f"slice-{nsi.id}", role, descriptors["ran"]["site"],
                owner=nsi.id, replicas=replicas)
            ran_nssi.resource_ids.append(workload.id)

        elif sub.id == "3.3":
            kind = ("tunnel_established" if sub.kind == "tunnel"
                    else "ran_attached")
            self.emit(kind, {"amf_n2": cn_nssi.endpoints["amf_n2"]},
                      nsi=nsi.id, substep=sub.id)

        elif sub.id == "3.4":
            for wl_id in ran_nssi.resource_ids:
                if not self.infra.workloads[wl_id].ready:
                    raise DomainDeployFailure("ran", sub.id,
                                              f"workload {wl_id} not ready")
            ran_nssi.mark_ready()
            self._commit(nsi)

        elif sub.step == 4:
            k = int(sub.id.split(".")[1])
            if k == 1:
                tn_nssi.state = NssiState.DEPLOYING
            rule = self._rules_cache[nsi.id][k - 1]
            ids = self.infra.install_slice_routes([rule], owner=nsi.id)
            for rule_id in ids:
                if rule_id not in tn_nssi.resource_ids:
                    tn_nssi.resource_ids.append(rule_id)
            self.emit("flow_installed", dict(rule.to_dict(), id=ids[0]),
                      nsi=nsi.id, substep=sub.id)
            if k == len(self._rules_cache[nsi.id]):
                tn_nssi.mark_ready()
                self._commit(nsi)

        elif sub.id == "5.1":
            not_ready = [n.domain.value for n in nsi.nssis.values()
                         if n.state != NssiState.READY]
            if not_ready:
                raise DomainDeployFailure("nsmf", sub.id,
                                          f"subnets not ready: {not_ready}")
            self.emit("verification_passed", {}, nsi=nsi.id, substep=sub.id)

        elif sub.id == "6.1":
            nsi.transition(NsiState.ACTIVE)
            nsi.activated_at = self.clock.now
            nsi.kpis["deploy_time_s"] = round(self.clock.now - nsi.created_at, 9)
            self._commit(nsi)
            self.emit("nsi_active", {"snssai": nsi.snssai.key(),
                                     "total_s": round(
                                         self.clock.now - nsi.created_at, 9)},
                      nsi=nsi.id, substep=sub.id)

    def _deploy_or_bind_cn(self, nsi: NSI, cn_nssi: NSSI, descriptors: dict,
                           namespace: str, sub: Substep, role: str) -> None:
        nf = next((n for n in descriptors["cn"]["nfs"]
                   if n["role"] in (role, f"{role}_lite")), None)
        if sub.kind == "deploy" and nf is not None:
            workload = self.infra.deploy_workload(
                namespace, nf["role"], descriptors["cn"]["site"],
                owner=nsi.id, replicas=nf["replicas"])
            cn_nssi.resource_ids.append(workload.id)
        else:
            shared = self.infra.workload_by_role(SHARED_CORE_DOMAIN, role)
            if shared is None:
                raise DomainDeployFailure("cn", sub.id,
                                          f"no shared {role} to reuse")
            shared.owners.add(nsi.id)
            if shared.id not in cn_nssi.shared_refs:
                cn_nssi.shared_refs.append(shared.id)
            self.emit("cn_nf_reused", {"role": role, "workload": shared.id},
                      nsi=nsi.id, substep=sub.id)

    def _fail_creation(self, nsi: NSI, sub: Substep, started: float,
                       exc: NsaasError) -> None:
        domain = {"cn": Domain.CN, "ran": Domain.RAN, "tn": Domain.TN}.get(sub.domain)
        if domain is not None:
            nsi.nssis[domain].state = NssiState.FAILED
        if nsi.state in (NsiState.DEPLOYING, NsiState.RECONFIGURING):
            nsi.transition(NsiState.DEGRADED)
        self._commit(nsi)
        self.emit("deploy_failed",
                  {"domain": sub.domain, "error": exc.to_dict()},
                  nsi=nsi.id, substep=sub.id)

    # -- reconfiguration ------------------------------------------------------

    def begin_reconfiguration(self, nsi_id: str,
                              new_cn_profile: dict | None = None) -> None:
        """Replay the CN control-plane substeps with the AMF replaced by a
        delete-then-create. While no AMF generation is ready the slice is
        in outage; subscriber and session records in the UDR are untouched
        because the AMF holds no local state."""
        nsi = self.nsis.get(nsi_id)
        if nsi is None or nsi.state == NsiState.TERMINATED:
            raise NotFound(f"no active slice {nsi_id}")
        if nsi_id in self._reconfiguring or nsi.state == NsiState.RECONFIGURING:
            raise ConcurrentModification(f"slice {nsi_id} is being reconfigured")
        if nsi.state != NsiState.ACTIVE:
            raise ConcurrentModification(
                f"slice {nsi_id} is {nsi.state.value}, not Active")

        amf_id = self.amf_ref.get(nsi_id)
        if amf_id is None:
            raise NotFound(f"slice {nsi_id} has no AMF reference")
        self._reconfiguring.add(nsi_id)
        nsi.transition(NsiState.RECONFIGURING)
        nsi.kpis["last_reconfig_requested_at"] = round(self.clock.now, 9)
        self._commit(nsi)
        self.emit("reconfig_requested", {"profile": new_cn_profile or {}},
                  nsi=nsi_id)

        table = self.config.reconfig_latencies
        order = ["2.2", "2.3", "2.4", "2.5", "2.6", "2.7", "2.8", "2.9", "2.10"]
        self._schedule_reconfig_substep(nsi, amf_id, new_cn_profile or {},
                                        order, table, 0)

    def _schedule_reconfig_substep(self, nsi: NSI, amf_id: str, profile: dict,
                                   order: list[str], table: dict,
                                   index: int) -> None:
        sub_id = order[index]
        duration = float(table.get(sub_id, 0.0))

        def start():
            self.emit("substep_start", {"name": f"reconfig-{sub_id}",
                                        "kind": "reconfig"},
                      nsi=nsi.id, substep=sub_id)
            if sub_id == "2.2":
                self.infra.set_workload_down(amf_id)
                self.emit("amf_down", {"workload": amf_id},
                          nsi=nsi.id, substep=sub_id)
                self.infra.replace_workload(
                    amf_id, delay=duration,
                    profile_override={k: v for k, v in profile.items()
                                      if k != "replicas"},
                    replicas=profile.get("replicas"))

            def end():
                if sub_id == "2.2":
                    workload = self.infra.workloads[amf_id]
                    nsi.nssis[Domain.CN].endpoints["amf_n2"] = \
                        workload.endpoints["n2"]
                    self.emit("amf_ready",
                              {"workload": amf_id,
                               "generation": workload.generation},
                              nsi=nsi.id, substep=sub_id)
                self.emit("substep_end", {"name": f"reconfig-{sub_id}",
                                          "kind": "reconfig",
                                          "duration_s": duration},
                          nsi=nsi.id, substep=sub_id)
                if index + 1 < len(order):
                    self._schedule_reconfig_substep(nsi, amf_id, profile,
                                                    order, table, index + 1)
                else:
                    nsi.transition(NsiState.ACTIVE)
                    started = nsi.kpis.get("last_reconfig_requested_at",
                                           self.clock.now)
                    nsi.kpis["last_reconfig_s"] = round(
                        self.clock.now - started, 9)
                    self._commit(nsi)
                    self._reconfiguring.discard(nsi.id)
                    self.emit("reconfig_complete", {}, nsi=nsi.id)

            self.clock.schedule(duration, end)

        self.clock.schedule(0.0, start)

    # -- decommissioning -------------------------------------------------------

    def decommission(self, nsi_id: str) -> NSI:
        """Remove dedicated resources, drop references on shared ones and
        withdraw this slice's flow rules. Idempotent: repeating is a no-op."""
        nsi = self.nsis.get(nsi_id)
        if nsi is None:
            raise NotFound(f"unknown slice {nsi_id}")
        if nsi.state == NsiState.TERMINATED:
            return nsi
        removed_wl = self.infra.release_owner(nsi_id)
        removed_rules = self.infra.withdraw_routes(nsi_id)
        for nssi in nsi.nssis.values():
            nssi.state = NssiState.REMOVED
            nssi.resource_ids.clear()
        if nsi.state in (NsiState.REQUESTED, NsiState.DEPLOYING,
                         NsiState.RECONFIGURING):
            nsi.state = NsiState.DEGRADED
        nsi.transition(NsiState.TERMINATED)
        self._commit(nsi)
        self.emit("nsi_terminated",
                  {"removed_workloads": sorted(removed_wl),
                   "removed_rules": sorted(removed_rules)}, nsi=nsi_id)
        return nsi
