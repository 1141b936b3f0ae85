import pytest

from conftest import typed_request
from nsaas.errors import (
    ConcurrentModification,
    DomainDeployFailure,
    NotFound,
    PoolExhausted,
)
from nsaas.model import Domain, NsiState, NssiState, ScenarioClass
from nsaas.orchestrator import SnssaiAllocator, step_efficiency


class TestSnssaiAllocation:
    def test_first_urllc_allocation(self):
        allocator = SnssaiAllocator()
        snssai = allocator.allocate(ScenarioClass.URLLC)
        assert (snssai.sst, snssai.sd) == (2, 1)

    def test_sequential_enumeration_per_sst(self):
        """Independent enumeration oracle: the k-th allocation for one
        service type must be (sst, k)."""
        allocator = SnssaiAllocator()
        for k in range(1, 6):
            assert allocator.allocate(ScenarioClass.MMTC).sd == k

    def test_ten_allocations_distinct(self):
        allocator = SnssaiAllocator()
        issued = {(s.sst, s.sd) for s in
                  (allocator.allocate(ScenarioClass.URLLC) for _ in range(10))}
        assert len(issued) == 10

    def test_pool_exhaustion(self):
        allocator = SnssaiAllocator(pool_size=1)
        allocator.allocate(ScenarioClass.URLLC)
        with pytest.raises(PoolExhausted):
            allocator.allocate(ScenarioClass.URLLC)

    def test_engine_assigns_sst_by_scenario(self, engine):
        nsi = engine.submit(typed_request("urllc"))
        assert (nsi.snssai.sst, nsi.snssai.sd) == (2, 1)


class TestDeploymentPlan:
    def test_urllc_plan_shape(self, engine):
        nsi = engine.submit(typed_request("urllc"))
        plan = engine.orchestrator.plans[nsi.id]
        assert len(plan.substeps) == 26
        assert len(plan.step_ids(2)) == 10
        assert len(plan.step_ids(4)) == 8
        assert plan.total_expected_s() == pytest.approx(53.0)

    def test_shared_plan_reuses_cn_at_zero_cost(self, engine):
        nsi = engine.submit(typed_request("embb"))
        plan = engine.orchestrator.plans[nsi.id]
        cn_steps = [s for s in plan.substeps if s.step == 2]
        assert len(cn_steps) == 10
        assert all(s.expected_s == 0.0 for s in cn_steps)
        assert len(plan.step_ids(4)) == 12  # resilient path, 6 switches

    def test_non3gpp_plan_swaps_ran_substeps(self, engine):
        nsi = engine.submit(typed_request("non3gpp"))
        plan = engine.orchestrator.plans[nsi.id]
        names = {s.id: s.name for s in plan.substeps}
        assert names["3.2"] == "deploy-n3iwf"
        assert names["3.3"] == "establish-ipsec-tunnel"
        assert len(plan.substeps) == 26

    def test_plan_validation_rejects_disorder(self, engine):
        nsi = engine.submit(typed_request("urllc"))
        plan = engine.orchestrator.plans[nsi.id]
        shuffled = plan.substeps[:]
        shuffled[2], shuffled[15] = shuffled[15], shuffled[2]
        plan_copy = type(plan)(nsi_id=plan.nsi_id, scenario=plan.scenario,
                               substeps=shuffled, path=plan.path,
                               vlan=plan.vlan)
        with pytest.raises(ValueError):
            plan_copy.validate()


class TestCreation:
    def test_cn_before_ran_before_tn_events(self, engine):
        nsi = engine.submit(typed_request("urllc"))
        events = engine.events.filter(nsi=nsi.id)
        t_endpoint = next(e["virtual_time"] for e in events
                          if e["kind"] == "amf_endpoint_published")
        t_first_ran = min(e["virtual_time"] for e in events
                          if e["substep"] and e["substep"].startswith("3."))
        t_first_flow = next(e["virtual_time"] for e in events
                            if e["kind"] == "flow_installed")
        assert t_endpoint <= t_first_ran <= t_first_flow

    def test_activation_requires_all_subnets_ready(self, engine):
        nsi = engine.submit(typed_request("urllc"))
        assert nsi.state == NsiState.ACTIVE
        assert all(n.state == NssiState.READY for n in nsi.nssis.values())
        assert nsi.nssis[Domain.CN].endpoints["amf_n2"]

    def test_identical_request_resubmission_converges(self, engine):
        first = engine.submit(typed_request("urllc"))
        digest = engine.inventory.digest()
        second = engine.submit(typed_request("urllc"))
        assert first.id == second.id
        assert engine.inventory.digest() == digest

    def test_conservation_after_creation(self, engine):
        engine.submit(typed_request("urllc"))
        engine.submit(typed_request("mmtc"))
        assert engine.check_conservation()

    def test_forced_cn_failure_degrades_without_ran_tn(self, engine):
        engine.infra.arm_failure("2.7")
        with pytest.raises(DomainDeployFailure) as exc:
            engine.submit(typed_request("urllc"))
        assert exc.value.substep == "2.7"
        nsi = engine.orchestrator.nsis["nsi-1"]
        assert nsi.state == NsiState.DEGRADED
        assert nsi.nssis[Domain.CN].state == NssiState.FAILED
        assert nsi.nssis[Domain.RAN].resource_ids == []
        assert nsi.nssis[Domain.TN].resource_ids == []
        assert engine.infra.flows.size() == 0
        # partial CN resources are recorded for explicit cleanup
        assert nsi.nssis[Domain.CN].resource_ids

    def test_shared_scenario_creates_zero_cn_workloads(self, engine):
        before = set(engine.infra.workloads)
        nsi = engine.submit(typed_request("embb"))
        created = {wid for wid in engine.infra.workloads if wid not in before}
        roles = {engine.infra.workloads[w].role for w in created}
        assert roles == {"gnb"}
        assert nsi.nssis[Domain.CN].resource_ids == []
        assert nsi.nssis[Domain.CN].shared_refs  # bound to the shared core


class TestReconfiguration:
    def test_nine_second_outage_window(self, engine):
        nsi = engine.submit(typed_request("embb"))
        t0 = engine.clock.now
        engine.reconfigure(nsi.id, {"vcpu_request": 0.5})
        runs = engine.availability[nsi.id].zero_runs(engine.clock.now)
        assert len(runs) == 1
        start, end = runs[0]
        assert start == pytest.approx(t0)
        assert end - start == pytest.approx(9.0)
        assert nsi.state == NsiState.ACTIVE

    def test_udr_untouched_by_reconfiguration(self, engine):
        engine.submit(typed_request("embb"))
        for _ in range(5):
            engine.attach_ue("shared-embb")
        digest_before = engine.infra.udr_digest()
        engine.reconfigure("nsi-1")
        assert engine.infra.udr_digest() == digest_before

    def test_amf_profile_upgrade_applied(self, engine):
        nsi = engine.submit(typed_request("urllc"))
        amf_id = engine.orchestrator.amf_ref[nsi.id]
        engine.reconfigure(nsi.id, {"vcpu_request": 0.99, "replicas": 2})
        workload = engine.infra.workloads[amf_id]
        assert workload.vcpu_request == 0.99
        assert workload.replicas == 2
        assert workload.generation == 2

    def test_reconfigure_terminated_not_found(self, engine):
        nsi = engine.submit(typed_request("urllc"))
        engine.delete(nsi.id)
        with pytest.raises(NotFound):
            engine.reconfigure(nsi.id)

    def test_unknown_slice_not_found(self, engine):
        with pytest.raises(NotFound):
            engine.reconfigure("nsi-404")

    def test_concurrent_reconfiguration_rejected(self, engine):
        nsi = engine.submit(typed_request("urllc"))
        engine.orchestrator.begin_reconfiguration(nsi.id, {})
        with pytest.raises(ConcurrentModification):
            engine.orchestrator.begin_reconfiguration(nsi.id, {})
        engine.run_until_idle()
        assert nsi.state == NsiState.ACTIVE


class TestDecommission:
    def test_sole_urllc_slice_fully_removed(self, engine):
        nsi = engine.submit(typed_request("urllc"))
        assert engine.infra.flows.by_vlan(101)
        engine.delete(nsi.id)
        assert nsi.state == NsiState.TERMINATED
        assert engine.infra.flows.by_vlan(101) == []
        slice_owned = engine.infra.live_workload_ids()
        assert slice_owned == set()
        assert engine.check_conservation()

    def test_shared_workloads_retained_while_referenced(self, engine):
        a = engine.submit(typed_request("embb", "shared-a"))
        b = engine.submit(typed_request("embb", "shared-b"))
        shared_ids = set(a.nssis[Domain.CN].shared_refs)
        engine.delete(a.id)

        # reference-count oracle over the inventory snapshots
        refs: set[str] = set()
        for snapshot in engine.list_nsis():
            if snapshot["state"] == "Terminated":
                continue
            for nssi in snapshot["nssis"].values():
                refs.update(nssi["shared_refs"])
        assert shared_ids <= set(engine.infra.workloads)
        assert refs & shared_ids  # still referenced by the surviving slice

        # VLAN-102 routes survive while the second shared slice lives
        assert engine.infra.flows.by_vlan(102)
        engine.delete(b.id)
        assert engine.infra.flows.by_vlan(102) == []
        # platform-owned shared core survives decommissioning entirely
        assert shared_ids <= set(engine.infra.workloads)

    def test_double_decommission_noop(self, engine):
        nsi = engine.submit(typed_request("urllc"))
        engine.delete(nsi.id)
        digest = engine.inventory.digest()
        engine.delete(nsi.id)
        assert engine.inventory.digest() == digest

    def test_unknown_slice_not_found(self, engine):
        with pytest.raises(NotFound):
            engine.delete("nsi-404")


class TestStepEfficiency:
    def test_tn_step_throughput(self, engine):
        nsi = engine.submit(typed_request("urllc"))
        eff = step_efficiency(engine.deployment_report(nsi.id))
        assert eff["steps"][4]["actions"] == 8
        assert eff["steps"][4]["duration_s"] == pytest.approx(2.0)
        assert eff["steps"][4]["actions_per_s"] == pytest.approx(4.0)

    def test_reuse_substeps_flagged_with_epsilon_guard(self, engine):
        nsi = engine.submit(typed_request("embb"))
        eff = step_efficiency(engine.deployment_report(nsi.id))
        reuse = eff["substeps"]["2.2"]
        assert reuse["reuse"] is True
        assert reuse["actions_per_s"] == pytest.approx(1 / 1e-3)

    def test_plan_efficiency_is_total_ratio(self, engine):
        nsi = engine.submit(typed_request("urllc"))
        report = engine.deployment_report(nsi.id)
        eff = step_efficiency(report)
        total_actions = sum(r.actions for r in report.rows)
        total_duration = sum(r.duration for r in report.rows)
        assert eff["plan"]["actions_per_s"] == pytest.approx(
            total_actions / total_duration)
