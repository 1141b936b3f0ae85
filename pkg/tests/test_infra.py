import pytest

from nsaas.errors import NoPath, QuotaExceeded, RuleConflict
from nsaas.infra import InfraSimulator, Topology, VirtualClock, build_route_rules
from nsaas.infra.topology import FlowRule, FlowTable


class TestVirtualClock:
    def test_time_never_decreases(self):
        clock = VirtualClock()
        clock.advance(5.0)
        with pytest.raises(ValueError):
            clock.advance(4.0)
        with pytest.raises(ValueError):
            clock.schedule(-1.0, lambda: None)

    def test_boundary_inclusive(self):
        clock = VirtualClock()
        fired = []
        clock.schedule(2.0, lambda: fired.append("a"))
        clock.advance(2.0)
        assert fired == ["a"]

    def test_advance_zero_no_events(self):
        clock = VirtualClock()
        fired = []
        clock.schedule(1.0, lambda: fired.append("a"))
        assert clock.advance(0.0) == 0
        assert fired == []

    def test_ties_fire_in_insertion_order(self):
        clock = VirtualClock()
        fired = []
        for name in ("first", "second", "third"):
            clock.schedule(1.0, lambda n=name: fired.append(n))
        clock.run_until_idle()
        assert fired == ["first", "second", "third"]

    def test_cascading_events_within_advance(self):
        clock = VirtualClock()
        fired = []

        def outer():
            fired.append("outer")
            clock.schedule(0.5, lambda: fired.append("inner"))

        clock.schedule(1.0, outer)
        clock.advance(2.0)
        assert fired == ["outer", "inner"]


TOPOLOGY_SPEC = {
    "sites": {"edge": {"vcpu_quota": 4.0, "ram_gb_quota": 8.0},
              "central": {"vcpu_quota": 8.0, "ram_gb_quota": 16.0}},
    "switches": ["s1", "s2", "s3", "s4", "s5", "s6", "s9"],
    "links": [["s1", "s2", 1.0], ["s2", "s3", 1.0], ["s3", "s4", 1.0],
              ["s1", "s5", 1.5], ["s5", "s6", 1.5], ["s6", "s2", 1.5]],
    "attach_points": {"ran": "s1", "cn": "s4"},
    "detour": ["s5", "s6"],
}


class TestTopology:
    def test_shortest_is_four_switches(self):
        topo = Topology(TOPOLOGY_SPEC)
        assert topo.compute_path("s1", "s4", "shortest") == \
            ["s1", "s2", "s3", "s4"]

    def test_resilient_adds_two_hops(self):
        topo = Topology(TOPOLOGY_SPEC)
        path = topo.compute_path("s1", "s4", "resilient")
        assert path == ["s1", "s5", "s6", "s2", "s3", "s4"]
        assert len(path) == len(topo.compute_path("s1", "s4", "shortest")) + 2

    def test_disconnected_destination(self):
        topo = Topology(TOPOLOGY_SPEC)
        with pytest.raises(NoPath):
            topo.compute_path("s1", "s9", "shortest")

    def test_unknown_node(self):
        topo = Topology(TOPOLOGY_SPEC)
        with pytest.raises(NoPath):
            topo.compute_path("s1", "nope", "shortest")

    def test_tie_break_lowest_node_id(self):
        spec = dict(TOPOLOGY_SPEC)
        spec["switches"] = ["a", "b", "c", "z"]
        spec["links"] = [["a", "b", 1], ["b", "z", 1], ["a", "c", 1],
                         ["c", "z", 1]]
        topo = Topology(spec)
        assert topo.compute_path("a", "z", "shortest") == ["a", "b", "z"]


class TestFlowRules:
    def test_four_switch_path_yields_eight_rules(self):
        rules = build_route_rules(["s1", "s2", "s3", "s4"], 101, "ran", "cn")
        assert len(rules) == 8
        assert all(r.vlan == 101 for r in rules)

    def test_six_switch_path_yields_twelve_rules(self):
        path = ["s1", "s5", "s6", "s2", "s3", "s4"]
        assert len(build_route_rules(path, 102, "ran", "cn")) == 2 * len(path)

    def test_reinstall_is_idempotent(self):
        table = FlowTable()
        rules = build_route_rules(["s1", "s2", "s3", "s4"], 101, "ran", "cn")
        first = table.install(rules, owner="nsi-1")
        second = table.install(rules, owner="nsi-1")
        assert first == second
        assert table.size() == 8

    def test_same_match_different_action_conflicts(self):
        table = FlowTable()
        rule = FlowRule("s1", 101, "ran", "cn", "fwd:s2")
        table.install([rule], owner="nsi-1")
        clash = FlowRule("s1", 101, "ran", "cn", "fwd:s5")
        with pytest.raises(RuleConflict):
            table.install([clash], owner="nsi-2")

    def test_shared_rules_removed_when_last_owner_leaves(self):
        table = FlowTable()
        rules = build_route_rules(["s1", "s2"], 102, "ran", "cn")
        table.install(rules, owner="nsi-1")
        table.install(rules, owner="nsi-2")
        table.remove_owner("nsi-1")
        assert table.size() == 4
        table.remove_owner("nsi-2")
        assert table.size() == 0


@pytest.fixture
def sim(config):
    clock = VirtualClock()
    return InfraSimulator(clock, config.topology, config.nf_profiles,
                          config.runtime["autoscaler"])


class TestSimulator:
    def test_release_ready_after_configured_budget(self, sim, config):
        table = config.scenario_latencies("urllc")
        workloads = sim.apply_release(
            "slice-x", [("amf", 1), ("smf", 1), ("upf", 1)], "edge",
            owner="nsi-1", scenario_latencies=table)
        assert not any(w.ready for w in workloads)
        budget = table["2.2"] + table["2.3"] + table["2.4"]
        sim.clock.advance(budget - 0.01)
        assert not workloads[-1].ready
        sim.clock.advance(budget)
        assert all(w.ready for w in workloads)

    def test_identical_release_is_idempotent(self, sim, config):
        table = config.scenario_latencies("urllc")
        first = sim.apply_release("slice-x", [("amf", 1)], "edge",
                                  owner="nsi-1", scenario_latencies=table)
        sim.clock.run_until_idle()
        count = len(sim.workloads)
        again = sim.apply_release("slice-x", [("amf", 1)], "edge",
                                  owner="nsi-1", scenario_latencies=table)
        assert len(sim.workloads) == count
        assert again[0].id == first[0].id
        assert again[0].ready

    def test_quota_exceeded(self, config):
        tiny = config.with_overrides(
            {"topology": {"sites": {"edge": {"vcpu_quota": 0.3,
                                             "ram_gb_quota": 1.0}}}})
        clock = VirtualClock()
        sim = InfraSimulator(clock, tiny.topology, tiny.nf_profiles,
                             tiny.runtime["autoscaler"])
        sim.deploy_workload("s", "amf", "edge", owner="n1")
        with pytest.raises(QuotaExceeded):
            sim.deploy_workload("s", "upf", "edge", owner="n1")

    def test_usage_counts_only_ready_workloads(self, sim):
        base_cpu, _ = sim.total_usage()
        workload = sim.deploy_workload("slice-x", "amf", "edge",
                                       owner="nsi-1", delay=5.0)
        cpu_before, _ = sim.total_usage()
        assert cpu_before == pytest.approx(base_cpu)
        sim.clock.advance(5.0)
        cpu_after, _ = sim.total_usage()
        assert cpu_after > base_cpu
        assert workload.ready


class TestAutoscaler:
    def _ready_workload(self, sim, role="amf"):
        workload = sim.deploy_workload("slice-x", role, "edge", owner="n1")
        sim.clock.run_until_idle()
        return workload

    def test_sustained_high_scales_up_by_one(self, sim):
        workload = self._ready_workload(sim)
        for _ in range(3):
            sim.observe_utilization(workload.id, 0.85)
        changes = sim.autoscale_tick()
        assert changes == {workload.id: 1}
        assert workload.replicas == 2

    def test_dead_band_no_change(self, sim):
        workload = self._ready_workload(sim)
        for _ in range(3):
            sim.observe_utilization(workload.id, 0.50)
        assert sim.autoscale_tick() == {}
        assert workload.replicas == 1

    def test_replica_floor(self, sim):
        workload = self._ready_workload(sim)
        for _ in range(3):
            sim.observe_utilization(workload.id, 0.10)
        assert sim.autoscale_tick() == {}
        assert workload.replicas == 1

    def test_scale_down_after_scale_up(self, sim):
        workload = self._ready_workload(sim)
        for _ in range(3):
            sim.observe_utilization(workload.id, 0.9)
        sim.autoscale_tick()
        assert workload.replicas == 2
        for _ in range(3):
            sim.observe_utilization(workload.id, 0.1)
        changes = sim.autoscale_tick()
        assert changes == {workload.id: -1}
        assert workload.replicas == 1

    def test_at_most_one_step_per_tick(self, sim):
        workload = self._ready_workload(sim)
        for _ in range(6):
            sim.observe_utilization(workload.id, 0.95)
        sim.autoscale_tick()
        assert workload.replicas == 2  # window cleared after the action

    def test_partial_window_no_action(self, sim):
        workload = self._ready_workload(sim)
        sim.observe_utilization(workload.id, 0.95)
        assert sim.autoscale_tick() == {}
