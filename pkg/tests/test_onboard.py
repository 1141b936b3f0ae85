import math

import pytest

from conftest import CUSTOM_TENANT_REQUEST, typed_request
from nsaas.digest import digest_obj
from nsaas.errors import NoMatch, OverrideConflict, ValidationError
from nsaas.model import Domain, ScenarioClass, SliceRequest
from nsaas.onboard import SLA_ATTRIBUTES, Onboarder, template_feasible


@pytest.fixture
def onboarder(engine):
    return Onboarder(engine.catalog, engine.config)


def _norm(onboarder, payload, scenario=None):
    req = SliceRequest.from_json(payload)
    scenario = scenario or onboarder.classify(req)
    from nsaas.model import normalize_requirements

    return req, scenario, normalize_requirements(req, scenario)


class TestMatching:
    def test_urllc_selects_dedicated_core_with_shared_support(self, onboarder):
        _, scenario, norm = _norm(onboarder, CUSTOM_TENANT_REQUEST)
        assert scenario == ScenarioClass.URLLC
        selection = onboarder.match_template(norm, scenario)
        cn = selection[Domain.CN]
        assert cn.id == "cn-urllc-dedicated"
        dedicated = {nf.role for nf in cn.nfs if nf.sharing == "dedicated"}
        shared = {nf.role for nf in cn.nfs if nf.sharing == "shared"}
        assert dedicated == {"amf", "smf", "upf"}
        assert shared == {"ausf", "udr", "nrf", "pcf"}

    def test_shared_reuses_with_zero_footprint(self, onboarder):
        _, scenario, norm = _norm(onboarder, typed_request("embb"))
        selection = onboarder.match_template(norm, scenario)
        assert selection[Domain.CN].id == "cn-shared-reuse"
        assert selection[Domain.CN].footprint() == (0.0, 0.0)

    def test_infeasible_delay_budget_rejected(self, onboarder):
        payload = {"name": "too-fast", "NST": {
            "type": "custom", "Slice Attributes": {
                "SSQ": {"Packet Delay Budget": 2e-8,
                        "Packet Error Rate": 1e-6,
                        "Maximum Data Burts Volume": 0.001}}}}
        _, scenario, norm = _norm(onboarder, payload)
        with pytest.raises(NoMatch) as exc:
            onboarder.match_template(norm, scenario)
        assert exc.value.code == "no_match"

    @pytest.mark.parametrize("payload", [
        CUSTOM_TENANT_REQUEST,
        typed_request("embb"),
        typed_request("mmtc"),
        typed_request("non3gpp"),
    ])
    def test_choice_equals_exhaustive_scan(self, onboarder, payload):
        """The rule-engine choice must equal a brute-force scan over every
        catalog candidate minimizing (footprint, -reuse, id)."""
        _, scenario, norm = _norm(onboarder, payload)
        selection = onboarder.match_template(norm, scenario)
        for domain in Domain:
            candidates = onboarder.catalog.lookup_templates(domain, scenario)
            feasible = [c for c in candidates if template_feasible(c, norm)]
            best = min(feasible,
                       key=lambda c: (*c.footprint(), -c.reuse_count(), c.id))
            assert selection[domain].id == best.id


class TestTranslation:
    def test_urllc_descriptors(self, onboarder):
        _, scenario, norm = _norm(onboarder, CUSTOM_TENANT_REQUEST)
        selection = onboarder.match_template(norm, scenario)
        desc = onboarder.translate_resources(selection, norm, scenario)
        assert desc["cn"]["site"] == "edge"
        assert desc["tn"]["vlan"] == 101
        assert desc["tn"]["policy"] == "shortest"
        assert desc["ran"]["nfs"][0]["role"] == "gnb"
        assert desc["ran"]["nfs"][0]["replicas"] == 2  # explicit override

    def test_mmtc_descriptors(self, onboarder):
        _, scenario, norm = _norm(onboarder, typed_request("mmtc"))
        selection = onboarder.match_template(norm, scenario)
        desc = onboarder.translate_resources(selection, norm, scenario)
        assert desc["tn"]["vlan"] == 102
        assert desc["tn"]["policy"] == "resilient"
        roles = {nf["role"]: nf["sharing"] for nf in desc["cn"]["nfs"]}
        assert roles["upf_lite"] == "dedicated"
        assert roles["amf"] == "shared"

    def test_override_of_shared_nf_conflicts(self, onboarder):
        payload = typed_request("mmtc")
        payload["NST"]["resource_description"] = {
            "core": {"nfs": [{"name": "amf", "replicas": 2}]}}
        _, scenario, norm = _norm(onboarder, payload)
        selection = onboarder.match_template(norm, scenario)
        with pytest.raises(OverrideConflict):
            onboarder.translate_resources(selection, norm, scenario)

    def test_override_on_reuse_template_conflicts(self, onboarder):
        payload = typed_request("embb")
        payload["NST"]["resource_description"] = {
            "core": {"nfs": [{"name": "upf"}]}}
        _, scenario, norm = _norm(onboarder, payload)
        selection = onboarder.match_template(norm, scenario)
        with pytest.raises(OverrideConflict):
            onboarder.translate_resources(selection, norm, scenario)


class TestRenderValidate:
    def test_commit_and_sla_targets(self, onboarder):
        result = onboarder.onboard(SliceRequest.from_json(CUSTOM_TENANT_REQUEST))
        assert result.nst.version == 1
        assert len(result.sla_targets) == len(SLA_ATTRIBUTES) == 5
        attrs = [t.attribute for t in result.sla_targets]
        assert sorted(attrs) == sorted(a for a, _ in SLA_ATTRIBUTES)
        by_attr = {t.attribute: t for t in result.sla_targets}
        assert by_attr["delay_budget_ms"].direction == "<="
        assert math.isclose(by_attr["delay_budget_ms"].target, 0.12)
        assert by_attr["availability_pct"].direction == ">="

    def test_each_request_attribute_in_exactly_one_target(self, onboarder):
        result = onboarder.onboard(SliceRequest.from_json(CUSTOM_TENANT_REQUEST))
        attrs = [t.attribute for t in result.sla_targets]
        assert len(attrs) == len(set(attrs))

    def test_rerender_same_inputs_identical_digest(self, onboarder):
        first = onboarder.onboard(SliceRequest.from_json(CUSTOM_TENANT_REQUEST))
        second = onboarder.onboard(SliceRequest.from_json(CUSTOM_TENANT_REQUEST))
        assert first.nst.version == second.nst.version
        assert digest_obj(first.nst.content()) == digest_obj(second.nst.content())

    def test_pipeline_determinism_across_engines(self, config):
        from nsaas.engine import SliceEngine

        digests = []
        for _ in range(2):
            engine = SliceEngine(config)
            result = Onboarder(engine.catalog, engine.config).onboard(
                SliceRequest.from_json(CUSTOM_TENANT_REQUEST))
            digests.append(digest_obj(result.nst.content()))
        assert digests[0] == digests[1]

    def test_vlan_out_of_range_rejected(self, config):
        from nsaas.engine import SliceEngine

        bad = config.with_overrides(
            {"topology": {"vlans": {"urllc": 999, "mmtc": 102,
                                    "shared-embb": 102, "non3gpp": 104}}})
        engine = SliceEngine(bad)
        onboarder = Onboarder(engine.catalog, engine.config)
        with pytest.raises(ValidationError) as exc:
            onboarder.onboard(SliceRequest.from_json(CUSTOM_TENANT_REQUEST))
        assert exc.value.code == "validation_error"
        assert any("vlan out of configured range" in v
                   for v in exc.value.violations)

    def test_all_violations_reported(self, onboarder):
        descriptors = {
            "cn": {"site": "nowhere", "sharing_policy": "dedicated",
                   "nfs": [{"role": "amf", "sharing": "dedicated",
                            "replicas": 1, "vcpu_request": 1e6,
                            "ram_mb_request": 1e9}]},
            "ran": {"site": "edge", "sharing_policy": "dedicated",
                    "nfs": [{"role": "gnb", "sharing": "dedicated",
                             "replicas": 1, "vcpu_request": 1e6,
                             "ram_mb_request": 1.0}]},
            "tn": {"policy": "shortest", "priority": "high", "vlan": 999,
                   "src": "s1", "dst": "s4", "routes": []},
        }
        violations = onboarder._policy_check(descriptors)
        assert len(violations) >= 3  # vlan, unknown site, quota
