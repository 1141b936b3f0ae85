import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsaas.errors import SchemaError, UnclassifiableRequest
from nsaas.model import (
    NSI,
    NSSI,
    Domain,
    NsiState,
    NssiState,
    ScenarioClass,
    SliceRequest,
    SNssai,
    Ssq,
    classify_slice_type,
    denormalize_requirements,
    normalize_requirements,
)

from conftest import CUSTOM_TENANT_REQUEST, typed_request


class TestSNssai:
    def test_key_format(self):
        assert SNssai(sst=2, sd=1).key() == "2-000001"

    def test_sd_bounds(self):
        SNssai(sst=1, sd=2 ** 24 - 1)
        with pytest.raises(ValueError):
            SNssai(sst=1, sd=2 ** 24)
        with pytest.raises(ValueError):
            SNssai(sst=1, sd=-1)


class TestWireFormat:
    def test_parse_custom_tenant_request(self):
        req = SliceRequest.from_json(CUSTOM_TENANT_REQUEST)
        assert req.nst_type == "custom"
        assert req.availability == 1.0
        assert req.ssq.packet_delay_budget_s == 0.00012
        assert req.ssq.packet_error_rate == 1e-7
        assert req.ssq.max_data_burst_volume_mb == 0.001
        assert req.ue_density_per_km2 == 10000
        assert [nf.name for nf in req.core_nfs] == ["amf", "smf", "upf"]
        assert req.ran_nfs[0].replicas == 2
        assert req.tn_routes == ("backhaul",)

    def test_round_trip_preserves_wire_keys(self):
        req = SliceRequest.from_json(CUSTOM_TENANT_REQUEST)
        wire = req.to_json()
        ssq = wire["NST"]["Slice Attributes"]["SSQ"]
        assert "Maximum Data Burts Volume" in ssq
        assert "Packet Delay Budget" in ssq
        assert SliceRequest.from_json(wire) == req

    def test_canonical_burst_spelling_accepted(self):
        payload = {
            "name": "x", "NST": {"type": "custom", "Slice Attributes": {
                "SSQ": {"Packet Delay Budget": 0.1,
                        "Packet Error Rate": 0.001,
                        "Maximum Data Burst Volume": 5.0}}}}
        req = SliceRequest.from_json(payload)
        assert req.ssq.max_data_burst_volume_mb == 5.0

    def test_missing_nst_is_schema_error(self):
        with pytest.raises(SchemaError) as exc:
            SliceRequest.from_json({"name": "x"})
        assert exc.value.field_path == "NST"

    def test_bad_pdb_is_schema_error_with_path(self):
        payload = {
            "name": "x", "NST": {"type": "custom", "Slice Attributes": {
                "SSQ": {"Packet Delay Budget": 0,
                        "Packet Error Rate": 0.5,
                        "Maximum Data Burts Volume": 1}}}}
        with pytest.raises(SchemaError) as exc:
            SliceRequest.from_json(payload)
        assert "Packet Delay Budget" in exc.value.field_path

    def test_custom_without_attributes_rejected(self):
        with pytest.raises(SchemaError):
            SliceRequest.from_json({"name": "x", "NST": {"type": "custom"}})

    def test_zero_replicas_rejected(self):
        payload = {"name": "x", "NST": {
            "type": "urllc",
            "resource_description": {"ran": {"nfs": [
                {"name": "gnb", "replicas": 0}]}}}}
        with pytest.raises(SchemaError):
            SliceRequest.from_json(payload)


class TestClassification:
    def test_explicit_type_passthrough(self):
        req = SliceRequest.from_json(typed_request("embb"))
        assert classify_slice_type(req) == ScenarioClass.SHARED_EMBB

    def test_custom_tenant_request_is_urllc(self):
        # 0.12 ms delay budget trips the sub-10 ms rule regardless of density
        req = SliceRequest.from_json(CUSTOM_TENANT_REQUEST)
        assert classify_slice_type(req) == ScenarioClass.URLLC

    def test_high_density_relaxed_budget_is_mmtc(self):
        req = SliceRequest(
            name="meters", nst_type="custom",
            ssq=Ssq(0.5, 1e-3, 0.001), ue_density_per_km2=100_000)
        assert classify_slice_type(req) == ScenarioClass.MMTC

    def test_non3gpp_flag(self):
        req = SliceRequest(name="wifi", nst_type="custom", non3gpp_access=True)
        assert classify_slice_type(req) == ScenarioClass.NON3GPP

    def test_fallback_is_shared(self):
        req = SliceRequest(name="x", nst_type="custom",
                           ssq=Ssq(0.2, 1e-4, 1.0))
        assert classify_slice_type(req) == ScenarioClass.SHARED_EMBB

    def test_contradictory_attributes_rejected(self):
        req = SliceRequest(name="x", nst_type="custom",
                           ssq=Ssq(0.001, 1e-6, 0.1), non3gpp_access=True)
        with pytest.raises(UnclassifiableRequest):
            classify_slice_type(req)

    def test_idempotent(self):
        req = SliceRequest.from_json(CUSTOM_TENANT_REQUEST)
        assert classify_slice_type(req) == classify_slice_type(req)

    def test_matches_independent_rule_scan(self):
        """Brute-force oracle: evaluate the rule table independently over a
        grid of attribute combinations."""
        def oracle(pdb_s, density, flag):
            pdb_ms = pdb_s * 1000.0
            urllc = pdb_ms < 10.0
            mmtc = density > 50_000 and pdb_ms >= 100.0
            if flag and urllc:
                return None  # contradictory
            if urllc:
                return ScenarioClass.URLLC
            if mmtc:
                return ScenarioClass.MMTC
            if flag:
                return ScenarioClass.NON3GPP
            return ScenarioClass.SHARED_EMBB

        for pdb_s in (0.0001, 0.005, 0.05, 0.1, 0.3, 1e-5):
            for density in (10.0, 10_000.0, 60_000.0, 200_000.0):
                for flag in (False, True):
                    req = SliceRequest(
                        name="grid", nst_type="custom",
                        ssq=Ssq(pdb_s, 1e-4, 0.01),
                        ue_density_per_km2=density, non3gpp_access=flag)
                    expected = oracle(pdb_s, density, flag)
                    if expected is None:
                        with pytest.raises(UnclassifiableRequest):
                            classify_slice_type(req)
                    else:
                        assert classify_slice_type(req) == expected, \
                            (pdb_s, density, flag)


class TestNormalization:
    def test_custom_tenant_request_values(self):
        req = SliceRequest.from_json(CUSTOM_TENANT_REQUEST)
        norm = normalize_requirements(req, ScenarioClass.URLLC)
        assert math.isclose(norm.delay_budget_ms, 0.12)
        assert norm.error_rate == 1e-7
        assert norm.burst_volume_mb == 0.001
        assert norm.availability_pct == 100.0
        assert norm.ue_density_per_km2 == 10000

    def test_defaults_fill_for_typed_request(self):
        req = SliceRequest.from_json(typed_request("embb"))
        norm = normalize_requirements(req, ScenarioClass.SHARED_EMBB)
        assert norm.delay_budget_ms == 100.0
        assert norm.availability_pct == 99.9
        assert norm.data_network == "internet"

    @settings(max_examples=200, deadline=None)
    @given(
        pdb=st.floats(1e-6, 10.0, allow_nan=False, allow_infinity=False),
        per=st.floats(1e-12, 0.999, allow_nan=False, allow_infinity=False,
                      exclude_min=False),
        burst=st.floats(0.0, 1e3, allow_nan=False, allow_infinity=False),
        avail=st.floats(0.0, 1.0, allow_nan=False, allow_infinity=False),
        density=st.floats(0.0, 1e7, allow_nan=False, allow_infinity=False),
        flag=st.booleans(),
    )
    def test_round_trip_identity(self, pdb, per, burst, avail, density, flag):
        req = SliceRequest(name="rt", nst_type="custom",
                           availability=avail,
                           supported_data_network="internet",
                           ssq=Ssq(pdb, per, burst),
                           ue_density_per_km2=density,
                           non3gpp_access=flag)
        norm = normalize_requirements(req, ScenarioClass.SHARED_EMBB)
        back = denormalize_requirements(norm)
        for a, b in (
            (back.ssq.packet_delay_budget_s, pdb),
            (back.ssq.packet_error_rate, per),
            (back.ssq.max_data_burst_volume_mb, burst),
            (back.availability or 0.0, avail),
            (back.ue_density_per_km2, density),
        ):
            assert math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-12)
        assert back.non3gpp_access == flag


class TestLifecycleStates:
    def _ready_nsi(self) -> NSI:
        nsi = NSI(id="nsi-x", snssai=SNssai(2, 1), tenant="t",
                  scenario=ScenarioClass.URLLC)
        cn = NSSI(domain=Domain.CN)
        cn.endpoints["amf_n2"] = "10.0.0.1:38412"
        cn.mark_ready()
        ran = NSSI(domain=Domain.RAN, state=NssiState.READY)
        tn = NSSI(domain=Domain.TN, state=NssiState.READY)
        nsi.nssis = {Domain.CN: cn, Domain.RAN: ran, Domain.TN: tn}
        return nsi

    def test_legal_chain(self):
        nsi = self._ready_nsi()
        nsi.transition(NsiState.DEPLOYING)
        nsi.transition(NsiState.ACTIVE)
        nsi.transition(NsiState.RECONFIGURING)
        nsi.transition(NsiState.ACTIVE)
        nsi.transition(NsiState.TERMINATED)

    def test_illegal_transition(self):
        nsi = self._ready_nsi()
        with pytest.raises(ValueError):
            nsi.transition(NsiState.ACTIVE)  # Requested -> Active skips Deploying

    def test_active_requires_ready_subnets(self):
        nsi = self._ready_nsi()
        nsi.nssis[Domain.RAN].state = NssiState.DEPLOYING
        nsi.transition(NsiState.DEPLOYING)
        with pytest.raises(ValueError):
            nsi.transition(NsiState.ACTIVE)

    def test_cn_subnet_needs_endpoint_to_be_ready(self):
        cn = NSSI(domain=Domain.CN)
        with pytest.raises(ValueError):
            cn.mark_ready()
