"""Tenant-facing onboarding pipeline.

normalize -> match template -> translate resources -> render + validate ->
commit the end-to-end template and its SLA targets to the catalog.

The pipeline is stateless and deterministic: the same request against the
same catalog renders a byte-identical template document.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import EngineConfig
from .digest import digest_obj
from .errors import NoMatch, OverrideConflict, ValidationError
from .model import (
    NSST,
    NST,
    Domain,
    NfOverride,
    NormalizedRequirements,
    ScenarioClass,
    SlaTarget,
    SliceRequest,
    classify_slice_type,
    normalize_requirements,
)
from .store import Catalog

# Quantitative GST attributes that become SLA targets, with their
# comparison direction. Categorical attributes (data network) are carried
# in the requirements but are not targets.
SLA_ATTRIBUTES = (
    ("delay_budget_ms", "<="),
    ("error_rate", "<="),
    ("burst_volume_mb", ">="),
    ("availability_pct", ">="),
    ("ue_density_per_km2", ">="),
)


@dataclass(frozen=True)
class OnboardResult:
    request: SliceRequest
    scenario: ScenarioClass
    requirements: NormalizedRequirements
    nst: NST
    sla_targets: tuple[SlaTarget, ...]
    request_digest: str


class Onboarder:
    def __init__(self, catalog: Catalog, config: EngineConfig):
        self.catalog = catalog
        self.config = config

    # -- stage 1: classification + normalization ----------------------------

    def classify(self, request: SliceRequest) -> ScenarioClass:
        rules = self.config.classification
        return classify_slice_type(
            request,
            urllc_pdb_ms=rules["urllc_pdb_ceiling_ms"],
            mmtc_density=rules["mmtc_density_floor"],
            mmtc_pdb_ms=rules["mmtc_pdb_floor_ms"],
        )

    # -- stage 2: template matching -----------------------------------------

    def match_template(self, norm: NormalizedRequirements,
                       scenario: ScenarioClass) -> dict[Domain, NSST]:
        """Pick one feasible subnet template per domain, minimizing the
        resource footprint, preferring reuse of shared NFs on ties, with
        the template id as the final deterministic tiebreak."""
        selection: dict[Domain, NSST] = {}
        for domain in (Domain.CN, Domain.RAN, Domain.TN):
            candidates = self.catalog.lookup_templates(domain, scenario)
            feasible = [c for c in candidates if template_feasible(c, norm)]
            if not feasible:
                raise NoMatch(
                    f"no {domain.value} template satisfies the requirements "
                    f"for scenario {scenario.value}",
                    domain=domain.value, scenario=scenario.value,
                    delay_budget_ms=norm.delay_budget_ms)
            feasible.sort(key=lambda c: (*c.footprint(), -c.reuse_count(), c.id))
            selection[domain] = feasible[0]
        return selection

    # -- stage 3: resource translation ---------------------------------------

    def translate_resources(self, selection: dict[Domain, NSST],
                            norm: NormalizedRequirements,
                            scenario: ScenarioClass) -> dict:
        """Convert the selected templates plus any explicit NF overrides
        into concrete per-domain descriptors (instances, sizes, placement,
        VLAN, route policy)."""
        profiles = self.config.nf_profiles["roles"]
        cn, ran, tn = selection[Domain.CN], selection[Domain.RAN], selection[Domain.TN]

        cn_nfs = _apply_overrides(cn, norm.core_overrides, "core")
        ran_nfs = _apply_overrides(ran, norm.ran_overrides, "ran")

        def _concrete(nfs):
            out = []
            for spec in nfs:
                profile = profiles.get(spec.role, {})
                out.append({
                    "role": spec.role,
                    "sharing": spec.sharing,
                    "replicas": spec.replicas,
                    "vcpu_request": profile.get("vcpu_request", 0.0),
                    "ram_mb_request": profile.get("ram_mb_request", 0.0),
                })
            return out

        vlans = self.config.topology.get("vlans", {})
        vlan = vlans.get(scenario.value)
        if vlan is None:
            vlan = int(self.config.topology.get("vlan_pool_start", 105))
        attach = self.config.topology.get("attach_points", {})

        return {
            "cn": {
                "site": cn.variables.get("placement", "central"),
                "sharing_policy": cn.variables.get("sharing_policy", "dedicated"),
                "nfs": _concrete(cn_nfs),
            },
            "ran": {
                "site": ran.variables.get("placement", "edge"),
                "sharing_policy": ran.variables.get("sharing_policy", "dedicated"),
                "nfs": _concrete(ran_nfs),
            },
            "tn": {
                "policy": tn.variables.get("path_policy", "shortest"),
                "priority": tn.variables.get("priority", "normal"),
                "vlan": int(vlan),
                "src": attach.get("ran", "s1"),
                "dst": attach.get("cn", "s4"),
                "routes": list(norm.tn_routes),
            },
        }

    # -- stage 4: render, validate, commit -----------------------------------

    def render_and_validate(self, descriptors: dict,
                            norm: NormalizedRequirements,
                            scenario: ScenarioClass,
                            selection: dict[Domain, NSST],
                            request_digest: str) -> tuple[NST, tuple[SlaTarget, ...]]:
        violations = self._policy_check(descriptors)
        if violations:
            raise ValidationError(violations)

        refs = {}
        for domain, nsst in selection.items():
            version = self.catalog.latest_version(nsst.id)
            refs[domain.value] = (nsst.id, version)

        nst = NST(
            id=f"nst-{scenario.value}",
            scenario=scenario,
            nsst_refs=refs,
            bindings=dict(sorted(norm.to_dict().items())),
            descriptors=descriptors,
        )
        nst_id, version = self.catalog.register_template(nst)
        nst = self.catalog.get(nst_id, version)

        targets = tuple(
            SlaTarget(attribute=attr, target=float(getattr(norm, attr)),
                      direction=direction, source_request=request_digest,
                      version=version)
            for attr, direction in SLA_ATTRIBUTES)
        return nst, targets

    def _policy_check(self, descriptors: dict) -> list[str]:
        """Minimal admission gate: VLAN legality, placement legality and the
        static resource-quota ceiling. All violations are reported, not
        just the first."""
        violations: list[str] = []
        topo = self.config.topology
        allowed_vlans = set(topo.get("vlan_allowed",
                                     topo.get("vlans", {}).values()))
        pool_start = int(topo.get("vlan_pool_start", 105))
        allowed_vlans.update(range(pool_start, pool_start + 64))
        vlan = descriptors["tn"]["vlan"]
        if vlan not in allowed_vlans:
            violations.append(f"vlan out of configured range: {vlan}")

        sites = topo.get("sites", {})
        demand: dict[str, list[float]] = {}
        for section in ("cn", "ran"):
            site = descriptors[section]["site"]
            if site not in sites:
                violations.append(f"unknown placement site: {site}")
                continue
            bucket = demand.setdefault(site, [0.0, 0.0])
            for nf in descriptors[section]["nfs"]:
                if nf["sharing"] != "dedicated":
                    continue
                bucket[0] += nf["vcpu_request"] * nf["replicas"]
                bucket[1] += nf["ram_mb_request"] * nf["replicas"] / 1024.0
        for site, (vcpu, ram) in sorted(demand.items()):
            quota = sites.get(site)
            if quota is None:
                continue
            if vcpu > quota["vcpu_quota"]:
                violations.append(
                    f"vcpu quota exceeded at {site}: {vcpu} > {quota['vcpu_quota']}")
            if ram > quota["ram_gb_quota"]:
                violations.append(
                    f"ram quota exceeded at {site}: {ram} > {quota['ram_gb_quota']}")
        return violations

    # -- full pipeline --------------------------------------------------------

    def onboard(self, request: SliceRequest) -> OnboardResult:
        scenario = self.classify(request)
        norm = normalize_requirements(request, scenario)
        selection = self.match_template(norm, scenario)
        descriptors = self.translate_resources(selection, norm, scenario)
        request_digest = digest_obj(request.to_json())[:12]
        nst, targets = self.render_and_validate(
            descriptors, norm, scenario, selection, request_digest)
        return OnboardResult(request=request, scenario=scenario,
                             requirements=norm, nst=nst, sla_targets=targets,
                             request_digest=request_digest)


def template_feasible(template: NSST, norm: NormalizedRequirements) -> bool:
    floor = float(template.variables.get("delay_floor_ms", 0.0))
    density_cap = float(template.variables.get("max_ue_density", float("inf")))
    return (norm.delay_budget_ms >= floor
            and norm.ue_density_per_km2 <= density_cap)


ROLE_ALIASES = {"ueransim": "gnb"}


def _apply_overrides(template: NSST, overrides: tuple[NfOverride, ...],
                     section: str) -> list:
    """Merge explicit NF overrides into the template's NF list.

    An override must name a dedicated NF of the template; overriding a
    shared NF (or a template that deploys nothing) contradicts the
    template's sharing policy.
    """
    nfs = list(template.nfs)
    by_role = {nf.role: i for i, nf in enumerate(nfs)}
    for override in overrides:
        role = override.nf_type.lower() or override.name
        role = ROLE_ALIASES.get(role, role)
        idx = by_role.get(role)
        if idx is None and role == "upf" and "upf_lite" in by_role:
            idx = by_role["upf_lite"]
        if idx is None:
            raise OverrideConflict(
                f"{section} override {override.name!r} does not match any NF "
                f"of template {template.id}",
                template=template.id, override=override.name)
        if nfs[idx].sharing != "dedicated":
            raise OverrideConflict(
                f"{section} override {override.name!r} targets shared NF "
                f"{role!r} of template {template.id}",
                template=template.id, override=override.name)
        nfs[idx] = type(nfs[idx])(
            role=nfs[idx].role, sharing=nfs[idx].sharing,
            replicas=override.replicas,
            vcpu_request=nfs[idx].vcpu_request,
            ram_mb_request=nfs[idx].ram_mb_request)
    return nfs
