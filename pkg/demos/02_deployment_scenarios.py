"""Compare provisioning time across the four service scenarios.

Each scenario maps to a different NF placement and isolation recipe:
URLLC gets a fully dedicated core, mMTC a lightweight dedicated UPF with
shared control plane, the shared eMBB baseline reuses everything, and the
non-3GPP profile swaps the gNB for an N3IWF gateway with an IPsec tunnel.
The core dominates wherever new control-plane functions are deployed.
"""

from nsaas import ScenarioClass, SliceEngine
from nsaas.experiments import scenario_request

print(f"{'scenario':14s} {'total':>7s} {'prep+cn':>8s} {'ran':>6s} "
      f"{'tn':>6s} {'mgmt':>6s}  substeps")
for scenario in (ScenarioClass.URLLC, ScenarioClass.MMTC,
                 ScenarioClass.SHARED_EMBB, ScenarioClass.NON3GPP):
    engine = SliceEngine()
    nsi = engine.submit(scenario_request(scenario))
    report = engine.deployment_report(nsi.id)
    domains = report.domain_totals()
    print(f"{scenario.value:14s} {report.grand_total_s():6.1f}s "
          f"{domains.get('cn', 0):7.1f}s {domains.get('ran', 0):5.1f}s "
          f"{domains.get('tn', 0):5.1f}s {domains.get('nsmf', 0):5.1f}s "
          f"{len(report.rows):9d}")

print("\nper-substep breakdown of the URLLC run:")
engine = SliceEngine()
nsi = engine.submit(scenario_request(ScenarioClass.URLLC))
report = engine.deployment_report(nsi.id)
total = report.grand_total_s()
for step, seconds in sorted(report.step_totals().items()):
    bar = "#" * round(40 * seconds / total)
    print(f"  step {step}: {seconds:5.1f}s {bar}")
print(f"\ncore share of the total: "
      f"{report.domain_totals()['cn'] / total:.0%} "
      f"(step 2 alone: {report.step_totals()[2] / total:.0%})")
