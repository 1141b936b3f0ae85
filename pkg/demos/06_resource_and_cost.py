"""Resource consumption of slice batches and what they cost per tier.

Five dedicated slices are requested as a batch at t=10 s and five more at
t=60 s. Infrastructure usage steps up as each batch completes; the fitted
per-tier price models translate the usage trace into monthly cost, and
the same operating point prices out very differently at the Edge versus
a Central cloud.
"""

from nsaas import ScenarioClass, SliceEngine
from nsaas.cost import (
    ROUNDED_REFERENCE_MODELS,
    fit_all_tiers,
    parse_price_table,
    tier_variation,
)
from nsaas.experiments import scenario_request

engine = SliceEngine()
for i in range(5):
    engine.submit_at(scenario_request(ScenarioClass.URLLC, f"b1-{i}"), 10.0)
for i in range(5):
    engine.submit_at(scenario_request(ScenarioClass.URLLC, f"b2-{i}"), 60.0)
samples = engine.run_sampled(120.0, 1.0)

models = fit_all_tiers(parse_price_table())
print("fitted price models ($/month = a*vCPU + b*GB + c):")
for tier, model in models.items():
    print(f"  {tier:13s} a={model.vcpu_coeff:7.2f}  b={model.ram_coeff:6.2f}  "
          f"c={model.intercept:7.2f}")

print(f"\n{'t':>5s} {'vCPU':>6s} {'RAM GB':>7s} {'Edge':>8s} "
      f"{'Metro':>8s} {'Central':>8s}")
for sample in samples:
    if sample["t"] in (0.0, 10.0, 40.0, 63.0, 80.0, 113.0, 120.0):
        vcpu, ram = sample["vcpu_total"], sample["ram_gb_total"]
        print(f"{sample['t']:5.0f} {vcpu:6.2f} {ram:7.2f} "
              f"{models['Edge'].predict(vcpu, ram):8.2f} "
              f"{models['Metropolitan'].predict(vcpu, ram):8.2f} "
              f"{models['Central'].predict(vcpu, ram):8.2f}")

peak = max(samples, key=lambda s: s["vcpu_total"])
print(f"\npeak usage: {peak['vcpu_total']:.2f} vCPU / "
      f"{peak['ram_gb_total']:.2f} GB at t={peak['t']:.0f} s")

five_slice_point = (4.8, 17.6)
print(f"\nat the five-slice operating point {five_slice_point}:")
print(f"  edge vs central (exact fits):      "
      f"{tier_variation(models, *five_slice_point):6.1f} %")
print(f"  edge vs central (rounded models):  "
      f"{tier_variation(ROUNDED_REFERENCE_MODELS, *five_slice_point):6.1f} %")
