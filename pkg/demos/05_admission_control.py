"""Admission control with slice transition at the connection cap.

Two shared-baseline slices serve the same scenario. Every new UE lands on
the primary slice until its configured cap of seven simultaneous
connections; the controller then redirects subsequent registrations to
the secondary slice, so the saturated slice keeps its SLA while extra
traffic is still accommodated.
"""

from nsaas import ScenarioClass, SliceEngine
from nsaas.errors import NoCapacity
from nsaas.experiments import scenario_request

engine = SliceEngine()
engine.submit_at(scenario_request(ScenarioClass.SHARED_EMBB, "with-cap"), 0.0)
engine.submit_at(scenario_request(ScenarioClass.SHARED_EMBB, "overflow"), 0.0)
engine.run_until_idle()
slice_a, slice_b = sorted(engine.orchestrator.nsis)
cap = engine.admission.cap
print(f"primary={slice_a}, secondary={slice_b}, cap={cap}\n")

for i in range(1, 10):
    placed = engine.attach_ue(ScenarioClass.SHARED_EMBB)
    a, b = engine.admission.count(slice_a), engine.admission.count(slice_b)
    marker = "  <- transition" if placed["nsi"] != slice_a and b == 1 else ""
    print(f"UE {i}: -> {placed['nsi']}   counts A={a} B={b}{marker}")

print("\na detach on the saturated slice frees the slot:")
engine.detach_ue("ue-3")
back = engine.attach_ue(ScenarioClass.SHARED_EMBB)
print(f"  next UE -> {back['nsi']} "
      f"(A={engine.admission.count(slice_a)})")

print("\nfilling both slices to the cap:")
try:
    while True:
        engine.attach_ue(ScenarioClass.SHARED_EMBB)
except NoCapacity:
    print(f"  rejected once A={engine.admission.count(slice_a)} "
          f"and B={engine.admission.count(slice_b)}")

transition = engine.events.filter(kind="slice_transition")[0]
print(f"\ntransition event: {transition['payload']}")
