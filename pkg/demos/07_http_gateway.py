"""Drive the northbound HTTP service end to end (in-process client).

The same flows are available over the wire with
`uvicorn "nsaas.gateway:create_app" --factory`.
"""

import json

from fastapi.testclient import TestClient

from nsaas.gateway import create_app

client = TestClient(create_app())

request = {"name": "gateway-demo", "NST": {"type": "urllc"}}
created = client.post("/slices", json=request)
print(f"POST /slices -> {created.status_code} {created.json()}")

nsi_id = created.json()["id"]
again = client.post("/slices", json=request)
print(f"POST /slices (same body) -> {again.status_code} "
      f"duplicate={again.json()['duplicate']}")

snapshot = client.get(f"/slices/{nsi_id}").json()
print(f"GET /slices/{nsi_id} -> state={snapshot['state']}, "
      f"endpoints={snapshot['nssis']['cn']['endpoints']}")

reconf = client.post(f"/slices/{nsi_id}/reconfigure",
                     json={"vcpu_request": 0.5})
print(f"POST /slices/{nsi_id}/reconfigure -> {reconf.status_code} "
      f"{reconf.json()}")
trace = client.get(reconf.json()["availability_trace"]).json()
print(f"availability transitions: {trace['transitions']}")

metrics = client.get("/metrics").json()
print(f"GET /metrics -> t={metrics['virtual_time']} "
      f"usage={json.dumps(metrics['usage'])}")

deleted = client.delete(f"/slices/{nsi_id}")
print(f"DELETE /slices/{nsi_id} -> {deleted.status_code}")

bad = client.post("/slices", json={"name": "broken"})
print(f"POST /slices (missing NST) -> {bad.status_code} "
      f"{bad.json()['details']}")

csv_head = client.get("/experiments/deployment-times").text.splitlines()[:3]
print("GET /experiments/deployment-times ->")
for line in csv_head:
    print(f"  {line}")
