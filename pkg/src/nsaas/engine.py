"""Engine facade wiring the catalog, inventory, infrastructure simulator,
onboarding pipeline, orchestrator and assurance loop behind one object.

The engine is driven entirely by the virtual clock: submitting a request
schedules its deployment chain and runs the clock until the slice reaches
a terminal state. Batch APIs schedule work at future virtual times so
several slices deploy concurrently. The full event log is a pure function
of (configuration, request sequence).
"""

from __future__ import annotations

import random
import threading
from pathlib import Path

from .assurance import (
    AdmissionController,
    AttachSimulator,
    AvailabilityTracker,
    KpiRecord,
    TelemetryStream,
    active_slices,
    resource_attribution,
)
from .config import EngineConfig
from .digest import canonical_dumps, digest_obj
from .errors import DomainDeployFailure, DuplicateInFlight, NoAmfAvailable, NotFound
from .infra import InfraSimulator, VirtualClock
from .infra.simulator import PLATFORM_OWNER
from .model import NSI, SliceRequest, NsiState, ScenarioClass, NfSpec, NSST, Domain
from .onboard import Onboarder
from .orchestrator import Orchestrator, step_efficiency
from .store import Catalog, Inventory


class EventLog:
    def __init__(self):
        self.records: list[dict] = []

    def emit(self, t: float, kind: str, payload: dict, nsi: str | None,
             substep: str | None) -> None:
        self.records.append({
            "virtual_time": round(t, 9),
            "nsi": nsi,
            "substep": substep,
            "kind": kind,
            "payload": payload,
        })

    def filter(self, kind: str | None = None, nsi: str | None = None) -> list[dict]:
        return [r for r in self.records
                if (kind is None or r["kind"] == kind)
                and (nsi is None or r["nsi"] == nsi)]

    def to_jsonl(self) -> str:
        return "\n".join(canonical_dumps(r) for r in self.records) + "\n"


class SliceEngine:
    def __init__(self, config: EngineConfig | None = None,
                 catalog_path: str | Path | None = None,
                 inventory_path: str | Path | None = None):
        self.config = config or EngineConfig.load()
        self.clock = VirtualClock()
        self.events = EventLog()
        self.rng = random.Random(self.config.seed)
        self._lock = threading.RLock()

        self.catalog = Catalog(catalog_path)
        self.inventory = Inventory(inventory_path)
        self.infra = InfraSimulator(
            self.clock, self.config.topology, self.config.nf_profiles,
            self.config.runtime["autoscaler"], emit=self._emit)
        self.onboarder = Onboarder(self.catalog, self.config)
        self.orchestrator = Orchestrator(self.clock, self.infra, self.inventory,
                                         self.config, self._emit, self.rng)

        attach_cfg = self.config.runtime["attach"]
        self.attach_sim = AttachSimulator(
            models=attach_cfg["models"],
            noise_pct=float(attach_cfg["noise_pct"]),
            recovery_surge_ms=float(attach_cfg["recovery_surge_ms"]),
            recovery_tau_s=float(attach_cfg["recovery_tau_s"]),
            rng=self.rng)
        self.admission = AdmissionController(self.config.admission_cap,
                                             emit=self._emit)
        self.telemetry = TelemetryStream(
            outlier_sigma=float(self.config.runtime["sampling"]["outlier_sigma"]))
        self.availability: dict[str, AvailabilityTracker] = {}

        self._request_index: dict[str, str] = {}
        self._in_flight: set[str] = set()
        self._degrading: dict[str, tuple[float, float]] = {}
        self._ue_seq = 0

        self._seed_catalog()
        self._bootstrap_shared_core()

    # -- wiring ------------------------------------------------------------

    def _emit(self, kind: str, payload: dict, nsi: str | None = None,
              substep: str | None = None) -> None:
        self.events.emit(self.clock.now, kind, payload, nsi, substep)
        if kind == "nsi_active":
            self.availability[nsi] = AvailabilityTracker(self.clock.now, 1)
        elif kind == "amf_down":
            for affected in self._slices_on_amf(payload.get("workload")):
                if affected in self.availability:
                    self.availability[affected].mark(self.clock.now, 0)
        elif kind == "amf_ready":
            workload = payload.get("workload")
            for affected in self._slices_on_amf(workload):
                if affected in self.availability:
                    self.availability[affected].mark(self.clock.now, 1)
                self.attach_sim.note_recovery(affected, self.clock.now)

    def _slices_on_amf(self, workload_id: str | None) -> list[str]:
        return [nsi_id for nsi_id, ref in self.orchestrator.amf_ref.items()
                if ref == workload_id]

    def _seed_catalog(self) -> None:
        profiles = self.config.nf_profiles["roles"]
        for raw in self.config.catalog_seed["nssts"]:
            nfs = []
            for nf in raw["nfs"]:
                profile = profiles[nf["role"]]
                nfs.append(NfSpec(role=nf["role"], sharing=nf["sharing"],
                                  replicas=int(nf.get("replicas", 1)),
                                  vcpu_request=profile["vcpu_request"],
                                  ram_mb_request=profile["ram_mb_request"]))
            nsst = NSST(id=raw["id"], domain=Domain(raw["domain"]),
                        scenario=ScenarioClass(raw["scenario"]),
                        nfs=tuple(nfs), variables=dict(raw.get("variables", {})),
                        artifacts=tuple(raw.get("artifacts", ())))
            self.catalog.register_template(nsst, committed_at=self.clock.now)

    def _bootstrap_shared_core(self) -> None:
        """Bring up the always-on shared control plane that reuse-based
        scenarios bind to."""
        site = self.config.nf_profiles.get("shared_core_site", "central")
        for role in self.config.nf_profiles.get("shared_core_roles", []):
            self.infra.deploy_workload("shared-core", role, site,
                                       owner=PLATFORM_OWNER, delay=0.0)

    # -- clock control --------------------------------------------------------

    def run_until_idle(self) -> int:
        with self._lock:
            return self.clock.run_until_idle()

    def advance(self, until: float) -> int:
        with self._lock:
            return self.clock.advance(until)

    def _run_until(self, predicate) -> None:
        while not predicate():
            if not self.clock.step():
                break

    # -- slice lifecycle -------------------------------------------------------

    def submit(self, payload: dict | SliceRequest, wait: bool = True) -> NSI:
        """Onboard and deploy one slice request, driving the virtual clock
        until the slice is Active (or Degraded, which raises).

        Identical bodies are idempotent: the request digest is the
        idempotency key and maps back to the existing slice.
        """
        with self._lock:
            request = (payload if isinstance(payload, SliceRequest)
                       else SliceRequest.from_json(payload))
            digest = digest_obj(request.to_json())
            if digest in self._in_flight:
                raise DuplicateInFlight("identical request is deploying",
                                        request_digest=digest[:12])
            existing = self._request_index.get(digest)
            if existing is not None:
                return self.orchestrator.nsis[existing]

            result = self.onboarder.onboard(request)
            nsi = self.orchestrator.begin_creation(result)
            self._in_flight.add(digest)
            try:
                if wait:
                    self._run_until(lambda: nsi.state in (
                        NsiState.ACTIVE, NsiState.DEGRADED))
            finally:
                self._in_flight.discard(digest)
            self._request_index[digest] = nsi.id
            if nsi.state == NsiState.DEGRADED:
                failure = self.events.filter(kind="deploy_failed", nsi=nsi.id)
                detail = failure[-1]["payload"] if failure else {}
                raise DomainDeployFailure(
                    detail.get("domain", "unknown"),
                    failure[-1]["substep"] if failure else "unknown",
                    f"slice {nsi.id} degraded during deployment")
            return nsi

    def submit_at(self, payload: dict | SliceRequest, at: float) -> None:
        """Schedule a request arrival at a future virtual time; the caller
        then drives the clock (run_until_idle / advance)."""
        with self._lock:
            request = (payload if isinstance(payload, SliceRequest)
                       else SliceRequest.from_json(payload))

            digest = digest_obj(request.to_json())

            def arrive():
                if digest in self._request_index:
                    self._emit("duplicate_request_ignored",
                               {"request_digest": digest[:12]},
                               nsi=self._request_index[digest])
                    return
                result = self.onboarder.onboard(request)
                nsi = self.orchestrator.begin_creation(result)
                self._request_index[digest] = nsi.id

            self.clock.schedule_at(at, arrive)

    def find_existing(self, payload: dict | SliceRequest) -> NSI | None:
        """Slice previously created from an identical request body, if any."""
        request = (payload if isinstance(payload, SliceRequest)
                   else SliceRequest.from_json(payload))
        nsi_id = self._request_index.get(digest_obj(request.to_json()))
        return self.orchestrator.nsis.get(nsi_id) if nsi_id else None

    def get_nsi(self, nsi_id: str) -> dict:
        """Inventory-backed snapshot; the northbound read path."""
        snapshot = self.inventory.get(nsi_id)
        if snapshot is None:
            raise NotFound(f"unknown slice {nsi_id}")
        return snapshot

    def list_nsis(self) -> list[dict]:
        return [self.inventory.get(nsi_id) for nsi_id in self.inventory.all_ids()]

    def reconfigure(self, nsi_id: str, new_cn_profile: dict | None = None,
                    wait: bool = True) -> NSI:
        with self._lock:
            if nsi_id not in self.orchestrator.nsis:
                raise NotFound(f"unknown slice {nsi_id}")
            self.orchestrator.begin_reconfiguration(nsi_id, new_cn_profile)
            nsi = self.orchestrator.nsis[nsi_id]
            if wait:
                self._run_until(lambda: nsi.state != NsiState.RECONFIGURING)
            return nsi

    def reconfigure_at(self, nsi_id: str, at: float,
                       new_cn_profile: dict | None = None) -> None:
        with self._lock:
            self.clock.schedule_at(
                at, lambda: self.orchestrator.begin_reconfiguration(
                    nsi_id, new_cn_profile))

    def bare_restart_at(self, nsi_id: str, at: float) -> None:
        """Unorchestrated control-plane rebuild: the AMF keeps draining
        connections for a grace period after teardown starts, then nothing
        answers until the stack is rebuilt much later."""
        with self._lock:
            reconfig = self.config.runtime["reconfig"]
            cutover = float(reconfig["no_orch_cutover_s"])
            recovery = float(reconfig["no_orch_recovery_s"])
            ramp = float(reconfig.get("no_orch_ramp_ms_per_s", 70.0))

            def start():
                amf_id = self.orchestrator.amf_ref[nsi_id]
                self._degrading[nsi_id] = (self.clock.now, ramp)
                self._emit("bare_restart_start", {"workload": amf_id}, nsi=nsi_id)

                def go_dark():
                    self._degrading.pop(nsi_id, None)
                    self.infra.set_workload_down(amf_id)
                    self._emit("amf_down", {"workload": amf_id}, nsi=nsi_id)

                def come_back():
                    self.infra.workloads[amf_id].ready = True
                    self._emit("amf_ready", {"workload": amf_id}, nsi=nsi_id)

                self.clock.schedule(cutover, go_dark)
                self.clock.schedule(recovery, come_back)

            self.clock.schedule_at(at, start)

    def delete(self, nsi_id: str) -> NSI:
        with self._lock:
            nsi = self.orchestrator.decommission(nsi_id)
            self.availability.pop(nsi_id, None)
            return nsi

    # -- UE traffic ------------------------------------------------------------

    def attach_ue(self, scenario: ScenarioClass | str,
                  ue_id: str | None = None) -> dict:
        """Admit one UE to the scenario's slices and simulate registration.

        Raises NoAmfAvailable while the admitted slice's AMF is down (the
        attempt times out) and NoCapacity when every slice is at cap.
        """
        with self._lock:
            scenario = ScenarioClass(scenario)
            candidates = [n.id for n in
                          active_slices(self.orchestrator.nsis, scenario)]
            if not candidates:
                raise NotFound(f"no active slice for scenario {scenario.value}")
            if ue_id is None:
                self._ue_seq += 1
                ue_id = f"ue-{self._ue_seq}"
            shared_load = self._shared_core_load()
            nsi_id = self.admission.admit(ue_id, candidates, self.clock.now)
            nsi = self.orchestrator.nsis[nsi_id]
            amf = self.infra.workloads.get(self.orchestrator.amf_ref[nsi_id])
            if amf is None or not amf.ready:
                self.admission.release(ue_id)
                raise NoAmfAvailable(f"AMF of {nsi_id} is not ready",
                                     nsi=nsi_id)

            latency = self.attach_sim.latency_ms(
                scenario, self.clock.now,
                concurrent_shared_ues=shared_load,
                nsi_id=nsi_id)
            if nsi_id in self._degrading:
                since, ramp = self._degrading[nsi_id]
                latency += (self.clock.now - since) * ramp

            self.infra.udr_add_subscriber(nsi.snssai.key(), ue_id,
                                          self.clock.now)
            self.telemetry.ingest(KpiRecord(
                t=self.clock.now, snssai=nsi.snssai.key(),
                metric="attach_latency_ms", value=latency, domain="cn"))
            self._emit("ue_attached", {"ue": ue_id,
                                       "latency_ms": round(latency, 6)},
                       nsi=nsi_id)
            return {"ue": ue_id, "nsi": nsi_id,
                    "latency_ms": latency}

    def detach_ue(self, ue_id: str) -> None:
        with self._lock:
            nsi_id = self.admission.release(ue_id)
            if nsi_id is None:
                return
            nsi = self.orchestrator.nsis[nsi_id]
            self.infra.udr_remove_subscriber(nsi.snssai.key(), ue_id)
            self._emit("ue_detached", {"ue": ue_id}, nsi=nsi_id)

    def _shared_core_load(self) -> int:
        shared_amf = self.infra.workload_by_role("shared-core", "amf")
        if shared_amf is None:
            return 0
        total = 0
        for nsi_id, ref in self.orchestrator.amf_ref.items():
            if ref == shared_amf.id:
                total += self.admission.count(nsi_id)
        return total

    # -- telemetry ---------------------------------------------------------

    def sample_resources(self) -> dict:
        """One resource sample: per-slice attribution plus platform totals."""
        t = self.clock.now
        total_vcpu, total_ram = self.infra.total_usage(t)
        per_slice = {}
        for nsi in active_slices(self.orchestrator.nsis):
            vcpu, ram = resource_attribution(self.infra, nsi, t)
            per_slice[nsi.id] = {"vcpu": vcpu, "ram_gb": ram}
            self.telemetry.ingest(KpiRecord(t=t, snssai=nsi.snssai.key(),
                                            metric="slice_vcpu", value=vcpu,
                                            domain="cn"))
            self.telemetry.ingest(KpiRecord(t=t, snssai=nsi.snssai.key(),
                                            metric="slice_ram_gb", value=ram,
                                            domain="cn"))
        return {"t": t, "vcpu_total": total_vcpu, "ram_gb_total": total_ram,
                "slices": per_slice}

    def run_sampled(self, until: float, period: float,
                    on_sample=None) -> list[dict]:
        """Advance to ``until`` taking a resource sample every ``period``
        seconds; optional callback runs after each sample."""
        samples = []
        t = self.clock.now
        while t <= until + 1e-9:
            self.clock.advance(t)
            sample = self.sample_resources()
            if on_sample is not None:
                on_sample(sample)
            samples.append(sample)
            t += period
        return samples

    # -- introspection ------------------------------------------------------

    def deployment_report(self, nsi_id: str):
        return self.orchestrator.reports[nsi_id]

    def efficiency(self, nsi_id: str) -> dict:
        return step_efficiency(self.orchestrator.reports[nsi_id])

    def check_conservation(self) -> bool:
        """Inventory-recorded resources equal live slice-owned resources."""
        inventory_ids = self.inventory.live_resource_ids()
        live = self.infra.live_workload_ids() | self.infra.flows.live_ids()
        return inventory_ids == live

    def metrics(self) -> dict:
        slices = {}
        for nsi_id in self.inventory.all_ids():
            snapshot = self.inventory.get(nsi_id)
            tracker = self.availability.get(nsi_id)
            slices[nsi_id] = {
                "state": snapshot["state"],
                "scenario": snapshot["scenario"],
                "snssai": snapshot["snssai"],
                "vlan": snapshot["vlan"],
                "concurrent_ues": self.admission.count(nsi_id),
                "availability": (tracker.value_at(self.clock.now)
                                 if tracker else None),
            }
        vcpu, ram = self.infra.total_usage()
        return {
            "virtual_time": self.clock.now,
            "config_digest": self.config.digest(),
            "slices": slices,
            "usage": {"vcpu": vcpu, "ram_gb": ram},
            "flow_rules": self.infra.flows.size(),
            "inventory_digest": self.inventory.digest(),
        }
