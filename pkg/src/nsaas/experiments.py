"""Experiment replay: deterministic CSV datasets for every evaluation
figure (deployment times, step breakdown, attach latency, reconfiguration
traces, admission, resource usage and cost curves).

Each dataset starts with a comment line carrying the experiment name, the
resolved config digest and the units; two runs with the same config are
byte-identical.
"""

from __future__ import annotations

import csv
import io

from .config import EngineConfig
from .cost import fit_all_tiers
from .engine import SliceEngine
from .errors import NoAmfAvailable, NsaasError, UnknownExperiment
from .model import ScenarioClass, SliceRequest

EXPERIMENTS = (
    "deployment-times",
    "step-breakdown",
    "attach-latency",
    "reconfig-availability",
    "reconfig-latency",
    "slice-usage",
    "resource-usage",
    "cost-curves",
)

SCENARIO_ORDER = (ScenarioClass.URLLC, ScenarioClass.MMTC,
                  ScenarioClass.SHARED_EMBB, ScenarioClass.NON3GPP)

_NST_TYPE = {
    ScenarioClass.URLLC: "urllc",
    ScenarioClass.MMTC: "mmtc",
    ScenarioClass.SHARED_EMBB: "embb",
    ScenarioClass.NON3GPP: "non3gpp",
}


def scenario_request(scenario: ScenarioClass, name: str | None = None
                     ) -> SliceRequest:
    return SliceRequest(name=name or f"{scenario.value}-slice",
                        nst_type=_NST_TYPE[scenario])


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _csv(name: str, config_digest: str, units: str, header: list[str],
         rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write(f"# experiment={name} config={config_digest[:12]} units={units}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


class ExperimentRunner:
    def __init__(self, config: EngineConfig | None = None):
        self.config = config or EngineConfig.load()

    def run(self, name: str) -> dict[str, str]:
        """Run one experiment; returns {filename: csv_text}."""
        runner = getattr(self, "_run_" + name.replace("-", "_"), None)
        if name not in EXPERIMENTS or runner is None:
            raise UnknownExperiment(f"unknown experiment {name!r}",
                                    known=list(EXPERIMENTS))
        return runner()

    def run_all(self) -> dict[str, str]:
        out: dict[str, str] = {}
        for name in EXPERIMENTS:
            out.update(self.run(name))
        return out

    def _engine(self, overrides: dict | None = None) -> SliceEngine:
        config = self.config.with_overrides(overrides) if overrides else self.config
        return SliceEngine(config)

    # -- datasets ------------------------------------------------------------

    def _run_deployment_times(self) -> dict[str, str]:
        rows = []
        for scenario in SCENARIO_ORDER:
            engine = self._engine()
            nsi = engine.submit(scenario_request(scenario))
            report = engine.deployment_report(nsi.id)
            domains = report.domain_totals()
            rows.append([scenario.value, report.grand_total_s(),
                         domains.get("cn", 0.0), domains.get("ran", 0.0),
                         domains.get("tn", 0.0), domains.get("nsmf", 0.0)])
        return {"deployment_times.csv": _csv(
            "deployment-times", self.config.digest(), "seconds",
            ["scenario", "total_s", "cn_s", "ran_s", "tn_s", "nsmf_s"], rows)}

    def _run_step_breakdown(self) -> dict[str, str]:
        engine = self._engine()
        nsi = engine.submit(scenario_request(ScenarioClass.URLLC))
        report = engine.deployment_report(nsi.id)
        efficiency = engine.efficiency(nsi.id)
        rows = []
        for record in report.rows:
            eff = efficiency["substeps"][record.substep]
            rows.append([record.substep, record.step, record.domain,
                         record.kind, record.actions, record.start,
                         record.end, record.duration, eff["actions_per_s"],
                         int(eff["reuse"])])
        return {"step_breakdown.csv": _csv(
            "step-breakdown", self.config.digest(),
            "seconds;actions_per_second",
            ["substep", "step", "domain", "kind", "actions", "start_s",
             "end_s", "duration_s", "actions_per_s", "reuse"], rows)}

    def _run_attach_latency(self) -> dict[str, str]:
        engine = self._engine()
        for scenario in SCENARIO_ORDER:
            engine.submit(scenario_request(scenario))
        samples = int(self.config.runtime["experiments"]["attach_samples"])
        rows = []
        for scenario in SCENARIO_ORDER:
            for index in range(samples):
                result = engine.attach_ue(scenario)
                engine.detach_ue(result["ue"])
                rows.append([scenario.value, index, result["latency_ms"]])
        return {"attach_latency.csv": _csv(
            "attach-latency", self.config.digest(), "milliseconds",
            ["scenario", "sample", "latency_ms"], rows)}

    def _run_reconfig_availability(self) -> dict[str, str]:
        engine = self._engine()
        nsi = engine.submit(scenario_request(ScenarioClass.SHARED_EMBB))
        t0 = engine.clock.now
        start = float(self.config.runtime["reconfig"]["start_s"])
        engine.reconfigure_at(nsi.id, t0 + start)
        engine.run_until_idle()
        horizon = t0 + 40.0
        engine.advance(horizon)
        tracker = engine.availability[nsi.id]
        period = float(self.config.runtime["sampling"]["latency_period_s"])
        rows = [[round(t - t0, 6), value]
                for t, value in tracker.sample(t0, horizon, period)]
        return {"reconfig_availability.csv": _csv(
            "reconfig-availability", self.config.digest(),
            "seconds;binary availability",
            ["time_s", "availability"], rows)}

    def _run_reconfig_latency(self) -> dict[str, str]:
        rows = []
        for mode in ("orchestrated", "no-orchestration"):
            engine = self._engine({"runtime": {"attach": {"noise_pct": 0.0}}})
            nsi = engine.submit(scenario_request(ScenarioClass.SHARED_EMBB))
            t0 = engine.clock.now
            reconfig = self.config.runtime["reconfig"]
            start = float(reconfig["start_s"])
            duration = float(reconfig["probe_duration_s"])
            if mode == "orchestrated":
                engine.reconfigure_at(nsi.id, t0 + start)
            else:
                engine.bare_restart_at(nsi.id, t0 + start)
            period = float(self.config.runtime["sampling"]["latency_period_s"])
            steps = int(round(duration / period))
            for i in range(steps + 1):
                t = t0 + i * period
                engine.advance(t)
                try:
                    result = engine.attach_ue(ScenarioClass.SHARED_EMBB)
                    engine.detach_ue(result["ue"])
                    rows.append([mode, round(i * period, 6), 1,
                                 result["latency_ms"]])
                except NoAmfAvailable:
                    rows.append([mode, round(i * period, 6), 0, ""])
            engine.run_until_idle()
        return {"reconfig_latency.csv": _csv(
            "reconfig-latency", self.config.digest(),
            "seconds;milliseconds",
            ["mode", "time_s", "success", "latency_ms"], rows)}

    def _run_slice_usage(self) -> dict[str, str]:
        engine = self._engine()
        engine.submit_at(scenario_request(ScenarioClass.SHARED_EMBB,
                                          "shared-primary"), 0.0)
        engine.submit_at(scenario_request(ScenarioClass.SHARED_EMBB,
                                          "shared-secondary"), 0.0)
        engine.run_until_idle()
        slices = sorted(engine.orchestrator.nsis)
        primary, secondary = slices[0], slices[1]

        usage_cfg = self.config.runtime["experiments"]["slice_usage"]
        first = float(usage_cfg["first_ue_t"])
        interval = float(usage_cfg["ue_interval_s"])
        duration = float(usage_cfg["duration_s"])
        attach_times = set()
        t = first
        while t <= duration:
            attach_times.add(round(t, 6))
            t += interval

        rows = []
        for second in range(int(duration) + 1):
            if float(second) >= engine.clock.now:
                engine.advance(float(second))
            if float(second) in attach_times:
                try:
                    engine.attach_ue(ScenarioClass.SHARED_EMBB)
                except NsaasError:
                    pass
            rows.append([second, engine.admission.count(primary),
                         engine.admission.count(secondary)])
        return {"slice_usage.csv": _csv(
            "slice-usage", self.config.digest(), "seconds;concurrent UEs",
            ["time_s", "slice_a_ues", "slice_b_ues"], rows)}

    def _run_resource_usage(self) -> dict[str, str]:
        engine = self._engine()
        exp_cfg = self.config.runtime["experiments"]
        batch_t = float(exp_cfg["batch1_t"])
        for i in range(int(exp_cfg["batch_size"])):
            engine.submit_at(scenario_request(ScenarioClass.URLLC,
                                              f"urllc-batch1-{i + 1}"), batch_t)
        horizon = float(exp_cfg["resource_horizon_s"])
        period = float(self.config.runtime["sampling"]["resource_period_s"])
        samples = engine.run_sampled(horizon, period)
        slice_ids = sorted(engine.orchestrator.nsis)
        header = ["time_s", "vcpu_total", "ram_gb_total"]
        for nsi_id in slice_ids:
            header += [f"vcpu_{nsi_id}", f"ram_gb_{nsi_id}"]
        rows = []
        for sample in samples:
            row = [sample["t"], sample["vcpu_total"], sample["ram_gb_total"]]
            for nsi_id in slice_ids:
                per = sample["slices"].get(nsi_id)
                row += ([per["vcpu"], per["ram_gb"]] if per else [0.0, 0.0])
            rows.append(row)
        return {"resource_usage.csv": _csv(
            "resource-usage", self.config.digest(), "vCPU;GB",
            header, rows)}

    def _run_cost_curves(self) -> dict[str, str]:
        engine = self._engine()
        exp_cfg = self.config.runtime["experiments"]
        size = int(exp_cfg["batch_size"])
        batch1, batch2 = float(exp_cfg["batch1_t"]), float(exp_cfg["batch2_t"])
        for i in range(size):
            engine.submit_at(scenario_request(ScenarioClass.URLLC,
                                              f"urllc-batch1-{i + 1}"), batch1)
        for i in range(size):
            engine.submit_at(scenario_request(ScenarioClass.URLLC,
                                              f"urllc-batch2-{i + 1}"), batch2)
        horizon = float(exp_cfg["resource_horizon_s"])
        period = float(self.config.runtime["sampling"]["resource_period_s"])
        samples = engine.run_sampled(horizon, period)

        activations = sorted(
            r["virtual_time"] for r in engine.events.filter(kind="nsi_active"))
        markers = {}
        if len(activations) >= size:
            markers[round(activations[size - 1])] = "batch1-complete"
        if len(activations) >= 2 * size:
            markers[round(activations[-1])] = "all-complete"
        markers[round(batch1)] = "batch1-submitted"
        markers[round(batch2)] = "batch2-submitted"

        models = fit_all_tiers()
        rows = []
        for sample in samples:
            t = sample["t"]
            vcpu, ram = sample["vcpu_total"], sample["ram_gb_total"]
            rows.append([
                t,
                models["Edge"].predict(vcpu, ram),
                models["Metropolitan"].predict(vcpu, ram),
                models["Central"].predict(vcpu, ram),
                markers.get(round(t), ""),
            ])
        return {"cost_curves.csv": _csv(
            "cost-curves", self.config.digest(), "seconds;USD per month",
            ["time_s", "edge_usd", "metropolitan_usd", "central_usd", "event"],
            rows)}
