"""One-shot command line for the slice engine.

State between invocations lives in an operations log (JSON Lines) under
the state directory: every mutating command is appended and the engine is
rebuilt by deterministic replay, so `status` after `submit` in a new
process sees the same virtual-clock state and inventory digest.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

from .config import EngineConfig
from .digest import canonical_dumps
from .engine import SliceEngine
from .errors import NsaasError
from .experiments import EXPERIMENTS, ExperimentRunner

OPS_FILE = "ops.jsonl"


def _load_config(args) -> EngineConfig:
    return EngineConfig.load(args.config)


def _ops_path(args) -> Path:
    state_dir = Path(args.state_dir)
    state_dir.mkdir(parents=True, exist_ok=True)
    return state_dir / OPS_FILE


def _replay(engine: SliceEngine, ops_path: Path) -> None:
    if not ops_path.exists():
        return
    for line in ops_path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        op = json.loads(line)
        try:
            if op["op"] == "submit":
                engine.submit(op["payload"])
            elif op["op"] == "reconfigure":
                engine.reconfigure(op["id"], op.get("profile") or {})
            elif op["op"] == "delete":
                engine.delete(op["id"])
        except NsaasError as exc:
            print(f"replay: {op['op']} -> {exc.code}", file=sys.stderr)


def _append_op(ops_path: Path, op: dict) -> None:
    with ops_path.open("a", encoding="utf-8") as fh:
        fh.write(canonical_dumps(op) + "\n")


def _session_engine(args) -> tuple[SliceEngine, Path]:
    engine = SliceEngine(_load_config(args))
    ops_path = _ops_path(args)
    _replay(engine, ops_path)
    return engine, ops_path


def _pace_events(engine: SliceEngine, factor: float, from_index: int) -> None:
    """Stream events to stdout paced by virtual-time gaps (demo mode)."""
    records = engine.events.records[from_index:]
    previous = records[0]["virtual_time"] if records else 0.0
    for record in records:
        gap = record["virtual_time"] - previous
        if gap > 0 and factor > 0:
            time.sleep(gap / factor)
        previous = record["virtual_time"]
        print(canonical_dumps(record))


def cmd_submit(args) -> int:
    engine, ops_path = _session_engine(args)
    payload = json.loads(Path(args.file).read_text(encoding="utf-8"))
    mark = len(engine.events.records)
    nsi = engine.submit(payload)
    _append_op(ops_path, {"op": "submit", "payload": payload})
    if args.realtime_factor:
        _pace_events(engine, args.realtime_factor, mark)
    print(json.dumps({"id": nsi.id, "state": nsi.state.value,
                      "snssai": nsi.snssai.key(),
                      "scenario": nsi.scenario.value}, indent=2))
    return 0


def cmd_status(args) -> int:
    engine, _ = _session_engine(args)
    if args.id:
        print(json.dumps(engine.get_nsi(args.id), indent=2))
        return 0
    rows = engine.list_nsis()
    if not rows:
        print("no slices")
        return 0
    for snapshot in rows:
        snssai = snapshot["snssai"]
        print(f"{snapshot['id']:10s} {snapshot['state']:14s} "
              f"{snapshot['scenario']:12s} sst={snssai['sst']} sd={snssai['sd']}")
    return 0


def cmd_reconfigure(args) -> int:
    engine, ops_path = _session_engine(args)
    profile = {}
    if args.vcpu is not None:
        profile["vcpu_request"] = args.vcpu
    if args.ram_mb is not None:
        profile["ram_mb_request"] = args.ram_mb
    if args.replicas is not None:
        profile["replicas"] = args.replicas
    mark = len(engine.events.records)
    nsi = engine.reconfigure(args.id, profile)
    _append_op(ops_path, {"op": "reconfigure", "id": args.id,
                          "profile": profile})
    if args.realtime_factor:
        _pace_events(engine, args.realtime_factor, mark)
    print(json.dumps({"id": nsi.id, "state": nsi.state.value}, indent=2))
    return 0


def cmd_delete(args) -> int:
    engine, ops_path = _session_engine(args)
    nsi = engine.delete(args.id)
    _append_op(ops_path, {"op": "delete", "id": args.id})
    print(json.dumps({"id": nsi.id, "state": nsi.state.value}, indent=2))
    return 0


def cmd_experiment(args) -> int:
    runner = ExperimentRunner(_load_config(args))
    names = list(EXPERIMENTS) if args.name == "all" else [args.name]
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in names:
        for filename, text in runner.run(name).items():
            path = out_dir / filename
            path.write_text(text, encoding="utf-8")
            print(f"wrote {path}")
    return 0


def _csv_to_jsonl(text: str) -> str:
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    reader = csv.DictReader(io.StringIO("\n".join(lines)))
    return "\n".join(canonical_dumps(dict(row)) for row in reader) + "\n"


def cmd_export(args) -> int:
    """Export the current session: event log plus metric series
    (availability, attach latency, utilization) keyed by virtual time."""
    engine, _ = _session_engine(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    (out_dir / "events.jsonl").write_text(engine.events.to_jsonl(),
                                          encoding="utf-8")
    print(f"wrote {out_dir / 'events.jsonl'}")

    series: dict[str, list[dict]] = {"availability": [], "attach_latency": [],
                                     "utilization": []}
    for nsi_id, tracker in sorted(engine.availability.items()):
        for t, value in tracker.transitions:
            series["availability"].append(
                {"time_s": t, "nsi": nsi_id, "value": value})
    for record in engine.telemetry.records:
        bucket = ("attach_latency" if record.metric == "attach_latency_ms"
                  else "utilization")
        series[bucket].append({"time_s": record.t, "snssai": record.snssai,
                               "metric": record.metric, "value": record.value})

    for name, rows in series.items():
        if args.format == "jsonl":
            path = out_dir / f"{name}.jsonl"
            text = "\n".join(canonical_dumps(r) for r in rows)
            path.write_text(text + ("\n" if text else ""), encoding="utf-8")
        else:
            path = out_dir / f"{name}.csv"
            buf = io.StringIO()
            fields = sorted({k for r in rows for k in r}) or ["time_s"]
            writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
            path.write_text(buf.getvalue(), encoding="utf-8")
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nsaas",
        description="Network-slice-as-a-service engine over simulated "
                    "infrastructure")
    parser.add_argument("--config", default=None,
                        help="JSON config override file (or env NASP_CONFIG)")
    parser.add_argument("--state-dir", default=".nsaas-state",
                        help="session state directory")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--realtime-factor", type=float, default=0.0,
                        help="pace event output at virtual-seconds/factor")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("submit", help="submit a slice request JSON file")
    p.add_argument("file")
    p.set_defaults(func=cmd_submit)

    p = sub.add_parser("status", help="show slice state")
    p.add_argument("id", nargs="?")
    p.set_defaults(func=cmd_status)

    p = sub.add_parser("reconfigure", help="replace-and-redeploy the AMF")
    p.add_argument("id")
    p.add_argument("--vcpu", type=float)
    p.add_argument("--ram-mb", type=float)
    p.add_argument("--replicas", type=int)
    p.set_defaults(func=cmd_reconfigure)

    p = sub.add_parser("delete", help="decommission a slice")
    p.add_argument("id")
    p.set_defaults(func=cmd_delete)

    p = sub.add_parser("experiment", help="regenerate an evaluation dataset")
    p.add_argument("name", choices=list(EXPERIMENTS) + ["all"])
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("export", help="export session metric series")
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p.set_defaults(func=cmd_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NsaasError as exc:
        print(json.dumps(exc.to_dict(), indent=2), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
