"""Command-line interface.

    simharness run <scenario.json> [--seed S] [--out DIR] [--crash-at MS]
    simharness metrics <logdir>
    simharness compare-momentum <scenario.json> [--seed S]
    simharness gen-weights --seed S --arch arch.json --out w.bin
    simharness serve ... (live cloud service with the console API)

Exit codes: 0 on success, 2 on validation errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from edgeguard.cloud.eventlog import CorruptLog, read_log
from edgeguard.detectors import GroundTruthInterval
from edgeguard.sim.harness import compare_momentum, report_from_log, run_scenario
from edgeguard.sim.scenario import ScenarioError, load_scenario
from edgeguard.verifier.network import NetworkSpec, default_arch, init_weights
from edgeguard.verifier.weights import save_weights

EXIT_VALIDATION = 2


def _cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    report = run_scenario(scenario, outdir=args.out, seed=args.seed,
                          crash_at_ms=args.crash_at)
    print(report.table())
    if args.out:
        print("artifacts written to %s" % args.out)
    return 0


def _cmd_metrics(args) -> int:
    logdir = Path(args.logdir)
    records = read_log(logdir / "events.jsonl")
    truth_obj = json.loads((logdir / "ground_truth.json").read_text())
    truth = {
        device_id: tuple(
            GroundTruthInterval(iv["start_seq"], iv["end_seq"], iv["label"])
            for iv in intervals
        )
        for device_id, intervals in truth_obj["devices"].items()
    }
    report = report_from_log(records, truth)
    print(report.table())
    return 0


def _cmd_compare(args) -> int:
    scenario = load_scenario(args.scenario)
    result = compare_momentum(scenario, seed=args.seed)
    for mode in ("momentum_on", "momentum_off"):
        print("== %s ==" % mode)
        print(result[mode].table())
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        payload = {mode: result[mode].to_json() for mode in result}
        (out / "compare_momentum.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print("comparison written to %s" % (out / "compare_momentum.json"))
    return 0


def _cmd_gen_weights(args) -> int:
    if args.arch:
        arch = NetworkSpec.load(args.arch)
    else:
        arch = default_arch()
    params = init_weights(arch, seed=args.seed)
    save_weights(params, args.out)
    total = sum(w.size + b.size for w, b in params)
    print("wrote %s (%d parameters, seed %d)" % (args.out, total, args.seed))
    return 0


def _cmd_serve(args) -> int:
    from edgeguard.cloud.server import serve

    serve(
        device_port=args.device_port,
        console_port=args.console_port,
        weights=args.weights,
        arch=args.arch,
        stub_score=args.stub_score,
        static_dir=args.static,
        webhook_url=args.webhook,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simharness")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario and print its metrics")
    p_run.add_argument("scenario")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", default=None, help="directory for logs/clips/report")
    p_run.add_argument("--crash-at", type=int, default=None,
                       help="virtual ms at which to crash and replay the cloud service")
    p_run.set_defaults(func=_cmd_run)

    p_metrics = sub.add_parser("metrics", help="recompute the report from a log directory")
    p_metrics.add_argument("logdir")
    p_metrics.set_defaults(func=_cmd_metrics)

    p_cmp = sub.add_parser("compare-momentum",
                           help="run with the momentum trigger vs single-frame thresholds")
    p_cmp.add_argument("scenario")
    p_cmp.add_argument("--seed", type=int, default=None)
    p_cmp.add_argument("--out", default=None)
    p_cmp.set_defaults(func=_cmd_compare)

    p_gen = sub.add_parser("gen-weights", help="write seeded random network weights")
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--arch", default=None, help="architecture JSON (default: reference arch)")
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=_cmd_gen_weights)

    p_serve = sub.add_parser("serve", help="run the live cloud service")
    p_serve.add_argument("--device-port", type=int, default=7700)
    p_serve.add_argument("--console-port", type=int, default=7780)
    p_serve.add_argument("--weights", default=None)
    p_serve.add_argument("--arch", default=None)
    p_serve.add_argument("--stub-score", type=float, default=None,
                         help="verify every clip with this fixed score instead of a network")
    p_serve.add_argument("--static", default=None, help="directory of console static files")
    p_serve.add_argument("--webhook", default=None, help="notification webhook URL")
    p_serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, CorruptLog, FileNotFoundError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
