"""Command-line entry points: run / synth / compare / serve."""

from __future__ import annotations

import argparse
import json
import statistics
import sys

from .classifier import TrainConfig, active_learn
from .datasets import load_dataset, write_synth_dataset
from .ingest import IngestError
from .orchestrator import SessionConfig, oracle_from_gold, run_session
from .riskengine import RiskConfig

REPORT_VERSION = 1


def _train_classifier(ds, seed, train_budget=None):
    budget = train_budget or ds.config.get("train_budget") or max(40, len(ds.workload.pairs) // 20)
    return active_learn(ds.workload, oracle_from_gold(ds.gold), budget,
                        ds.feature_config, hyper=TrainConfig(seed=seed))


def cmd_run(args):
    ds = load_dataset(args.dataset)
    result = _train_classifier(ds, args.seed, args.train_budget)
    config = SessionConfig(strategy=args.mode, budget=args.budget,
                           batch_size=args.batch, risk=RiskConfig(theta=args.theta),
                           seed=args.seed, labeler=args.labeler)
    if args.labeler == "human":
        print("human labeling runs through the HTTP service; start it with "
              "`riskloop serve` and point the labeling UI at it", file=sys.stderr)
        return 2
    session, report = run_session(ds.workload, result.classifier, ds.gold, config,
                                  train_indices=result.train_indices,
                                  train_labels=result.train_labels)
    doc = {
        "version": REPORT_VERSION,
        "config": {
            "dataset": args.dataset, "mode": args.mode, "budget": args.budget,
            "batch": args.batch, "theta": args.theta, "seed": args.seed,
            "labeler": args.labeler, "workload_size": len(ds.workload.pairs),
        },
        "pickup_curve": report.pickup_curve,
        "quality_curve": report.quality_curve,
        "iterations": report.iterations,
    }
    _emit(doc, args.out)
    return 0


def cmd_synth(args):
    cfg = write_synth_dataset(args.out, args.seed, args.entities)
    print(f"wrote synthetic dataset ({args.entities} entities, seed {args.seed}) "
          f"to {args.out}", file=sys.stderr)
    print(json.dumps(cfg, indent=2))
    return 0


def cmd_compare(args):
    ds = load_dataset(args.dataset)
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    budgets = sorted(int(b) for b in args.sweep.split(","))
    seeds = [int(s) for s in args.seeds.split(",")]
    rows = []
    for seed in seeds:
        result = _train_classifier(ds, seed, args.train_budget)
        for mode in modes:
            config = SessionConfig(strategy=mode, budget=max(budgets),
                                   risk=RiskConfig(theta=args.theta), seed=seed)
            session, report = run_session(ds.workload, result.classifier, ds.gold, config,
                                          train_indices=result.train_indices,
                                          train_labels=result.train_labels)
            pick = dict(report.pickup_curve)
            qual = {b: (p, r, f) for b, p, r, f in report.quality_curve}
            for b in budgets:
                p, r, f = qual[b]
                rows.append({"seed": seed, "mode": mode, "budget": b,
                             "pickup": pick[b], "precision": p, "recall": r, "f1": f})
    summary = {}
    for mode in modes:
        for b in budgets:
            vals = [row for row in rows if row["mode"] == mode and row["budget"] == b]
            summary.setdefault(mode, {})[b] = {
                "median_pickup": statistics.median(r["pickup"] for r in vals),
                "median_f1": statistics.median(r["f1"] for r in vals),
            }
    doc = {"version": REPORT_VERSION,
           "config": {"dataset": args.dataset, "modes": modes, "budgets": budgets,
                      "seeds": seeds, "theta": args.theta},
           "runs": rows, "summary": summary}
    _emit(doc, args.out)
    return 0


def cmd_serve(args):
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(args.storage), host=args.host, port=args.port)
    return 0


def _emit(doc, out):
    text = json.dumps(doc, indent=2)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def build_parser():
    parser = argparse.ArgumentParser(prog="riskloop",
                                     description="risk-prioritized human verification "
                                                 "for entity resolution")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one verification session")
    p_run.add_argument("--dataset", required=True)
    p_run.add_argument("--mode", default="cvar", choices=["cvar", "base", "unct", "actl"])
    p_run.add_argument("--budget", type=int, required=True)
    p_run.add_argument("--batch", type=int, default=1)
    p_run.add_argument("--theta", type=float, default=0.8)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--labeler", default="oracle", choices=["oracle", "human"])
    p_run.add_argument("--train-budget", type=int, default=None)
    p_run.add_argument("--out", default=None)
    p_run.set_defaults(func=cmd_run)

    p_synth = sub.add_parser("synth", help="generate a synthetic dataset directory")
    p_synth.add_argument("--seed", type=int, default=1)
    p_synth.add_argument("--entities", type=int, default=650)
    p_synth.add_argument("--out", required=True)
    p_synth.set_defaults(func=cmd_synth)

    p_cmp = sub.add_parser("compare", help="sweep strategies over budgets")
    p_cmp.add_argument("--dataset", required=True)
    p_cmp.add_argument("--modes", default="cvar,base,unct")
    p_cmp.add_argument("--sweep", required=True, help="comma-separated budgets")
    p_cmp.add_argument("--seeds", default="1,2,3,4,5")
    p_cmp.add_argument("--theta", type=float, default=0.8)
    p_cmp.add_argument("--train-budget", type=int, default=None)
    p_cmp.add_argument("--out", default=None)
    p_cmp.set_defaults(func=cmd_compare)

    p_srv = sub.add_parser("serve", help="start the labeling HTTP service")
    p_srv.add_argument("--storage", default="./sessions")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8000)
    p_srv.set_defaults(func=cmd_serve)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (IngestError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
