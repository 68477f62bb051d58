"""``prove`` command line entry point.

Exit codes: 0 proved, 1 failed (certificate still written), 2 planning
failure, 3 cover gap.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from .errors import CoverGap, OracleAmbiguous, PlanningFailure
from .methods import ProverConfig
from .orchestrator import emit_certificate, emit_plot_data, emit_table, execute, verify_cover
from .planner import ProofPlan, build_plan

EXIT_PROVED, EXIT_FAILED, EXIT_PLANNING, EXIT_COVER = 0, 1, 2, 3


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="prove", description="Prove uniqueness of the first N+1 radial bound states.")
    p.add_argument("--n", type=int, required=True, help="highest excited-state index")
    p.add_argument("--plan-out", help="write the plan as JSON")
    p.add_argument("--plan-in", help="read the plan from JSON instead of planning")
    p.add_argument("--cert-out", help="write the certificate as JSON")
    p.add_argument("--table", action="store_true", help="print the results table")
    p.add_argument("--plot-data", help="write limit-vs-b CSV")
    p.add_argument("--taylor-order", type=int, default=None)
    p.add_argument("--t0", type=float, default=None, help="desingularization time")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args) -> ProverConfig:
    cfg = ProverConfig()
    if args.taylor_order is not None:
        cfg = replace(cfg, integrator=replace(cfg.integrator, order=args.taylor_order))
    if args.t0 is not None:
        cfg = replace(cfg, t0=(args.t0, args.t0))
    if args.max_depth is not None:
        cfg = replace(cfg, max_depth=args.max_depth)
    return cfg


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(message)s")
    cfg = config_from_args(args)
    try:
        if args.plan_in:
            plan = ProofPlan.load(args.plan_in)
            if plan.n_states != args.n:
                print(f"plan is for N={plan.n_states}, not {args.n}", file=sys.stderr)
                return EXIT_PLANNING
        else:
            plan = build_plan(args.n, config=cfg)
    except (PlanningFailure, OracleAmbiguous) as exc:
        print(f"planning failed: {exc}", file=sys.stderr)
        return EXIT_PLANNING
    if args.plan_out:
        plan.dump(args.plan_out)
    try:
        verify_cover(plan)
    except CoverGap as exc:
        print(f"cover gap: {exc}", file=sys.stderr)
        return EXIT_COVER
    cert = execute(plan, cfg, threads=args.threads)
    if args.cert_out:
        emit_certificate(cert, args.cert_out)
    if args.table:
        print(emit_table(cert))
    if args.plot_data:
        emit_plot_data(cert, args.plot_data)
    for c in cert.conclusions:
        verdict = "unique" if c["unique"] else "NOT proved"
        print(f"state {c['state']}: {verdict}")
    for r in cert.failures():
        print(f"failed: {r.method} on {r.interval}: {r.status}", file=sys.stderr)
    return EXIT_PROVED if cert.proved else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
