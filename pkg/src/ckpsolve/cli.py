"""Command-line front end: solve, mechanism, gen, audit.

Exit codes: 0 success, 2 input or validation error, 3 resource cap hit,
4 internal invariant failure.  Reports are emitted as JSON (machine
readable) and optionally as an aligned key,value CSV table with identical
content.  All randomness flows from --seed; results never depend on the
wall clock.  Setting CKPSOLVE_CACHE to a directory archives every report
under its instance-and-parameters hash.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from fractions import Fraction

from .errors import (CombinatorialCap, GridTooLarge, InternalInconsistency,
                     InvalidParams, OracleCap, ParseError)
from .model import frac, load_and_check
from .fptas import ckp_bifptas, multickp_fptas
from .ptas_range import box_bid_from_complex, multi_mdkp_ptas
from .mechanism import build_range, mechanism_outcome
from .oracle import brute_force_ckp, brute_force_multi
from .audit import run_audit
from .instances import (SubSumSpec, gen_random, gen_subsum_reduction,
                        instance_hash, read_instance, subsum_manifest,
                        write_instance)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CAP = 3
EXIT_INTERNAL = 4


def _fstr(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def flatten_report(obj) -> list:
    """Dotted-key flattening used by the CSV writer."""
    out = []

    def walk(o, prefix):
        if isinstance(o, dict):
            for k, v in o.items():
                walk(v, prefix + (k,))
        elif isinstance(o, list):
            for i, v in enumerate(o):
                walk(v, prefix + (str(i),))
        else:
            out.append((".".join(prefix), o))

    walk(obj, ())
    return out


def report_to_csv(report: dict) -> str:
    """Two-column aligned CSV with the same content as the JSON report."""
    rows = flatten_report(report)
    width = max((len(k) for k, _ in rows), default=3)
    lines = [f"{'key'.ljust(width)},value"]
    for k, v in rows:
        lines.append(f"{k.ljust(width)},{v}")
    return "\n".join(lines) + "\n"


def emit_report(report: dict, out=None, csv=None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if csv:
        with open(csv, "w") as fh:
            fh.write(report_to_csv(report))
    cache = os.environ.get("CKPSOLVE_CACHE")
    if cache:
        os.makedirs(cache, exist_ok=True)
        key = hashlib.sha256(
            json.dumps(report, sort_keys=True).encode()).hexdigest()[:24]
        with open(os.path.join(cache, f"{key}.json"), "w") as fh:
            fh.write(text + "\n")


def _alloc_dict(inst, alloc) -> dict:
    return {
        "chosen": [{"re": _fstr(d.re), "im": _fstr(d.im)} for d in alloc.chosen],
        "value": _fstr(alloc.total_value),
        "load_re": _fstr(alloc.total_load.re),
        "load_im": _fstr(alloc.total_load.im),
        "load_sq": _fstr(alloc.total_load.magnitude_sq()),
    }


def cmd_solve(args) -> int:
    inst = read_instance(args.instance)
    report = {
        "command": "solve",
        "instance": args.instance,
        "instance_hash": instance_hash(inst),
        "solver": args.solver,
        "capacity": _fstr(inst.capacity),
    }
    t0 = time.perf_counter()
    if args.solver == "oracle":
        beta = frac(args.beta)
        r = (brute_force_ckp(inst, beta) if inst.is_single_minded
             else brute_force_multi(inst, beta))
        report["beta"] = _fstr(beta)
        report["value"] = _fstr(r.opt_value)
        report["allocation"] = _alloc_dict(inst, r.witness)
        report["nodes_explored"] = r.nodes_explored
    elif args.solver == "ptas":
        if args.box is None:
            raise InvalidParams("--box RE,IM is required for the ptas solver")
        parts = args.box.split(",")
        if len(parts) != 2:
            raise InvalidParams("--box expects two comma-separated rationals")
        box = tuple(frac(p) for p in parts)
        bids = [box_bid_from_complex(b) for b in inst.bids]
        res = multi_mdkp_ptas(bids, box, frac(args.eps))
        report["eps"] = _fstr(frac(args.eps))
        report["box"] = [_fstr(box[0]), _fstr(box[1])]
        report["value"] = _fstr(res.total_value)
        report["load_re"] = _fstr(res.total[0])
        report["load_im"] = _fstr(res.total[1])
        report["heavy_sets_tried"] = res.stats.heavy_sets
        if args.verify:
            opt = brute_force_multi(inst, box=box)
            eps = frac(args.eps)
            report["verify"] = {
                "oracle_value": _fstr(opt.opt_value),
                "guarantee_holds":
                    res.total_value >= (1 - eps) * opt.opt_value,
            }
    else:
        eps = frac(args.eps)
        solver = ckp_bifptas if args.solver == "bifptas" else multickp_fptas
        if args.solver == "bifptas" and not inst.is_single_minded:
            raise InvalidParams("bifptas requires a single-minded instance")
        res = solver(inst, eps)
        report["eps"] = _fstr(eps)
        report.update(res.to_json_dict())
        report["allocation"] = _alloc_dict(inst, res.allocation)
        report["violation_factor_satisfied"] = load_and_check(
            res.allocation, inst.capacity, res.violation_bound)
        if args.verify:
            opt = (brute_force_ckp(inst) if inst.is_single_minded
                   else brute_force_multi(inst))
            report["verify"] = {
                "oracle_value": _fstr(opt.opt_value),
                "value_at_least_oracle":
                    res.allocation.total_value >= opt.opt_value,
            }
    report["wall_time"] = time.perf_counter() - t0
    emit_report(report, args.out, args.csv)
    return EXIT_OK


def cmd_mechanism(args) -> int:
    inst = read_instance(args.instance)
    eps = frac(args.eps)
    rng_desc = build_range(inst.capacity, inst.n, eps,
                           inst.power_factor_bound)
    out = mechanism_outcome(list(inst.bids), rng_desc)
    report = {
        "command": "mechanism",
        "instance": args.instance,
        "instance_hash": instance_hash(inst),
        "eps": _fstr(eps),
        "range_hash": out.range_hash,
        "allocation": _alloc_dict(inst, out.allocation),
        "payments": [_fstr(p) for p in out.payments],
        "stats": {
            "solver_calls": out.stats.solver_calls,
            "guesses": out.stats.guesses,
            "wall_time": out.stats.wall_time,
        },
    }
    emit_report(report, args.out, args.csv)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.family == "subsum":
        if not args.set:
            raise InvalidParams("--set is required for the subsum family")
        elements = [int(x) for x in args.set.split(",")]
        spec = SubSumSpec(elements, args.target, frac(args.cot),
                          frac(args.alpha))
        inst = gen_subsum_reduction(spec)
        manifest = subsum_manifest(spec)
    else:
        inst = gen_random(args.n, args.options, frac(args.quadrant_mix),
                          args.seed, capacity=frac(args.capacity),
                          power_factor=frac(args.power_factor),
                          denominator=args.denominator)
        manifest = {
            "family": "random",
            "n": args.n,
            "options": args.options,
            "quadrant_mix": _fstr(frac(args.quadrant_mix)),
            "seed": args.seed,
            "capacity": _fstr(frac(args.capacity)),
            "power_factor": _fstr(frac(args.power_factor)),
        }
    write_instance(inst, args.out)
    report = {
        "command": "gen",
        "out": args.out,
        "instance_hash": instance_hash(inst),
        "manifest": manifest,
    }
    emit_report(report, None, args.csv)
    return EXIT_OK


def cmd_audit(args) -> int:
    inst = read_instance(args.instance)
    report = run_audit(inst, frac(args.eps), args.trials, args.seed,
                       jobs=args.jobs)
    report = {"command": "audit", "instance": args.instance,
              "instance_hash": instance_hash(inst),
              "eps": _fstr(frac(args.eps)), **report}
    emit_report(report, args.out, args.csv)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ckpsolve",
        description="Solvers and a truthful mechanism for knapsack "
                    "problems with complex-valued demands")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="solve one instance")
    ps.add_argument("instance")
    ps.add_argument("--solver", required=True,
                    choices=["bifptas", "multifptas", "ptas", "oracle"])
    ps.add_argument("--eps", default="1/2", help="accuracy, e.g. 1/4")
    ps.add_argument("--beta", default="1/1", help="oracle load relaxation")
    ps.add_argument("--box", default=None,
                    help="RE,IM capacity box for the ptas solver")
    ps.add_argument("--verify", action="store_true",
                    help="also run the exact oracle and compare")
    ps.add_argument("--out", default=None)
    ps.add_argument("--csv", default=None)
    ps.set_defaults(func=cmd_solve)

    pm = sub.add_parser("mechanism", help="truthful allocation + payments")
    pm.add_argument("instance")
    pm.add_argument("--eps", default="1/2")
    pm.add_argument("--out", default=None)
    pm.add_argument("--csv", default=None)
    pm.set_defaults(func=cmd_mechanism)

    pg = sub.add_parser("gen", help="generate an instance file")
    pg.add_argument("--family", required=True, choices=["subsum", "random"])
    pg.add_argument("--out", required=True)
    pg.add_argument("--set", default=None,
                    help="subsum: comma-separated positive integers")
    pg.add_argument("--target", type=int, default=None,
                    help="subsum: the required sum")
    pg.add_argument("--cot", default="1/1",
                    help="subsum: cotangent of the off-axis angle")
    pg.add_argument("--alpha", default="1/2", help="subsum: value gap")
    pg.add_argument("--n", type=int, default=5)
    pg.add_argument("--options", type=int, default=1)
    pg.add_argument("--quadrant-mix", dest="quadrant_mix", default="0/1")
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--capacity", default="1/1")
    pg.add_argument("--power-factor", dest="power_factor", default="2/1")
    pg.add_argument("--denominator", type=int, default=None)
    pg.add_argument("--csv", default=None)
    pg.set_defaults(func=cmd_gen)

    pa = sub.add_parser("audit", help="randomized misreport trials")
    pa.add_argument("instance")
    pa.add_argument("--eps", default="1/2")
    pa.add_argument("--trials", type=int, default=100)
    pa.add_argument("--seed", type=int, default=0)
    pa.add_argument("--jobs", type=int, default=1)
    pa.add_argument("--out", default=None)
    pa.add_argument("--csv", default=None)
    pa.set_defaults(func=cmd_audit)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, InvalidParams, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (GridTooLarge, OracleCap, CombinatorialCap) as e:
        print(f"resource cap: {e}", file=sys.stderr)
        return EXIT_CAP
    except InternalInconsistency as e:
        print(f"internal invariant failure: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
