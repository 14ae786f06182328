"""Command line entry point: ``basispursuit <subcommand> ...``.

Exit status is 0 on success, 1 when a check or verification fails and 2 on
usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .errors import BasisPursuitError, RankMismatchError
from .generators import FAMILIES, GeneratorSpec, generate
from .harness import binomial_slack, degrees_of_freedom, run_experiment, uniform_sampling_failure_demo
from .linalg import DEFAULT_TOL, read_matrix, write_matrix
from .oracle import EntryOracle
from .rbp import RbpConfig, rbp_reconstruct
from .rfrbp import RfRbpConfig, compute_lambda, rfrbp_reconstruct
from .stability import stability_index_certified, stability_index_exhaustive, row_stability_index_exhaustive


class UsageError(Exception):
    pass


def _parse_params(items):
    params = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        values = [float(v) for v in value.split(",") if v]
        params[key] = values if ("," in value or key in ("a", "u", "v", "singular_values")) else values[0]
    return params


def _emit(args, payload):
    text = json.dumps(payload, indent=2, default=_jsonable)
    print(text)
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def cmd_generate(args):
    spec = GeneratorSpec(args.family, args.m, args.n, args.r, _parse_params(args.param), args.seed)
    A = generate(spec)
    write_matrix(args.output, A, comment=json.dumps(spec.to_dict()))
    _emit(args, {"output": args.output, "shape": list(A.shape), "spec": spec.to_dict()})
    return 0


def cmd_stability(args):
    A = read_matrix(args.matrix)
    if args.rows:
        A = A.T
    if args.certify is not None:
        rep = stability_index_certified(A, args.certify, args.trials, args.seed, args.tol)
        out = rep.to_dict()
    else:
        rep = stability_index_exhaustive(A, args.tol, args.cap)
        out = rep.to_dict()
    out["axis"] = "row" if args.rows else "column"
    _emit(args, out)
    return 0


def cmd_reconstruct(args):
    A = read_matrix(args.matrix)
    oracle = EntryOracle(A)
    status = 0
    if args.algo == "rbp":
        if args.rank is None:
            raise UsageError("--algo rbp requires --rank")
        cfg = RbpConfig(rank=args.rank, delta=args.delta, cap_k=args.cap, seed=args.seed,
                        tol=args.tol, prune_spanned=args.prune_spanned)
        try:
            res = rbp_reconstruct(oracle, cfg)
        except RankMismatchError as exc:
            if exc.result is None:
                raise
            res, status = exc.result, 1
            print(f"error: {exc}", file=sys.stderr)
        if not res.success:
            status = 1
    else:
        if args.lam is not None:
            lam = args.lam
        elif args.k0 is not None:
            lam = compute_lambda(*A.shape, args.k0, args.delta)
        else:
            raise UsageError("--algo rfrbp requires --lambda or --k0")
        res = rfrbp_reconstruct(oracle, RfRbpConfig(lam=lam, seed=args.seed, tol=args.tol))
        if args.k0 is not None and args.k0 + 1 == A.shape[1] and args.lam is None:
            res.info["lambda_convention"] = "k0 + 1 = n: threshold set to 1 by convention"
    if args.output:
        write_matrix(args.output, res.matrix)
    audit = res.audit()
    audit["entries_inspected_count"] = oracle.inspected_count
    _emit(args, audit)
    return status


def cmd_experiment(args):
    spec = GeneratorSpec(args.family, args.m, args.n, args.r, _parse_params(args.param))
    cfg = {"delta": args.delta}
    if args.rank is not None:
        cfg["rank"] = args.rank
    if args.algo == "rbp":
        if args.k is not None:
            cfg["k"] = args.k
        if args.cap is not None:
            cfg["cap_k"] = args.cap
        cfg["prune_spanned"] = args.prune_spanned
    else:
        if args.lam is not None:
            cfg["lam"] = args.lam
        if args.k0 is not None:
            cfg["k0"] = args.k0
    stats = run_experiment(spec, args.algo, cfg, args.trials, args.seed, workers=args.workers)
    payload = stats.to_dict()
    if not args.per_trial:
        payload.pop("per_trial")
    status = 0
    if args.check:
        agg, c = stats.aggregate, stats.config
        target = 1 - (c["rank"] * c["delta"] if args.algo == "rbp" else c["delta"])
        checks = {
            "success_rate": agg["success_rate"] >= target - binomial_slack(target, stats.trials),
            "bound_violation_rate": agg["bound_violation_rate"]
            <= (1 - target) + binomial_slack(1 - target, stats.trials),
        }
        if args.algo == "rfrbp":
            checks["draw_bound"] = agg["max_draws"] <= c["draw_bound"]
        payload["checks"] = checks
        status = 0 if all(checks.values()) else 1
    _emit(args, payload)
    return status


def cmd_dof(args):
    _emit(args, {"m": args.m, "n": args.n, "r": args.r, "dof": degrees_of_freedom(args.m, args.n, args.r)})
    return 0


def cmd_demo(args):
    demo = uniform_sampling_failure_demo(args.m, args.n, args.l, args.trials, args.seed)
    _emit(args, demo.__dict__)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS)
    common.add_argument("--json-out", default=argparse.SUPPRESS, metavar="PATH")

    p = argparse.ArgumentParser(prog="basispursuit", description=__doc__.splitlines()[0], parents=[common])
    p.set_defaults(seed=0, tol=DEFAULT_TOL, json_out=None)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write a matrix from one of the families")
    g.add_argument("--family", choices=FAMILIES, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--r", type=int)
    g.add_argument("--param", action="append", metavar="KEY=V[,V...]")
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("stability", parents=[common], help="column (or row) stability of a matrix file")
    s.add_argument("matrix")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--certify", type=int, metavar="K")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--cap", type=int, default=16)
    s.add_argument("--rows", action="store_true", help="row stability instead of column")
    s.set_defaults(func=cmd_stability)

    r = sub.add_parser("reconstruct", parents=[common], help="reconstruct a matrix file through an entry oracle")
    r.add_argument("matrix")
    r.add_argument("--algo", choices=("rbp", "rfrbp"), default="rbp")
    r.add_argument("--rank", type=int)
    r.add_argument("--delta", type=float, default=0.01)
    r.add_argument("--cap", type=int, metavar="K")
    r.add_argument("--prune-spanned", action="store_true")
    r.add_argument("--lambda", dest="lam", type=int)
    r.add_argument("--k0", type=int)
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_reconstruct)

    e = sub.add_parser("experiment", parents=[common], help="seeded Monte Carlo reconstruction trials")
    e.add_argument("--family", choices=FAMILIES, default="generic")
    e.add_argument("--m", type=int, required=True)
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--r", type=int)
    e.add_argument("--param", action="append", metavar="KEY=V[,V...]")
    e.add_argument("--algo", choices=("rbp", "rfrbp"), default="rbp")
    e.add_argument("--trials", type=int, default=100)
    e.add_argument("--rank", type=int)
    e.add_argument("--delta", type=float, default=0.01)
    e.add_argument("--k", type=int)
    e.add_argument("--cap", type=int)
    e.add_argument("--prune-spanned", action="store_true")
    e.add_argument("--lambda", dest="lam", type=int)
    e.add_argument("--k0", type=int)
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--per-trial", action="store_true", help="include per-trial records")
    e.add_argument("--check", action="store_true", help="exit 1 unless the success and sample-count guarantees hold")
    e.set_defaults(func=cmd_experiment)

    d = sub.add_parser("dof", parents=[common], help="degrees of freedom r(m+n-r)")
    d.add_argument("--m", type=int, required=True)
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--r", type=int, required=True)
    d.set_defaults(func=cmd_dof)

    u = sub.add_parser("demo-uniform-sampling", parents=[common],
                       help="how often uniform entry sampling covers a fixed row")
    u.add_argument("--m", type=int, required=True)
    u.add_argument("--n", type=int, required=True)
    u.add_argument("--l", type=int, required=True)
    u.add_argument("--trials", type=int, default=100000)
    u.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BasisPursuitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
