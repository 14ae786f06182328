"""Time the compiled span/rank kernels against the numpy fallback.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5] [--json-out PATH]
"""
import argparse
import json
import sys
import timeit

import numpy as np

from basispursuit import _kernels_py

try:
    from basispursuit import _kernels
except ImportError:
    _kernels = None


def cases(rng):
    """(name, callable(module)) pairs exercising each kernel on realistic sizes."""
    low = np.ascontiguousarray((rng.standard_normal((20, 2)) @ rng.standard_normal((2, 16))).T)
    wide = np.ascontiguousarray((rng.standard_normal((50, 5)) @ rng.standard_normal((5, 200))).T)
    removals = np.array([rng.choice(16, 14, replace=False) for _ in range(2000)], dtype=np.intp)
    vecs = rng.standard_normal((40, 60))

    def extend(mod):
        basis = np.empty((40, 60))
        count = 0
        for v in vecs:
            count += mod.gs_extend(basis, count, v, 1e-9) == 1

    return [
        ("first_rank_drop n=16 r=2", lambda mod: mod.first_rank_drop(low, 2, 1e-9, 15)),
        ("first_refuting_removal 2000 sets", lambda mod: mod.first_refuting_removal(low, 2, 1e-9, removals)),
        ("column_rank 200 cols r=5", lambda mod: mod.column_rank(wide, 1e-9)),
        ("gs_extend 40 vectors in R^60", extend),
    ]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--json-out")
    args = p.parse_args(argv)
    if _kernels is None:
        print("compiled kernels not built; run `pip install --no-build-isolation -e .` first", file=sys.stderr)
        return 1

    rows = []
    for name, fn in cases(np.random.default_rng(0)):
        # fastest of `repeat` runs, one call each
        t_c = min(timeit.repeat(lambda: fn(_kernels), number=1, repeat=args.repeat))
        t_py = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat))
        rows.append({"case": name, "cython_s": t_c, "python_s": t_py, "speedup": t_py / t_c})

    width = max(len(r["case"]) for r in rows)
    print(f"{'case':<{width}}  {'cython':>10}  {'python':>10}  speedup")
    for r in rows:
        print(f"{r['case']:<{width}}  {r['cython_s']:>10.5f}  {r['python_s']:>10.5f}  {r['speedup']:>6.1f}x")
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
