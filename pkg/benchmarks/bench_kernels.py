"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json]

Each kernel runs on the same inputs under both backends; the table shows
the best time per call and the speedup.  Results are also cross-checked so
a fast but wrong kernel shows up here.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import timeit

from qverify import _pykernels as pure

try:
    from qverify import _ckernels as compiled
except ImportError:
    compiled = None


def _cases():
    values = [1.0 / (1.0 - 0.3 * 0.6 ** j) for j in range(26)]
    return [
        ("poch_finite n=200", "poch_finite", (0.37, 0.83, 200)),
        ("poch_infinite q=0.9", "poch_infinite", (0.61, 0.9, 1e-18, 10**6)),
        ("hyper_sum 3phi2", "hyper_sum",
         ((0.2, -0.3, 0.45), (0.15, -0.4), 0.8, 0.7, 1e-15, 100000, 3, -1)),
        ("hyper_sum 4phi3 terminating", "hyper_sum",
         ((0.8 ** -40, 0.2, 0.3, 0.4), (0.5, 0.6, 0.7), 0.8, 0.8, 1e-15, 100000, 3, 40)),
        ("aa_lattice_sum q=0.9", "aa_lattice_sum",
         (0.4, -0.3, 0.7, -0.9, 0.9, 0.7, 1e-15, 100000, 1e-18, 3)),
        ("diff_table_d order 25", "diff_table_d", (values, 0.3, 0.6)),
        ("diff_table_theta order 25", "diff_table_theta", (values, 0.3, 0.6)),
    ]


def _first(result):
    return result[0] if isinstance(result, (tuple, list)) else result


def bench(repeat: int, number: int) -> list[dict]:
    rows = []
    for label, name, args in _cases():
        row = {"kernel": label}
        outputs = {}
        for tag, mod in (("python", pure), ("cython", compiled)):
            if mod is None:
                continue
            fn = getattr(mod, name)
            outputs[tag] = _first(fn(*args))
            best = min(timeit.repeat(lambda: fn(*args), repeat=repeat, number=number))
            row[f"{tag}_us"] = best / number * 1e6
        if "cython_us" in row:
            row["speedup"] = row["python_us"] / row["cython_us"]
            a, b = outputs["python"], outputs["cython"]
            row["agree"] = math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-300)
        rows.append(row)
    return rows


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--number", type=int, default=200)
    parser.add_argument("--json", action="store_true")
    args = parser.parse_args(argv)
    rows = bench(args.repeat, args.number)
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        if compiled is None:
            print("compiled kernels not built; showing the Python backend only", file=sys.stderr)
        print(f"{'kernel':30s} {'python us':>11s} {'cython us':>11s} {'speedup':>8s}  agree")
        for r in rows:
            if "cython_us" in r:
                cy, sp = f"{r['cython_us']:11.2f}", f"{r['speedup']:8.1f}"
            else:
                cy, sp = f"{'-':>11s}", f"{'-':>8s}"
            print(f"{r['kernel']:30s} {r['python_us']:11.2f} {cy} {sp}  {r.get('agree', '-')}")
    bad = [r["kernel"] for r in rows if r.get("agree") is False]
    if bad:
        print("backends disagree on: " + ", ".join(bad), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
