"""Compare the compiled and pure-Python kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each row times one kernel call per backend and checks both return the same
answer. The compiled column is skipped if the extension is not built.
"""

from __future__ import annotations

import argparse
import itertools
import time

import numpy as np

from teachlab import kernels
from teachlab.headtail import HTParams, build_headtail
from teachlab.oracles import random_class
from teachlab.rectangles import build_rectangles


def _time(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(quick: bool):
    rng = np.random.default_rng(0)
    yield "random 30x200 scan k=2", random_class(rng, 30, 200), ("scan", 2)
    yield "random 30x200 scan k=3", random_class(rng, 30, 200), ("scan", 3)
    yield "random 40x2000 scan k=2", random_class(rng, 40, 2000), ("scan", 2)
    yield "rect (8,64,512) scan k=2", build_rectangles(3, (8, 64, 512)), ("scan", 2)
    yield "random 20x5000 shatter all 4-sets", random_class(rng, 20, 5000), ("shatter", 4)
    if not quick:
        H = build_headtail(HTParams(2, 2, (2, 12)))
        yield "headtail (2,12) scan k=2", H, ("scan", 2)
        yield "headtail (2,12) patterns 6 pts", H, ("patterns", (0, 10, 23, 35, 47, 59))


def run(C, op, be):
    handle = be.prepare(C.dense_words(), len(C))
    kind, arg = op
    if kind == "scan":
        return lambda: be.scan_best(handle, arg)
    if kind == "patterns":
        return lambda: tuple(be.pattern_counts(handle, arg))
    subsets = list(itertools.combinations(range(C.n_points), arg))
    return lambda: sum(bool(be.shatters(handle, s)) for s in subsets)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="skip the 171k-concept instance")
    args = ap.parse_args()
    backends = kernels.available_backends()
    names = [n for n in ("cython", "python") if n in backends]
    print(f"{'case':40s}" + "".join(f"{n:>12s}" for n in names) + f"{'speedup':>10s}")
    for label, C, op in cases(args.quick):
        times, answers = [], []
        for n in names:
            t, ans = _time(run(C, op, backends[n]), args.repeat)
            times.append(t)
            answers.append(ans)
        if any(a != answers[0] for a in answers):
            raise SystemExit(f"backends disagree on {label}: {answers}")
        speed = f"{times[-1] / times[0]:9.1f}x" if len(times) == 2 else ""
        print(f"{label:40s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times) + speed)


if __name__ == "__main__":
    main()
