"""Acceptance criteria. Each test records PASS/FAIL lines that are repeated in
the terminal summary. Tolerances are exact unless stated; wall-clock limits
are part of the pass condition."""

import io
import json
import time
from math import comb

import numpy as np

from teachlab.ccls import dumps
from teachlab.concepts import Restriction, flip_label, is_teaching_set
from teachlab.experiment import ExperimentConfig, run_experiment
from teachlab.greedy import best_restriction, greedy_teach
from teachlab.headtail import (
    HTParams,
    build_headtail,
    check_f_and,
    count_A,
    default_ht_widths,
    params_from_domain,
    validate_ht_widths,
)
from teachlab.oracles import (
    oracle_best_restriction,
    random_class,
    random_subclass,
    ts_min_search,
    vc_dimension,
)
from teachlab.rectangles import (
    build_rectangles,
    default_rect_widths,
    realize_rectangle,
    rect_tsmin_witness,
    validate_rect_widths,
)


def pow8(n):
    return tuple(8**i for i in range(1, n + 1))


def test_c1_rectangles_dynamics(criterion):
    t0 = time.perf_counter()
    notes, ok = [], True
    for N in (2, 3, 4, 5):
        C = build_rectangles(N, pow8(N))
        valid = bool(validate_rect_widths(pow8(N)))
        _, trace = greedy_teach(C, 1)
        centers = {j: C.domain.ids(level=j, role="center")[0] for j in range(1, N + 1)}
        chosen = [s.restriction for s in trace.steps[: N - 1]]
        want = [Restriction((centers[N - i],), (0,)) for i in range(N - 1)]
        good = valid and trace.size >= N and chosen == want
        ok &= good
        notes.append(f"N={N} |S|={trace.size}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 10
    assert criterion(1, ok, f"rectangles widths 8^i: {', '.join(notes)}; centers chosen top-down with label 0; {elapsed:.1f}s < 10s")


def test_c2_headtail_dynamics(criterion, ht2):
    t0 = time.perf_counter()
    report = validate_ht_widths(2, 2, (2, 12))
    # lhs is |C_1| = count_A(1)*(2+1)^4; rhs is (12+1)^2
    valid = report.ok and 162 < 169 and count_A(1, 2) * 3**4 == 162
    _, trace = greedy_teach(ht2, 2)
    first = trace.steps[0].restriction
    elapsed = time.perf_counter() - t0
    ok = valid and trace.size >= 4 and first == Restriction((10, 11), (0, 0)) and elapsed < 300
    assert criterion(2, ok, f"headtail k=2 (2,12): |S|={trace.size} >= 4, first choice H_2 with 00, {elapsed:.1f}s")


def _ht_sizes(N, k):
    w = [(8 * k) ** (4**i) for i in range(1, N + 1)]
    C = [count_A(i, k) * (w[i - 1] + 1) ** (2 * k) for i in range(1, N + 1)]
    X = sum(k + 2 * k * wi for wi in w)
    return w, C, X


def test_c3_analytic_default_scale(criterion):
    t0 = time.perf_counter()
    rect_ok = True
    for N in range(1, 9):
        w = [2 ** (10 * i) for i in range(1, N + 1)]
        assert tuple(w) == default_rect_widths(N)
        sizes = [4 * wi + 2 for wi in w]
        rect_ok &= all(2 * sum(sizes[: i - 1]) < sizes[i - 1] for i in range(2, N + 1))
        rect_ok &= bool(validate_rect_widths(w))
        X = sum(2 * wi + 1 for wi in w)
        rect_ok &= 2 ** (10 * N + 1) <= X <= 2 ** (10 * N + 3)
    ht_ok = True
    for k in (2, 3):
        for N in range(1, 7):
            w, C, X = _ht_sizes(N, k)
            assert tuple(w) == default_ht_widths(N, k)
            ht_ok &= all(sum(C[:i]) <= w[i - 1] ** (4 * k) for i in range(1, N + 1))
            ht_ok &= all(sum(C[: i - 1]) < (w[i - 1] + 1) ** k for i in range(2, N + 1))
            ht_ok &= bool(validate_ht_widths(N, k, w))
            ht_ok &= X <= 6 * k * w[-1]
            # log2 log2 F <= ceil(log2(bit_length(F))): checking the larger side is sufficient
            F = sum(C)
            ht_ok &= 14 * k * N >= (F.bit_length() - 1).bit_length()
    elapsed = time.perf_counter() - t0
    ok = rect_ok and ht_ok and elapsed < 1
    assert criterion(3, ok, f"rectangles N<=8 domination and |X| sandwich: {rect_ok}; headtail k in (2,3), N<=6 chain, slack, |X|<=6k w_N, loglog: {ht_ok}; {elapsed:.2f}s < 1s")


def test_c4_oracle_equivalence(criterion, rect2, ht2):
    t0 = time.perf_counter()
    compared, mismatches = 0, []
    sources = [None, rect2, ht2]
    for seed in range(100):
        rng = np.random.default_rng(seed)
        k = seed % 3 + 1
        src = sources[seed % 3]
        if src is None:
            C = random_class(rng, int(rng.integers(k, 31)), int(rng.integers(2, 201)), float(rng.uniform(0.2, 0.8)))
        else:
            C = random_subclass(src, rng, 200, 30)
        if len(C) < 2 or C.n_points < k:
            continue
        assert len(C) <= 200 and C.n_points <= 30
        compared += 1
        if best_restriction(C, k) != oracle_best_restriction(C, k):
            mismatches.append(seed)
    elapsed = time.perf_counter() - t0
    ok = not mismatches and compared >= 90 and elapsed < 60
    assert criterion(4, ok, f"{compared} seeded subclasses (|C|<=200, |X|<=30, k=1..3), mismatches {mismatches}; {elapsed:.1f}s < 60s")


def test_c5_vc_properties(criterion, rect2, ht2):
    t0 = time.perf_counter()
    realizable = True
    for C in (rect2, build_rectangles(4, pow8(4))):
        realizable &= all(bool(realize_rectangle(C.concept(i), C.domain)) for i in range(len(C)))
    r5 = vc_dimension(rect2, "sample", 5, 1000, seed=7).sample["shattered"]
    h10 = vc_dimension(ht2, "sample", 10, 1000, seed=7).sample["shattered"]
    exact = vc_dimension(build_rectangles(1, (2,)), "exact").verified_upper
    elapsed = time.perf_counter() - t0
    ok = realizable and r5 == 0 and h10 == 0 and exact <= 4 and elapsed < 120
    assert criterion(5, ok, f"all rectangles realizable: {realizable}; shattered in samples: rect {r5}/1000, headtail {h10}/1000; exact VC of N=1 w=(2): {exact} <= 4; {elapsed:.1f}s")


def test_c6_f_and(criterion, ht2):
    t0 = time.perf_counter()
    full = check_f_and(ht2)
    p = params_from_domain(ht2.domain)
    # a concept whose first level-2 batch of row 1 is all ones; its t_{1,1,1} must then be 1
    idx = int(np.flatnonzero(ht2.column(p.tail(2, 1, 6)))[0])
    mutated = check_f_and(flip_label(ht2, idx, p.tail(1, 1, 1)))
    elapsed = time.perf_counter() - t0
    ce = mutated.counterexample or {}
    ok = full.ok and not mutated.ok and ce.get("concept") is not None and elapsed < 60
    assert criterion(6, ok, f"AND/copy rule over {len(ht2)} concepts: {full.ok}; single flipped bit caught at {ce}; {elapsed:.1f}s")


def _level_counts(C, levels):
    out = []
    for i in range(1, levels + 1):
        out.append(sum(any(t.startswith(f"C{i}/") for t in tags) for tags in C.all_origins))
    return out


def _cross_level(C):
    return sum(len({t.split("/")[0] for t in tags}) > 1 for tags in C.all_origins)


def test_c7_size_formulas(criterion, ht1, ht2):
    lines, ok, ht_ok = [], True, True
    for widths in ((2,), (4, 16), pow8(2), pow8(3), pow8(4), pow8(5)):
        C = build_rectangles(len(widths), widths)
        got = _level_counts(C, len(widths))
        want = [4 * w + 2 for w in widths]
        good = got == want and _cross_level(C) == 0 and len(C) == sum(want)
        ok &= good
        if not good:
            lines.append(f"rectangles {widths}: per level {got} vs 4w+2 {want}")
    for C, (N, k, widths) in ((ht1, (1, 2, (2,))), (ht2, (2, 2, (2, 12)))):
        got = _level_counts(C, N)
        want = [count_A(i, k) * (w + 1) ** (2 * k) for i, w in enumerate(widths, start=1)]
        good = got == want and _cross_level(C) == 0 and len(C) == sum(want)
        ht_ok &= good
        if not good:
            lines.append(f"headtail {widths}: {got} vs {want}")
    ok &= ht_ok
    lines.append(f"headtail (2,) and (2,12) per-level counts and disjointness: {ht_ok}")
    detail = "; ".join(lines)
    criterion(7, ok, detail)
    assert ok, detail


def test_c8_ts_min(criterion, rect2, ht1, ht2):
    t0 = time.perf_counter()
    rect_ok = True
    for widths in ((2,), (4, 16), pow8(2), pow8(3), pow8(4)):
        C = rect2 if widths == (4, 16) else build_rectangles(len(widths), widths)
        assert validate_rect_widths(widths)
        cert = rect_tsmin_witness(C)  # raises unless exactly one concept matches
        z1 = C.domain.ids(level=1, role="center")[0]
        a1 = C.domain.ids(level=1, role="up", row=1)[0]
        rect_ok &= cert.teaching_set == (z1, a1) and is_teaching_set(C, cert.concept_index, cert.teaching_set)
    exhaustive = ts_min_search(rect2, "exhaustive", 2)
    rect_ok &= exhaustive.size == 2
    structured = ts_min_search(ht2, "structured")
    ht_ok = structured.best is not None and structured.size <= 6 and is_teaching_set(ht2, structured.best.concept_index, structured.best.teaching_set)
    cap3 = ts_min_search(ht1, "exhaustive", 3)
    cap3_ok = cap3.best is not None
    beyond = ts_min_search(ht1, "exhaustive", 5)
    elapsed = time.perf_counter() - t0
    ok = rect_ok and ht_ok and cap3_ok and elapsed < 300
    detail = (
        f"rectangles {{z_1, a_1}} unique on 5 schedules: {rect_ok}; headtail structured size {structured.size} <= 6: {ht_ok}; "
        f"headtail N=1 w=(2) exhaustive cap 3: {'size ' + str(cap3.size) if cap3_ok else 'none <= 3'} "
        f"(cap 5 finds minimal size {beyond.size}); {elapsed:.1f}s"
    )
    criterion(8, ok, detail)
    assert ok, detail


def test_c9_determinism(criterion, tmp_path):
    ccls_same = dumps(build_rectangles(3, pow8(3))) == dumps(build_rectangles(3, pow8(3)))
    ht_params = HTParams(2, 2, (2, 12))
    ccls_same &= dumps(build_headtail(ht_params)) == dumps(build_headtail(ht_params))
    traces = []
    for _ in range(2):
        C = build_headtail(ht_params)
        cert, trace = greedy_teach(C, 2)
        traces.append(trace.to_csv(C.concept(cert.concept_index).to_hex()))
    cfg = ExperimentConfig(
        construction="rectangles", levels=3, widths=pow8(3), suites=("dynamics", "crosscheck", "vc-sample", "realizable"),
        seed=5, trials=30, report_out=str(tmp_path / "r.json"), trace_out=str(tmp_path / "t.csv"), class_out=str(tmp_path / "c.ccls"),
    )
    outs = []
    for _ in range(2):
        report = run_experiment(cfg)
        outs.append([json.dumps(report, sort_keys=True)] + [(tmp_path / n).read_bytes() for n in ("r.json", "t.csv", "c.ccls")])
    ok = ccls_same and traces[0] == traces[1] and outs[0] == outs[1]
    assert criterion(9, ok, f"CCLS files identical: {ccls_same}; traces identical: {traces[0] == traces[1]}; reports identical: {outs[0] == outs[1]}")
