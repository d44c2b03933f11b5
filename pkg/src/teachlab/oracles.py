"""Brute-force cross-checks for greedy, VC dimension and minimum teaching sets.

Nothing here uses the kernels: counts come from plain numpy projections of
the class onto point subsets, so an agreement with the fast path means
something.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import budget, headtail, rectangles
from .concepts import (
    ConceptClass,
    Domain,
    Restriction,
    TeachingCertificate,
    build_class_from_rows,
    count_consistent,
    is_teaching_set,
)
from .errors import PreconditionError
from .greedy import best_restriction, greedy_teach


def _codes(C: ConceptClass, pts) -> np.ndarray:
    """Pattern index of each concept on ``pts``, first point most significant."""
    code = np.zeros(len(C), dtype=np.int64)
    for x in pts:
        code = (code << 1) | C.column(x)
    return code


# -- best restriction ------------------------------------------------------------


def oracle_best_restriction(C: ConceptClass, k: int, op_budget: int | None = None) -> tuple[Restriction, int]:
    """Same contract as ``greedy.best_restriction``, computed by listing every
    (points, pattern) pair with its count and taking the minimum key."""
    if len(C) < 2:
        raise PreconditionError(f"need at least two concepts, got {len(C)}")
    if not 1 <= k <= C.n_points:
        raise PreconditionError(f"k={k} outside 1..{C.n_points}")
    cost = sum(comb(C.n_points, t) * 2**t for t in range(1, k + 1)) * len(C)
    budget.require_within(cost, "oracle best restriction", op_budget)
    best = None
    for t in range(1, k + 1):
        for pts in itertools.combinations(range(C.n_points), t):
            counts = np.bincount(_codes(C, pts), minlength=2**t)
            for p in np.flatnonzero(counts):
                pattern = tuple(int(ch) for ch in format(int(p), f"0{t}b"))
                key = (int(counts[p]), t, pts, pattern)
                if best is None or key < best:
                    best = key
    count, _, pts, pattern = best
    return Restriction(pts, pattern), count


# -- VC dimension ----------------------------------------------------------------


def _shattered(C: ConceptClass, pts) -> bool:
    if len(C) < 2 ** len(pts):
        return False
    return np.unique(_codes(C, pts)).size == 2 ** len(pts)


@dataclass(frozen=True)
class VcReport:
    mode: str
    verified_lower: int | None
    verified_upper: int | None
    witness: tuple[int, ...] | None
    sample: dict | None = None


def vc_dimension(
    C: ConceptClass,
    mode: str = "exact",
    size: int | None = None,
    samples: int = 1000,
    seed: int = 0,
    op_budget: int | None = None,
) -> VcReport:
    """``exact``: largest shattered set by ascending search.
    ``sample``: look for a shattered set among ``samples`` random ``size``-subsets."""
    n = C.n_points
    if mode == "exact":
        witness: tuple[int, ...] = ()
        m = 1
        while m <= n and 2**m <= len(C):
            budget.require_within(comb(n, m) * len(C), f"exact VC search at size {m}", op_budget)
            hit = next((pts for pts in itertools.combinations(range(n), m) if _shattered(C, pts)), None)
            if hit is None:
                break
            # every subset of a shattered set is shattered
            if not all(_shattered(C, sub) for sub in itertools.combinations(hit, m - 1)):
                raise AssertionError(f"{hit} is shattered but a subset is not")
            witness = hit
            m += 1
        d = len(witness) if len(C) else 0
        return VcReport("exact", d, d, witness)
    if mode == "sample":
        if size is None or not 1 <= size <= n:
            raise PreconditionError(f"sample mode needs 1 <= size <= {n}")
        rng = np.random.default_rng(seed)
        found = []
        for _ in range(samples):
            pts = tuple(sorted(int(x) for x in rng.choice(n, size=size, replace=False)))
            if _shattered(C, pts):
                found.append(pts)
        record = dict(size=size, samples=samples, seed=seed, shattered=len(found), first=list(found[0]) if found else None)
        return VcReport("sample", size if found else None, None, found[0] if found else None, record)
    raise PreconditionError(f"unknown VC mode {mode!r}")


# -- minimum teaching sets -------------------------------------------------------


@dataclass(frozen=True)
class TsMinReport:
    mode: str
    cap: int | None
    best: TeachingCertificate | None
    tried: int
    notes: dict = field(default_factory=dict)

    @property
    def size(self) -> int | None:
        return None if self.best is None else self.best.size


def _unique_on(C: ConceptClass, pts) -> int | None:
    """Smallest concept index whose pattern on ``pts`` no other concept shares."""
    codes = _codes(C, pts)
    values, first, counts = np.unique(codes, return_index=True, return_counts=True)
    solo = first[counts == 1]
    return int(solo.min()) if solo.size else None


def ts_min_search(C: ConceptClass, mode: str = "exhaustive", cap: int = 3, op_budget: int | None = None) -> TsMinReport:
    if len(C) == 0:
        raise PreconditionError("empty class")
    if mode == "exhaustive":
        n = C.n_points
        cap = min(cap, n)
        budget.require_within(budget.subset_cost(n, len(C), cap), f"exhaustive teaching-set search to size {cap}", op_budget)
        tried = 0
        for s in range(cap + 1):
            for pts in itertools.combinations(range(n), s):
                tried += 1
                c = _unique_on(C, pts) if s else (0 if len(C) == 1 else None)
                if c is not None:
                    cert = TeachingCertificate(c, pts)
                    _verify(C, cert)
                    return TsMinReport("exhaustive", cap, cert, tried, dict(minimal=True))
        return TsMinReport("exhaustive", cap, None, tried, dict(minimal=None, result=f"none <= {cap}"))
    if mode == "structured":
        return _structured_headtail(C)
    raise PreconditionError(f"unknown teaching-set search mode {mode!r}")


def _verify(C: ConceptClass, cert: TeachingCertificate) -> None:
    if not is_teaching_set(C, cert.concept_index, cert.teaching_set):
        raise AssertionError(f"{cert} does not teach its concept")


def _structured_headtail(C: ConceptClass) -> TsMinReport:
    """Rightmost tail point of some rows of the top level plus one head point on
    each of the top ``k+1`` levels, all labeled 1. Row subsets go from ``k`` to
    ``2k`` rows so smaller candidates come first."""
    params = headtail.params_from_domain(C.domain)
    N, k, w = params.levels, params.k, params.widths[-1]
    head_levels = range(max(1, N - k), N + 1)
    tried = 0
    k_rows_ok = False
    for r in range(k, 2 * k + 1):
        for rows in itertools.combinations(range(1, 2 * k + 1), r):
            for cols in itertools.product(range(1, k + 1), repeat=len(head_levels)):
                tried += 1
                pts = sorted([params.tail(N, a, w) for a in rows] + [params.head(j, c) for j, c in zip(head_levels, cols)])
                restriction = Restriction(tuple(pts), (1,) * len(pts))
                if count_consistent(C, restriction) != 1:
                    continue
                c = int(np.flatnonzero(_codes(C, pts) == 2 ** len(pts) - 1)[0])
                cert = TeachingCertificate(c, tuple(pts))
                _verify(C, cert)
                k_rows_ok = r == k
                notes = dict(rows=list(rows), head_columns=list(cols), k_rows_suffice=k_rows_ok)
                return TsMinReport("structured", None, cert, tried, notes)
    return TsMinReport("structured", None, None, tried, dict(k_rows_suffice=False))


# -- greedy dynamics -------------------------------------------------------------


@dataclass(frozen=True)
class DynamicsReport:
    ok: bool
    construction: str
    k: int
    size: int
    required_size: int
    schedule_valid: bool
    steps: tuple[tuple[tuple[int, ...], str], ...]
    divergence: dict | None = None


def predicted_choices(C: ConceptClass, k: int | None = None) -> tuple[int, list[Restriction], int, bool]:
    """(k, predicted restrictions for rounds 0..N-2, lower bound on |S|, schedule valid)."""
    kind = C.domain.construction
    if kind == rectangles.CONSTRUCTION:
        widths = rectangles.rect_widths_from_domain(C.domain)
        N = len(widths)
        centers = [C.domain.ids(level=j, role="center")[0] for j in range(1, N + 1)]
        expected = [Restriction((centers[N - i - 1],), (0,)) for i in range(N - 1)]
        return 1 if k is None else k, expected, N, rectangles.validate_rect_widths(widths).ok
    if kind == headtail.CONSTRUCTION:
        params = headtail.params_from_domain(C.domain)
        N, kk = params.levels, params.k if k is None else k
        expected = [Restriction(params.heads(N - i), (0,) * params.k) for i in range(N - 1)]
        ok = headtail.validate_ht_widths(N, params.k, params.widths).ok
        return kk, expected, kk * N, ok
    raise PreconditionError("class carries no construction meta")


def verify_greedy_dynamics(C: ConceptClass, k: int | None = None, backend=None) -> DynamicsReport:
    k, expected, required, valid = predicted_choices(C, k)
    _, trace = greedy_teach(C, k, backend)
    steps = tuple((s.restriction.points, s.restriction.bits) for s in trace.steps)
    divergence = None
    for i, want in enumerate(expected):
        got = trace.steps[i].restriction if i < len(trace.steps) else None
        if got != want:
            divergence = dict(
                iteration=i,
                expected=[list(want.points), want.bits],
                got=None if got is None else [list(got.points), got.bits],
            )
            break
    if divergence is None and trace.size < required:
        divergence = dict(size=trace.size, required=required)
    return DynamicsReport(divergence is None, C.domain.construction, k, trace.size, required, valid, steps, divergence)


# -- random instances and oracle cross-checks -----------------------------------


def random_class(rng: np.random.Generator, n_points: int, n_concepts: int, density: float = 0.5) -> ConceptClass:
    rows = rng.random((n_concepts, n_points)) < density
    return build_class_from_rows(Domain.plain(n_points), rows)


def random_subclass(C: ConceptClass, rng: np.random.Generator, max_concepts: int = 200, max_points: int = 30) -> ConceptClass:
    """Random concepts of ``C`` projected onto random points, deduplicated."""
    n_pts = int(rng.integers(1, min(max_points, C.n_points) + 1))
    pts = np.sort(rng.choice(C.n_points, size=n_pts, replace=False))
    n_c = int(rng.integers(2, min(max_concepts, len(C)) + 1)) if len(C) >= 2 else len(C)
    idx = np.sort(rng.choice(len(C), size=n_c, replace=False))
    rows = C.take(idx).labels_on(pts.tolist())
    return build_class_from_rows(Domain.plain(n_pts), rows)


@dataclass(frozen=True)
class CrosscheckReport:
    ok: bool
    trials: int
    compared: int
    seed: int
    mismatches: tuple[dict, ...] = ()


def crosscheck(
    C: ConceptClass | None,
    k: int,
    trials: int = 100,
    seed: int = 0,
    max_concepts: int = 200,
    max_points: int = 30,
    backend=None,
) -> CrosscheckReport:
    """Compare fast and oracle best restrictions on seeded random subclasses of
    ``C`` (or on random classes when ``C`` is None). Trials where the
    subclass collapses below two concepts or ``k`` points are skipped."""
    compared = 0
    bad = []
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        if C is None:
            n = int(rng.integers(max(k, 1), max_points + 1))
            m = int(rng.integers(2, max_concepts + 1))
            sub = random_class(rng, n, m, float(rng.uniform(0.2, 0.8)))
        else:
            sub = random_subclass(C, rng, max_concepts, max_points)
        if len(sub) < 2 or sub.n_points < k:
            continue
        compared += 1
        fast = best_restriction(sub, k, backend)
        slow = oracle_best_restriction(sub, k)
        if fast != slow:
            bad.append(dict(trial=t, fast=[list(fast[0].points), fast[0].bits, fast[1]], oracle=[list(slow[0].points), slow[0].bits, slow[1]]))
    return CrosscheckReport(not bad, trials, compared, seed, tuple(bad))


# -- sampled head/tail structure checks ------------------------------------------


def _level_mask(C: ConceptClass, level: int, head_index: int | None = None) -> np.ndarray:
    prefix = f"C{level}/" if head_index is None else f"C{level}/A{head_index}/"
    return np.array([any(t.startswith(prefix) for t in tags) for tags in C.all_origins])


def sample_tail_slack(C: ConceptClass, level: int, trials: int = 200, seed: int = 0) -> dict:
    """Realizable labelings of at most ``k`` tail points leave at least
    ``(w_level+1)^k`` prefix tuples of ``level`` consistent."""
    params = headtail.params_from_domain(C.domain)
    rng = np.random.default_rng(seed)
    tails = [p.id for p in C.domain if p.role == "tail"]
    lower = np.flatnonzero(np.array([int(t[0].split("/")[0][1:]) <= level for t in C.all_origins]))
    own = _level_mask(C, level, 0)
    need = (params.widths[level - 1] + 1) ** params.k
    worst = None
    for _ in range(trials):
        t = int(rng.integers(1, params.k + 1))
        pts = tuple(sorted(int(x) for x in rng.choice(tails, size=t, replace=False)))
        src = C.concept(int(rng.choice(lower)))
        r = Restriction(pts, tuple(src[x] for x in pts))
        mask = own.copy()
        for x, b in r.items():
            mask &= C.column(x) if b else ~C.column(x)
        got = int(mask.sum())
        if worst is None or got < worst[0]:
            worst = (got, list(pts), r.bits)
    return dict(ok=worst is None or worst[0] >= need, required=need, worst=worst, trials=trials, seed=seed)


def sample_head_coverage(C: ConceptClass, level: int, trials: int = 200, seed: int = 0) -> dict:
    """Realizable labelings of at most ``k`` head points, other than ``H_level``
    all zero, are matched by some concept of ``level``."""
    params = headtail.params_from_domain(C.domain)
    rng = np.random.default_rng(seed)
    heads = [p.id for p in C.domain if p.role == "head" and p.level <= level]
    lower = np.flatnonzero(np.array([int(t[0].split("/")[0][1:]) <= level for t in C.all_origins]))
    own = _level_mask(C, level)
    forbidden = params.heads(level)
    failures, checked = [], 0
    for _ in range(trials):
        t = int(rng.integers(1, params.k + 1))
        pts = tuple(sorted(int(x) for x in rng.choice(heads, size=min(t, len(heads)), replace=False)))
        src = C.concept(int(rng.choice(lower)))
        r = Restriction(pts, tuple(src[x] for x in pts))
        if pts == forbidden and not any(r.pattern):
            continue
        checked += 1
        mask = own.copy()
        for x, b in r.items():
            mask &= C.column(x) if b else ~C.column(x)
        if not mask.any():
            failures.append([list(pts), r.bits])
    return dict(ok=not failures, checked=checked, failures=failures[:5], seed=seed)


def targeted_non_shattering(C: ConceptClass, trials: int = 200, seed: int = 0) -> dict:
    """Families that can never be shattered: ``2k+1`` tail points with two in
    one row of one level, and ``2k+2`` head points (when the domain has that many)."""
    params = headtail.params_from_domain(C.domain)
    k = params.k
    rng = np.random.default_rng(seed)
    tails = [p for p in C.domain if p.role == "tail"]
    heads = [p.id for p in C.domain if p.role == "head"]
    shattered = []
    for _ in range(trials):
        a = tails[int(rng.integers(len(tails)))]
        same_row = [p.id for p in tails if p.level == a.level and p.row == a.row and p.id != a.id]
        b = int(rng.choice(same_row))
        rest = [p.id for p in tails if p.id not in (a.id, b)]
        extra = [int(x) for x in rng.choice(rest, size=2 * k - 1, replace=False)]
        pts = tuple(sorted([a.id, b] + extra))
        if _shattered(C, pts):
            shattered.append(list(pts))
    head_note = "not applicable: fewer than 2k+2 head points"
    if len(heads) >= 2 * k + 2:
        head_note = "checked"
        for _ in range(trials):
            pts = tuple(sorted(int(x) for x in rng.choice(heads, size=2 * k + 2, replace=False)))
            if _shattered(C, pts):
                shattered.append(list(pts))
    return dict(ok=not shattered, shattered=shattered[:5], trials=trials, seed=seed, heads=head_note)
