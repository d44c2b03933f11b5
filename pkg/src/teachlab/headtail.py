"""Head/tail classes on which greedy with parameter k needs kN points.

Each level ``j`` has ``k`` head points ``h_{j,1..k}`` and ``2k`` tail rows of
``w_j`` points each. A level-``i`` concept pairs a head labeling (one-hot on
``H_i``, zero above, zero or one-hot below with at most ``k`` changes) with
``2k`` prefix lengths on the rows of level ``i``. Tail rows of the other
levels follow by copying each label ``w_j / w_i`` times (levels above) or by
AND-ing batches of that many labels (levels below). On prefix rows both rules
reduce to scaling the prefix length.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from . import budget
from .concepts import ConceptClass, Domain, DomainPoint, build_class_from_rows
from .errors import BudgetExceeded, PreconditionError
from .schedules import AnalyticCounts, CheckReport, WidthReport

CONSTRUCTION = "headtail"


@dataclass(frozen=True)
class HTParams:
    levels: int
    k: int
    widths: tuple[int, ...]

    def __post_init__(self):
        if self.k < 2:
            raise PreconditionError(f"k must be at least 2, got {self.k}")
        if self.levels < 1:
            raise PreconditionError("need at least one level")
        widths = tuple(int(w) for w in self.widths)
        if len(widths) != self.levels or any(w < 1 for w in widths):
            raise PreconditionError(f"need {self.levels} positive widths, got {self.widths}")
        object.__setattr__(self, "widths", widths)

    @classmethod
    def default(cls, levels: int, k: int) -> "HTParams":
        return cls(levels, k, default_ht_widths(levels, k))

    def level_size(self, j: int) -> int:
        return self.k + 2 * self.k * self.widths[j - 1]

    def offset(self, j: int) -> int:
        return sum(self.level_size(i) for i in range(1, j))

    def head(self, j: int, c: int) -> int:
        """Id of head point ``h_{j,c}``; ``c`` is 1-based."""
        return self.offset(j) + c - 1

    def tail(self, j: int, a: int, b: int) -> int:
        """Id of tail point ``t_{j,a,b}``; row ``a`` and column ``b`` are 1-based."""
        return self.offset(j) + self.k + (a - 1) * self.widths[j - 1] + (b - 1)

    def heads(self, j: int) -> tuple[int, ...]:
        o = self.offset(j)
        return tuple(range(o, o + self.k))

    def n_points(self) -> int:
        return sum(self.level_size(j) for j in range(1, self.levels + 1))


def default_ht_widths(levels: int, k: int) -> tuple[int, ...]:
    if levels < 1 or k < 2:
        raise PreconditionError(f"need levels >= 1 and k >= 2, got {levels}, {k}")
    return tuple((8 * k) ** (4**i) for i in range(1, levels + 1))


def count_A(i: int, k: int, levels: int | None = None) -> int:
    """Number of head labelings of a level-``i`` concept.

    Walks down from ``H_i`` keeping, per number of changes used so far, how
    many partial labelings end in a one-hot block and how many in zero.
    """
    if levels is not None and not 1 <= i <= levels:
        raise PreconditionError(f"level {i} outside 1..{levels}")
    if i < 1 or k < 1:
        raise PreconditionError(f"need i >= 1 and k >= 1, got {i}, {k}")
    # state[c][v]: partial labelings with c changes whose lowest block is value v (0 = zero vector)
    state = [[0] * (k + 1) for _ in range(k + 1)]
    for v in range(1, k + 1):
        state[0][v] = 1
    for _ in range(i - 1):
        nxt = [[0] * (k + 1) for _ in range(k + 1)]
        for c in range(k + 1):
            row = state[c]
            total = sum(row)
            if not total:
                continue
            for v in range(k + 1):
                nxt[c][v] += row[v]
                if c < k:
                    nxt[c + 1][v] += total - row[v]
        state = nxt
    return sum(map(sum, state))


def count_A_closed(i: int, k: int) -> int:
    """Closed form: pick which of the ``i-1`` boundaries change, then ``k`` new values each."""
    return k * sum(comb(i - 1, c) * k**c for c in range(min(k, i - 1) + 1))


def count_A_bound(i: int, k: int) -> int:
    return max(i - 1, 1) ** k * (k + 1) ** (k + 1)


def head_labelings(i: int, k: int, levels: int):
    """Yield head labelings of level ``i`` as tuples ``(s_1..s_N)`` in lexicographic order.

    ``s_j = 0`` is the zero vector on ``H_j``; ``s_j = c`` is one-hot at ``h_{j,c}``.
    """
    if not 1 <= i <= levels:
        raise PreconditionError(f"level {i} outside 1..{levels}")
    tail = (0,) * (levels - i)
    for below in itertools.product(range(k + 1), repeat=i - 1):
        for own in range(1, k + 1):
            s = below + (own,)
            if sum(s[j] != s[j + 1] for j in range(i - 1)) <= k:
                yield s + tail


def tail_prefix_tuples(w: int, k: int):
    """All ``2k``-tuples of prefix lengths in ``[0, w]``, lexicographic."""
    return itertools.product(range(w + 1), repeat=2 * k)


def f(i: int, j: int, y: int, widths) -> int:
    """Column of row level ``i`` that tail column ``y`` of level ``j > i`` contracts onto."""
    if not 1 <= i < j <= len(widths):
        raise PreconditionError(f"need 1 <= i < j <= {len(widths)}, got i={i}, j={j}")
    wi, wj = widths[i - 1], widths[j - 1]
    if not 1 <= y <= wj:
        raise PreconditionError(f"column {y} outside 1..{wj}")
    if wj % wi:
        raise PreconditionError(f"w_{i}={wi} does not divide w_{j}={wj}")
    ratio = wj // wi
    return -(-y // ratio)


def prefix_expand(p: int, ratio: int, width: int | None = None) -> int:
    """Prefix length after copying each label ``ratio`` times."""
    if ratio < 1 or p < 0 or (width is not None and p > width):
        raise PreconditionError(f"bad prefix {p} / ratio {ratio}")
    return p * ratio


def prefix_contract(p: int, ratio: int, width: int | None = None) -> int:
    """Prefix length after AND-ing consecutive batches of ``ratio`` labels."""
    if ratio < 1 or p < 0 or (width is not None and p > width):
        raise PreconditionError(f"bad prefix {p} / ratio {ratio}")
    return p // ratio


def prefix_at(p: int, w_own: int, w_other: int) -> int:
    """Prefix on a row of width ``w_other`` induced by prefix ``p`` on width ``w_own``."""
    if w_other >= w_own:
        return prefix_expand(p, w_other // w_own, w_own)
    return prefix_contract(p, w_own // w_other, w_own)


def validate_ht_widths(levels: int, k: int, widths) -> WidthReport:
    """Divisibility along the schedule, and each level's own-row slack
    ``(w_i+1)^k`` beating the exact total size of the levels below."""
    widths = tuple(int(w) for w in widths)
    if len(widths) != levels or any(w < 1 for w in widths):
        return WidthReport(False, None, None, None, f"need {levels} positive widths")
    for i in range(1, levels):
        if widths[i] % widths[i - 1]:
            return WidthReport(False, i + 1, widths[i], widths[i - 1], f"w_{i}={widths[i - 1]} does not divide w_{i + 1}={widths[i]}")
    below = 0
    for i, w in enumerate(widths, start=1):
        if i >= 2:
            rhs = (w + 1) ** k
            if not below < rhs:
                return WidthReport(False, i, below, rhs, f"level {i}: {budget.approx(below)} >= {budget.approx(rhs)}")
        below += count_A(i, k) * (w + 1) ** (2 * k)
    return WidthReport(True)


def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length()


def ht_analytic_sizes(params: HTParams) -> AnalyticCounts:
    N, k, widths = params.levels, params.k, params.widths
    heads = tuple(count_A(i, k) for i in range(1, N + 1))
    tails = tuple((w + 1) ** (2 * k) for w in widths)
    per_level = tuple(a * b for a, b in zip(heads, tails))
    F = sum(per_level)
    X = params.n_points()
    chain, acc = True, 0
    for i, w in enumerate(widths):
        acc += per_level[i]
        chain = chain and acc <= w ** (4 * k)
    checks = {
        "domination": validate_ht_widths(N, k, widths).ok,
        "head_count_bound": all(a <= count_A_bound(i, k) for i, a in enumerate(heads, start=1)),
        "cumulative_bound": chain,
    }
    if widths == default_ht_widths(N, k):
        wN = widths[-1]
        # log2(log2 F) <= ceil(log2(bit_length(F))), so this is a sufficient test
        checks.update(
            class_bound=F <= wN ** (4 * k),
            domain_bound=X <= 6 * k * wN,
            loglog_bound=14 * k * N >= _ceil_log2(F.bit_length()),
        )
    return AnalyticCounts(
        construction=CONSTRUCTION,
        levels=N,
        widths=widths,
        level_points=tuple(params.level_size(j) for j in range(1, N + 1)),
        level_concepts=per_level,
        formula_level_concepts=per_level,
        domain_size=X,
        class_size=F,
        k=k,
        head_labelings=heads,
        tail_concepts=tails,
        checks=checks,
    )


def ht_domain(params: HTParams) -> Domain:
    pts = []
    for j, w in enumerate(params.widths, start=1):
        base = dict(construction=CONSTRUCTION, level=j)
        for c in range(1, params.k + 1):
            pts.append(DomainPoint(len(pts), role="head", col=c, **base))
        for a in range(1, 2 * params.k + 1):
            for b in range(1, w + 1):
                pts.append(DomainPoint(len(pts), role="tail", row=a, col=b, **base))
    return Domain(pts)


def params_from_domain(domain: Domain) -> HTParams:
    if domain.construction != CONSTRUCTION:
        raise PreconditionError("domain was not built by build_headtail")
    levels = max(p.level for p in domain)
    k = len(domain.ids(level=1, role="head"))
    widths = tuple(len(domain.ids(level=j, role="tail", row=1)) for j in range(1, levels + 1))
    params = HTParams(levels, k, widths)
    if params.n_points() != len(domain):
        raise PreconditionError("domain layout does not match a head/tail instance")
    return params


def _prefix_rows(prefixes: np.ndarray, width: int) -> np.ndarray:
    """(m, 2k) prefix lengths -> (m, 2k*width) bool row blocks."""
    cols = np.arange(width)
    return (cols[None, None, :] < prefixes[:, :, None]).reshape(len(prefixes), -1)


def _level_rows(params: HTParams, i: int) -> tuple[np.ndarray, list[tuple[str]]]:
    k, widths = params.k, params.widths
    wi = widths[i - 1]
    P = np.array(list(tail_prefix_tuples(wi, k)), dtype=np.int64).reshape(-1, 2 * k)
    A = list(head_labelings(i, k, params.levels))
    nA, nB = len(A), len(P)
    rows = np.zeros((nA * nB, params.n_points()), dtype=bool)
    for j, wj in enumerate(widths, start=1):
        Pj = P * (wj // wi) if wj >= wi else P // (wi // wj)
        o = params.offset(j) + k
        rows[:, o : o + 2 * k * wj] = np.tile(_prefix_rows(Pj, wj), (nA, 1))
    for ai, s in enumerate(A):
        block = rows[ai * nB : (ai + 1) * nB]
        for j, c in enumerate(s, start=1):
            if c:
                block[:, params.head(j, c)] = True
    tags = [(f"C{i}/A{ai}/B{bi}",) for ai in range(nA) for bi in range(nB)]
    return rows, tags


def build_headtail(params: HTParams, *, force: bool = False) -> ConceptClass:
    """Materialize the class in (level, head labeling, prefix tuple) order."""
    for i in range(1, params.levels):
        if params.widths[i] % params.widths[i - 1]:
            raise PreconditionError(f"w_{i} does not divide w_{i + 1}; expansion is undefined")
    sizes = ht_analytic_sizes(params)
    X, F = sizes.domain_size, sizes.class_size
    if F > budget.max_concepts() or F * X > budget.dense_limit_bytes():
        raise BudgetExceeded(
            f"headtail N={params.levels} k={params.k}: {budget.approx(F)} concepts on {budget.approx(X)} points is too large to materialize",
            estimate=F,
            budget=budget.max_concepts(),
            analytic=sizes,
        )
    if not force:
        report = validate_ht_widths(params.levels, params.k, params.widths)
        if not report:
            raise PreconditionError(f"width schedule fails the domination check ({report.reason}); use force to build anyway")
    blocks, tags = [], []
    for i in range(1, params.levels + 1):
        rows, t = _level_rows(params, i)
        blocks.append(rows)
        tags.extend(t)
    return build_class_from_rows(ht_domain(params), np.concatenate(blocks), tags)


# -- structural checks ---------------------------------------------------------


def _row_ids(params: HTParams, j: int, a: int) -> slice:
    start = params.tail(j, a, 1)
    return slice(start, start + params.widths[j - 1])


def check_f_and(C: ConceptClass, chunk: int = 8192) -> CheckReport:
    """Every lower-level tail label equals the AND of the batch of higher-level
    labels that contract onto it. Reports the least (concept, i, j, a, b)."""
    params = params_from_domain(C.domain)
    N, k, widths = params.levels, params.k, params.widths
    combos = [(i, j, a) for i in range(1, N + 1) for j in range(i + 1, N + 1) for a in range(1, 2 * k + 1)]
    checked = 0
    for start, rows in C._bool_chunks(chunk):
        bad_any = np.zeros(len(rows), dtype=bool)
        found = []
        for i, j, a in combos:
            ratio = widths[j - 1] // widths[i - 1]
            anded = rows[:, _row_ids(params, j, a)].reshape(len(rows), widths[i - 1], ratio).all(axis=2)
            mism = anded != rows[:, _row_ids(params, i, a)]
            checked += mism.size
            hit = mism.any(axis=1)
            if hit.any():
                bad_any |= hit
                found.append((i, j, a, mism))
        if bad_any.any():
            c = int(np.flatnonzero(bad_any)[0])
            for i, j, a, mism in found:
                if mism[c].any():
                    b = int(np.flatnonzero(mism[c])[0]) + 1
                    return CheckReport(False, checked, dict(concept=start + c, i=i, j=j, a=a, b=b))
    return CheckReport(True, checked)


def check_prefix_rows(C: ConceptClass, chunk: int = 8192) -> CheckReport:
    """Every tail row of every concept is ones then zeros."""
    params = params_from_domain(C.domain)
    checked = 0
    for start, rows in C._bool_chunks(chunk):
        for j in range(1, params.levels + 1):
            for a in range(1, 2 * params.k + 1):
                row = rows[:, _row_ids(params, j, a)]
                bad = (row[:, 1:] & ~row[:, :-1]).any(axis=1)
                checked += len(rows)
                if bad.any():
                    c = int(np.flatnonzero(bad)[0])
                    return CheckReport(False, checked, dict(concept=start + c, level=j, row=a))
    return CheckReport(True, checked)


def concept_level(params: HTParams, rows: np.ndarray) -> np.ndarray:
    """Highest level with a nonzero head block, per row (0 if none)."""
    out = np.zeros(len(rows), dtype=np.int64)
    for j in range(1, params.levels + 1):
        out[rows[:, list(params.heads(j))].any(axis=1)] = j
    return out


def check_disjoint(C: ConceptClass, chunk: int = 8192) -> CheckReport:
    """Levels share no labeling: each concept came from exactly one level, its
    head blocks name that level, and nothing was lost to deduplication."""
    params = params_from_domain(C.domain)
    for idx, tags in enumerate(C.all_origins):
        levels = {t.split("/")[0] for t in tags}
        if len(levels) > 1:
            return CheckReport(False, idx, dict(concept=idx, tags=list(tags)))
    for start, rows in C._bool_chunks(chunk):
        lv = concept_level(params, rows)
        for c in range(len(rows)):
            tags = C.origins(start + c)
            if tags and tags[0].split("/")[0] != f"C{lv[c]}":
                return CheckReport(False, start + c, dict(concept=start + c, head_level=int(lv[c]), tags=list(tags)))
    expected = ht_analytic_sizes(params).class_size
    if len(C) != expected:
        return CheckReport(False, len(C), dict(materialized=len(C), analytic=expected))
    return CheckReport(True, len(C))
