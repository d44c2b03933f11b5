"""Pure-Python kernels: each column is one Python int used as a bitset."""

from __future__ import annotations

from itertools import combinations

NAME = "python"


def prepare(words, n_concepts: int):
    cols = [int.from_bytes(row.tobytes(), "little") for row in words]
    return cols, int(n_concepts)


def _split(leaves: list[int], col: int) -> list[int]:
    out = []
    for v in leaves:
        ones = v & col
        out.append(v ^ ones)
        out.append(ones)
    return out


def pattern_counts(handle, points) -> list[int]:
    """Concept count of every pattern on ``points``; pattern index has points[0] as MSB."""
    cols, n = handle
    leaves = [(1 << n) - 1]
    for x in points:
        leaves = _split(leaves, cols[x])
    return [v.bit_count() for v in leaves]


def shatters(handle, points) -> bool:
    cols, n = handle
    if n < 1 << len(points):
        return False
    leaves = [(1 << n) - 1]
    for x in points:
        col = cols[x]
        nxt = []
        for v in leaves:
            ones = v & col
            if not ones or ones == v:
                return False
            nxt.append(v ^ ones)
            nxt.append(ones)
        leaves = nxt
    return True


def scan_best(handle, k: int):
    """Smallest nonzero restriction count over all point sets of size 1..k.

    Candidates are visited by size, then id tuple, then pattern, all ascending,
    and only a strictly smaller count replaces the incumbent, so the result is
    the minimum under (count, size, ids, pattern). Returns
    ``(count, points, pattern_index)`` or None for an empty class.
    """
    cols, n = handle
    npts = len(cols)
    full = (1 << n) - 1
    best = None
    for t in range(1, min(k, npts) + 1):
        for pts in combinations(range(npts), t - 1):
            leaves = [full]
            for x in pts:
                leaves = _split(leaves, cols[x])
            for last in range((pts[-1] + 1) if pts else 0, npts):
                for p, v in enumerate(_split(leaves, cols[last])):
                    c = v.bit_count()
                    if c and (best is None or c < best[0]):
                        best = (c, pts + (last,), p)
    return best
