"""The greedy teaching-set procedure.

Each round picks the labeled point set of size at most ``k`` that leaves the
fewest (but at least one) consistent concepts, adds its points to the
teaching set and restricts the class, until a single concept remains.

Ties are broken by the total order (count, |T|, ids lexicographic, pattern
lexicographic with 0 < 1), so smaller point sets win ties as required.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import budget, kernels
from .concepts import ConceptClass, Restriction, TeachingCertificate, consistent_mask
from .errors import PreconditionError, TeachlabError

TIE_BREAK = "count,size,ids,pattern"
TRACE_COLUMNS = ("iter", "points", "pattern", "size_before", "size_after", "cum_teaching_set_size")


@dataclass(frozen=True)
class GreedyConfig:
    k: int
    tie_break: str = TIE_BREAK

    def __post_init__(self):
        if int(self.k) < 1:
            raise PreconditionError(f"greediness k must be >= 1, got {self.k}")
        if self.tie_break != TIE_BREAK:
            raise PreconditionError(f"only the {TIE_BREAK!r} tie-break is implemented")


@dataclass(frozen=True)
class GreedyStep:
    restriction: Restriction
    size_before: int
    size_after: int
    cum_size: int


@dataclass(frozen=True)
class GreedyTrace:
    steps: tuple[GreedyStep, ...]
    final_concept_index: int
    teaching_set: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.teaching_set)

    def to_csv(self, final_hex: str) -> str:
        buf = io.StringIO()
        write_trace(self, buf, final_hex)
        return buf.getvalue()


def write_trace(trace: GreedyTrace, fh, final_hex: str) -> None:
    """CSV trace; the last row is ``final,<concept index>,<hex labels>,1,1,|S|``."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for i, s in enumerate(trace.steps):
        r = s.restriction
        w.writerow([i, ";".join(map(str, r.points)), r.bits, s.size_before, s.size_after, s.cum_size])
    w.writerow(["final", trace.final_concept_index, final_hex, 1, 1, trace.size])


def _pattern_tuple(index: int, t: int) -> tuple[int, ...]:
    return tuple((index >> (t - 1 - j)) & 1 for j in range(t))


def _best_single_point(C: ConceptClass) -> tuple[Restriction, int]:
    ones = C.ones_per_point()
    counts = np.column_stack((len(C) - ones, ones)).reshape(-1)
    masked = np.where(counts > 0, counts, np.iinfo(np.int64).max)
    flat = int(np.argmin(masked))  # first minimum = smallest (point, label)
    return Restriction((flat // 2,), (flat % 2,)), int(counts[flat])


def best_restriction(C: ConceptClass, k: int, backend=None) -> tuple[Restriction, int]:
    """Minimum-count nonempty restriction with at most ``k`` points.

    ``k == 1`` is answered from per-point counts over the run-length
    representation, which scales to very large domains. Larger ``k`` runs the
    exhaustive kernel scan on the dense column matrix.
    """
    if len(C) < 2:
        raise PreconditionError(f"best_restriction needs at least two concepts, got {len(C)}")
    k = int(k)
    if not 1 <= k <= C.n_points:
        raise PreconditionError(f"k={k} outside 1..{C.n_points}")
    if k == 1:
        return _best_single_point(C)
    be = kernels.get_backend(backend)
    found = be.scan_best(C.kernel_handle(be), k)
    count, pts, p = found
    return Restriction(pts, _pattern_tuple(p, len(pts))), int(count)


def greedy_teach(C: ConceptClass, config: GreedyConfig | int, backend=None) -> tuple[TeachingCertificate, GreedyTrace]:
    if not isinstance(config, GreedyConfig):
        config = GreedyConfig(int(config))
    if len(C) < 1:
        raise PreconditionError("cannot teach from an empty class")
    if config.k > C.n_points:
        raise PreconditionError(f"k={config.k} exceeds the domain size {C.n_points}")
    current = C
    alive = np.arange(len(C))
    taught: set[int] = set()
    steps = []
    while len(current) > 1:
        r, count = best_restriction(current, config.k, backend)
        keep = np.flatnonzero(consistent_mask(current, r))
        if len(keep) != count:
            raise TeachlabError(f"scan reported {count} concepts for {r} but restriction kept {len(keep)}")
        taught.update(r.points)
        steps.append(GreedyStep(r, len(current), count, len(taught)))
        current = current.take(keep)
        alive = alive[keep]
    index = int(alive[0])
    return TeachingCertificate(index, tuple(sorted(taught))), GreedyTrace(tuple(steps), index, tuple(sorted(taught)))


def estimate_cost(C: ConceptClass, k: int) -> int:
    """Bit-operation estimate of one scan, as used by the CLI budget guard."""
    return budget.scan_cost(C.n_points, len(C), k)
