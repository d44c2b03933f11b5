"""Finite concept classes over finite ordered domains.

A concept is stored run-length encoded: the sorted, maximal, half-open id
intervals it labels 1. Both constructions in this package produce a handful
of runs per concept even on domains with ~10^5 points, which keeps the large
rectangle instances in a few megabytes. A dense column-major bit matrix
(one row of 64-bit words per point, one bit per concept) is derived on demand
for the multi-point restriction scans in :mod:`teachlab.kernels`.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from itertools import chain
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import budget
from .errors import BudgetExceeded, DomainMismatchError, PreconditionError

META_FIELDS = ("id", "construction", "level", "role", "row", "col", "x", "y")


@dataclass(frozen=True, slots=True)
class DomainPoint:
    """One domain element. Only ``id`` is required; the rest is construction meta."""

    id: int
    construction: str | None = None
    level: int | None = None
    role: str | None = None
    row: int | None = None
    col: int | None = None
    x: int | None = None
    y: int | None = None

    def meta(self) -> dict:
        out = {}
        for name in META_FIELDS:
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out


class Domain:
    """An ordered, nonempty tuple of points with contiguous ids."""

    __slots__ = ("points", "_cache")

    def __init__(self, points: Iterable[DomainPoint]):
        points = tuple(points)
        if not points:
            raise ValueError("a domain needs at least one point")
        for i, p in enumerate(points):
            if p.id != i:
                raise ValueError(f"point ids must be 0..n-1 in order; position {i} has id {p.id}")
        self.points = points
        self._cache: dict = {}

    @classmethod
    def plain(cls, n: int) -> "Domain":
        return cls(DomainPoint(i) for i in range(n))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[DomainPoint]:
        return iter(self.points)

    def __getitem__(self, i: int) -> DomainPoint:
        return self.points[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, Domain) and self.points == other.points

    def __hash__(self) -> int:
        return hash(self.points)

    @property
    def construction(self) -> str | None:
        kinds = {p.construction for p in self.points}
        return kinds.pop() if len(kinds) == 1 else None

    def ids(self, **fields) -> list[int]:
        """Ids of the points whose meta matches every given field."""
        return [
            p.id for p in self.points if all(getattr(p, k) == v for k, v in fields.items())
        ]

    def __repr__(self) -> str:
        return f"Domain(n={len(self)}, construction={self.construction!r})"


def _merge_runs(runs: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    out: list[list[int]] = []
    for s, e in sorted(runs):
        if e <= s:
            continue
        if out and s <= out[-1][1]:
            out[-1][1] = max(out[-1][1], e)
        else:
            out.append([s, e])
    return tuple((s, e) for s, e in out)


class Concept:
    """A binary labeling of ``n`` points, held as runs of ones."""

    __slots__ = ("n", "runs", "_starts")

    def __init__(self, n: int, runs: Iterable[tuple[int, int]] = ()):
        runs = _merge_runs(runs)
        if runs and (runs[0][0] < 0 or runs[-1][1] > n):
            raise ValueError(f"runs {runs} fall outside a domain of {n} points")
        self.n = n
        self.runs = runs
        self._starts = [s for s, _ in runs]

    @classmethod
    def from_bits(cls, bits: str | Sequence[int], n: int | None = None) -> "Concept":
        if isinstance(bits, str):
            bits = [int(ch) for ch in bits]
        bits = list(bits)
        if n is not None and len(bits) != n:
            raise ValueError(f"labeling has length {len(bits)}, domain has {n} points")
        runs, start = [], None
        for i, b in enumerate(bits):
            if b not in (0, 1, True, False):
                raise ValueError(f"label {b!r} at position {i} is not 0/1")
            if b and start is None:
                start = i
            elif not b and start is not None:
                runs.append((start, i))
                start = None
        if start is not None:
            runs.append((start, len(bits)))
        return cls(len(bits), runs)

    @classmethod
    def from_int(cls, value: int, n: int) -> "Concept":
        if value < 0 or value.bit_length() > n:
            raise ValueError(f"{value:#x} does not fit in {n} labels")
        return cls.from_bits([(value >> i) & 1 for i in range(n)])

    def __getitem__(self, x: int) -> int:
        if not 0 <= x < self.n:
            raise IndexError(x)
        i = bisect_right(self._starts, x) - 1
        return int(i >= 0 and x < self.runs[i][1])

    def __len__(self) -> int:
        return self.n

    def labels(self) -> list[int]:
        out = [0] * self.n
        for s, e in self.runs:
            out[s:e] = [1] * (e - s)
        return out

    def ones(self) -> Iterator[int]:
        for s, e in self.runs:
            yield from range(s, e)

    def count(self) -> int:
        return sum(e - s for s, e in self.runs)

    def to_int(self) -> int:
        value = 0
        for s, e in self.runs:
            value |= ((1 << (e - s)) - 1) << s
        return value

    def to_hex(self) -> str:
        """Little-endian hex of the labels (bit ``x`` of byte ``x // 8`` is point ``x``)."""
        return self.to_int().to_bytes((self.n + 7) // 8, "little").hex()

    def bitstring(self) -> str:
        return "".join(map(str, self.labels()))

    def flipped(self, x: int) -> "Concept":
        bits = self.labels()
        bits[x] ^= 1
        return Concept.from_bits(bits)

    def __eq__(self, other) -> bool:
        return isinstance(other, Concept) and self.n == other.n and self.runs == other.runs

    def __hash__(self) -> int:
        return hash((self.n, self.runs))

    def __repr__(self) -> str:
        if self.n <= 64:
            return f"Concept({self.bitstring()!r})"
        return f"Concept(n={self.n}, runs={self.runs[:4]}{'...' if len(self.runs) > 4 else ''})"


@dataclass(frozen=True)
class Restriction:
    """Point ids ``points`` (strictly increasing) paired with labels ``pattern``."""

    points: tuple[int, ...]
    pattern: tuple[int, ...]

    def __post_init__(self):
        points = tuple(int(p) for p in self.points)
        pattern = tuple(int(b) for b in self.pattern)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "pattern", pattern)
        if not points:
            raise ValueError("a restriction needs at least one point")
        if len(points) != len(pattern):
            raise ValueError(f"{len(points)} points but {len(pattern)} labels")
        if any(b not in (0, 1) for b in pattern):
            raise ValueError(f"pattern {pattern} is not binary")
        if any(a >= b for a, b in zip(points, points[1:])):
            raise ValueError(f"points {points} are not strictly increasing")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "Restriction":
        """Build from (point, label) pairs in any order; duplicates must agree."""
        merged: dict[int, int] = {}
        for p, b in pairs:
            if merged.setdefault(p, b) != b:
                raise ValueError(f"point {p} given both labels")
        items = sorted(merged.items())
        return cls(tuple(p for p, _ in items), tuple(b for _, b in items))

    def union(self, other: "Restriction") -> "Restriction":
        return Restriction.from_pairs(chain(self.items(), other.items()))

    def items(self) -> Iterator[tuple[int, int]]:
        return zip(self.points, self.pattern)

    @property
    def bits(self) -> str:
        return "".join(map(str, self.pattern))

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class TeachingCertificate:
    """``teaching_set`` singles out concept ``concept_index`` within its class."""

    concept_index: int
    teaching_set: tuple[int, ...] = field(default=())

    @property
    def size(self) -> int:
        return len(self.teaching_set)


def _bool_rows_to_csr(rows: np.ndarray, offset: int = 0):
    """Runs of a (m, n) boolean matrix as (starts, stops, counts per row)."""
    m, n = rows.shape
    padded = np.zeros((m, n + 2), dtype=np.int8)
    padded[:, 1:-1] = rows
    d = np.diff(padded, axis=1)
    r1, starts = np.nonzero(d == 1)
    _, stops = np.nonzero(d == -1)
    counts = np.bincount(r1, minlength=m)
    return starts.astype(np.int64), stops.astype(np.int64), counts


class ConceptClass:
    """An immutable, duplicate-free, ordered list of concepts over a :class:`Domain`.

    Construct through :func:`build_class`; the initializer trusts its input.
    """

    def __init__(self, domain: Domain, starts, stops, ptr, origins: Sequence[tuple[str, ...]]):
        self.domain = domain
        self._starts = np.asarray(starts, dtype=np.int64)
        self._stops = np.asarray(stops, dtype=np.int64)
        self._ptr = np.asarray(ptr, dtype=np.int64)
        self._origins = tuple(origins)
        self._cache: dict = {}
        if len(self._origins) != len(self._ptr) - 1:
            raise ValueError("one origin tuple per concept is required")

    # -- basic access -------------------------------------------------------

    @property
    def n_points(self) -> int:
        return len(self.domain)

    def __len__(self) -> int:
        return len(self._ptr) - 1

    def __iter__(self) -> Iterator[Concept]:
        return (self.concept(i) for i in range(len(self)))

    def _check_index(self, i: int) -> int:
        if not 0 <= i < len(self):
            raise DomainMismatchError(f"concept index {i} out of range for {len(self)} concepts")
        return int(i)

    def check_points(self, points: Iterable[int]) -> tuple[int, ...]:
        pts = tuple(int(p) for p in points)
        for p in pts:
            if not 0 <= p < self.n_points:
                raise DomainMismatchError(f"point id {p} not in a domain of {self.n_points} points")
        return pts

    def runs(self, i: int) -> tuple[tuple[int, int], ...]:
        i = self._check_index(i)
        a, b = self._ptr[i], self._ptr[i + 1]
        return tuple(zip(self._starts[a:b].tolist(), self._stops[a:b].tolist()))

    def concept(self, i: int) -> Concept:
        return Concept(self.n_points, self.runs(i))

    def origins(self, i: int) -> tuple[str, ...]:
        return self._origins[self._check_index(i)]

    @property
    def all_origins(self) -> tuple[tuple[str, ...], ...]:
        return self._origins

    def __repr__(self) -> str:
        return f"ConceptClass(|X|={self.n_points}, |C|={len(self)}, construction={self.domain.construction!r})"

    # -- run-length views ---------------------------------------------------

    @property
    def n_runs(self) -> int:
        return len(self._starts)

    def _owners(self) -> np.ndarray:
        if "owners" not in self._cache:
            self._cache["owners"] = np.repeat(np.arange(len(self), dtype=np.int64), np.diff(self._ptr))
        return self._cache["owners"]

    def column(self, x: int) -> np.ndarray:
        """Labels of point ``x`` across all concepts, as a bool array."""
        cols = self._cache.setdefault("columns", {})
        if x in cols:
            return cols[x]
        hit = (self._starts <= x) & (self._stops > x)
        out = np.zeros(len(self), dtype=bool)
        out[self._owners()[hit]] = True
        if len(self) * self.n_points <= 1 << 24:
            cols[x] = out
        return out

    def labels_on(self, points: Sequence[int]) -> np.ndarray:
        """(|C|, len(points)) bool matrix of labels."""
        pts = self.check_points(points)
        out = np.zeros((len(self), len(pts)), dtype=bool)
        for j, x in enumerate(pts):
            out[:, j] = self.column(x)
        return out

    def ones_per_point(self) -> np.ndarray:
        """Number of concepts labeling each point 1."""
        n = self.n_points
        diff = np.bincount(self._starts, minlength=n + 1) - np.bincount(self._stops, minlength=n + 1)
        return np.cumsum(diff)[:n]

    def take(self, indices) -> "ConceptClass":
        """Subclass made of the given concept indices, in the given order."""
        idx = np.asarray(indices, dtype=np.int64).reshape(-1)
        if idx.size and (idx.min() < 0 or idx.max() >= len(self)):
            raise DomainMismatchError("concept index out of range")
        lengths = self._ptr[idx + 1] - self._ptr[idx]
        ptr = np.zeros(len(idx) + 1, dtype=np.int64)
        np.cumsum(lengths, out=ptr[1:])
        pos = np.repeat(self._ptr[idx] - ptr[:-1], lengths) + np.arange(ptr[-1], dtype=np.int64)
        return ConceptClass(
            self.domain,
            self._starts[pos],
            self._stops[pos],
            ptr,
            [self._origins[i] for i in idx.tolist()],
        )

    # -- dense views --------------------------------------------------------

    def _bool_chunks(self, chunk: int | None = None) -> Iterator[tuple[int, np.ndarray]]:
        """Yield (first concept, bool matrix) blocks of the class, 64-aligned."""
        n, m = self.n_points, len(self)
        if chunk is None:
            chunk = max(64, ((1 << 22) // (n + 1)) // 64 * 64)
        owners = self._owners()
        for c0 in range(0, m, chunk):
            c1 = min(m, c0 + chunk)
            a, b = self._ptr[c0], self._ptr[c1]
            local = (owners[a:b] - c0) * (n + 1)
            cells = (c1 - c0) * (n + 1)
            diff = np.bincount(local + self._starts[a:b], minlength=cells) - np.bincount(
                local + self._stops[a:b], minlength=cells
            )
            yield c0, np.cumsum(diff.reshape(c1 - c0, n + 1), axis=1)[:, :n] > 0

    def dense_bytes(self) -> int:
        return self.n_points * ((len(self) + 63) // 64) * 8

    def dense_feasible(self) -> bool:
        return self.dense_bytes() <= budget.dense_limit_bytes()

    def dense_words(self) -> np.ndarray:
        """(|X|, ceil(|C|/64)) uint64 matrix; bit c of row x is concept c's label at x."""
        if "dense" in self._cache:
            return self._cache["dense"]
        if not self.dense_feasible():
            raise BudgetExceeded(
                f"dense matrix for {self.n_points} points x {len(self)} concepts needs "
                f"{self.dense_bytes()} bytes",
                estimate=self.dense_bytes(),
                budget=budget.dense_limit_bytes(),
            )
        nwords = (len(self) + 63) // 64
        out = np.zeros((self.n_points, nwords * 8), dtype=np.uint8)
        for c0, block in self._bool_chunks():
            packed = np.packbits(block.T, axis=1, bitorder="little")
            out[:, c0 // 8 : c0 // 8 + packed.shape[1]] = packed
        words = out.view(np.dtype("<u8")).astype(np.uint64, copy=False)
        words.setflags(write=False)
        self._cache["dense"] = words
        return words

    def kernel_handle(self, backend):
        handles = self._cache.setdefault("handles", {})
        if backend.NAME not in handles:
            handles[backend.NAME] = backend.prepare(self.dense_words(), len(self))
        return handles[backend.NAME]

    def row_bytes(self) -> Iterator[np.ndarray]:
        """Yield blocks of little-endian packed rows, one row per concept."""
        for _, block in self._bool_chunks():
            yield np.packbits(block, axis=1, bitorder="little")

    def same_labelings(self, other: "ConceptClass") -> bool:
        return (
            self.domain == other.domain
            and np.array_equal(self._ptr, other._ptr)
            and np.array_equal(self._starts, other._starts)
            and np.array_equal(self._stops, other._stops)
        )


class _Collector:
    """Accumulates labelings, dropping repeats and merging their origin tags."""

    def __init__(self, domain: Domain):
        self.domain = domain
        self.index: dict[tuple, int] = {}
        self.keys: list[tuple] = []
        self.origins: list[list[str]] = []

    def add(self, flat_runs: tuple, tag: str | None) -> None:
        i = self.index.get(flat_runs)
        if i is None:
            self.index[flat_runs] = len(self.keys)
            self.keys.append(flat_runs)
            self.origins.append([tag] if tag is not None else [])
        elif tag is not None:
            self.origins[i].append(tag)

    def finish(self) -> ConceptClass:
        counts = np.fromiter((len(k) // 2 for k in self.keys), dtype=np.int64, count=len(self.keys))
        flat = np.fromiter(chain.from_iterable(self.keys), dtype=np.int64, count=int(counts.sum()) * 2)
        ptr = np.zeros(len(self.keys) + 1, dtype=np.int64)
        np.cumsum(counts, out=ptr[1:])
        return ConceptClass(self.domain, flat[0::2], flat[1::2], ptr, [tuple(o) for o in self.origins])


def _as_concept(labeling, n: int) -> Concept:
    if isinstance(labeling, Concept):
        if labeling.n != n:
            raise ValueError(f"labeling has length {labeling.n}, domain has {n} points")
        return labeling
    return Concept.from_bits(labeling, n)


def build_class(domain: Domain, labelings: Iterable, origins: Iterable[str] | None = None) -> ConceptClass:
    """Collect labelings into a class, keeping the first copy of each repeat.

    ``labelings`` may yield :class:`Concept` objects, ``'0101'`` strings or 0/1
    sequences. Origin tags of dropped repeats are appended to the survivor.
    """
    col = _Collector(domain)
    tags = iter(origins) if origins is not None else None
    for labeling in labelings:
        c = _as_concept(labeling, len(domain))
        tag = next(tags) if tags is not None else None
        col.add(tuple(chain.from_iterable(c.runs)), tag)
    return col.finish()


def build_class_from_runs(domain: Domain, items: Iterable[tuple[tuple, str | None]]) -> ConceptClass:
    """Fast path for generators: ``items`` yields (flat canonical runs, tag).

    Flat runs are ``(s0, e0, s1, e1, ...)``, sorted, non-adjacent and nonempty.
    """
    col = _Collector(domain)
    for flat, tag in items:
        col.add(flat, tag)
    return col.finish()


def build_class_from_rows(domain: Domain, rows: np.ndarray, origins: Sequence[tuple[str, ...]] | None = None) -> ConceptClass:
    """Class from a (m, |X|) bool matrix, deduplicated keep-first."""
    rows = np.asarray(rows, dtype=bool)
    if rows.ndim != 2 or rows.shape[1] != len(domain):
        raise ValueError(f"rows must have shape (m, {len(domain)})")
    first: dict[bytes, int] = {}
    keep: list[int] = []
    merged: list[list[str]] = []
    for i, key in enumerate(np.packbits(rows, axis=1)):
        key = key.tobytes()
        tags = list(origins[i]) if origins is not None else []
        j = first.get(key)
        if j is None:
            first[key] = len(keep)
            keep.append(i)
            merged.append(tags)
        else:
            merged[j].extend(tags)
    starts, stops, counts = _bool_rows_to_csr(rows[keep])
    ptr = np.zeros(len(keep) + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return ConceptClass(domain, starts, stops, ptr, [tuple(t) for t in merged])


# -- operations ---------------------------------------------------------------


def consistent_mask(C: ConceptClass, r: Restriction) -> np.ndarray:
    C.check_points(r.points)
    mask = np.ones(len(C), dtype=bool)
    for x, b in r.items():
        col = C.column(x)
        mask &= col if b else ~col
    return mask


def restrict(C: ConceptClass, r: Restriction) -> ConceptClass:
    """Concepts agreeing with ``r``; order preserved, possibly empty."""
    return C.take(np.flatnonzero(consistent_mask(C, r)))


def count_consistent(C: ConceptClass, r: Restriction) -> int:
    return int(np.count_nonzero(consistent_mask(C, r)))


def patterns_on(C: ConceptClass, points: Sequence[int]) -> frozenset[str]:
    """Distinct label patterns the class induces on ``points`` (as bitstrings)."""
    pts = C.check_points(points)
    if len(set(pts)) != len(pts):
        raise PreconditionError(f"points {pts} are not distinct")
    if not pts:
        return frozenset({""}) if len(C) else frozenset()
    if len(C) == 0:
        return frozenset()
    rows = np.unique(C.labels_on(pts).astype(np.uint8), axis=0)
    return frozenset("".join(map(str, row)) for row in rows.tolist())


def is_shattered(C: ConceptClass, points: Sequence[int], backend=None) -> bool:
    pts = C.check_points(points)
    if len(set(pts)) != len(pts):
        raise PreconditionError(f"points {pts} are not distinct")
    if len(C) < 2 ** len(pts):
        return False
    if not pts:
        return True
    if C.dense_feasible():
        from . import kernels

        be = kernels.get_backend(backend)
        return bool(be.shatters(C.kernel_handle(be), pts))
    return len(patterns_on(C, pts)) == 2 ** len(pts)


def is_teaching_set(C: ConceptClass, concept_index: int, points: Iterable[int]) -> bool:
    """True iff concept ``concept_index`` is the only one matching its own labels on ``points``."""
    i = C._check_index(concept_index)
    pts = sorted(set(C.check_points(points)))
    if not pts:
        return len(C) == 1
    c = C.concept(i)
    r = Restriction(tuple(pts), tuple(c[x] for x in pts))
    return count_consistent(C, r) == 1


def flip_label(C: ConceptClass, concept_index: int, point: int) -> ConceptClass:
    """Copy of ``C`` with one label flipped (mutation controls for the checkers)."""
    i = C._check_index(concept_index)
    (x,) = C.check_points([point])
    labelings = [C.concept(j) if j != i else C.concept(j).flipped(x) for j in range(len(C))]
    col = _Collector(C.domain)
    for c, tags in zip(labelings, C.all_origins):
        flat = tuple(chain.from_iterable(c.runs))
        if not tags:
            col.add(flat, None)
        for t in tags:
            col.add(flat, t)
    return col.finish()
