"""Axis-aligned rectangle classes on which greedy with k=1 needs N rounds.

Level ``i`` is a vertical column of ``2 w_i + 1`` points: a center, ``w_i``
points above it and ``w_i`` below. Its concepts are the rectangles holding
the center, one whole arm and a prefix of the other arm, optionally widened
leftwards to swallow every lower level.

Coordinates: column ``i`` sits at ``x = i``; point ``j`` of an arm sits at
``y = +/- j * s_i`` with ``s_1 = 1`` and ``s_i = s_{i-1} w_{i-1} + 1``, so all
lower levels fit strictly between a center and its two nearest neighbours.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import budget
from .concepts import (
    Concept,
    ConceptClass,
    Domain,
    DomainPoint,
    Restriction,
    TeachingCertificate,
    build_class_from_runs,
    consistent_mask,
    is_teaching_set,
)
from .errors import BudgetExceeded, ConstructionError, PreconditionError
from .schedules import AnalyticCounts, WidthReport

CONSTRUCTION = "rectangles"
FAMILIES = ("up1", "down1", "up2", "down2")


def default_rect_widths(levels: int) -> tuple[int, ...]:
    if levels < 1:
        raise PreconditionError("need at least one level")
    return tuple(2 ** (10 * i) for i in range(1, levels + 1))


def _check_widths(widths) -> tuple[int, ...]:
    widths = tuple(int(w) for w in widths)
    if not widths or any(w < 1 for w in widths):
        raise PreconditionError(f"widths must be positive, got {widths}")
    return widths


def validate_rect_widths(widths) -> WidthReport:
    """Every level must outweigh twice the total size of the levels below it."""
    widths = _check_widths(widths)
    below = 0
    for i, w in enumerate(widths, start=1):
        size = 4 * w + 2
        if i >= 2 and not 2 * below < size:
            return WidthReport(False, i, below, size // 2, f"level {i}: {below} >= {size // 2}")
        below += size
    return WidthReport(True)


@dataclass(frozen=True)
class RectGeometry:
    widths: tuple[int, ...]
    scales: tuple[int, ...]

    def column(self, level: int) -> int:
        return level

    def extent(self, level: int) -> int:
        """Largest |y| used by ``level``."""
        return self.scales[level - 1] * self.widths[level - 1]


def rect_geometry(widths) -> RectGeometry:
    widths = _check_widths(widths)
    scales = [1]
    for w in widths[:-1]:
        scales.append(scales[-1] * w + 1)
    return RectGeometry(widths, tuple(scales))


def _offsets(widths) -> list[int]:
    out, acc = [], 0
    for w in widths:
        out.append(acc)
        acc += 2 * w + 1
    return out


def rect_domain(widths) -> Domain:
    geo = rect_geometry(widths)
    pts = []
    for i, (w, s) in enumerate(zip(geo.widths, geo.scales), start=1):
        base = dict(construction=CONSTRUCTION, level=i, x=i)
        pts.append(DomainPoint(len(pts), role="center", y=0, **base))
        for j in range(1, w + 1):
            pts.append(DomainPoint(len(pts), role="up", row=j, y=j * s, **base))
        for j in range(1, w + 1):
            pts.append(DomainPoint(len(pts), role="down", row=j, y=-j * s, **base))
    return Domain(pts)


def _two_runs(a: int, b: int, c: int, d: int) -> tuple:
    return (a, d) if b == c else (a, b, c, d)


def _level_concepts(level: int, w: int, offset: int):
    """(flat runs, tag) for the four families of one level, in canonical order."""
    o = offset
    end = o + 2 * w + 1
    for m in range(w + 1):
        yield (o, o + 1 + w + m), f"C{level}/up1/{m}"
    for m in range(w + 1):
        yield _two_runs(o, o + 1 + m, o + 1 + w, end), f"C{level}/down1/{m}"
    # lower levels occupy ids [0, o); widening merges them into the first run
    for m in range(w + 1):
        yield (0, o + 1 + w + m), f"C{level}/up2/{m}"
    for m in range(w + 1):
        yield _two_runs(0, o + 1 + m, o + 1 + w, end), f"C{level}/down2/{m}"


def rect_analytic_sizes(levels: int, widths=None) -> AnalyticCounts:
    """Exact sizes. On level 1 the widened families add nothing (there is
    nothing below to swallow), so it has ``2 w_1 + 1`` distinct concepts."""
    default = widths is None
    widths = default_rect_widths(levels) if default else _check_widths(widths)
    if len(widths) != levels:
        raise PreconditionError(f"{levels} levels but {len(widths)} widths")
    pts = tuple(2 * w + 1 for w in widths)
    formula = tuple(4 * w + 2 for w in widths)
    exact = (2 * widths[0] + 1,) + formula[1:]
    X, F = sum(pts), sum(exact)
    checks = {"domination": validate_rect_widths(widths).ok}
    if default or widths == default_rect_widths(levels):
        n = levels
        checks.update(
            domain_lower=2 ** (10 * n + 1) <= X,
            domain_upper=X <= 2 ** (10 * n + 3),
            class_lower=2 ** (10 * n + 2) <= F,
            class_upper=F <= 2 ** (10 * n + 4),
            formula_class_lower=2 ** (10 * n + 2) <= sum(formula),
            formula_class_upper=sum(formula) <= 2 ** (10 * n + 4),
        )
    return AnalyticCounts(
        construction=CONSTRUCTION,
        levels=levels,
        widths=widths,
        level_points=pts,
        level_concepts=exact,
        formula_level_concepts=formula,
        domain_size=X,
        class_size=F,
        checks=checks,
    )


def build_rectangles(levels: int, widths=None, *, force: bool = False) -> ConceptClass:
    """Materialize the class. Point meta carries level, role, arm index and (x, y)."""
    widths = default_rect_widths(levels) if widths is None else _check_widths(widths)
    if len(widths) != levels:
        raise PreconditionError(f"{levels} levels but {len(widths)} widths")
    sizes = rect_analytic_sizes(levels, widths)
    if sizes.class_size > budget.max_concepts() or sizes.domain_size > budget.max_concepts():
        raise BudgetExceeded(
            f"rectangles N={levels}: {sizes.class_size} concepts on {sizes.domain_size} points is too large to materialize",
            estimate=sizes.class_size,
            budget=budget.max_concepts(),
            analytic=sizes,
        )
    if not force:
        report = validate_rect_widths(widths)
        if not report:
            raise PreconditionError(f"width schedule fails the domination check ({report.reason}); use force to build anyway")
    domain = rect_domain(widths)

    def items():
        for i, (w, o) in enumerate(zip(widths, _offsets(widths)), start=1):
            yield from _level_concepts(i, w, o)

    return build_class_from_runs(domain, items())


def rect_widths_from_domain(domain: Domain) -> tuple[int, ...]:
    if domain.construction != CONSTRUCTION:
        raise PreconditionError("domain was not built by build_rectangles")
    levels = max(p.level for p in domain)
    return tuple(len(domain.ids(level=i, role="up")) for i in range(1, levels + 1))


@dataclass(frozen=True)
class Rectangle:
    """Closed box; points on the border are inside."""

    x_lo: int
    x_hi: int
    y_lo: int
    y_hi: int

    def __post_init__(self):
        if self.x_lo > self.x_hi or self.y_lo > self.y_hi:
            raise ValueError(f"empty box {self}")

    def contains(self, x: int, y: int) -> bool:
        return self.x_lo <= x <= self.x_hi and self.y_lo <= y <= self.y_hi


@dataclass(frozen=True)
class NotRealizable:
    """The bounding box of the positive points also holds negative point ``point``."""

    box: Rectangle
    point: int

    def __bool__(self) -> bool:
        return False


def _coords(domain: Domain):
    if "coords" not in domain._cache:
        xs = [p.x for p in domain]
        ys = [p.y for p in domain]
        if any(v is None for v in xs + ys):
            raise PreconditionError("domain points have no (x, y) coordinates")
        big = max(map(abs, xs + ys)) >= 2**62
        dtype = object if big else np.int64
        domain._cache["coords"] = (np.array(xs, dtype=dtype), np.array(ys, dtype=dtype))
    return domain._cache["coords"]


def realize_rectangle(concept: Concept, domain: Domain) -> Rectangle | NotRealizable:
    """Smallest box around the concept's ones, if it holds none of its zeros."""
    if concept.n != len(domain):
        raise PreconditionError("concept and domain sizes differ")
    if not concept.runs:
        raise PreconditionError("concept has no positive point")
    xs, ys = _coords(domain)
    pos = np.zeros(len(domain), dtype=bool)
    for s, e in concept.runs:
        pos[s:e] = True
    px, py = xs[pos], ys[pos]
    box = Rectangle(int(px.min()), int(px.max()), int(py.min()), int(py.max()))
    inside = (xs >= box.x_lo) & (xs <= box.x_hi) & (ys >= box.y_lo) & (ys <= box.y_hi)
    bad = np.flatnonzero(inside & ~pos)
    if bad.size:
        return NotRealizable(box, int(bad[0]))
    return box


def family_rectangle(geometry: RectGeometry, level: int, family: str, m: int) -> Rectangle:
    """The rectangle used to define concept ``C{level}/{family}/{m}``."""
    w, s = geometry.widths[level - 1], geometry.scales[level - 1]
    if family not in FAMILIES or not 0 <= m <= w:
        raise PreconditionError(f"no concept {family}/{m} at level {level}")
    widened = family.endswith("2")
    x_lo = 1 if widened else level
    if family.startswith("up"):
        y_hi = w * s
        y_lo = -m * s if m else (-(s - 1) if widened else 0)
    else:
        y_lo = -w * s
        y_hi = m * s if m else ((s - 1) if widened else 0)
    return Rectangle(x_lo, level, y_lo, y_hi)


def rect_tsmin_witness(C: ConceptClass) -> TeachingCertificate:
    """Two points teach the level-1 concept made of the center and the lower arm:
    it is the only one with the center of level 1 at 1 and the point just above at 0."""
    center = C.domain.ids(construction=CONSTRUCTION, level=1, role="center")
    above = C.domain.ids(construction=CONSTRUCTION, level=1, role="up", row=1)
    if len(center) != 1 or len(above) != 1:
        raise PreconditionError("class was not built by build_rectangles")
    r = Restriction((center[0], above[0]), (1, 0))
    hits = np.flatnonzero(consistent_mask(C, r))
    if len(hits) != 1:
        raise ConstructionError(f"{len(hits)} concepts match the level-1 witness pattern, expected 1")
    cert = TeachingCertificate(int(hits[0]), r.points)
    w1 = len(C.domain.ids(level=1, role="down"))
    expected = ((center[0], center[0] + 1), (center[0] + 1 + w1, center[0] + 1 + 2 * w1))
    got = C.runs(cert.concept_index)
    if _merge(expected) != got or not is_teaching_set(C, cert.concept_index, cert.teaching_set):
        raise ConstructionError(f"witness concept {got} is not the level-1 lower-arm rectangle")
    return cert


def _merge(runs):
    return Concept(10**18, runs).runs
