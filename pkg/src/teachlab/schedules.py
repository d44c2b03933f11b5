"""Result records shared by the two constructions: width checks and exact sizes."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

# ints wider than this are written to JSON as hex strings; Python refuses to
# format very long ints in decimal
_JSON_INT_BITS = 4096


def jsonable(value):
    """Recursively convert records to JSON-safe values, keeping ints exact."""
    if isinstance(value, bool) or value is None or isinstance(value, (str, float)):
        return value
    if isinstance(value, int):
        return value if value.bit_length() <= _JSON_INT_BITS else hex(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if hasattr(value, "__dataclass_fields__"):
        return jsonable(asdict(value))
    raise TypeError(f"cannot serialize {type(value).__name__}")


@dataclass(frozen=True)
class WidthReport:
    """Outcome of a width-schedule check; ``level`` is the first failing level."""

    ok: bool
    level: int | None = None
    lhs: int | None = None
    rhs: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class AnalyticCounts:
    """Exact sizes of a construction, computed without materializing it.

    ``level_concepts`` counts distinct labelings per level. ``formula_level_concepts``
    is the closed form the construction is usually quoted with; the two differ
    only where families coincide as labelings (rectangles level 1).
    """

    construction: str
    levels: int
    widths: tuple[int, ...]
    level_points: tuple[int, ...]
    level_concepts: tuple[int, ...]
    formula_level_concepts: tuple[int, ...]
    domain_size: int
    class_size: int
    k: int | None = None
    head_labelings: tuple[int, ...] | None = None
    tail_concepts: tuple[int, ...] | None = None
    checks: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return jsonable(self)


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a structural check; ``counterexample`` is set on failure."""

    ok: bool
    checked: int = 0
    counterexample: dict | None = None

    def __bool__(self) -> bool:
        return self.ok
