"""Cost estimates and the limits that guard expensive computations.

All limits can be overridden through environment variables so that sweeps can
be scripted without code changes:

``TEACHLAB_BUDGET``
    bit-operation budget for restriction scans and exhaustive searches
    (default ``10**11``).
``TEACHLAB_MAX_CONCEPTS``
    largest class the generators will materialize (default 2,000,000).
``TEACHLAB_DENSE_BYTES``
    largest dense column matrix built for multi-point scans (default 512 MiB).
"""

from __future__ import annotations

import os
from math import comb

from .errors import BudgetExceeded

DEFAULT_BUDGET = 10**11
DEFAULT_MAX_CONCEPTS = 2_000_000
DEFAULT_DENSE_BYTES = 512 * 2**20


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    # accept "1e11" as well as plain integers
    return int(float(raw)) if any(c in raw for c in ".eE") else int(raw)


def op_budget(override: int | None = None) -> int:
    if override is not None:
        return int(override)
    return _env_int("TEACHLAB_BUDGET", DEFAULT_BUDGET)


def max_concepts() -> int:
    return _env_int("TEACHLAB_MAX_CONCEPTS", DEFAULT_MAX_CONCEPTS)


def dense_limit_bytes() -> int:
    return _env_int("TEACHLAB_DENSE_BYTES", DEFAULT_DENSE_BYTES)


def scan_cost(n_points: int, n_concepts: int, k: int) -> int:
    """Bit-operations for one exhaustive restriction scan with parameter k."""
    return sum(comb(n_points, t) * 2**t for t in range(1, k + 1)) * n_concepts


def subset_cost(n_points: int, n_concepts: int, max_size: int) -> int:
    """Bit-operations for visiting every point subset up to ``max_size``."""
    return sum(comb(n_points, s) for s in range(0, max_size + 1)) * n_concepts


def approx(n: int) -> str:
    """Short human-readable magnitude of a possibly enormous integer."""
    if n.bit_length() < 40:
        return str(n)
    if n.bit_length() < 1000:
        return f"{float(n):.3e}"
    return f"~2^{n.bit_length() - 1}"


def require_within(estimate: int, what: str, budget: int | None = None) -> None:
    limit = op_budget(budget)
    if estimate > limit:
        raise BudgetExceeded(
            f"{what}: estimated {approx(estimate)} bit-operations exceeds budget {approx(limit)}",
            estimate=estimate,
            budget=limit,
        )
