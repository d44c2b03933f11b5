"""Restriction-counting kernels over a dense column bit matrix.

Two interchangeable backends implement the same four functions
(``prepare``, ``scan_best``, ``pattern_counts``, ``shatters``):

* ``cython``: the compiled ``_ckernels`` extension, word-level popcounts;
* ``python``: ``_pykernels``, one arbitrary-precision int per column.

The compiled one is used when it imports. ``TEACHLAB_PURE_PYTHON=1`` forces
the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

if os.environ.get("TEACHLAB_PURE_PYTHON") == "1" or _ckernels is None:
    _default = _pykernels
else:
    _default = _ckernels

BACKEND = _default.NAME


def available_backends() -> dict:
    return dict(_BACKENDS)


def get_backend(name=None):
    """Backend module by name; ``None`` gives the one selected at import."""
    if name is None:
        return _default
    if not isinstance(name, str):
        return name
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable kernel backend {name!r}; have {sorted(_BACKENDS)}") from None
