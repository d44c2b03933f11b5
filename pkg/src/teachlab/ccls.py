"""Reader and writer for the ``CCLS 1`` class file format.

Layout::

    CCLS 1 <n_points> <n_concepts>
    <one compact JSON object per point, canonical order>
    <hex labels> <origin tags, comma separated, or "-">   (one line per concept)

Labels are little-endian: point ``x`` is bit ``x % 8`` of byte ``x // 8``.
Output depends only on the class, so equal classes give identical bytes.
"""

from __future__ import annotations

import io
import json
import os
from typing import IO, Iterator

import numpy as np

from .concepts import META_FIELDS, ConceptClass, Domain, DomainPoint, build_class_from_rows

MAGIC = "CCLS"
VERSION = 1


class FormatError(ValueError):
    pass


def _lines(C: ConceptClass) -> Iterator[str]:
    yield f"{MAGIC} {VERSION} {C.n_points} {len(C)}\n"
    for p in C.domain:
        yield json.dumps(p.meta(), separators=(",", ":")) + "\n"
    nbytes = (C.n_points + 7) // 8
    i = 0
    for block in C.row_bytes():
        for row in block:
            tags = C.all_origins[i]
            for t in tags:
                if not t or any(ch in t for ch in " ,\n"):
                    raise ValueError(f"origin tag {t!r} cannot be serialized")
            yield row[:nbytes].tobytes().hex() + " " + (",".join(tags) or "-") + "\n"
            i += 1


def write_ccls(C: ConceptClass, target: str | os.PathLike | IO[str]) -> None:
    if hasattr(target, "write"):
        target.writelines(_lines(C))
        return
    with open(target, "w", encoding="ascii", newline="\n") as fh:
        fh.writelines(_lines(C))


def dumps(C: ConceptClass) -> str:
    buf = io.StringIO()
    write_ccls(C, buf)
    return buf.getvalue()


def _point(obj: dict, expected_id: int) -> DomainPoint:
    unknown = set(obj) - set(META_FIELDS)
    if unknown:
        raise FormatError(f"unknown point fields {sorted(unknown)}")
    if obj.get("id") != expected_id:
        raise FormatError(f"point line {expected_id} has id {obj.get('id')}")
    return DomainPoint(**obj)


def read_ccls(source: str | os.PathLike | IO[str], chunk: int = 65536) -> ConceptClass:
    """Parse a class file. Repeated labelings are merged keep-first."""
    if hasattr(source, "read"):
        return _read(source, chunk)
    with open(source, encoding="ascii") as fh:
        return _read(fh, chunk)


def _read(fh: IO[str], chunk: int) -> ConceptClass:
    header = fh.readline().split()
    if len(header) != 4 or header[0] != MAGIC:
        raise FormatError(f"not a {MAGIC} file")
    if header[1] != str(VERSION):
        raise FormatError(f"unsupported version {header[1]}")
    n, m = int(header[2]), int(header[3])
    points = []
    for i in range(n):
        line = fh.readline()
        if not line:
            raise FormatError("truncated point block")
        points.append(_point(json.loads(line), i))
    domain = Domain(points)
    nbytes = (n + 7) // 8
    blocks, origins = [], []
    buf = bytearray()
    for j in range(m):
        line = fh.readline()
        if not line:
            raise FormatError(f"expected {m} concept lines, found {j}")
        parts = line.split()
        if len(parts) != 2 or len(parts[0]) != 2 * nbytes:
            raise FormatError(f"bad concept line {j}")
        buf += bytes.fromhex(parts[0])
        origins.append(() if parts[1] == "-" else tuple(parts[1].split(",")))
        if len(buf) >= chunk * nbytes or j == m - 1:
            raw = np.frombuffer(bytes(buf), dtype=np.uint8).reshape(-1, nbytes)
            bits = np.unpackbits(raw, axis=1, bitorder="little")
            if n % 8 and bits[:, n:].any():
                raise FormatError("labels set beyond the last point")
            blocks.append(bits[:, :n].astype(bool))
            buf = bytearray()
    if fh.readline().strip():
        raise FormatError("trailing data after concept block")
    rows = np.concatenate(blocks) if blocks else np.zeros((0, n), dtype=bool)
    return build_class_from_rows(domain, rows, origins)
