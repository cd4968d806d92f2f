"""Plain-text mask and observation files.

Format: ``#`` starts a comment; the first non-comment line is ``n <N>``;
every further line holds one edge ``<i> <j>`` (1-based). Observation files
add a third column with the ±1 value seen on that edge.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import Mask, MaskedGraph
from .errors import MaskParseError


def _parse(text: str, with_values: bool):
    width = 3 if with_values else 2
    n = None
    values = []
    seen: set[tuple[int, int]] = set()
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if n is None:
            if len(fields) != 2 or fields[0] != "n":
                raise MaskParseError("missing header 'n <N>'", lineno)
            try:
                n = int(fields[1])
            except ValueError:
                raise MaskParseError(f"bad vertex count {fields[1]!r}", lineno) from None
            if n < 0:
                raise MaskParseError("negative vertex count", lineno)
            continue
        if len(fields) != width:
            raise MaskParseError(f"expected {width} fields, got {len(fields)}", lineno)
        try:
            i, j = int(fields[0]), int(fields[1])
        except ValueError:
            raise MaskParseError("non-integer vertex index", lineno) from None
        if with_values:
            if fields[2] not in ("1", "+1", "-1"):
                raise MaskParseError(f"observation must be +1 or -1, got {fields[2]!r}", lineno)
            values.append(int(fields[2]))
        if not (1 <= i <= n and 1 <= j <= n):
            raise MaskParseError(f"vertex out of range [1, {n}]", lineno)
        if i == j:
            raise MaskParseError("self-loop", lineno)
        e = (min(i, j), max(i, j))
        if e in seen:
            raise MaskParseError(f"duplicate edge {e}", lineno)
        seen.add(e)
        edges.append(e)
    if n is None:
        raise MaskParseError("missing header 'n <N>'", 1)
    edges = np.array(edges, dtype=np.int64).reshape(-1, 2)
    return n, edges, np.array(values, dtype=np.int8)


def parse_mask(text: str) -> Mask:
    n, edges, _ = _parse(text, with_values=False)
    return Mask(n, edges)


def parse_observations(text: str) -> MaskedGraph:
    n, edges, values = _parse(text, with_values=True)
    # Mask sorts its edges; carry the values along in the same order
    order = np.lexsort((edges[:, 1], edges[:, 0])) if len(edges) else np.empty(0, dtype=np.int64)
    return MaskedGraph(Mask(n, edges), values[order])


def load_mask(path) -> Mask:
    return parse_mask(Path(path).read_text(encoding="utf-8"))


def format_mask(M: Mask) -> str:
    lines = [f"n {M.n}"]
    lines.extend(f"{a} {b}" for a, b in M.edges.tolist())
    return "\n".join(lines) + "\n"


def save_mask(M: Mask, path) -> None:
    Path(path).write_text(format_mask(M), encoding="utf-8")


def load_observations(path) -> MaskedGraph:
    return parse_observations(Path(path).read_text(encoding="utf-8"))


def format_observations(Y: MaskedGraph) -> str:
    lines = [f"n {Y.mask.n}"]
    lines.extend(f"{a} {b} {y:+d}" for (a, b), y in zip(Y.mask.edges.tolist(), Y.values.tolist()))
    return "\n".join(lines) + "\n"
