"""Argument checks shared by the estimators and the harness."""

from __future__ import annotations

import numbers
from typing import Iterable

from .codec import BitFrame
from .kg import KnowledgeGraph


def check_graph(g, kinds: Iterable[str] | None = None, name: str = "graph") -> KnowledgeGraph:
    if not isinstance(g, KnowledgeGraph):
        raise TypeError(f"{name} must be a KnowledgeGraph, got {type(g).__name__}")
    if kinds is not None and g.kind not in set(kinds):
        raise ValueError(f"{name} must be of kind {sorted(kinds)}, got {g.kind!r}")
    return g


def check_unit_interval(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real) or not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be a number in [0, 1], got {value!r}")
    return float(value)


def check_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_messages(X) -> list[str]:
    """Accept one message or an iterable of messages."""
    if isinstance(X, str):
        return [X]
    out = list(X)
    for m in out:
        if not isinstance(m, str):
            raise TypeError(f"messages must be str, got {type(m).__name__}")
    return out


def check_frames(X, width: int) -> list[BitFrame]:
    """Accept a frame, a '0'/'1' string, or an iterable of either."""
    if isinstance(X, (BitFrame, str)):
        X = [X]
    out = []
    for f in X:
        if isinstance(f, str):
            f = BitFrame.from_string(f, width)
        elif not isinstance(f, BitFrame):
            f = BitFrame(f, width)
        if f.width != width:
            raise ValueError(f"frame width {f.width} != estimator width {width}")
        out.append(f)
    return out
