"""Binary symmetric channel with an optional eavesdropper tap."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codec import BitFrame


@dataclass(frozen=True)
class ChannelConfig:
    p: float = 0.0
    rng_seed: int = 0
    eavesdrop_tap: bool = True
    tap_p: float | None = None  # None: the tap sees the same flip probability

    def __post_init__(self):
        for name, value in (("p", self.p), ("tap_p", self.tap_p)):
            if value is not None and not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be non-negative")

    @property
    def tap_probability(self) -> float:
        return self.p if self.tap_p is None else self.tap_p


def _flip(bits: np.ndarray, uniforms: np.ndarray, p: float) -> np.ndarray:
    return bits ^ (uniforms < p).astype(np.uint8)


def transmit(frame: BitFrame, cfg: ChannelConfig, frame_id: int = 0) -> tuple[BitFrame, BitFrame | None]:
    """Pass ``frame`` through the channel; returns (received, tapped or None).

    A fresh generator is seeded from ``(cfg.rng_seed, frame_id)``. The
    receiver's flips use the first ``len(frame)`` uniforms and the tap's the
    next ``len(frame)``, so for a fixed seed the set of flipped positions
    only grows with ``p``.
    """
    rng = np.random.default_rng([cfg.rng_seed, frame_id])
    n = len(frame)
    received = BitFrame(_flip(frame.bits, rng.random(n), cfg.p), frame.width)
    if not cfg.eavesdrop_tap:
        return received, None
    tapped = BitFrame(_flip(frame.bits, rng.random(n), cfg.tap_probability), frame.width)
    return received, tapped
