"""Frame structure and synchronization.

Intensity-modulation symbol alphabet, SS+IS frame construction, preamble
detection by normalized cross-correlation, and multiple-access frame-length
planning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import FrameTooShort
from .physics import round_trip_time


@dataclass(frozen=True)
class SymbolAlphabet:
    """Finite intensity-modulation alphabet.

    order: number of levels M >= 2
    depth: modulation depth in (0, 1); levels span [1-depth, 1]
    """

    order: int
    depth: float

    def __post_init__(self):
        if self.order < 2:
            raise ValueError(f"alphabet order must be >= 2, got {self.order}")
        if not 0.0 < self.depth < 1.0:
            raise ValueError(f"depth must lie in (0, 1), got {self.depth}")

    @property
    def levels(self) -> np.ndarray:
        """Amplitude levels, strictly increasing, max exactly 1."""
        m = self.order
        i = np.arange(m)
        return 1.0 - self.depth * (m - 1 - i) / (m - 1)

    @property
    def spacing(self) -> float:
        return self.depth / (self.order - 1)

    @property
    def bits_per_symbol(self) -> int:
        n = int(math.log2(self.order))
        if 2 ** n != self.order:
            raise ValueError("bit mapping requires a power-of-two order")
        return n

    def slice_indices(self, values: np.ndarray) -> np.ndarray:
        """Nearest-level index for each value; ties resolve to the lower level.

        Non-finite inputs map to index -1 (erasure).
        """
        values = np.asarray(values, dtype=float)
        finite = np.isfinite(values)
        dist = np.abs(values[finite, None] - self.levels[None, :])
        idx = np.full(values.shape, -1, dtype=int)
        idx[finite] = np.argmin(dist, axis=1)
        return idx

    def gray_bits(self, indices: np.ndarray) -> np.ndarray:
        """Gray-coded bit rows for level indices (adjacent levels differ by 1 bit)."""
        n = self.bits_per_symbol
        gray = np.asarray(indices) ^ (np.asarray(indices) >> 1)
        shifts = np.arange(n - 1, -1, -1)
        return (gray[:, None] >> shifts[None, :]) & 1


@dataclass(frozen=True)
class Frame:
    """One reflection round worth of symbols: SS prefix plus IS payload."""

    ss: np.ndarray
    payload: np.ndarray

    def __post_init__(self):
        if len(self.ss) < 1:
            raise ValueError("frame needs at least one SS symbol")
        if len(self.payload) < 1:
            raise ValueError("frame needs at least one payload symbol")

    @property
    def n_symbols(self) -> int:
        return len(self.ss) + len(self.payload)

    @property
    def symbols(self) -> np.ndarray:
        return np.concatenate([self.ss, self.payload])


def frame_length(distance_m: float, b_mod_hz: float) -> int:
    """Symbols that fit in one reflection round at modulation bandwidth b_mod."""
    if distance_m <= 0.0:
        raise ValueError(f"distance_m must be positive, got {distance_m}")
    if b_mod_hz <= 0.0:
        raise ValueError(f"b_mod_hz must be positive, got {b_mod_hz}")
    n = int(math.floor(round_trip_time(distance_m) * b_mod_hz))
    if n < 2:
        raise FrameTooShort(
            f"round trip at {distance_m} m holds {n} symbols at "
            f"{b_mod_hz:.3g} Hz; need at least 2")
    return n


def default_ss_length(n_frame: int) -> int:
    """Default SS length: 16 symbols, shrunk to leave at least one IS symbol."""
    return min(16, n_frame - 1)


def build_alphabet(order: int, depth: float) -> SymbolAlphabet:
    """Uniformly spaced alphabet with max level 1 and min level 1-depth."""
    return SymbolAlphabet(order=order, depth=depth)


def make_ss(l_ss: int, alphabet: SymbolAlphabet, seed: int) -> np.ndarray:
    """Deterministic pseudo-random binary SS over the two extreme levels.

    Identical (l_ss, seed) always yields the identical sequence; both levels
    are guaranteed present so the sequence correlates.
    """
    if l_ss < 4:
        raise ValueError(f"l_ss must be >= 4, got {l_ss}")
    lo = alphabet.levels[0]
    hi = alphabet.levels[-1]
    offset = 0
    while True:
        rng = np.random.default_rng(np.random.SeedSequence([seed, offset]))
        bits = rng.integers(0, 2, size=l_ss)
        if bits.min() != bits.max():
            break
        offset += 1
    return np.where(bits == 1, hi, lo)


def detect_ss(signal: Sequence[float], ss: Sequence[float],
              threshold: float) -> Optional[int]:
    """First offset whose window matches the SS, or None.

    Match statistic: zero-mean, unit-scale cross-correlation of the window
    against the SS (insensitive to the constant intensity offset and overall
    scale). First offset reaching the threshold wins.
    """
    signal = np.asarray(signal, dtype=float)
    ss = np.asarray(ss, dtype=float)
    if len(signal) < len(ss):
        raise ValueError(
            f"signal ({len(signal)}) shorter than SS ({len(ss)})")
    template = ss - ss.mean()
    t_norm = np.linalg.norm(template)
    if t_norm == 0.0:
        raise ValueError("SS has zero variance; cannot correlate")

    windows = np.lib.stride_tricks.sliding_window_view(signal, len(ss))
    centered = windows - windows.mean(axis=1, keepdims=True)
    w_norm = np.linalg.norm(centered, axis=1)
    corr = centered @ template
    with np.errstate(invalid="ignore", divide="ignore"):
        ncc = np.where(w_norm > 0.0, corr / (w_norm * t_norm), 0.0)

    hits = np.flatnonzero(ncc >= threshold)
    return int(hits[0]) if hits.size else None


def plan_multiaccess_frames(distances_m: Sequence[float],
                            b_mod_hz: float) -> tuple[list[int], int]:
    """Per-user frame lengths and the AP frame length (their LCM)."""
    if len(distances_m) == 0:
        raise ValueError("need at least one user distance")
    per_user = [frame_length(d, b_mod_hz) for d in distances_m]
    return per_user, math.lcm(*per_user)
