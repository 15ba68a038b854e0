"""Small statistics helpers shared by the Monte Carlo simulators."""

from __future__ import annotations

import math

from scipy.special import erfc


def q_function(x: float) -> float:
    """Gaussian tail probability Q(x) = P(N(0,1) > x)."""
    return 0.5 * erfc(x / math.sqrt(2.0))


def wilson_interval(errors: int, trials: int,
                    z: float = 1.959963984540054) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (default 95%)."""
    if trials <= 0:
        return (0.0, 1.0)
    p = errors / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials ** 2)) / denom
    return (max(0.0, center - half), min(1.0, center + half))
