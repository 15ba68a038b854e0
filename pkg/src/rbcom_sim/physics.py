"""Resonant-cavity physics.

Gain profile, saturable amplification, diffraction link loss, steady-state
operating point, round-trip timing and beam-break energy. All quantities in
SI units (Hz, W, m, s); every function here is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import BelowThreshold

# Speed of light, exact SI value [m/s]
C_LIGHT = 299_792_458.0

# Residual tolerance for the steady-state round-trip balance
_BALANCE_TOL = 1e-12
_BISECT_MAX_ITER = 200


@dataclass(frozen=True)
class GainMedium:
    """Pumped gain medium with a Lorentzian line.

    g0: small-signal round-pass power gain (dimensionless, > 1)
    i_sat: saturation intensity [W/m^2]
    f_center: line center frequency [Hz]
    fwhm: gain bandwidth, full width at half maximum [Hz]
    """

    g0: float
    i_sat: float
    f_center: float
    fwhm: float

    def __post_init__(self):
        if not self.g0 > 1.0:
            raise ValueError(f"g0 must exceed 1, got {self.g0}")
        if not self.i_sat > 0.0:
            raise ValueError(f"i_sat must be positive, got {self.i_sat}")
        if not self.f_center > 0.0:
            raise ValueError(f"f_center must be positive, got {self.f_center}")
        if not self.fwhm > 0.0:
            raise ValueError(f"fwhm must be positive, got {self.fwhm}")


@dataclass(frozen=True)
class CavityLink:
    """Geometry and optics of one transmitter/receiver cavity.

    distance_m: retroreflector separation [m]
    aperture_radius_m: receiving aperture radius [m]
    divergence_rad: beam full divergence half-angle [rad]
    wavelength_m: beam wavelength [m]
    alpha: splitter transmission coefficient, 0 < alpha < 1
    medium_tx / medium_rx: gain media at the two ends
    tx_power_w: transmission power at the modulator output [W]
    beam_area_m2: cross-section used to convert symbol power to intensity
        [m^2]; defaults to the aperture disc area.
    """

    distance_m: float
    aperture_radius_m: float
    divergence_rad: float
    wavelength_m: float
    alpha: float
    medium_tx: GainMedium
    medium_rx: GainMedium
    tx_power_w: float = 1.0
    beam_area_m2: float = field(default=0.0)

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.distance_m < 0.0:
            raise ValueError(f"distance_m must be >= 0, got {self.distance_m}")
        for name in ("aperture_radius_m", "divergence_rad", "wavelength_m",
                     "tx_power_w"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if self.beam_area_m2 == 0.0:
            object.__setattr__(self, "beam_area_m2",
                               math.pi * self.aperture_radius_m ** 2)
        if not self.beam_area_m2 > 0.0:
            raise ValueError("beam_area_m2 must be positive")

    @property
    def delta(self) -> float:
        """Link loss delta in (0, 1]."""
        return link_loss(self)


@dataclass(frozen=True)
class OperatingPoint:
    """Steady-state solution of the round-trip balance."""

    intensity: float   # beam intensity at the TX medium input [W/m^2]
    gain_tx: float
    gain_rx: float
    residual: float    # |round-trip product - 1| at the solution


def lorentzian_profile(f: float, medium: GainMedium) -> float:
    """Normalized Lorentzian line shape, 1.0 at line center, 0.5 at +-fwhm/2."""
    detune = (f - medium.f_center) / (medium.fwhm / 2.0)
    return 1.0 / (1.0 + detune * detune)


def saturated_gain(i_in: float, f: float, medium: GainMedium) -> float:
    """Power gain of the medium for input intensity i_in [W/m^2] at frequency f.

    Homogeneous-broadening saturation: G = 1 + (g0-1)*L(f)/(1 + i_in/i_sat).
    Strictly decreasing in i_in, approaching 1 as i_in grows.
    """
    if i_in < 0.0:
        raise ValueError(f"i_in must be >= 0, got {i_in}")
    line = lorentzian_profile(f, medium)
    return 1.0 + (medium.g0 - 1.0) * line / (1.0 + i_in / medium.i_sat)


def capture_fraction(distance_m: float, aperture_radius_m: float,
                     wavelength_m: float, divergence_rad: float) -> float:
    """Fraction of a diverging Gaussian beam captured by a circular aperture.

    Waist w0 = wavelength / (pi * divergence); beam radius grows as
    w(d)^2 = w0^2 + (divergence*d)^2; captured fraction 1 - exp(-2 r^2 / w(d)^2).
    """
    w0 = wavelength_m / (math.pi * divergence_rad)
    w_sq = w0 * w0 + (divergence_rad * distance_m) ** 2
    return 1.0 - math.exp(-2.0 * aperture_radius_m ** 2 / w_sq)


def link_loss(link: CavityLink) -> float:
    """One-way power transfer delta in (0, 1], non-increasing in distance."""
    return capture_fraction(link.distance_m, link.aperture_radius_m,
                            link.wavelength_m, link.divergence_rad)


def round_trip_product(intensity: float, link: CavityLink,
                       shared_intensity: bool = False) -> float:
    """Round-trip power gain for a beam entering the TX medium at `intensity`.

    TX medium input I -> amplified by G_T(I) -> splitter (alpha) -> one-way
    loss delta -> RX medium input -> amplified by G_R -> reflected -> loss
    delta back. With shared_intensity=True both media are evaluated at I
    (symmetric simplification).
    """
    delta = link.delta
    f = link.medium_tx.f_center
    g_tx = saturated_gain(intensity, f, link.medium_tx)
    if shared_intensity:
        i_rx = intensity
    else:
        i_rx = intensity * link.alpha * delta * g_tx
    g_rx = saturated_gain(i_rx, link.medium_rx.f_center, link.medium_rx)
    return link.alpha * delta * delta * g_tx * g_rx


def steady_state_intensity(link: CavityLink,
                           shared_intensity: bool = False) -> OperatingPoint:
    """Solve the round-trip balance for the steady-state operating point.

    Bisects on intensity (the round-trip product is strictly decreasing in
    intensity under the saturation model, so the root is unique). Raises
    BelowThreshold when even the unsaturated cavity cannot reach unity gain.
    """
    small_signal = round_trip_product(0.0, link, shared_intensity)
    if small_signal <= 1.0:
        raise BelowThreshold(
            f"small-signal round-trip gain {small_signal:.6g} <= 1 "
            f"(alpha={link.alpha}, delta={link.delta:.6g})")

    hi = max(link.medium_tx.i_sat * (link.medium_tx.g0 - 1.0),
             link.medium_rx.i_sat * (link.medium_rx.g0 - 1.0)) * 1e3
    while round_trip_product(hi, link, shared_intensity) > 1.0:
        hi *= 10.0
    lo = 0.0

    mid = hi
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        prod = round_trip_product(mid, link, shared_intensity)
        if abs(prod - 1.0) <= _BALANCE_TOL:
            break
        if prod > 1.0:
            lo = mid
        else:
            hi = mid

    f = link.medium_tx.f_center
    g_tx = saturated_gain(mid, f, link.medium_tx)
    i_rx = mid if shared_intensity else mid * link.alpha * link.delta * g_tx
    g_rx = saturated_gain(i_rx, link.medium_rx.f_center, link.medium_rx)
    residual = abs(round_trip_product(mid, link, shared_intensity) - 1.0)
    return OperatingPoint(intensity=mid, gain_tx=g_tx, gain_rx=g_rx,
                          residual=residual)


def round_trip_time(distance_m: float) -> float:
    """Duration of one reflection round: 2d/c [s]."""
    if distance_m < 0.0:
        raise ValueError(f"distance_m must be >= 0, got {distance_m}")
    return 2.0 * distance_m / C_LIGHT


def beam_break_energy(power_w: float, distance_m: float) -> float:
    """Energy released when an obstacle breaks the resonance [J].

    The circulating power drains within one reflection round, so the worst
    case is power * 2d/c.
    """
    if power_w < 0.0:
        raise ValueError(f"power_w must be >= 0, got {power_w}")
    return power_w * round_trip_time(distance_m)
