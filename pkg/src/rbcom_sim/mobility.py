"""Receiver mobility: accumulated Doppler and link lifetime.

The receiver moves on a straight line at constant speed in the plane spanned
by the initial cavity axis and its velocity. Each reflection round advances
time by 2d/c, shifts the beam frequency by the moving-retroreflector Doppler
factor (1 - 2*v_r/c), and the link breaks once the small-signal round-trip
gain at the shifted frequency and new distance drops below unity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .errors import BelowThreshold
from .physics import C_LIGHT, CavityLink, round_trip_time, saturated_gain


@dataclass(frozen=True)
class MobilityState:
    """Receiver kinematics and the accumulated beam frequency.

    position: receiver coordinates relative to the transmitter [m]; the
        initial cavity axis is +x.
    speed_mps: receiver speed [m/s]
    direction_rad: angle between the velocity and the initial axis, [0, pi]
    f_beam_hz: current beam frequency [Hz]
    round_index: completed reflection rounds
    """

    position: tuple[float, float]
    speed_mps: float
    direction_rad: float
    f_beam_hz: float
    round_index: int = 0

    def __post_init__(self):
        if self.speed_mps < 0.0:
            raise ValueError("speed_mps must be >= 0")
        if not 0.0 <= self.direction_rad <= math.pi:
            raise ValueError("direction_rad must lie in [0, pi]")
        if not self.f_beam_hz > 0.0:
            raise ValueError("f_beam_hz must be positive")
        if self.round_index < 0:
            raise ValueError("round_index must be >= 0")
        if self.distance_m <= 0.0:
            raise ValueError("receiver must be away from the transmitter")

    @property
    def distance_m(self) -> float:
        # plain sqrt keeps doppler_step and the inlined lifetime loop on
        # bit-identical trajectories
        px, py = self.position
        return math.sqrt(px * px + py * py)

    @property
    def velocity(self) -> tuple[float, float]:
        return (self.speed_mps * math.cos(self.direction_rad),
                self.speed_mps * math.sin(self.direction_rad))


def initial_state(distance_m: float, speed_mps: float, direction_rad: float,
                  f_beam_hz: float) -> MobilityState:
    """Receiver on the axis at the given distance, about to start moving."""
    return MobilityState(position=(distance_m, 0.0), speed_mps=speed_mps,
                         direction_rad=direction_rad, f_beam_hz=f_beam_hz)


def doppler_step(state: MobilityState) -> MobilityState:
    """Advance one reflection round.

    Moves the receiver for the current round-trip time, then applies the
    Doppler factor (1 - 2*v_r/c) with v_r the radial speed at the new
    position (positive receding).
    """
    if state.speed_mps == 0.0:
        return replace(state, round_index=state.round_index + 1)
    dt = round_trip_time(state.distance_m)
    vx, vy = state.velocity
    px = state.position[0] + vx * dt
    py = state.position[1] + vy * dt
    d = math.sqrt(px * px + py * py)
    v_r = (px * vx + py * vy) / d
    return replace(state,
                   position=(px, py),
                   f_beam_hz=state.f_beam_hz * (1.0 - 2.0 * v_r / C_LIGHT),
                   round_index=state.round_index + 1)


def frequency_compensation(state: MobilityState, deviation_threshold_hz: float,
                           center_hz: float) -> tuple[MobilityState, bool]:
    """Reset the beam to the line center once it has drifted too far.

    Models regenerating the resonant beam at the initial frequency; returns
    the (possibly unchanged) state and whether a reset occurred.
    """
    if deviation_threshold_hz <= 0.0:
        raise ValueError("deviation_threshold_hz must be positive")
    if abs(state.f_beam_hz - center_hz) > deviation_threshold_hz:
        return replace(state, f_beam_hz=center_hz), True
    return state, False


def small_signal_round_trip(link: CavityLink, distance_m: float,
                            f_beam_hz: float) -> float:
    """Unsaturated round-trip gain at the given distance and beam frequency."""
    w0 = link.wavelength_m / (math.pi * link.divergence_rad)
    w_sq = w0 * w0 + (link.divergence_rad * distance_m) ** 2
    delta = 1.0 - math.exp(-2.0 * link.aperture_radius_m ** 2 / w_sq)
    g_tx = saturated_gain(0.0, f_beam_hz, link.medium_tx)
    g_rx = saturated_gain(0.0, f_beam_hz, link.medium_rx)
    return link.alpha * delta * delta * g_tx * g_rx


def rounds_until_break(initial: MobilityState, link: CavityLink,
                       max_rounds: int,
                       compensation_threshold_hz: Optional[float] = None
                       ) -> Optional[int]:
    """First reflection round at which the link cannot sustain itself.

    Iterates the doppler_step update (inlined for speed), optionally applying
    frequency compensation after each round, and declares a break as soon as
    the small-signal round-trip gain falls below unity. Returns None if the
    link survives max_rounds. A stationary receiver never accumulates
    Doppler, so it returns None outright.
    """
    d = initial.distance_m
    f = initial.f_beam_hz
    if small_signal_round_trip(link, d, f) <= 1.0:
        raise BelowThreshold(
            f"no steady state at d={d} m, f={f:.6g} Hz")
    if initial.speed_mps == 0.0:
        return None

    vx, vy = initial.velocity
    px, py = initial.position
    alpha = link.alpha
    w0 = link.wavelength_m / (math.pi * link.divergence_rad)
    w0_sq = w0 * w0
    div = link.divergence_rad
    two_r_sq = 2.0 * link.aperture_radius_m ** 2
    med_t, med_r = link.medium_tx, link.medium_rx
    g0t_m1 = med_t.g0 - 1.0
    g0r_m1 = med_r.g0 - 1.0
    hw_t = med_t.fwhm / 2.0
    hw_r = med_r.fwhm / 2.0
    f0_t = med_t.f_center
    f0_r = med_r.f_center
    comp = compensation_threshold_hz

    for r in range(1, max_rounds + 1):
        dt = 2.0 * d / C_LIGHT
        px += vx * dt
        py += vy * dt
        d = math.sqrt(px * px + py * py)
        v_r = (px * vx + py * vy) / d
        f *= 1.0 - 2.0 * v_r / C_LIGHT
        if comp is not None and abs(f - f0_t) > comp:
            f = f0_t
        det_t = (f - f0_t) / hw_t
        det_r = (f - f0_r) / hw_r
        w_sq = w0_sq + (div * d) ** 2
        delta = 1.0 - math.exp(-two_r_sq / w_sq)
        gain = (alpha * delta * delta
                * (1.0 + g0t_m1 / (1.0 + det_t * det_t))
                * (1.0 + g0r_m1 / (1.0 + det_r * det_r)))
        if gain < 1.0:
            return r
    return None


def mobility_sweep(speeds_mps: Sequence[float], angles_deg: Sequence[float],
                   link: CavityLink, *, max_rounds: int = 1_000_000,
                   f_initial_hz: Optional[float] = None,
                   compensation_threshold_hz: Optional[float] = None
                   ) -> list[tuple[float, float, Optional[int]]]:
    """rounds_until_break over a (speed, angle) grid.

    The initial distance is the link's configured distance; the beam starts
    on the TX medium's line center unless f_initial_hz is given. Rows come
    back as (speed, angle_deg, rounds-or-None) in grid order.
    """
    f0 = f_initial_hz if f_initial_hz is not None else link.medium_tx.f_center
    rows = []
    for v in speeds_mps:
        for ang in angles_deg:
            state = initial_state(link.distance_m, v, math.radians(ang), f0)
            rounds = rounds_until_break(
                state, link, max_rounds,
                compensation_threshold_hz=compensation_threshold_hz)
            rows.append((float(v), float(ang), rounds))
    return rows
