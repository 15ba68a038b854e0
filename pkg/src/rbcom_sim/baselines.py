"""Transmission-rate-vs-distance models for VLC, FOC and the resonant link.

All three use the same electrical-SNR convention for square-law intensity
detection, SNR = (responsivity * P_received)^2 / sigma^2, so the comparison
is internally consistent. Only the channel models differ: Lambertian LED
gain for VLC, Gaussian-beam aperture capture for FOC, and the splitter
detector branch of the steady-state cavity for the resonant link.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .physics import CavityLink, capture_fraction, link_loss


@dataclass(frozen=True)
class VlcConfig:
    """Indoor LED link parameters (angles in degrees)."""

    half_angle_deg: float = 60.0       # LED half-intensity radiation angle
    irradiation_angle_deg: float = 45.0
    incidence_angle_deg: float = 45.0
    fov_semi_angle_deg: float = 90.0
    pd_area_m2: float = 4e-4
    refractive_index: float = 1.5
    filter_gain: float = 1.0
    responsivity: float = 0.53         # optical-to-electrical conversion
    bandwidth_hz: float = 100e6
    tx_power_w: float = 1.0

    def __post_init__(self):
        for name in ("half_angle_deg", "irradiation_angle_deg",
                     "fov_semi_angle_deg", "pd_area_m2", "refractive_index",
                     "filter_gain", "responsivity", "bandwidth_hz",
                     "tx_power_w"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if self.incidence_angle_deg < 0.0:
            raise ValueError("incidence_angle_deg must be >= 0")


@dataclass(frozen=True)
class FocConfig:
    """Point-to-point laser link parameters."""

    wavelength_m: float = 1064e-9
    divergence_rad: float = 1.2e-3
    rx_aperture_radius_m: float = 3e-3
    responsivity: float = 0.53
    bandwidth_hz: float = 100e6
    tx_power_w: float = 1.0

    def __post_init__(self):
        for name in ("wavelength_m", "divergence_rad", "rx_aperture_radius_m",
                     "responsivity", "bandwidth_hz", "tx_power_w"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class NoiseModel:
    """Flat noise floor given as a PSD in dBm/Hz over a bandwidth."""

    psd_dbm_per_hz: float = -170.0
    bandwidth_hz: float = 100e6

    def __post_init__(self):
        if not self.bandwidth_hz > 0.0:
            raise ValueError("bandwidth_hz must be positive")

    @property
    def psd_w_per_hz(self) -> float:
        return 10.0 ** ((self.psd_dbm_per_hz - 30.0) / 10.0)


def noise_variance(noise: NoiseModel) -> float:
    """Noise power sigma^2 = PSD * bandwidth [W]."""
    return noise.psd_w_per_hz * noise.bandwidth_hz


def _shannon_rate(p_received_w: float, responsivity: float,
                  bandwidth_hz: float, sigma2_w: float) -> float:
    snr = (responsivity * p_received_w) ** 2 / sigma2_w
    return bandwidth_hz * math.log2(1.0 + snr)


def vlc_dc_gain(cfg: VlcConfig, distance_m: float) -> float:
    """Lambertian LOS channel gain of the LED link (dimensionless).

    Zero outside the receiver field of view.
    """
    if distance_m <= 0.0:
        raise ValueError("distance_m must be positive")
    psi = math.radians(cfg.incidence_angle_deg)
    psi_c = math.radians(cfg.fov_semi_angle_deg)
    if psi > psi_c:
        return 0.0
    m = -math.log(2.0) / math.log(math.cos(math.radians(cfg.half_angle_deg)))
    phi = math.radians(cfg.irradiation_angle_deg)
    concentrator = cfg.refractive_index ** 2 / math.sin(psi_c) ** 2
    return ((m + 1.0) * cfg.pd_area_m2 / (2.0 * math.pi * distance_m ** 2)
            * math.cos(phi) ** m * cfg.filter_gain * concentrator
            * math.cos(psi))


def vlc_rate(cfg: VlcConfig, noise: NoiseModel, distance_m: float) -> float:
    """Achievable rate of the LED link [bit/s]."""
    h = vlc_dc_gain(cfg, distance_m)
    return _shannon_rate(cfg.tx_power_w * h, cfg.responsivity,
                         cfg.bandwidth_hz, noise_variance(noise))


def foc_rate(cfg: FocConfig, noise: NoiseModel, distance_m: float) -> float:
    """Achievable rate of the laser link [bit/s]."""
    frac = capture_fraction(distance_m, cfg.rx_aperture_radius_m,
                            cfg.wavelength_m, cfg.divergence_rad)
    return _shannon_rate(cfg.tx_power_w * frac, cfg.responsivity,
                         cfg.bandwidth_hz, noise_variance(noise))


def rbcom_rate(link: CavityLink, noise: NoiseModel, distance_m: float,
               responsivity: float = 0.53) -> float:
    """Achievable rate of the resonant link [bit/s].

    The detector branch taps (1-alpha) of the beam arriving with one-way
    loss delta; circulating power is scaled so the modulated TX-side power
    equals the configured transmission power. Distances where no steady
    state exists report 0.
    """
    trial = CavityLink(distance_m=distance_m,
                       aperture_radius_m=link.aperture_radius_m,
                       divergence_rad=link.divergence_rad,
                       wavelength_m=link.wavelength_m,
                       alpha=link.alpha,
                       medium_tx=link.medium_tx,
                       medium_rx=link.medium_rx,
                       tx_power_w=link.tx_power_w,
                       beam_area_m2=link.beam_area_m2)
    delta = link_loss(trial)
    small_signal = (trial.alpha * delta * delta
                    * trial.medium_tx.g0 * trial.medium_rx.g0)
    if small_signal <= 1.0:
        return 0.0
    p_det = (1.0 - trial.alpha) * delta * trial.tx_power_w
    return _shannon_rate(p_det, responsivity, noise.bandwidth_hz,
                         noise_variance(noise))


def rate_sweep(vlc: VlcConfig, foc: FocConfig, link: CavityLink,
               noise: NoiseModel, distances_m: Sequence[float],
               rbcom_responsivity: float = 0.53
               ) -> list[tuple[float, float, float, float]]:
    """Rows of (distance, vlc_bps, rbcom_bps, foc_bps) over the grid."""
    if len(distances_m) == 0:
        raise ValueError("distance grid must not be empty")
    rows = []
    for d in distances_m:
        rows.append((float(d),
                     vlc_rate(vlc, noise, d),
                     rbcom_rate(link, noise, d, rbcom_responsivity),
                     foc_rate(foc, noise, d)))
    return rows
