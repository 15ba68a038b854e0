"""Adaptive-modulation transceiver.

The pump is driven so the beam intensity at the modulator input stays at its
steady-state value regardless of what the previous frame's echo brought
back. Frames therefore see one fixed channel coefficient (memoryless AWGN),
and the receiver slices by plain energy detection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .framing import SymbolAlphabet, default_ss_length, detect_ss, frame_length, make_ss
from .physics import CavityLink, GainMedium, saturated_gain, steady_state_intensity
from .scheme_direct import DemodResult
from .stats import wilson_interval


@dataclass
class AdaptiveLinkState:
    """Fixed per-link quantities of the adaptive scheme."""

    i_target: float              # steady-state intensity at the EOAM input [W/m^2]
    sigma2: float                # receiver noise variance [W]
    alphabet: SymbolAlphabet

    def __post_init__(self):
        if not self.i_target > 0.0:
            raise ValueError("i_target must be positive")
        if self.sigma2 < 0.0:
            raise ValueError("sigma2 must be >= 0")


class CompensationResult(NamedTuple):
    gain: float
    feasible: bool


def pump_compensation(i_echo: float, i_target: float,
                      medium: GainMedium) -> CompensationResult:
    """Gain command restoring the echo intensity to the steady-state target.

    Required gain is i_target/i_echo; it is achievable only between 1 (the
    medium cannot attenuate) and the saturated ceiling at this input
    intensity. Outside that window the command is clamped and flagged.
    """
    if i_echo <= 0.0:
        raise ValueError("i_echo must be positive (no beam to amplify)")
    g_req = i_target / i_echo
    ceiling = saturated_gain(i_echo, medium.f_center, medium)
    if g_req < 1.0:
        return CompensationResult(gain=1.0, feasible=False)
    if g_req > ceiling:
        return CompensationResult(gain=ceiling, feasible=False)
    return CompensationResult(gain=g_req, feasible=True)


def modulate_adaptive(x_frame, tx_power_w: float) -> np.ndarray:
    """Memoryless modulation: every frame rides the restored beam at sqrt(P_t)."""
    x = np.asarray(x_frame, dtype=float)
    return np.sqrt(tx_power_w) * x


def receive_adaptive(s_frame, link: CavityLink, sigma2: float,
                     rng) -> np.ndarray:
    """Detector-branch samples, same channel law as the direct scheme."""
    if sigma2 < 0.0:
        raise ValueError("sigma2 must be >= 0")
    s = np.asarray(s_frame, dtype=float)
    rng = np.random.default_rng(rng)
    scale = np.sqrt((1.0 - link.alpha) * link.delta)
    return scale * s + rng.normal(0.0, np.sqrt(sigma2), size=s.shape)


def demodulate_adaptive(y_frame, link: CavityLink,
                        alphabet: SymbolAlphabet) -> DemodResult:
    """Energy detection: rescale by the known channel and slice."""
    y = np.asarray(y_frame, dtype=float)
    ref = np.sqrt((1.0 - link.alpha) * link.delta * link.tx_power_w)
    x_hat = y / ref
    return DemodResult(x_hat=x_hat,
                       indices=alphabet.slice_indices(x_hat),
                       failures=np.zeros(y.shape, dtype=bool))


@dataclass
class AdaptiveSimResult:
    n_frames: int
    n_payload_symbols: int
    symbol_errors: int
    ser: float
    ser_ci: tuple[float, float]
    n_bits: int
    bit_errors: int
    ber: float
    ber_ci: tuple[float, float]
    sync_failures: int
    outage_frames: int
    frame_scale_trace: np.ndarray     # received amplitude per unit symbol, per frame
    compensation_gain_trace: np.ndarray


def simulate_adaptive_link(link: CavityLink, alphabet: SymbolAlphabet,
                           n_frames: int, sigma2: float, *,
                           b_mod_hz: float = 100e6,
                           l_ss: Optional[int] = None,
                           ss_seed: int = 7,
                           sync_threshold: float = 0.9,
                           seed: int = 0) -> AdaptiveSimResult:
    """End-to-end Monte Carlo run of the adaptive scheme.

    Echo intensity is taken from the previous frame's mean modulated power,
    referenced to the EOAM input, and pump compensation is applied once per
    frame. An infeasible command transmits at the clamped gain (intensity
    shortfall) and is reported as an outage frame. Deterministic per seed.
    """
    n_frame = frame_length(link.distance_m, b_mod_hz)
    if l_ss is None:
        l_ss = default_ss_length(n_frame)
    if not 4 <= l_ss <= n_frame - 1:
        raise ValueError(f"l_ss={l_ss} invalid for frame of {n_frame} symbols")
    n_payload = n_frame - l_ss
    ss = make_ss(l_ss, alphabet, ss_seed)
    levels = alphabet.levels

    op = steady_state_intensity(link)   # raises BelowThreshold if infeasible
    state = AdaptiveLinkState(i_target=link.tx_power_w / link.beam_area_m2,
                              sigma2=sigma2, alphabet=alphabet)
    echo_coeff = (link.alpha * link.delta ** 2 * op.gain_rx
                  / link.beam_area_m2)

    bits_ok = (alphabet.order & (alphabet.order - 1)) == 0
    symbol_errors = 0
    bit_errors = 0
    sync_failures = 0
    outage_frames = 0
    scale_trace = np.empty(n_frames)
    gain_trace = np.empty(n_frames)
    chan = np.sqrt((1.0 - link.alpha) * link.delta)

    prev_mean_power = link.tx_power_w
    frame_seeds = np.random.SeedSequence(seed).spawn(n_frames)
    for k in range(n_frames):
        sym_rng, noise_rng = [np.random.default_rng(s)
                              for s in frame_seeds[k].spawn(2)]
        payload_idx = sym_rng.integers(0, alphabet.order, size=n_payload)
        x = np.concatenate([ss, levels[payload_idx]])

        comp = pump_compensation(echo_coeff * prev_mean_power,
                                 state.i_target, link.medium_tx)
        gain_trace[k] = comp.gain
        required = state.i_target / (echo_coeff * prev_mean_power)
        shortfall = comp.gain / required
        if not comp.feasible:
            outage_frames += 1

        s = modulate_adaptive(x, link.tx_power_w * shortfall)
        scale_trace[k] = chan * np.sqrt(link.tx_power_w * shortfall)
        prev_mean_power = float(np.mean(s * s))
        y = receive_adaptive(s, link, sigma2, noise_rng)

        offset = detect_ss(y, ss, sync_threshold)
        if offset != 0:
            sync_failures += 1
            symbol_errors += n_payload
            if bits_ok:
                bit_errors += n_payload * alphabet.bits_per_symbol
            continue

        demod = demodulate_adaptive(y, link, alphabet)
        got = demod.indices[l_ss:]
        symbol_errors += int(np.sum(got != payload_idx))
        if bits_ok:
            bit_errors += int(np.sum(alphabet.gray_bits(payload_idx)
                                     != alphabet.gray_bits(got)))

    n_symbols = n_frames * n_payload
    n_bits = n_symbols * alphabet.bits_per_symbol if bits_ok else 0
    return AdaptiveSimResult(
        n_frames=n_frames,
        n_payload_symbols=n_symbols,
        symbol_errors=symbol_errors,
        ser=symbol_errors / n_symbols,
        ser_ci=wilson_interval(symbol_errors, n_symbols),
        n_bits=n_bits,
        bit_errors=bit_errors,
        ber=bit_errors / n_bits if n_bits else float("nan"),
        ber_ci=wilson_interval(bit_errors, n_bits) if n_bits else (0.0, 1.0),
        sync_failures=sync_failures,
        outage_frames=outage_frames,
        frame_scale_trace=scale_trace,
        compensation_gain_trace=gain_trace,
    )
