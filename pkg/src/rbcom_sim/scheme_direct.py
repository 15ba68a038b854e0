"""Direct-modulation transceiver.

Symbols are modulated onto whatever beam amplitude arrives, so each frame's
amplitude is a function of the previous frame's symbols (a symbol-wise
multiplicative recursion). The receiver removes that echo by estimating the
link-gain constant from the SS and dividing it back out.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import EstimationError, ProtocolError
from .framing import SymbolAlphabet, default_ss_length, detect_ss, frame_length, make_ss
from .physics import CavityLink, steady_state_intensity
from .stats import wilson_interval


class GainMode(enum.Enum):
    """How the medium gains enter the link-gain function.

    CONSTANT freezes both gains at the steady-state operating point;
    SATURABLE re-evaluates them at the intensity each symbol implies, which
    makes the frame-to-frame recursion an infinite-state Markov chain.
    """

    CONSTANT = "constant"
    SATURABLE = "saturable"


@dataclass
class DirectLinkState:
    """Per-end sequential state of the direct scheme.

    The transmitter keeps the amplitudes it actually sent; the receiver keeps
    its Eq.-style reconstruction of them. Either way only the previous frame
    matters.
    """

    gain_mode: GainMode = GainMode.CONSTANT
    frame_index: int = 1
    prev_s: Optional[np.ndarray] = None
    c_hat: Optional[float] = None
    sigma2: float = 0.0
    operating_gains: Optional[tuple[float, float]] = None


@dataclass
class DemodResult:
    x_hat: np.ndarray        # raw demodulated amplitudes (NaN where failed)
    indices: np.ndarray      # sliced level indices (-1 where failed)
    failures: np.ndarray     # per-symbol failure mask


@dataclass
class DirectSimResult:
    n_frames: int
    n_payload_symbols: int
    symbol_errors: int
    ser: float
    ser_ci: tuple[float, float]
    n_bits: int
    bit_errors: int
    ber: float
    ber_ci: tuple[float, float]
    c_hat_trace: np.ndarray
    sync_failures: int
    demod_failures: int
    max_abs_symbol_error: float


@lru_cache(maxsize=64)
def _cached_operating_gains(link: CavityLink) -> tuple[float, float]:
    op = steady_state_intensity(link)
    return (op.gain_tx, op.gain_rx)


def _saturable_gain_product(s, link: CavityLink):
    """G_T*G_R for the round trip a symbol of amplitude s [sqrt(W)] makes.

    The TX medium sees the symbol's own intensity; the RX medium sees it
    after the splitter and one-way propagation, mirroring the steady-state
    round-trip composition.
    """
    s = np.asarray(s, dtype=float)
    delta = link.delta
    med_t, med_r = link.medium_tx, link.medium_rx
    i_tx = s * s / link.beam_area_m2
    g_tx = 1.0 + (med_t.g0 - 1.0) / (1.0 + i_tx / med_t.i_sat)
    i_rx = i_tx * link.alpha * delta * g_tx
    g_rx = 1.0 + (med_r.g0 - 1.0) / (1.0 + i_rx / med_r.i_sat)
    return g_tx * g_rx


def link_gain(s, link: CavityLink, mode: GainMode = GainMode.CONSTANT,
              operating_gains: Optional[tuple[float, float]] = None):
    """Channel power coefficient h(s) = alpha*delta^2*G_T*G_R*s^2.

    Scalar in, scalar out; array in, array out. In CONSTANT mode the gains
    come from the steady-state operating point (or the supplied pair); in
    SATURABLE mode they are re-evaluated at the intensities the symbol
    implies.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s < 0.0):
        raise ValueError("symbol amplitudes must be non-negative")
    delta = link.delta
    base = link.alpha * delta * delta
    if mode is GainMode.CONSTANT:
        g_tx, g_rx = operating_gains or _cached_operating_gains(link)
        h = base * g_tx * g_rx * s * s
    else:
        h = base * _saturable_gain_product(s, link) * s * s
    return h if h.ndim else float(h)


def _estimated_gain(s, link: CavityLink, mode: GainMode, c_hat: float):
    """Receiver-side gain function h_hat(s) built on the estimated constant."""
    s = np.asarray(s, dtype=float)
    if mode is GainMode.CONSTANT:
        return c_hat * s * s
    return c_hat * _saturable_gain_product(s, link) * s * s


def modulate_direct(x_frame, state: DirectLinkState,
                    link: CavityLink) -> np.ndarray:
    """Modulate one frame of symbols onto the arriving beam.

    Frame 1 rides the fresh beam at sqrt(P_t); later frames ride the echo of
    the previous frame, amplitude sqrt(h(s_prev)). Advances the state.
    """
    x = np.asarray(x_frame, dtype=float)
    if state.frame_index == 1:
        s = np.sqrt(link.tx_power_w) * x
    else:
        if state.prev_s is None:
            raise ProtocolError(
                f"frame {state.frame_index} needs the previous frame's symbols")
        if len(state.prev_s) != len(x):
            raise ProtocolError("frame length changed between frames")
        h = link_gain(state.prev_s, link, state.gain_mode,
                      state.operating_gains)
        s = np.sqrt(h) * x
    state.prev_s = s
    state.frame_index += 1
    return s


def receive_direct(s_frame, link: CavityLink, sigma2: float,
                   rng) -> np.ndarray:
    """Detector-branch samples: sqrt((1-alpha)*delta)*s plus AWGN."""
    if sigma2 < 0.0:
        raise ValueError("sigma2 must be >= 0")
    s = np.asarray(s_frame, dtype=float)
    rng = np.random.default_rng(rng)
    scale = np.sqrt((1.0 - link.alpha) * link.delta)
    return scale * s + rng.normal(0.0, np.sqrt(sigma2), size=s.shape)


def estimate_link_gain(y_ss, x_ss, state: DirectLinkState,
                       link: CavityLink) -> float:
    """Least-squares fit of the link-gain constant from the received SS.

    Fits y = beta * a with a[n] = sqrt((1-alpha)*delta) * s_prev[n] * x[n]
    (times the known gain factor in SATURABLE mode) and stores c_hat =
    beta^2. Exact on noiseless input.
    """
    y = np.asarray(y_ss, dtype=float)
    x = np.asarray(x_ss, dtype=float)
    if len(y) != len(x) or len(y) < 4:
        raise ValueError("SS vectors must have equal length >= 4")
    if state.prev_s is None or state.frame_index < 2:
        raise ProtocolError("estimation needs a previous frame")
    prev = np.asarray(state.prev_s, dtype=float)[: len(x)]
    a = np.sqrt((1.0 - link.alpha) * link.delta) * prev * x
    if state.gain_mode is GainMode.SATURABLE:
        a = a * np.sqrt(_saturable_gain_product(prev, link))
    denom = float(a @ a)
    if denom == 0.0:
        raise EstimationError("reference sequence is identically zero")
    beta = float(y @ a) / denom
    state.c_hat = beta * beta
    return state.c_hat


def demodulate_direct(y_frame, state: DirectLinkState, link: CavityLink,
                      alphabet: SymbolAlphabet) -> DemodResult:
    """Invert the echo recursion and slice to the nearest alphabet level.

    Symbols whose estimated gain is non-positive or non-finite are erased
    (NaN amplitude, index -1) and counted, not fatal. Advances the receiver
    state: the rescaled received frame becomes the next frame's s_prev
    estimate.
    """
    y = np.asarray(y_frame, dtype=float)
    scale = np.sqrt((1.0 - link.alpha) * link.delta)
    if state.frame_index == 1:
        denom_sq = np.full(y.shape, scale * scale * link.tx_power_w)
    else:
        if state.prev_s is None:
            raise ProtocolError("demodulation needs the previous frame")
        if state.c_hat is None:
            raise ProtocolError("demodulation needs an estimated link gain")
        h_hat = _estimated_gain(state.prev_s, link, state.gain_mode,
                                state.c_hat)
        denom_sq = scale * scale * h_hat
    valid = np.isfinite(denom_sq) & (denom_sq > 0.0)
    x_hat = np.full(y.shape, np.nan)
    x_hat[valid] = y[valid] / np.sqrt(denom_sq[valid])
    indices = alphabet.slice_indices(x_hat)
    state.prev_s = y / scale
    state.frame_index += 1
    return DemodResult(x_hat=x_hat, indices=indices, failures=~valid)


def simulate_direct_link(link: CavityLink, alphabet: SymbolAlphabet,
                         n_frames: int, sigma2: float, *,
                         gain_mode: GainMode = GainMode.CONSTANT,
                         b_mod_hz: float = 100e6,
                         l_ss: Optional[int] = None,
                         ss_seed: int = 7,
                         sync_threshold: float = 0.9,
                         seed: int = 0) -> DirectSimResult:
    """End-to-end Monte Carlo run of the direct scheme.

    modulate -> receive -> synchronize -> estimate -> demodulate, frame by
    frame. Deterministic for a given seed (per-frame child streams, so the
    outcome does not depend on execution order). SER/BER are counted over
    payload symbols; frames that fail synchronization are counted as fully
    errored.
    """
    n_frame = frame_length(link.distance_m, b_mod_hz)
    if l_ss is None:
        l_ss = default_ss_length(n_frame)
    if not 4 <= l_ss <= n_frame - 1:
        raise ValueError(f"l_ss={l_ss} invalid for frame of {n_frame} symbols")
    n_payload = n_frame - l_ss
    ss = make_ss(l_ss, alphabet, ss_seed)
    levels = alphabet.levels

    tx = DirectLinkState(gain_mode=gain_mode)
    rx = DirectLinkState(gain_mode=gain_mode, sigma2=sigma2)

    bits_ok = (alphabet.order & (alphabet.order - 1)) == 0
    symbol_errors = 0
    bit_errors = 0
    sync_failures = 0
    demod_failures = 0
    max_err = 0.0
    c_trace = np.full(n_frames, np.nan)

    frame_seeds = np.random.SeedSequence(seed).spawn(n_frames)
    for k in range(n_frames):
        sym_rng, noise_rng = [np.random.default_rng(s)
                              for s in frame_seeds[k].spawn(2)]
        payload_idx = sym_rng.integers(0, alphabet.order, size=n_payload)
        x = np.concatenate([ss, levels[payload_idx]])

        s = modulate_direct(x, tx, link)
        y = receive_direct(s, link, sigma2, noise_rng)

        offset = detect_ss(y, ss, sync_threshold)
        if offset != 0:
            sync_failures += 1
            symbol_errors += n_payload
            if bits_ok:
                bit_errors += n_payload * alphabet.bits_per_symbol
            # keep the receiver chain consistent even for the lost frame
            rx.prev_s = y / np.sqrt((1.0 - link.alpha) * link.delta)
            rx.frame_index += 1
            continue

        if rx.frame_index >= 2:
            c_trace[k] = estimate_link_gain(y[:l_ss], ss, rx, link)
        demod = demodulate_direct(y, rx, link, alphabet)
        demod_failures += int(demod.failures.sum())

        got = demod.indices[l_ss:]
        symbol_errors += int(np.sum(got != payload_idx))
        if bits_ok:
            kept = got >= 0
            sent_bits = alphabet.gray_bits(payload_idx[kept])
            got_bits = alphabet.gray_bits(got[kept])
            nbits = int(np.sum(sent_bits != got_bits))
            # erased symbols count as fully errored
            nbits += int(np.sum(~kept)) * alphabet.bits_per_symbol
            bit_errors += nbits
        ok = ~demod.failures[l_ss:]
        if np.any(ok):
            max_err = max(max_err, float(
                np.max(np.abs(demod.x_hat[l_ss:][ok] - x[l_ss:][ok]))))

    n_symbols = n_frames * n_payload
    n_bits = n_symbols * alphabet.bits_per_symbol if bits_ok else 0
    return DirectSimResult(
        n_frames=n_frames,
        n_payload_symbols=n_symbols,
        symbol_errors=symbol_errors,
        ser=symbol_errors / n_symbols,
        ser_ci=wilson_interval(symbol_errors, n_symbols),
        n_bits=n_bits,
        bit_errors=bit_errors,
        ber=bit_errors / n_bits if n_bits else float("nan"),
        ber_ci=wilson_interval(bit_errors, n_bits) if n_bits else (0.0, 1.0),
        c_hat_trace=c_trace,
        sync_failures=sync_failures,
        demod_failures=demod_failures,
        max_abs_symbol_error=max_err,
    )
