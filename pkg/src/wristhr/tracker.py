"""Per-window heart-rate tracking over the fused spectrum.

Heart rate moves gradually, so instead of taking the global spectral maximum
every window, the tracker searches only a +-delta_s bin neighbourhood around
the previous estimate, smooths the picked value with a three-point weighted
moving average, and clamps the per-window change to a small rise/fall budget.
The first two windows are initialized from the band-restricted global maximum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dsp import DEFAULT_BAND, Spectrum, band_bins, bin_to_bpm, bpm_to_bin
from .errors import DegenerateInputError, ParameterError


@dataclass(frozen=True)
class TrackerParams:
    """Tracking knobs: search half-width in bins, smoothing weights, change clamps."""

    delta_s: int = 10
    alpha: float = 0.90
    beta: float = 0.05
    gamma: float = 0.05
    lambda_inc: float = 5.0
    lambda_dec: float = 3.0

    def __post_init__(self):
        if self.delta_s < 1:
            raise ParameterError("delta_s must be >= 1")
        if abs(self.alpha + self.beta + self.gamma - 1.0) > 1e-12:
            raise ParameterError("smoothing weights must sum to 1")
        if self.lambda_inc <= 0 or self.lambda_dec <= 0:
            raise ParameterError("clamp magnitudes must be positive")


@dataclass
class TrackerState:
    """Sequential tracker memory: last two estimates and the last peak bin."""

    b_prev1: float
    b_prev2: float
    n0: int  # 1-based spectral bin of the previous estimate
    window_index: int = 1


def initial_estimate(
    s: Spectrum, band: tuple[float, float] = DEFAULT_BAND
) -> tuple[float, int]:
    """Band-restricted global maximum, used for the first two windows.

    Returns (bpm, 1-based bin).  Ties resolve to the lowest in-band bin.
    """
    if not s.power.any():
        raise DegenerateInputError("cannot initialize tracking from an all-zero spectrum")
    lo, hi = band_bins(s.n_fft, s.fs, band)
    k = int(np.argmax(s.power[lo - 1 : hi])) + lo
    return bin_to_bpm(k, s.n_fft, s.fs), k


def init_tracker(s: Spectrum, band: tuple[float, float] = DEFAULT_BAND) -> tuple[float, TrackerState]:
    """Build tracker state from the first window's spectrum."""
    bpm, k = initial_estimate(s, band)
    return bpm, TrackerState(b_prev1=bpm, b_prev2=bpm, n0=k, window_index=1)


def select_peak(
    s: Spectrum,
    state: TrackerState,
    delta_s: int,
    band: tuple[float, float] = DEFAULT_BAND,
) -> tuple[int, float]:
    """Highest peak within +-delta_s bins of the previous peak bin.

    The search region is clipped to the in-band bins.  Ties resolve to the
    bin nearest the previous one, then to the lower bin; if the whole region
    is zero the previous bin is held.
    """
    lo, hi = band_bins(s.n_fft, s.fs, band)
    lo = max(lo, state.n0 - delta_s)
    hi = min(hi, state.n0 + delta_s)
    if lo > hi:
        return state.n0, bin_to_bpm(state.n0, s.n_fft, s.fs)
    window = s.power[lo - 1 : hi]
    best = window.max()
    if best <= 0:
        return state.n0, bin_to_bpm(state.n0, s.n_fft, s.fs)
    candidates = np.flatnonzero(window == best) + lo
    n_cur = int(min(candidates, key=lambda k: (abs(k - state.n0), k)))
    return n_cur, bin_to_bpm(n_cur, s.n_fft, s.fs)


def smooth(b_est: float, state: TrackerState, p: TrackerParams) -> float:
    """Three-point weighted moving average over the current and two previous estimates."""
    return p.alpha * b_est + p.beta * state.b_prev1 + p.gamma * state.b_prev2


def clamp(b_prime: float, state: TrackerState, p: TrackerParams) -> float:
    """Limit the change from the previous estimate to +lambda_inc / -lambda_dec."""
    diff = b_prime - state.b_prev1
    if diff >= p.lambda_inc:
        return state.b_prev1 + p.lambda_inc
    if diff <= -p.lambda_dec:
        return state.b_prev1 - p.lambda_dec
    return b_prime


def track_window(
    s: Spectrum,
    state: TrackerState,
    p: TrackerParams,
    band: tuple[float, float] = DEFAULT_BAND,
) -> tuple[float, TrackerState]:
    """One tracking step: neighbourhood peak pick, smoothing, change clamp.

    Updates the state in place (estimate history, previous peak bin, window
    counter) and returns the final estimate for this window.
    """
    _, b_hat = select_peak(s, state, p.delta_s, band)
    b_prime = smooth(b_hat, state, p)
    b_est = clamp(b_prime, state, p)
    state.b_prev2 = state.b_prev1
    state.b_prev1 = b_est
    state.n0 = bpm_to_bin(b_est, s.n_fft, s.fs)
    state.window_index += 1
    return b_est, state
