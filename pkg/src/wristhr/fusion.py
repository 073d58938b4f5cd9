"""Conditional combination of the cascade-filtered and SSA-denoised signals.

Both branches are energy-normalized and summed when the SSA branch's spectral
peak agrees with the previous heart-rate estimate; otherwise only the cascade
branch is kept, since a far-off SSA peak means the decomposition failed to
suppress the motion artifact.  The sum is never taken on the first two windows
of a recording, before the tracker has a trustworthy previous estimate.
"""

from __future__ import annotations

import numpy as np

from .dsp import DEFAULT_BAND, Signal, band_bins, bin_to_bpm, periodogram
from .errors import DegenerateInputError, ParameterError


def spectrum_argmax_bpm(
    x: Signal, n_fft: int, band: tuple[float, float] = DEFAULT_BAND
) -> float:
    """BPM of the strongest in-band periodogram peak of a signal."""
    if x.energy() == 0.0:
        raise DegenerateInputError("cannot locate a spectral peak in an all-zero signal")
    spec = periodogram(x, n_fft)
    lo, hi = band_bins(n_fft, x.fs, band)
    k = int(np.argmax(spec.power[lo - 1 : hi])) + lo
    return bin_to_bpm(k, n_fft, x.fs)


def conditional_sum(
    x_r: Signal,
    x_s: Signal,
    b_s: float | None,
    b_prev: float | None,
    epsilon: float,
    window_index: int,
    *,
    signed_condition: bool = False,
) -> tuple[Signal, bool]:
    """Combine the cascade output x_r and the SSA output x_s.

    Returns ``(y, summed)`` where y is either the energy-normalized x_r alone
    or the sum of both normalized branches, and ``summed`` says which.  The
    sum branch is taken when |b_s - b_prev| < epsilon (with
    ``signed_condition=True``, when b_s - b_prev < epsilon, the literal
    one-sided test); it is never taken when window_index <= 2 or when no
    previous estimate exists.  Because both branches are normalized first,
    the result is invariant to rescaling either input.

    If one branch has zero energy the other is returned alone; if both are
    zero the window carries no information and an error is raised.
    """
    if epsilon <= 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    if len(x_r) != len(x_s) or x_r.fs != x_s.fs:
        raise ParameterError("branch signals must be aligned")
    has_r = x_r.energy() > 0.0
    has_s = x_s.energy() > 0.0
    if not has_r and not has_s:
        raise DegenerateInputError("both fusion branches are all-zero")
    if not has_s:
        return _unit(x_r), False
    if not has_r:
        return _unit(x_s), False

    if window_index <= 2 or b_prev is None or b_s is None:
        return _unit(x_r), False
    diff = b_s - b_prev
    agree = diff < epsilon if signed_condition else abs(diff) < epsilon
    if not agree:
        return _unit(x_r), False
    xr = _unit(x_r)
    xs = _unit(x_s)
    return Signal(xr.samples + xs.samples, x_r.fs), True


def _unit(x: Signal) -> Signal:
    return Signal(x.samples / np.sqrt(x.energy()), x.fs)
