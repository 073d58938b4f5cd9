"""Core spectral utilities shared by the whole pipeline.

Everything downstream (adaptive cancellation, SSA, fusion, tracking) works on
two value types defined here: ``Signal`` (a uniformly sampled real series) and
``Spectrum`` (a one-sided periodogram).  Spectral bins are 1-based throughout
the package: bin 1 is DC, bin k maps to (k-1)/n_fft * fs Hz.  This keeps the
bin <-> BPM arithmetic identical to the usual periodogram peak-reading
convention and avoids off-by-one drift between modules.

All functions are pure; nothing here touches the filesystem or global state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, NumericError, ParameterError

# Heart-rate band used by default everywhere: 0.4 Hz (24 BPM) to 3.5 Hz (210 BPM).
DEFAULT_BAND = (0.4, 3.5)


@dataclass(frozen=True, eq=False)
class Signal:
    """A finite, uniformly sampled real-valued series.

    Attributes:
        samples: 1-D float array, nonempty, all finite.
        fs: sampling rate in Hz, > 0.
    """

    samples: np.ndarray
    fs: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", samples)
        if not np.isscalar(self.fs) and not isinstance(self.fs, (int, float)):
            raise ParameterError("fs must be a number")
        if self.fs <= 0:
            raise ParameterError(f"fs must be positive, got {self.fs}")
        if samples.ndim != 1:
            raise ParameterError(f"samples must be 1-D, got shape {samples.shape}")
        if samples.size == 0:
            raise ParameterError("samples must be nonempty")
        if not np.isfinite(samples).all():
            raise NumericError("samples contain non-finite values")

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        """Length of the signal in seconds."""
        return self.samples.size / self.fs

    def energy(self) -> float:
        """Sum of squared samples."""
        return float(np.dot(self.samples, self.samples))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """One-sided power spectrum of a real signal.

    ``power[k-1]`` is the squared DFT magnitude at 1-based bin k, for
    k = 1 .. n_fft/2 + 1.
    """

    power: np.ndarray
    n_fft: int
    fs: float

    def __post_init__(self):
        power = np.asarray(self.power, dtype=float)
        object.__setattr__(self, "power", power)
        if self.n_fft < 2:
            raise ParameterError("n_fft must be >= 2")
        if power.ndim != 1 or power.size != self.n_fft // 2 + 1:
            raise ParameterError(
                f"power length {power.size} inconsistent with n_fft={self.n_fft}"
            )
        if not np.isfinite(power).all():
            raise NumericError("power contains non-finite values")
        if (power < 0).any():
            raise ParameterError("power values must be nonnegative")

    @property
    def n_bins(self) -> int:
        return self.power.size

    @property
    def bin_bpm(self) -> float:
        """BPM width of one spectral bin."""
        return 60.0 * self.fs / self.n_fft

    def power_at(self, bin_index: int) -> float:
        """Power at a 1-based bin."""
        return float(self.power[bin_index - 1])


@dataclass(frozen=True)
class Peak:
    """A local spectral maximum: 1-based bin, its BPM, and its power."""

    bin: int
    bpm: float
    power: float


def bin_to_bpm(bin_index: int, n_fft: int, fs: float) -> float:
    """Map a 1-based spectral bin to beats per minute.

    Bin 1 is DC (0 BPM); bin k corresponds to (k-1)/n_fft * 60 * fs BPM.
    """
    if not 1 <= bin_index <= n_fft // 2 + 1:
        raise ParameterError(f"bin {bin_index} outside 1..{n_fft // 2 + 1}")
    return (bin_index - 1) / n_fft * 60.0 * fs


def bpm_to_bin(bpm: float, n_fft: int, fs: float) -> int:
    """Nearest 1-based spectral bin for a BPM value (inverse of bin_to_bpm)."""
    k = int(round(bpm / (60.0 * fs) * n_fft)) + 1
    return min(max(k, 1), n_fft // 2 + 1)


def band_bins(n_fft: int, fs: float, band: tuple[float, float] = DEFAULT_BAND) -> tuple[int, int]:
    """1-based inclusive bin range covering a frequency band, edges snapped to nearest bin."""
    f_lo, f_hi = band
    if not 0 <= f_lo < f_hi <= fs / 2:
        raise ParameterError(f"invalid band {band} for fs={fs}")
    lo = int(round(f_lo * n_fft / fs)) + 1
    hi = int(round(f_hi * n_fft / fs)) + 1
    return max(lo, 1), min(hi, n_fft // 2 + 1)


def bandpass(x: Signal, f_lo: float, f_hi: float) -> Signal:
    """Band-limit a signal by zeroing DFT coefficients outside [f_lo, f_hi].

    The signal is transformed at its own length, bins outside the band are set
    to zero (negative frequencies implicitly mirrored via the real FFT), and
    the result is transformed back.  Band edges snap to the nearest bin.  The
    output has the same length as the input, and the operation is a projection:
    applying it twice gives the same result as applying it once.
    """
    if not 0 <= f_lo < f_hi <= x.fs / 2:
        raise ParameterError(f"invalid band edges [{f_lo}, {f_hi}] for fs={x.fs}")
    n = len(x)
    coef = np.fft.rfft(x.samples)
    k_lo = int(round(f_lo * n / x.fs))
    k_hi = int(round(f_hi * n / x.fs))
    keep = np.zeros(coef.size, dtype=bool)
    keep[k_lo : k_hi + 1] = True
    coef[~keep] = 0.0
    return Signal(np.fft.irfft(coef, n), x.fs)


def average_channels(a: Signal, b: Signal) -> Signal:
    """Elementwise mean of two equal-length signals at the same rate."""
    if len(a) != len(b):
        raise ParameterError(f"length mismatch: {len(a)} vs {len(b)}")
    if a.fs != b.fs:
        raise ParameterError(f"sampling rate mismatch: {a.fs} vs {b.fs}")
    return Signal((a.samples + b.samples) / 2.0, a.fs)


def periodogram(x: Signal, n_fft: int) -> Spectrum:
    """Zero-padded periodogram of a mean-removed frame.

    power[k] = |DFT(x - mean(x), n_fft)|^2 at bin k.  A rectangular window is
    used; n_fft must be a power of two and at least the signal length.
    """
    n = len(x)
    if n_fft < n:
        raise ParameterError(f"n_fft={n_fft} smaller than signal length {n}")
    if n_fft & (n_fft - 1) != 0:
        raise ParameterError(f"n_fft={n_fft} is not a power of two")
    frame = x.samples - x.samples.mean()
    coef = np.fft.rfft(frame, n_fft)
    return Spectrum(np.abs(coef) ** 2, n_fft, x.fs)


def dominant_peaks(s: Spectrum, ratio: float = 0.5) -> list[Peak]:
    """Local spectral maxima whose power exceeds ``ratio`` times the global maximum.

    Returns peaks sorted by descending power (ties by ascending bin).  A peak
    must be a strict local maximum; a flat plateau that stands above both of
    its neighbours counts once, at its lowest bin.  Spectrum endpoints are
    never peaks.
    """
    if not 0 < ratio <= 1:
        raise ParameterError(f"ratio must be in (0, 1], got {ratio}")
    p = s.power
    if p.size < 3:
        raise ParameterError("spectrum too short to contain interior peaks")
    gmax = p.max()
    if gmax <= 0:
        return []
    thr = ratio * gmax
    if np.any(p[1:] == p[:-1]):
        # Plateau-aware scan: run-length encode, keep runs above both neighbours.
        change = np.flatnonzero(p[1:] != p[:-1]) + 1
        starts = np.concatenate(([0], change))
        ends = np.concatenate((change, [p.size]))
        hits = [
            int(s0)
            for s0, e0 in zip(starts, ends)
            if s0 > 0 and e0 < p.size and p[s0] > p[s0 - 1] and p[s0] > p[e0] and p[s0] > thr
        ]
    else:
        interior = (p[1:-1] > p[:-2]) & (p[1:-1] > p[2:]) & (p[1:-1] > thr)
        hits = list(np.flatnonzero(interior) + 1)
    hits.sort(key=lambda k: (-p[k], k))
    return [Peak(int(k) + 1, float(bin_to_bpm(int(k) + 1, s.n_fft, s.fs)), float(p[k])) for k in hits]


def normalize_energy(x: Signal) -> Signal:
    """Scale a signal to unit energy (sum of squared samples = 1)."""
    e = x.energy()
    if e == 0.0:
        raise DegenerateInputError("cannot energy-normalize an all-zero signal")
    return Signal(x.samples / np.sqrt(e), x.fs)
