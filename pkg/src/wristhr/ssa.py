"""Singular spectrum analysis of a PPG window and motion-component rejection.

The window is embedded into an L x K Hankel trajectory matrix (K = N - L + 1),
decomposed by SVD, and each rank-1 term is projected back to a time series by
anti-diagonal (Hankel) averaging.  Elementary series whose dominant spectral
peaks sit close together are merged into groups; groups whose dominant
frequencies coincide with accelerometer spectral peaks are treated as motion
components and dropped, except when they sit near the previous heart-rate
estimate, which protects the heartbeat harmonics from accidental removal.

The SVD is computed from the L x L Gram matrix of the trajectory matrix (the
smaller of the two Gram forms when L < N/2), which is mathematically identical
to a direct SVD.  Summing all elementary series reconstructs the input to
machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft

from .dsp import Signal, Spectrum, dominant_peaks, periodogram
from .errors import ParameterError

DEFAULT_WINDOW = 400  # embedding dimension L for 1000-sample frames
DEFAULT_MASS = 0.99  # fraction of squared singular value mass retained
DEFAULT_PEAK_RATIO = 0.5


@dataclass(frozen=True, eq=False)
class SsaDecomposition:
    """Full SSA decomposition of one window.

    ``components[i]`` is the i-th elementary reconstructed series (length N),
    ordered by descending singular value.  The component series sum to the
    original signal.
    """

    L: int
    K: int
    singular_values: np.ndarray
    components: np.ndarray  # shape (d, N)
    fs: float

    @property
    def d(self) -> int:
        return self.components.shape[0]


@dataclass(frozen=True, eq=False)
class ComponentGroup:
    """A merged set of elementary components with similar dominant frequencies."""

    series: Signal
    member_indices: tuple[int, ...]
    dominant_bpm: tuple[float, ...]


def decompose(x: Signal, window: int = DEFAULT_WINDOW) -> SsaDecomposition:
    """Decompose a signal into elementary SSA components.

    ``window`` is the embedding dimension L and must satisfy 2 <= L < N/2.
    Returns all L elementary series; their sum equals the input to within
    machine precision.
    """
    n = len(x)
    if not 2 <= window < n / 2:
        raise ParameterError(f"embedding window {window} outside 2 <= L < N/2 for N={n}")
    K = n - window + 1
    # Hankel trajectory matrix, row i = x[i : i + K]; contiguous so BLAS kicks in.
    traj = np.ascontiguousarray(np.lib.stride_tricks.sliding_window_view(x.samples, K))
    gram = traj @ traj.T
    evals, vecs = np.linalg.eigh(gram)
    sv = np.sqrt(np.clip(evals[::-1], 0.0, None))
    # Descending order; contiguous rows, or BLAS and the FFT fall off their fast paths.
    basis = np.ascontiguousarray(vecs[:, ::-1].T)

    # Rank-1 term i is u_i (u_i^T X); its anti-diagonal sums are the full
    # convolution of u_i with u_i^T X, done for all i at once via FFT.
    proj = basis @ traj
    nf = scipy.fft.next_fast_len(n)
    spec_u = scipy.fft.rfft(basis, nf, axis=1)
    spec_p = scipy.fft.rfft(proj, nf, axis=1)
    comps = scipy.fft.irfft(spec_u * spec_p, nf, axis=1)[:, :n]
    t = np.arange(n)
    counts = np.minimum.reduce([t + 1, np.full(n, window), np.full(n, K), n - t])
    comps /= counts
    return SsaDecomposition(window, K, sv, comps, x.fs)


def group_components(
    dec: SsaDecomposition,
    bpm_tolerance: float | None = None,
    *,
    n_fft: int = 4096,
    peak_ratio: float = DEFAULT_PEAK_RATIO,
    mass: float = DEFAULT_MASS,
) -> list[ComponentGroup]:
    """Merge elementary components by dominant-frequency proximity.

    Components carrying the top ``mass`` fraction of squared singular value
    are kept; two of them end up in the same group when any of their dominant
    periodogram peaks lie within ``bpm_tolerance`` of each other (transitively).
    The default tolerance is two spectral bins.  Groups are returned in order
    of their lowest member index; each group's dominant peaks are recomputed
    on the summed series.
    """
    sq = dec.singular_values**2
    total = sq.sum()
    if total > 0:
        retained = int(np.searchsorted(np.cumsum(sq), mass * total) + 1)
        retained = min(retained, dec.d)
    else:
        retained = 1
    if bpm_tolerance is None:
        bpm_tolerance = 2 * 60.0 * dec.fs / n_fft

    peak_bpms = []
    for i in range(retained):
        spec = periodogram(Signal(dec.components[i], dec.fs), n_fft)
        peak_bpms.append(np.array([p.bpm for p in dominant_peaks(spec, peak_ratio)]))

    parent = list(range(retained))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(retained):
        if peak_bpms[i].size == 0:
            continue
        for j in range(i + 1, retained):
            if peak_bpms[j].size == 0:
                continue
            gap = np.abs(peak_bpms[i][:, None] - peak_bpms[j][None, :]).min()
            if gap <= bpm_tolerance:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    members: dict[int, list[int]] = {}
    for i in range(retained):
        members.setdefault(find(i), []).append(i)

    groups = []
    for root in sorted(members):
        idx = members[root]
        series = Signal(dec.components[idx].sum(axis=0), dec.fs)
        spec = periodogram(series, n_fft)
        bpms = tuple(p.bpm for p in dominant_peaks(spec, peak_ratio))
        groups.append(ComponentGroup(series, tuple(idx), bpms))
    return groups


def reject_motion_components(
    groups: list[ComponentGroup],
    accel_spectra: tuple[Spectrum, Spectrum, Spectrum],
    prev_bpm: float | None = None,
    guard_bpm: float = 10.0,
    *,
    peak_ratio: float = DEFAULT_PEAK_RATIO,
) -> Signal:
    """Drop groups whose dominant frequencies match accelerometer peaks.

    A group is discarded when any of its dominant BPMs falls within one
    spectral bin of any dominant accelerometer peak, unless it also has a
    dominant BPM within +-guard_bpm of the previous heart-rate estimate (the
    protection clause wins).  Returns the sum of the surviving group series.
    If every group would be discarded, all of them are kept instead, so the
    output never collapses to zero.
    """
    if not groups:
        raise ParameterError("no component groups to filter")
    accel_peaks = [p.bpm for s in accel_spectra for p in dominant_peaks(s, peak_ratio)]
    bin_bpm = max(s.bin_bpm for s in accel_spectra)

    retained = []
    for g in groups:
        matched = any(abs(b - a) <= bin_bpm for b in g.dominant_bpm for a in accel_peaks)
        protected = prev_bpm is not None and any(
            abs(b - prev_bpm) <= guard_bpm for b in g.dominant_bpm
        )
        if matched and not protected:
            continue
        retained.append(g)
    if not retained:
        retained = list(groups)

    fs = groups[0].series.fs
    total = np.zeros(len(groups[0].series))
    for g in retained:
        total += g.series.samples
    return Signal(total, fs)
