"""Per-recording orchestration: windowing, both denoising branches, fusion, tracking.

Each 8-second window (2-second shift by default) is band-limited, the two PPG
channels are averaged, and then, depending on the mode, the cascade branch
and/or the SSA branch run:

    C1  SSA output straight to the tracker
    C2  RLS cascade output straight to the tracker
    C3  LMS cascade + SSA, conditional fusion, tracker
    C4  RLS cascade + SSA, conditional fusion, tracker (the full method)

The tracker is strictly sequential within a recording; separate recordings are
independent and can be processed in parallel.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Iterator

import numpy as np

from . import ssa
from .adaptive import CascadeConfig, cascade_filter, cascade_states
from .dsp import DEFAULT_BAND, Signal, Spectrum, average_channels, bandpass, periodogram
from .errors import ParameterError, TruthAlignmentError
from .fusion import conditional_sum, spectrum_argmax_bpm
from .io import Recording, expected_window_count
from .tracker import TrackerParams, TrackerState, init_tracker, initial_estimate, track_window

MODES = ("C1", "C2", "C3", "C4")


@dataclass(frozen=True)
class PipelineConfig:
    """All pipeline knobs with their standard defaults."""

    mode: str = "C4"
    window_seconds: float = 8.0
    shift_seconds: float = 2.0
    band: tuple[float, float] = DEFAULT_BAND
    n_fft: int = 4096
    epsilon: float = 15.0  # BPM agreement threshold for the fusion sum branch
    ssa_window: int = 400
    ssa_mass: float = 0.99
    ssa_group_tol_bins: float = 2.0
    ssa_guard_bpm: float = 10.0  # protection neighbourhood around the previous estimate
    signed_fusion: bool = False  # use the one-sided fusion test instead of |diff|
    cascade: CascadeConfig = field(default_factory=CascadeConfig)
    tracker: TrackerParams = field(default_factory=TrackerParams)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 0 < self.shift_seconds <= self.window_seconds:
            raise ParameterError("shift must be positive and at most the window length")
        if self.epsilon <= 0:
            raise ParameterError("epsilon must be positive")


@dataclass(frozen=True)
class TraceRow:
    """One window's outcome: estimate, truth if known, fusion branch, wall time."""

    window_index: int  # 1-based
    b_est: float
    b_true: float | None
    branch: str  # "init", "rls", "ssa", or "sum"
    ms: float


@dataclass
class EstimateTrace:
    """Per-window results for one recording."""

    subject_id: str
    mode: str
    rows: list[TraceRow]

    @property
    def estimates(self) -> np.ndarray:
        return np.array([r.b_est for r in self.rows])

    @property
    def truths(self) -> np.ndarray | None:
        if any(r.b_true is None for r in self.rows):
            return None
        return np.array([r.b_true for r in self.rows])

    @property
    def median_ms(self) -> float:
        return float(np.median([r.ms for r in self.rows]))


@dataclass(frozen=True)
class WindowView:
    """One window's five channel slices."""

    index: int  # 1-based
    ppg1: Signal
    ppg2: Signal
    accel_x: Signal
    accel_y: Signal
    accel_z: Signal


def window_iter(
    rec: Recording, window_seconds: float = 8.0, shift_seconds: float = 2.0
) -> Iterator[WindowView]:
    """Yield consecutive windows starting at multiples of the shift.

    The final partial window is dropped.  A window equal to the recording
    length yields exactly one window.
    """
    win = int(round(window_seconds * rec.fs))
    if abs(window_seconds * rec.fs - win) > 1e-9:
        raise ParameterError(
            f"window of {window_seconds}s is not a whole number of samples at fs={rec.fs}"
        )
    shift = int(round(shift_seconds * rec.fs))
    if win <= 0 or shift <= 0 or shift > win:
        raise ParameterError("window/shift must be positive with shift <= window")
    chans = rec.channels()
    for k, start in enumerate(range(0, rec.n_samples - win + 1, shift)):
        sl = [Signal(c.samples[start : start + win], rec.fs) for c in chans]
        yield WindowView(k + 1, *sl)


def run_recording(rec: Recording, cfg: PipelineConfig | None = None) -> EstimateTrace:
    """Estimate heart rate for every window of a recording.

    No windows are skipped: the first two are initialized from the
    band-restricted spectral maximum and every later window goes through the
    tracker.  Output is deterministic for identical inputs (timings aside).
    """
    cfg = cfg or PipelineConfig()
    n_windows = expected_window_count(rec.n_samples, rec.fs, cfg.window_seconds, cfg.shift_seconds)
    if n_windows < 1:
        raise ParameterError(
            f"recording of {rec.n_samples} samples is shorter than one "
            f"{cfg.window_seconds}s window"
        )
    truth = rec.ground_truth_bpm
    if truth is not None and truth.size != n_windows:
        raise TruthAlignmentError(
            f"recording yields {n_windows} windows but ground truth has {truth.size} values"
        )

    cascade_cfg = replace(cfg.cascade, algo="lms" if cfg.mode == "C3" else "rls")
    group_tol = cfg.ssa_group_tol_bins * 60.0 * rec.fs / cfg.n_fft
    f_lo, f_hi = cfg.band
    use_cascade = cfg.mode in ("C2", "C3", "C4")
    use_ssa = cfg.mode in ("C1", "C3", "C4")
    # RLS re-converges within a fraction of a window, so its stages restart
    # fresh each window; LMS needs the overlapping-window history to converge
    # and to keep its adaptation gain off the heart tone.
    lms_states = cascade_states(cascade_cfg) if cascade_cfg.algo == "lms" else None

    rows: list[TraceRow] = []
    state: TrackerState | None = None
    prev_bpm: float | None = None

    for w in window_iter(rec, cfg.window_seconds, cfg.shift_seconds):
        t0 = time.perf_counter()
        ppg1 = bandpass(w.ppg1, f_lo, f_hi)
        ppg2 = bandpass(w.ppg2, f_lo, f_hi)
        ax = bandpass(w.accel_x, f_lo, f_hi)
        ay = bandpass(w.accel_y, f_lo, f_hi)
        az = bandpass(w.accel_z, f_lo, f_hi)
        ppg = average_channels(ppg1, ppg2)

        x_r = cascade_filter(ppg, ax, ay, az, cascade_cfg, lms_states) if use_cascade else None
        x_s = None
        if use_ssa:
            accel_spectra = tuple(periodogram(c, cfg.n_fft) for c in (ax, ay, az))
            dec = ssa.decompose(ppg, cfg.ssa_window)
            groups = ssa.group_components(
                dec, group_tol, n_fft=cfg.n_fft, mass=cfg.ssa_mass
            )
            x_s = ssa.reject_motion_components(
                groups, accel_spectra, prev_bpm, cfg.ssa_guard_bpm
            )

        if cfg.mode == "C1":
            fused, branch = x_s, "ssa"
        elif cfg.mode == "C2":
            fused, branch = x_r, "rls"
        else:
            b_s = (
                spectrum_argmax_bpm(x_s, cfg.n_fft, cfg.band)
                if x_s.energy() > 0
                else None
            )
            fused, summed = conditional_sum(
                x_r,
                x_s,
                b_s,
                prev_bpm,
                cfg.epsilon,
                w.index,
                signed_condition=cfg.signed_fusion,
            )
            branch = "sum" if summed else "rls"

        spec = periodogram(fused, cfg.n_fft)
        if w.index == 1:
            b_est, state = init_tracker(spec, cfg.band)
        elif w.index == 2:
            b_est, k = initial_estimate(spec, cfg.band)
            state.b_prev2 = state.b_prev1
            state.b_prev1 = b_est
            state.n0 = k
            state.window_index = 2
        else:
            b_est, state = track_window(spec, state, cfg.tracker, cfg.band)
        prev_bpm = b_est

        ms = (time.perf_counter() - t0) * 1e3
        b_true = float(truth[w.index - 1]) if truth is not None else None
        rows.append(TraceRow(w.index, b_est, b_true, branch, ms))

    return EstimateTrace(rec.subject_id, cfg.mode, rows)
