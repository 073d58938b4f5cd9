"""Synthetic recordings with exact ground truth, for tests and demos.

The heart component is a phase-continuous sinusoid following a piecewise
linear BPM trajectory.  Motion artifacts are sinusoidal carriers that appear
on chosen accelerometer axes and leak into both PPG channels through short FIR
couplings, which is exactly the structure the adaptive cascade can cancel.
White noise is added independently per channel.  Ground truth is the mean of
the BPM trajectory over each analysis window.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .dsp import Signal
from .errors import ParameterError
from .io import Recording

BPM_RANGE = (24.0, 210.0)


@dataclass(frozen=True)
class ToneSpec:
    """One artifact tone: carrier frequency/amplitude, carrying axes, PPG coupling."""

    freq_hz: float
    amplitude: float
    axes: tuple[str, ...] = ("x",)
    fir: tuple[float, ...] = (1.0,)

    def __post_init__(self):
        if self.freq_hz <= 0:
            raise ParameterError("tone frequency must be positive")
        if not self.axes or any(a not in ("x", "y", "z") for a in self.axes):
            raise ParameterError(f"axes must be a nonempty subset of x/y/z, got {self.axes}")
        if len(self.fir) == 0:
            raise ParameterError("FIR coupling must have at least one tap")


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for a synthetic recording.

    ``heart_bpm`` is a sequence of (time_s, bpm) knots interpolated linearly;
    times outside the knot range hold the nearest knot value.
    """

    duration_s: float = 60.0
    fs: float = 125.0
    heart_bpm: tuple[tuple[float, float], ...] = ((0.0, 70.0), (60.0, 150.0))
    heart_amplitude: float = 1.0
    tones: tuple[ToneSpec, ...] = ()
    noise_std: float = 0.0
    seed: int = 0
    subject_id: str = "synth"
    window_seconds: float = 8.0
    shift_seconds: float = 2.0

    def __post_init__(self):
        if self.duration_s <= 0 or self.fs <= 0:
            raise ParameterError("duration and fs must be positive")
        if len(self.heart_bpm) < 1:
            raise ParameterError("heart trajectory needs at least one knot")
        for _, bpm in self.heart_bpm:
            if not BPM_RANGE[0] <= bpm <= BPM_RANGE[1]:
                raise ParameterError(f"trajectory BPM {bpm} outside {BPM_RANGE}")
        if self.noise_std < 0:
            raise ParameterError("noise_std must be nonnegative")


def synth_recording(spec: SynthSpec) -> Recording:
    """Generate a recording per the spec; identical seeds give identical output."""
    rng = np.random.default_rng(spec.seed)
    n = int(round(spec.duration_s * spec.fs))
    t = np.arange(n) / spec.fs

    knots = np.array(spec.heart_bpm, dtype=float)
    bpm_t = np.interp(t, knots[:, 0], knots[:, 1])
    phase = 2 * np.pi * np.cumsum(bpm_t / 60.0) / spec.fs
    heart = spec.heart_amplitude * np.sin(phase)

    accel = {a: np.zeros(n) for a in ("x", "y", "z")}
    ppg_artifact = np.zeros(n)
    for tone in spec.tones:
        carrier = tone.amplitude * np.sin(2 * np.pi * tone.freq_hz * t + rng.uniform(0, 2 * np.pi))
        for a in tone.axes:
            accel[a] += carrier
        ppg_artifact += lfilter(np.asarray(tone.fir, dtype=float), [1.0], carrier)

    def noisy(base: np.ndarray) -> np.ndarray:
        if spec.noise_std == 0.0:
            return base.copy()
        return base + spec.noise_std * rng.standard_normal(n)

    ppg1 = noisy(heart + ppg_artifact)
    ppg2 = noisy(heart + ppg_artifact)

    truth = window_truth(bpm_t, spec.fs, spec.window_seconds, spec.shift_seconds)
    return Recording(
        ppg1=Signal(ppg1, spec.fs),
        ppg2=Signal(ppg2, spec.fs),
        accel_x=Signal(noisy(accel["x"]), spec.fs),
        accel_y=Signal(noisy(accel["y"]), spec.fs),
        accel_z=Signal(noisy(accel["z"]), spec.fs),
        ground_truth_bpm=truth,
        subject_id=spec.subject_id,
    )


def window_truth(
    bpm_t: np.ndarray, fs: float, window_seconds: float, shift_seconds: float
) -> np.ndarray:
    """Mean trajectory BPM in each analysis window (same windowing as the pipeline)."""
    win = int(round(window_seconds * fs))
    shift = int(round(shift_seconds * fs))
    n = bpm_t.size
    if n < win:
        raise ParameterError("recording shorter than one window")
    starts = range(0, n - win + 1, shift)
    return np.array([bpm_t[s : s + win].mean() for s in starts])
