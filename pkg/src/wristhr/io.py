"""Recording container and the plain-text interchange format.

A recording is five aligned channels (two PPG, three accelerometer axes) plus
an optional ground-truth BPM sequence, one value per analysis window.

Signal files are CSV with a metadata line first::

    # fs=125
    ppg1,ppg2,ax,ay,az
    0.12,0.13,-0.01,0.02,0.98
    ...

Ground-truth files hold one BPM value per line.  Values written by
``write_recording`` round-trip bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dsp import Signal
from .errors import (
    CellError,
    ColumnError,
    ParameterError,
    SampleRateError,
    TruthAlignmentError,
)

COLUMNS = ("ppg1", "ppg2", "ax", "ay", "az")


@dataclass
class Recording:
    """Aligned five-channel recording with optional per-window ground truth."""

    ppg1: Signal
    ppg2: Signal
    accel_x: Signal
    accel_y: Signal
    accel_z: Signal
    ground_truth_bpm: np.ndarray | None = None
    subject_id: str = ""

    def __post_init__(self):
        chans = self.channels()
        n, fs = len(chans[0]), chans[0].fs
        for name, c in zip(COLUMNS, chans):
            if len(c) != n or c.fs != fs:
                raise ParameterError(f"channel {name} not aligned with ppg1")
        if self.ground_truth_bpm is not None:
            truth = np.asarray(self.ground_truth_bpm, dtype=float)
            object.__setattr__(self, "ground_truth_bpm", truth)

    def channels(self) -> tuple[Signal, Signal, Signal, Signal, Signal]:
        return (self.ppg1, self.ppg2, self.accel_x, self.accel_y, self.accel_z)

    @property
    def fs(self) -> float:
        return self.ppg1.fs

    @property
    def n_samples(self) -> int:
        return len(self.ppg1)


def expected_window_count(
    n_samples: int, fs: float, window_seconds: float = 8.0, shift_seconds: float = 2.0
) -> int:
    """Number of analysis windows a recording of this length yields."""
    win = int(round(window_seconds * fs))
    shift = int(round(shift_seconds * fs))
    if win <= 0 or shift <= 0 or shift > win:
        raise ParameterError("window/shift must be positive with shift <= window")
    if n_samples < win:
        return 0
    return (n_samples - win) // shift + 1


def load_recording(
    signal_path: str | Path,
    truth_path: str | Path | None = None,
    *,
    subject_id: str | None = None,
    window_seconds: float = 8.0,
    shift_seconds: float = 2.0,
) -> Recording:
    """Load a recording (and optional ground truth) from the CSV format.

    Raises a load error carrying the offending line number for: missing
    sampling-rate metadata, missing or unknown header columns, malformed data
    cells, and ground-truth files whose value count does not match the
    recording's window count.
    """
    signal_path = Path(signal_path)
    lines = signal_path.read_text().splitlines()

    fs = None
    header_ln = None
    for ln, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text:
            continue
        if text.startswith("#"):
            body = text.lstrip("#").strip()
            if body.startswith("fs"):
                _, _, value = body.partition("=")
                try:
                    fs = float(value.strip())
                except ValueError:
                    raise SampleRateError(f"unparseable sampling rate {value.strip()!r}", ln)
            continue
        header_ln = ln
        break
    if header_ln is None:
        raise ColumnError(f"{signal_path}: no header row found")
    if fs is None:
        raise SampleRateError(
            f"{signal_path}: missing '# fs=<rate>' metadata line before the header",
            header_ln,
        )

    header = [c.strip() for c in lines[header_ln - 1].split(",")]
    for col in COLUMNS:
        if col not in header:
            raise ColumnError(f"missing column {col!r}", header_ln)
    for col in header:
        if col not in COLUMNS:
            raise ColumnError(f"unknown column {col!r}", header_ln)
    order = [header.index(c) for c in COLUMNS]

    rows = []
    for ln in range(header_ln + 1, len(lines) + 1):
        text = lines[ln - 1].strip()
        if not text or text.startswith("#"):
            continue
        cells = text.split(",")
        if len(cells) != len(header):
            raise CellError(f"expected {len(header)} cells, found {len(cells)}", ln)
        try:
            rows.append([float(cells[i]) for i in order])
        except ValueError:
            bad = next(c for c in cells if not _is_number(c))
            raise CellError(f"non-numeric cell {bad.strip()!r}", ln)
    if not rows:
        raise CellError(f"{signal_path}: no data rows")

    data = np.asarray(rows, dtype=float)
    truth = None
    if truth_path is not None:
        truth = load_truth(truth_path)
        expected = expected_window_count(data.shape[0], fs, window_seconds, shift_seconds)
        if truth.size != expected:
            raise TruthAlignmentError(
                f"{truth_path}: expected {expected} ground-truth values for "
                f"{data.shape[0]} samples at fs={fs:g}, got {truth.size}"
            )

    return Recording(
        ppg1=Signal(data[:, 0], fs),
        ppg2=Signal(data[:, 1], fs),
        accel_x=Signal(data[:, 2], fs),
        accel_y=Signal(data[:, 3], fs),
        accel_z=Signal(data[:, 4], fs),
        ground_truth_bpm=truth,
        subject_id=subject_id if subject_id is not None else signal_path.stem,
    )


def load_truth(truth_path: str | Path) -> np.ndarray:
    """Read a ground-truth file: one BPM value per line."""
    values = []
    for ln, raw in enumerate(Path(truth_path).read_text().splitlines(), start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        try:
            values.append(float(text))
        except ValueError:
            raise CellError(f"non-numeric ground-truth value {text!r}", ln)
    return np.asarray(values, dtype=float)


def write_recording(
    rec: Recording, signal_path: str | Path, truth_path: str | Path | None = None
) -> None:
    """Write a recording (and its ground truth, if present) in the CSV format.

    Values are printed with 17 significant digits so a reload reproduces them
    bit-exactly.
    """
    signal_path = Path(signal_path)
    data = np.column_stack([c.samples for c in rec.channels()])
    with signal_path.open("w") as fh:
        fh.write(f"# fs={rec.fs:.17g}\n")
        fh.write(",".join(COLUMNS) + "\n")
        for row in data:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    if truth_path is not None:
        if rec.ground_truth_bpm is None:
            raise ParameterError("recording has no ground truth to write")
        with Path(truth_path).open("w") as fh:
            for v in rec.ground_truth_bpm:
                fh.write(f"{v:.17g}\n")


def _is_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False
