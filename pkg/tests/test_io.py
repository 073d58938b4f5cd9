import numpy as np
import pytest

from wristhr import (
    CellError,
    ColumnError,
    SampleRateError,
    SynthSpec,
    TruthAlignmentError,
    load_recording,
    synth_recording,
    write_recording,
)
from wristhr.io import expected_window_count, load_truth

GOOD = """\
# fs=125
ppg1,ppg2,ax,ay,az
0.1,0.2,0.3,0.4,0.5
1.1,1.2,1.3,1.4,1.5
-2.0,0.0,0.25,1e-3,3.5
"""


def test_minimal_file_parses(tmp_path):
    path = tmp_path / "rec.csv"
    path.write_text(GOOD)
    rec = load_recording(path)
    assert rec.n_samples == 3
    assert rec.fs == 125.0
    assert rec.subject_id == "rec"
    np.testing.assert_allclose(rec.accel_z.samples, [0.5, 1.5, 3.5])


def test_round_trip_is_bit_exact(tmp_path):
    spec = SynthSpec(duration_s=16, seed=9, noise_std=0.3)
    rec = synth_recording(spec)
    sig = tmp_path / "s.csv"
    truth = tmp_path / "s.bpm"
    write_recording(rec, sig, truth)
    back = load_recording(sig, truth, subject_id=rec.subject_id)
    for a, b in zip(rec.channels(), back.channels()):
        np.testing.assert_array_equal(a.samples, b.samples)
    np.testing.assert_array_equal(rec.ground_truth_bpm, back.ground_truth_bpm)


def test_missing_column_is_named(tmp_path):
    path = tmp_path / "rec.csv"
    path.write_text("# fs=125\nppg1,ppg2,ax,ay\n0.1,0.2,0.3,0.4\n")
    with pytest.raises(ColumnError, match="az"):
        load_recording(path)


def test_unknown_column_is_rejected(tmp_path):
    path = tmp_path / "rec.csv"
    path.write_text("# fs=125\nppg1,ppg2,ax,ay,az,extra\n0,0,0,0,0,0\n")
    with pytest.raises(ColumnError, match="extra"):
        load_recording(path)


def test_non_numeric_cell_reports_line(tmp_path):
    path = tmp_path / "rec.csv"
    path.write_text("# fs=125\nppg1,ppg2,ax,ay,az\n0.1,0.2,0.3,0.4,0.5\n0.1,oops,0.3,0.4,0.5\n")
    with pytest.raises(CellError, match="line 4") as err:
        load_recording(path)
    assert "oops" in str(err.value)


def test_missing_sample_rate(tmp_path):
    path = tmp_path / "rec.csv"
    path.write_text("ppg1,ppg2,ax,ay,az\n0.1,0.2,0.3,0.4,0.5\n")
    with pytest.raises(SampleRateError):
        load_recording(path)


def test_truth_alignment_reports_expected_and_actual(tmp_path):
    spec = SynthSpec(duration_s=16, seed=1)
    rec = synth_recording(spec)
    sig = tmp_path / "s.csv"
    truth = tmp_path / "s.bpm"
    write_recording(rec, sig, truth)
    # Append one bogus extra value: count no longer matches the window formula.
    with truth.open("a") as fh:
        fh.write("77\n")
    expected = expected_window_count(rec.n_samples, rec.fs, 8.0, 2.0)
    with pytest.raises(TruthAlignmentError, match=f"expected {expected}"):
        load_recording(sig, truth)


def test_load_truth_skips_blank_and_comment_lines(tmp_path):
    path = tmp_path / "t.bpm"
    path.write_text("# header\n70\n\n71.5\n")
    np.testing.assert_allclose(load_truth(path), [70.0, 71.5])
