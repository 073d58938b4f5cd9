import numpy as np
import pytest
from scipy.signal import lfilter

from wristhr import (
    CascadeConfig,
    NumericError,
    ParameterError,
    Signal,
    cascade_filter,
    filter_window,
    lms_init,
    lms_step,
    periodogram,
    rls_init,
    rls_step,
)
from conftest import delay_matrix, rms, sinusoid


# -------------------------------------------------------------------- init

def test_rls_init_standard_parameters():
    state = rls_init(55, 0.999, 10.0)
    assert np.array_equal(state.w, np.zeros(55))
    assert np.array_equal(state.P, 10.0 * np.eye(55))
    assert state.lam == 0.999


def test_rls_init_scalar_filter():
    state = rls_init(1, 1.0, 10.0)
    assert state.w.shape == (1,)
    assert state.P.shape == (1, 1)
    assert state.P[0, 0] == 10.0


@pytest.mark.parametrize("m,lam,p_init", [(0, 0.999, 10.0), (8, 0.0, 10.0), (8, 1.5, 10.0), (8, 0.999, 0.0)])
def test_rls_init_rejects_bad_parameters(m, lam, p_init):
    with pytest.raises(ParameterError):
        rls_init(m, lam, p_init)


# -------------------------------------------------------------------- steps

def test_rls_step_scalar_hand_recursion():
    # One step with M=1, lam=1, P=10, w=0, d=1, u=1:
    # pi = 10, k = 10/11, e = 1, w -> 10/11, P -> 10/11.
    state = rls_init(1, 1.0, 10.0)
    e, state = rls_step(state, 1.0, np.array([1.0]))
    assert e == pytest.approx(1.0, abs=1e-12)
    assert state.w[0] == pytest.approx(10.0 / 11.0, abs=1e-12)
    assert state.P[0, 0] == pytest.approx(10.0 / 11.0, abs=1e-12)


def test_rls_step_zero_regressor_passes_input_through():
    state = rls_init(4, 0.9, 10.0)
    state.w = np.array([1.0, -2.0, 0.5, 0.0])
    p_before = state.P.copy()
    w_before = state.w.copy()
    e, state = rls_step(state, 3.25, np.zeros(4))
    assert e == 3.25
    assert np.array_equal(state.w, w_before)
    np.testing.assert_allclose(state.P, p_before / 0.9, rtol=1e-12)


def test_rls_step_zero_apriori_error_leaves_weights():
    state = rls_init(3, 0.999, 10.0)
    state.w = np.array([0.5, -1.0, 2.0])
    u = np.array([1.0, 2.0, 3.0])
    e, state = rls_step(state, float(state.w @ u), u)
    assert e == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(state.w, [0.5, -1.0, 2.0], atol=1e-12)


def test_rls_step_rejects_bad_inputs():
    state = rls_init(3)
    with pytest.raises(ParameterError):
        rls_step(state, 1.0, np.zeros(4))
    with pytest.raises(NumericError):
        rls_step(state, np.nan, np.zeros(3))
    with pytest.raises(NumericError):
        rls_step(state, 1.0, np.array([1.0, np.inf, 0.0]))


def test_rls_p_stays_symmetric():
    rng = np.random.default_rng(0)
    state = rls_init(8, 0.99, 10.0)
    for _ in range(500):
        _, state = rls_step(state, rng.standard_normal(), rng.standard_normal(8))
        asym = np.linalg.norm(state.P - state.P.T) / np.linalg.norm(state.P)
        assert asym <= 1e-8


def test_rls_equals_regularized_normal_equations():
    # With lam=1 the recursion solves (I/p_init + U^T U) w = U^T d exactly.
    rng = np.random.default_rng(5)
    m, n, p_init = 5, 100, 10.0
    regs = rng.standard_normal((n, m))
    d = rng.standard_normal(n)
    state = rls_init(m, 1.0, p_init)
    for i in range(n):
        _, state = rls_step(state, d[i], regs[i])
    expected = np.linalg.solve(np.eye(m) / p_init + regs.T @ regs, regs.T @ d)
    np.testing.assert_allclose(state.w, expected, rtol=1e-8)


@pytest.mark.parametrize("seed", range(3))
def test_rls_matches_batch_least_squares(seed):
    # Weak prior so the P(0) bias stays far below the 1e-4 gate.
    rng = np.random.default_rng(seed)
    m, n = 8, 400
    regs = rng.standard_normal((n, m))
    w_true = rng.standard_normal(m)
    d = regs @ w_true + 0.1 * rng.standard_normal(n)
    state = rls_init(m, 1.0, 1e4)
    for i in range(n):
        _, state = rls_step(state, d[i], regs[i])
    batch = np.linalg.solve(regs.T @ regs, regs.T @ d)
    assert np.linalg.norm(state.w - batch) / np.linalg.norm(batch) < 1e-4


def test_lms_step_single_update():
    state = lms_init(1, 0.5)
    e, state = lms_step(state, 1.0, np.array([1.0]))
    assert e == 1.0
    assert state.w[0] == 0.5


def test_lms_step_zero_regressor():
    state = lms_init(3, 0.1)
    state.w = np.array([1.0, 2.0, 3.0])
    e, state = lms_step(state, 4.0, np.zeros(3))
    assert e == 4.0
    assert np.array_equal(state.w, [1.0, 2.0, 3.0])


def test_lms_stationary_solution_is_fixed_point():
    rng = np.random.default_rng(1)
    state = lms_init(4, 0.05)
    state.w = rng.standard_normal(4)
    w0 = state.w.copy()
    for _ in range(50):
        u = rng.standard_normal(4)
        e, state = lms_step(state, float(w0 @ u), u)
        assert e == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(state.w, w0, atol=1e-12)


# ------------------------------------------------------------ filter_window

@pytest.mark.parametrize("seed", [3, 4, 5])
def test_window_uncorrelated_reference_preserves_signal(seed):
    rng = np.random.default_rng(seed)
    d = sinusoid(1.5, n=1000)
    u = Signal(rng.standard_normal(1000), 125.0)
    out = filter_window(d, u, CascadeConfig())
    # Wiener solution for an uncorrelated reference is ~0: output keeps d's power.
    assert abs(rms(out.samples[200:]) - rms(d.samples[200:])) <= 0.10 * rms(d.samples[200:])


def test_window_cancels_fir_coupled_reference():
    rng = np.random.default_rng(3)
    u = rng.standard_normal(1000)
    h = np.array([0.7, -0.3, 0.2, 0.1])
    d = lfilter(h, [1.0], u)
    # Oracle: batch least squares on the delay-line regressors cancels exactly.
    regs = delay_matrix(u, 16)
    resid = d - regs @ np.linalg.lstsq(regs, d, rcond=None)[0]
    assert rms(resid) < 1e-8 * rms(d)
    out = filter_window(Signal(d, 125.0), Signal(u, 125.0), CascadeConfig(m=16))
    half = len(d) // 2
    assert rms(out.samples[half:]) < 1e-3 * rms(d)


@pytest.mark.parametrize("seed", range(3))
def test_window_recovers_clean_component(seed):
    # Narrowband reference, as an arm-swing accelerometer actually looks: a
    # broadband one would soak up sqrt(M/N) of the clean tone in-window.
    rng = np.random.default_rng(seed)
    n, fs = 1000, 125.0
    t = np.arange(n) / fs
    clean = sinusoid(1.5, n=n)
    u = np.sin(2 * np.pi * 2.3 * t + 0.7) + 0.02 * rng.standard_normal(n)
    artifact = lfilter([0.8, 0.4, -0.2], [1.0], u)
    d = Signal(clean.samples + artifact, fs)
    out = filter_window(d, Signal(u, fs), CascadeConfig(m=16))
    resid = out.samples[750:] - clean.samples[750:]
    assert rms(resid) < 0.05 * rms(clean.samples[750:])


def test_window_zero_reference_is_identity():
    d = sinusoid(1.2, n=500)
    u = Signal(np.zeros(500), 125.0)
    out = filter_window(d, u, CascadeConfig())
    assert np.array_equal(out.samples, d.samples)


def test_window_rejects_mismatched_inputs():
    with pytest.raises(ParameterError):
        filter_window(sinusoid(1.0, n=500), sinusoid(1.0, n=400), CascadeConfig())
    with pytest.raises(ParameterError):
        filter_window(sinusoid(1.0, n=30), sinusoid(1.0, n=30), CascadeConfig(m=55))


def test_lms_window_reduces_coupled_artifact():
    rng = np.random.default_rng(5)
    u = rng.standard_normal(1000)
    d = lfilter([0.7, -0.3], [1.0], u)
    out = filter_window(Signal(d, 125.0), Signal(u, 125.0), CascadeConfig(algo="lms", m=16))
    half = len(d) // 2
    assert rms(out.samples[half:]) < 0.3 * rms(d[half:])


@pytest.mark.parametrize("seed", range(3))
def test_lms_error_energy_decreases_over_epochs(seed):
    # Keep filter state across repeated passes over the same data: the
    # residual artifact energy must come down epoch after epoch.
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(1000)
    u /= np.sqrt(np.mean(u**2))
    d = lfilter([0.6, 0.3, -0.2], [1.0], u)
    regs = delay_matrix(u, 8)
    state = lms_init(8, 0.01)
    energies = []
    for _ in range(3):
        total = 0.0
        for i in range(len(d)):
            e, state = lms_step(state, d[i], regs[i])
            total += e * e
        energies.append(total)
    assert energies[0] > energies[1] > energies[2]


# ------------------------------------------------------------ cascade_filter

def _artifact_recording(rng, firs, freqs=(0.9, 2.4, 3.1)):
    """PPG = 1.7 Hz tone + three FIR-coupled narrowband artifacts."""
    n, fs = 1000, 125.0
    t = np.arange(n) / fs
    clean = sinusoid(1.7, n=n)
    refs = [
        np.sin(2 * np.pi * f * t + rng.uniform(0, 2 * np.pi)) + 0.02 * rng.standard_normal(n)
        for f in freqs
    ]
    ppg = clean.samples.copy()
    for h, ref in zip(firs, refs):
        ppg += lfilter(h, [1.0], ref)
    sigs = [Signal(r, fs) for r in refs]
    return clean, Signal(ppg, fs), sigs


def test_cascade_zero_accel_is_identity():
    ppg = sinusoid(1.7, n=1000)
    zero = Signal(np.zeros(1000), 125.0)
    out = cascade_filter(ppg, zero, zero, zero, CascadeConfig())
    assert np.array_equal(out.samples, ppg.samples)


@pytest.mark.parametrize("seed", [6, 7, 8])
def test_cascade_recovers_tone_under_three_axis_artifacts(seed):
    rng = np.random.default_rng(seed)
    firs = [np.array([0.8, 0.4]), np.array([0.5, -0.3, 0.2]), np.array([0.6, 0.1])]
    clean, ppg, (ax, ay, az) = _artifact_recording(rng, firs)
    # Oracle: joint batch regression on all three delay lines recovers the tone.
    joint = np.hstack([delay_matrix(s.samples, 16) for s in (ax, ay, az)])
    resid = ppg.samples - joint @ np.linalg.lstsq(joint, ppg.samples, rcond=None)[0]
    tone_bin = int(np.argmax(periodogram(clean, 4096).power))
    assert int(np.argmax(periodogram(Signal(resid, 125.0), 4096).power)) == tone_bin
    out = cascade_filter(ppg, ax, ay, az, CascadeConfig())
    assert int(np.argmax(periodogram(out, 4096).power)) == tone_bin


@pytest.mark.parametrize("axis", [0, 1, 2])
def test_cascade_axis_permutation_invariant(axis):
    rng = np.random.default_rng(7)
    n, fs = 1000, 125.0
    clean = sinusoid(1.7, n=n)
    ref = rng.standard_normal(n)
    artifact = lfilter([0.9, 0.3], [1.0], ref)
    ppg = Signal(clean.samples + artifact, fs)
    chans = [Signal(np.zeros(n), fs)] * 3
    chans[axis] = Signal(ref, fs)
    out = cascade_filter(ppg, *chans, CascadeConfig())
    tone_bin = int(np.argmax(periodogram(clean, 4096).power))
    assert int(np.argmax(periodogram(out, 4096).power)) == tone_bin


def test_cascade_cuts_artifact_band_energy_by_20db():
    rng = np.random.default_rng(8)
    n, fs = 1000, 125.0
    clean = sinusoid(1.5, n=n)
    ref = np.sin(2 * np.pi * 2.5 * np.arange(n) / fs + 0.3) + 0.01 * rng.standard_normal(n)
    artifact = lfilter([0.9, 0.4], [1.0], ref)
    ppg = Signal(clean.samples + artifact, fs)
    zero = Signal(np.zeros(n), fs)
    out = cascade_filter(ppg, Signal(ref, fs), zero, zero, CascadeConfig())
    k_art = round(2.5 * 4096 / fs)
    before = periodogram(ppg, 4096).power[k_art]
    after = periodogram(out, 4096).power[k_art]
    assert after <= before / 100.0  # >= 20 dB down


def test_cascade_rejects_misaligned_channels():
    ppg = sinusoid(1.0, n=500)
    good = Signal(np.zeros(500), 125.0)
    bad = Signal(np.zeros(400), 125.0)
    with pytest.raises(ParameterError):
        cascade_filter(ppg, good, bad, good, CascadeConfig())


def test_cascade_config_validation():
    with pytest.raises(ParameterError):
        CascadeConfig(algo="kalman")
    with pytest.raises(ParameterError):
        CascadeConfig(stage_order=("x", "x", "z"))
    with pytest.raises(ParameterError):
        CascadeConfig(lam=0.0)
