"""Adaptive noise cancellation: RLS / LMS stages and the three-stage cascade.

Each stage is a classic adaptive noise canceller: the filter predicts the part
of the primary input that is linearly explained by a tapped delay line of the
reference (an accelerometer axis) and the returned signal is the prediction
error, i.e. the primary with that motion component subtracted.  The cascade
chains three stages, one per accelerometer axis, feeding each stage's error
into the next.

Filter state is created fresh for every window, so windows are independent
and results reproducible regardless of processing order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dsp import Signal
from .errors import NumericError, ParameterError

ALGORITHMS = ("rls", "lms")
STAGE_AXES = ("x", "y", "z")


@dataclass
class RlsState:
    """Exponentially weighted RLS filter state.

    w is the coefficient vector, P the running inverse of the (weighted)
    regressor covariance, lam the forgetting factor in (0, 1].
    """

    w: np.ndarray
    P: np.ndarray
    lam: float

    @property
    def m(self) -> int:
        return self.w.size


@dataclass
class LmsState:
    """LMS filter state: coefficient vector and step size."""

    w: np.ndarray
    mu: float

    @property
    def m(self) -> int:
        return self.w.size


@dataclass(frozen=True)
class CascadeConfig:
    """Configuration for the per-axis cascade.

    Defaults: 55-tap RLS with forgetting factor 0.999 and P initialized to
    10*I.  The LMS alternative runs the normalized update (step scaled by the
    regressor energy) with mu = 0.02, gentle enough to leave the heart tone
    alone once converged; it relies on state carried across overlapping
    windows to converge (see cascade_states).  ``stage_order`` fixes which
    accelerometer axis feeds each stage.
    """

    algo: str = "rls"
    m: int = 55
    lam: float = 0.999
    p_init: float = 10.0
    mu: float = 0.02
    stage_order: tuple[str, ...] = STAGE_AXES

    def __post_init__(self):
        if self.algo not in ALGORITHMS:
            raise ParameterError(f"algo must be one of {ALGORITHMS}, got {self.algo!r}")
        if self.m < 1:
            raise ParameterError("filter length must be >= 1")
        if not 0 < self.lam <= 1:
            raise ParameterError(f"forgetting factor must be in (0, 1], got {self.lam}")
        if self.p_init <= 0:
            raise ParameterError("p_init must be positive")
        if self.mu <= 0:
            raise ParameterError("mu must be positive")
        if sorted(self.stage_order) != sorted(STAGE_AXES):
            raise ParameterError(f"stage_order must be a permutation of {STAGE_AXES}")


def rls_init(m: int, lam: float = 0.999, p_init: float = 10.0) -> RlsState:
    """Fresh RLS state: zero weights, P = p_init * identity."""
    if m < 1:
        raise ParameterError("filter length must be >= 1")
    if not 0 < lam <= 1:
        raise ParameterError(f"forgetting factor must be in (0, 1], got {lam}")
    if p_init <= 0:
        raise ParameterError("p_init must be positive")
    return RlsState(w=np.zeros(m), P=np.eye(m) * p_init, lam=lam)


def lms_init(m: int, mu: float = 0.01) -> LmsState:
    """Fresh LMS state with zero weights."""
    if m < 1:
        raise ParameterError("filter length must be >= 1")
    if mu <= 0:
        raise ParameterError("mu must be positive")
    return LmsState(w=np.zeros(m), mu=mu)


def _rls_update(state: RlsState, d: float, u: np.ndarray) -> float:
    # One RLS recursion; returns the a-priori error (the cancelled sample).
    P, lam = state.P, state.lam
    pi = P @ u
    k = pi / (lam + u @ pi)
    e = d - state.w @ u
    state.w = state.w + k * e
    P = (P - np.outer(k, u @ P)) / lam
    # P is symmetric in exact arithmetic; re-symmetrize to stop drift over long runs.
    state.P = (P + P.T) * 0.5
    return float(e)


def _lms_update(state: LmsState, d: float, u: np.ndarray) -> float:
    e = d - state.w @ u
    state.w = state.w + state.mu * e * u
    return float(e)


def _nlms_update(state: LmsState, d: float, u: np.ndarray) -> float:
    # Normalized variant: step scaled by regressor energy, stable for mu in (0, 2).
    e = d - state.w @ u
    state.w = state.w + (state.mu / (u @ u + 1e-12)) * e * u
    return float(e)


def rls_step(state: RlsState, d: float, u: np.ndarray) -> tuple[float, RlsState]:
    """Advance the RLS filter by one sample.

    d is the primary input sample, u the length-m regressor (current and past
    reference samples).  Returns the noise-cancelled output sample (a-priori
    error) and the updated state (mutated in place).
    """
    u = np.asarray(u, dtype=float)
    if u.shape != (state.m,):
        raise ParameterError(f"regressor shape {u.shape} != ({state.m},)")
    if not np.isfinite(d) or not np.isfinite(u).all():
        raise NumericError("non-finite input to rls_step")
    return _rls_update(state, float(d), u), state


def lms_step(state: LmsState, d: float, u: np.ndarray) -> tuple[float, LmsState]:
    """Advance the LMS filter by one sample; see rls_step for conventions."""
    u = np.asarray(u, dtype=float)
    if u.shape != (state.m,):
        raise ParameterError(f"regressor shape {u.shape} != ({state.m},)")
    if not np.isfinite(d) or not np.isfinite(u).all():
        raise NumericError("non-finite input to lms_step")
    return _lms_update(state, float(d), u), state


def _delay_line(reference: np.ndarray, m: int) -> np.ndarray:
    # Row n = [u(n), u(n-1), ..., u(n-m+1)] with zeros before the window start.
    padded = np.concatenate([np.zeros(m - 1), reference])
    view = np.lib.stride_tricks.sliding_window_view(padded, m)
    return view[:, ::-1].copy()


def filter_window(
    d: Signal, u: Signal, cfg: CascadeConfig, state: RlsState | LmsState | None = None
) -> Signal:
    """Run one adaptive canceller stage over a whole window.

    The regressor at each sample is the tapped delay line of the reference
    (zero-padded at the window start) and the returned signal is the
    per-sample error sequence: the primary input with the reference-correlated
    component removed.  Filter state is initialized fresh unless an existing
    ``state`` is passed, which is then adapted in place (used to carry LMS
    stages across overlapping windows).

    The LMS stage uses the normalized update (step divided by the regressor
    energy): a plain LMS step small enough to be mean-square stable at this
    filter length cannot also converge inside one window, and the RLS-style
    gain annealing that would stop it from eating the heart tone afterwards
    only comes from accumulating history.
    """
    if len(d) != len(u):
        raise ParameterError(f"length mismatch: {len(d)} vs {len(u)}")
    if d.fs != u.fs:
        raise ParameterError(f"sampling rate mismatch: {d.fs} vs {u.fs}")
    if len(d) < cfg.m:
        raise ParameterError(f"window of {len(d)} samples shorter than filter length {cfg.m}")

    if cfg.algo == "lms":
        if state is None:
            state = lms_init(cfg.m, cfg.mu)
        elif not isinstance(state, LmsState) or state.m != cfg.m:
            raise ParameterError("state does not match an LMS filter of this length")
        update = _nlms_update
    else:
        if state is None:
            state = rls_init(cfg.m, cfg.lam, cfg.p_init)
        elif not isinstance(state, RlsState) or state.m != cfg.m:
            raise ParameterError("state does not match an RLS filter of this length")
        update = _rls_update

    regressors = _delay_line(u.samples, cfg.m)
    primary = d.samples
    out = np.empty(len(d))
    for n in range(len(d)):
        out[n] = update(state, primary[n], regressors[n])
    return Signal(out, d.fs)


def cascade_states(cfg: CascadeConfig) -> list[RlsState] | list[LmsState]:
    """Fresh per-stage filter states for a cascade that persists across windows."""
    if cfg.algo == "lms":
        return [lms_init(cfg.m, cfg.mu) for _ in cfg.stage_order]
    return [rls_init(cfg.m, cfg.lam, cfg.p_init) for _ in cfg.stage_order]


def cascade_filter(
    ppg: Signal,
    ax: Signal,
    ay: Signal,
    az: Signal,
    cfg: CascadeConfig,
    states: list[RlsState] | list[LmsState] | None = None,
) -> Signal:
    """Three-stage cascade with one accelerometer axis as reference per stage.

    Stage 1 cancels the x-axis component from the PPG, stage 2 cancels the
    y-axis component from stage 1's output, stage 3 the z-axis component from
    stage 2's output (order per cfg.stage_order).  Stages start from fresh
    filter state unless ``states`` (one per stage, from cascade_states) is
    passed to carry adaptation across windows.
    """
    refs = {"x": ax, "y": ay, "z": az}
    for name, ref in refs.items():
        if len(ref) != len(ppg) or ref.fs != ppg.fs:
            raise ParameterError(f"accelerometer channel {name} not aligned with PPG")
    if states is not None and len(states) != len(cfg.stage_order):
        raise ParameterError("need one filter state per cascade stage")
    y = ppg
    for i, axis in enumerate(cfg.stage_order):
        y = filter_window(y, refs[axis], cfg, None if states is None else states[i])
    return y
