"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the library's FFT/filter code paths:
``naive_dft`` evaluates the transform sum directly, and the least-squares
helpers go through numpy's solvers on explicitly stacked regressors.
"""

import os

import numpy as np
import pytest

from wristhr import Signal


def naive_dft(samples: np.ndarray, n_fft: int) -> np.ndarray:
    """Direct one-sided DFT at bins 0..n_fft/2, O(N * n_fft)."""
    n = np.arange(samples.size)
    k = np.arange(n_fft // 2 + 1)
    basis = np.exp(-2j * np.pi * k[:, None] * n[None, :] / n_fft)
    return basis @ samples


def naive_periodogram(samples: np.ndarray, n_fft: int) -> np.ndarray:
    """Oracle for the library periodogram: mean removal + direct DFT power."""
    return np.abs(naive_dft(samples - samples.mean(), n_fft)) ** 2


def sinusoid(freq: float, fs: float = 125.0, n: int = 1000, amp: float = 1.0, phase: float = 0.0) -> Signal:
    t = np.arange(n) / fs
    return Signal(amp * np.sin(2 * np.pi * freq * t + phase), fs)


def delay_matrix(reference: np.ndarray, m: int) -> np.ndarray:
    """Tapped delay line regressors, row n = [u(n), ..., u(n-m+1)], zero-padded."""
    padded = np.concatenate([np.zeros(m - 1), reference])
    return np.lib.stride_tricks.sliding_window_view(padded, m)[:, ::-1].copy()


def rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.square(x))))


@pytest.fixture(scope="session")
def dataset_dir():
    """Directory of converted dataset CSVs, or None when unavailable."""
    path = os.environ.get("WRISTHR_DATA")
    if path and os.path.isdir(path):
        return path
    return None
