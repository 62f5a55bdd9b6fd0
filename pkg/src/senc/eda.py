"""Tonic/phasic split of skin conductance, response scaling, stimulus standardization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import SeriesTooShort, ZeroVariance

DEFAULT_WINDOW_S = 8.0


@dataclass
class EdaDecomposition:
    tonic: np.ndarray
    phasic: np.ndarray


@dataclass
class StandardizedStimulus:
    x_std: np.ndarray
    mu: float
    sigma: float


@dataclass
class ResponseSeries:
    y: np.ndarray


def window_samples(window_s: float, rate_hz: float) -> int:
    """Median window length in samples, forced odd."""
    w = int(round(window_s * rate_hz))
    return w if w % 2 == 1 else w + 1


def moving_median(x: np.ndarray, width: int) -> np.ndarray:
    """Centered moving median of odd ``width``.

    Near the ends the window shrinks symmetrically (sample ``i`` uses
    ``min(i, n-1-i, width//2)`` neighbours on each side), so the first and last
    samples are their own median and linear trends pass through unchanged.
    """
    n = x.size
    half = width // 2
    out = np.empty(n)
    if n > 2 * half:
        out[half:n - half] = np.median(sliding_window_view(x, 2 * half + 1), axis=1)
    for i in range(min(half, n)):
        for j in (i, n - 1 - i):
            k = min(j, n - 1 - j, half)
            out[j] = np.median(x[j - k:j + k + 1])
    return out


def decompose(gsr, rate_hz: float, window_s: float = DEFAULT_WINDOW_S) -> EdaDecomposition:
    """Split GSR into a moving-median tonic baseline and the phasic remainder.

    ``phasic`` is computed as ``gsr - tonic`` so the two parts add back to the
    input.
    """
    gsr = np.asarray(gsr, dtype=float)
    if gsr.size < 2:
        raise SeriesTooShort(f"gsr has {gsr.size} sample(s), need at least 2")
    if not rate_hz > 0:
        raise ValueError(f"rate_hz must be > 0, got {rate_hz}")
    if window_s * rate_hz < 2:
        raise ValueError(f"window_s must be >= 2/rate_hz ({2 / rate_hz} s), got {window_s}")
    tonic = moving_median(gsr, window_samples(window_s, rate_hz))
    return EdaDecomposition(tonic=tonic, phasic=gsr - tonic)


def normalize_unit(phasic) -> ResponseSeries:
    """Min-max scale onto [0, 1]; a constant input maps to 0.5 everywhere."""
    phasic = np.asarray(phasic, dtype=float)
    if phasic.size == 0:
        raise SeriesTooShort("phasic series is empty")
    lo, hi = phasic.min(), phasic.max()
    if hi == lo:
        return ResponseSeries(np.full(phasic.size, 0.5))
    y = (phasic - lo) / (hi - lo)
    return ResponseSeries(np.clip(y, 0.0, 1.0))


def standardize(x) -> StandardizedStimulus:
    """z-score with the population (ddof=0) standard deviation."""
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        raise SeriesTooShort(f"need at least 2 stimulus samples, got {x.size}")
    mu = float(x.mean())
    sigma = float(x.std())
    if not sigma > 1e-12 * max(1.0, abs(mu)):
        raise ZeroVariance(f"stimulus is constant (sigma={sigma})")
    return StandardizedStimulus(x_std=(x - mu) / sigma, mu=mu, sigma=sigma)


def response_from_gsr(gsr, rate_hz: float, window_s: float = DEFAULT_WINDOW_S) -> np.ndarray:
    """Observed response target: phasic EDA scaled to [0, 1]."""
    return normalize_unit(decompose(gsr, rate_hz, window_s).phasic).y
