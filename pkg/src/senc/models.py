"""
Response nonlinearities, the Infomax benchmark, and a binned empirical nonlinearity.

Two parametric families are fitted:

* ``G1``: ``0.5 * (1 + tanh(theta1 * x + theta2))``, a bounded sigmoid in (0, 1)
* ``G2``: ``max(0, theta0 * x**2 + theta1 * x + theta2)``, a rectified quadratic

The Infomax response of a scalar stimulus is its cumulative distribution, so
the benchmark curve is the empirical CDF of the observed stimulus.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FamilyMismatch, LengthMismatch, TooFewPoints
from .ingest import format_csv


class Family(enum.Enum):
    G1 = 2
    G2 = 3

    @property
    def n_params(self) -> int:
        return self.value


@dataclass(frozen=True)
class ModelParams:
    family: Family
    theta: tuple[float, ...]

    def __post_init__(self):
        theta = tuple(float(v) for v in np.ravel(self.theta))
        object.__setattr__(self, "theta", theta)
        if len(theta) != self.family.n_params:
            raise ValueError(f"{self.family.name} takes {self.family.n_params} parameters, got {len(theta)}")
        if not all(np.isfinite(theta)):
            raise ValueError(f"non-finite parameter in {theta}")

    def as_array(self) -> np.ndarray:
        return np.array(self.theta)


def g1(x, theta1: float, theta2: float):
    return 0.5 * (1.0 + np.tanh(theta1 * x + theta2))


def g2(x, theta0: float, theta1: float, theta2: float):
    return np.maximum(0.0, theta0 * x * x + theta1 * x + theta2)


def eval_g1(x, params: ModelParams):
    if params.family is not Family.G1:
        raise FamilyMismatch(f"eval_g1 needs G1 params, got {params.family.name}")
    return g1(np.asarray(x, dtype=float), *params.theta)


def eval_g2(x, params: ModelParams):
    if params.family is not Family.G2:
        raise FamilyMismatch(f"eval_g2 needs G2 params, got {params.family.name}")
    return g2(np.asarray(x, dtype=float), *params.theta)


def eval_curve(x, params: ModelParams):
    """Evaluate whichever nonlinearity ``params`` belongs to."""
    if params.family is Family.G1:
        return eval_g1(x, params)
    return eval_g2(x, params)


# --------------------------------------------------------------------------
# Infomax benchmark


@dataclass(frozen=True)
class EmpiricalCdf:
    sorted_samples: np.ndarray

    @classmethod
    def from_samples(cls, samples) -> "EmpiricalCdf":
        samples = np.sort(np.asarray(samples, dtype=float).ravel())
        if samples.size == 0:
            raise TooFewPoints("empirical CDF needs at least one sample")
        return cls(samples)

    def __call__(self, x):
        return empirical_cdf_eval(self, x)


def empirical_cdf_eval(cdf: EmpiricalCdf, x):
    """Right-continuous ``#{samples <= x} / n``."""
    s = cdf.sorted_samples
    counts = np.searchsorted(s, x, side="right")
    return counts / s.size


def infomax_response(x_points, stimulus_samples) -> np.ndarray:
    cdf = EmpiricalCdf.from_samples(stimulus_samples)
    return np.asarray(empirical_cdf_eval(cdf, np.asarray(x_points, dtype=float)), dtype=float)


# --------------------------------------------------------------------------
# empirical nonlinearity


@dataclass
class BinnedNonlinearity:
    bin_edges: np.ndarray
    bin_mean_x: np.ndarray
    bin_mean_y: np.ndarray
    bin_counts: np.ndarray


def empirical_nonlinearity(x, y, n_bins: int = 20) -> BinnedNonlinearity:
    """Equal-count binning of ``y`` against ``x``.

    Points are ordered by a stable sort on ``x`` and split into ``n_bins``
    consecutive blocks whose sizes differ by at most one. Interior edges sit
    halfway between neighbouring blocks; the outer edges are min(x), max(x).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise LengthMismatch(f"x has {x.size} points, y has {y.size}")
    if n_bins < 1 or x.size < n_bins:
        raise TooFewPoints(f"{x.size} points cannot fill {n_bins} bins")
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    blocks = np.array_split(np.arange(xs.size), n_bins)
    edges = [xs[0]]
    for prev, nxt in zip(blocks[:-1], blocks[1:]):
        edges.append(0.5 * (xs[prev[-1]] + xs[nxt[0]]))
    edges.append(xs[-1])
    return BinnedNonlinearity(
        bin_edges=np.array(edges),
        bin_mean_x=np.array([xs[b].mean() for b in blocks]),
        bin_mean_y=np.array([ys[b].mean() for b in blocks]),
        bin_counts=np.array([b.size for b in blocks]),
    )


def write_curve_csv(path, x, *columns, header=("x", "value")) -> None:
    """Write ``x`` and one or more curve columns as CSV with six-decimal values."""
    text = format_csv(tuple(header), (x, *columns), fmt=lambda v: f"{v:.6f}")
    Path(path).write_text(text, encoding="utf-8", newline="\n")
