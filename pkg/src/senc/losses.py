"""
Fitting losses for the three encoders and the Gaussian response-noise model.

All residual powers are taken as ``|r| ** p``; a bare ``r ** p`` is undefined
for negative residuals once ``p`` is fractional.  Losses are sums over samples,
not means.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import FamilyMismatch, LengthMismatch, SeriesTooShort
from .models import Family, ModelParams

DEFAULT_W_PENALTY = 0.1
NOISE_SIGMA = 0.05

# rows of theta evaluated per block in batched calls; bounds temporaries to ~16 MB
_BLOCK_ELEMS = 2_000_000


class LossKind(enum.Enum):
    BEC = "bec"
    FMC = "fmc"
    LNP = "lnp"

    @property
    def family(self) -> Family:
        return Family.G2 if self is LossKind.LNP else Family.G1


@dataclass(frozen=True)
class LossSpec:
    kind: LossKind
    p: float
    w_penalty: float | None = None

    def __post_init__(self):
        if not (np.isfinite(self.p) and self.p > 0):
            raise ValueError(f"p must be > 0, got {self.p}")
        if self.kind is LossKind.LNP:
            if self.w_penalty is None or not self.w_penalty >= 0:
                raise ValueError(f"LNP needs a nonnegative w_penalty, got {self.w_penalty}")
        elif self.w_penalty is not None:
            raise ValueError(f"w_penalty only applies to LNP, not {self.kind.name}")

    @classmethod
    def make(cls, kind, p: float, w_penalty: float = DEFAULT_W_PENALTY) -> "LossSpec":
        """Build a spec, attaching ``w_penalty`` only when the kind uses it."""
        kind = LossKind(kind) if not isinstance(kind, LossKind) else kind
        return cls(kind, float(p), float(w_penalty) if kind is LossKind.LNP else None)

    @property
    def family(self) -> Family:
        return self.kind.family


@dataclass
class NoisySeries:
    y_noise: np.ndarray
    sigma: float
    seed: int


def add_noise(clean, sigma: float = NOISE_SIGMA, seed: int = 0) -> NoisySeries:
    """Add iid N(0, sigma^2) noise drawn from a generator seeded with ``seed``."""
    clean = np.asarray(clean, dtype=float)
    if clean.size == 0:
        raise SeriesTooShort("cannot add noise to an empty series")
    if not sigma >= 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return NoisySeries(clean.copy(), 0.0, seed)
    eps = np.random.default_rng(seed).normal(0.0, sigma, size=clean.shape)
    return NoisySeries(clean + eps, float(sigma), seed)


# --------------------------------------------------------------------------
# batched evaluation: thetas has shape (k, n_params), result has shape (k,)


def _prepare(spec: LossSpec, x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise LengthMismatch(f"x has {x.size} samples, y has {y.size}")
    if spec.kind is LossKind.LNP:
        if x.size < 3:
            raise SeriesTooShort(f"LNP loss needs at least 3 samples, got {x.size}")
        # the second-difference penalty runs along the stimulus axis
        order = np.argsort(x, kind="stable")
        x, y = x[order], y[order]
    return x, y


def _block_loss(spec: LossSpec, thetas: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    xc = x[None, :]
    if spec.kind is LossKind.LNP:
        t0, t1, t2 = (thetas[:, i:i + 1] for i in range(3))
        g = np.maximum(0.0, t0 * xc * xc + t1 * xc + t2)
        data = np.sum(np.abs(y - g) ** spec.p, axis=1)
        mean_gap = np.abs(y.mean() - g.mean(axis=1))
        curvature = np.sum(np.abs(np.diff(g, n=2, axis=1)), axis=1)
        return data + spec.w_penalty * (mean_gap + curvature)

    t1, t2 = thetas[:, 0:1], thetas[:, 1:2]
    g = 0.5 * (1.0 + np.tanh(t1 * xc + t2))
    terms = np.abs(y - g) ** spec.p
    if spec.kind is LossKind.FMC:
        terms = np.abs(y) * terms
    return np.sum(terms, axis=1)


def loss_many(spec: LossSpec, thetas, x, y) -> np.ndarray:
    """Loss at each row of ``thetas``."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    if thetas.shape[1] != spec.family.n_params:
        raise ValueError(f"{spec.kind.name} takes {spec.family.n_params} parameters, got {thetas.shape[1]}")
    x, y = _prepare(spec, x, y)
    block = max(1, _BLOCK_ELEMS // max(1, x.size))
    out = np.empty(thetas.shape[0])
    for start in range(0, thetas.shape[0], block):
        out[start:start + block] = _block_loss(spec, thetas[start:start + block], x, y)
    return out


def make_objective(spec: LossSpec, x, y):
    """Return ``f(theta_vector) -> float`` with the data validated and pre-sorted once."""
    xs, ys = _prepare(spec, x, y)

    def objective(theta) -> float:
        theta = np.asarray(theta, dtype=float).reshape(1, -1)
        return float(_block_loss(spec, theta, xs, ys)[0])

    return objective


def evaluate_loss(theta: ModelParams, spec: LossSpec, x, y) -> float:
    if theta.family is not spec.family:
        raise FamilyMismatch(f"{spec.kind.name} loss needs {spec.family.name} params, got {theta.family.name}")
    return float(loss_many(spec, theta.as_array(), x, y)[0])


def _check_kind(spec: LossSpec, kind: LossKind) -> None:
    if spec.kind is not kind:
        raise ValueError(f"expected a {kind.name} spec, got {spec.kind.name}")


def loss_bec(theta: ModelParams, spec: LossSpec, x_std, y) -> float:
    """Sum of ``|y - g1(x)|^p``."""
    _check_kind(spec, LossKind.BEC)
    return evaluate_loss(theta, spec, x_std, y)


def loss_fmc(theta: ModelParams, spec: LossSpec, x_std, y) -> float:
    """BEC terms weighted by the response magnitude ``|y|``."""
    _check_kind(spec, LossKind.FMC)
    return evaluate_loss(theta, spec, x_std, y)


def loss_lnp(theta: ModelParams, spec: LossSpec, x_std, y) -> float:
    """Rectified-quadratic fit with mean-matching and smoothness penalties.

    With samples sorted by stimulus::

        sum |y_i - g2_i|^p
          + w_penalty * (|mean(y) - mean(g2)| + sum_i |g2_{i+1} - 2 g2_i + g2_{i-1}|)
    """
    _check_kind(spec, LossKind.LNP)
    return evaluate_loss(theta, spec, x_std, y)
