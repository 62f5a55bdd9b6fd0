"""
Derivative-free fitting: Nelder-Mead with seeded multistart, and a brute-force
grid search used as an independent check on it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import LengthMismatch, NonFiniteObjective
from .losses import LossSpec, loss_many, make_objective
from .models import ModelParams

REFLECT, EXPAND, CONTRACT, SHRINK = 1.0, 2.0, 0.5, 0.5
# initial simplex edge as a fraction of the init box width
_SIMPLEX_SCALE = 0.05


@dataclass(frozen=True)
class OptimizerOptions:
    """Multistart Nelder-Mead settings.

    ``init_box`` is either one ``(lo, hi)`` pair applied to every dimension or
    a sequence of per-dimension pairs.
    """

    n_restarts: int = 16
    init_box: tuple = (-2.0, 2.0)
    tol: float = 1e-8
    max_iters: int = 2000
    seed: int = 0
    polish: bool = True

    def __post_init__(self):
        if self.n_restarts < 1:
            raise ValueError(f"n_restarts must be >= 1, got {self.n_restarts}")
        if not self.tol > 0:
            raise ValueError(f"tol must be > 0, got {self.tol}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        box = np.asarray(self.init_box, dtype=float)
        if box.shape[-1] != 2 or np.any(box[..., 0] >= box[..., 1]):
            raise ValueError(f"init_box needs lo < hi per dimension, got {self.init_box}")

    def box(self, dim: int) -> np.ndarray:
        """Per-dimension bounds as a (dim, 2) array."""
        box = np.asarray(self.init_box, dtype=float)
        if box.ndim == 1:
            return np.tile(box, (dim, 1))
        if box.shape[0] != dim:
            raise ValueError(f"init_box has {box.shape[0]} dimensions, problem has {dim}")
        return box


@dataclass
class FitResult:
    params: ModelParams | np.ndarray
    loss: float
    iterations: int
    converged: bool
    restart_index: int = 0
    starts: list = field(default_factory=list, repr=False)


def _safe(f, x) -> float:
    v = f(x)
    return v if np.isfinite(v) else np.inf


def _nm_run(f, simplex: np.ndarray, fvals: np.ndarray, tol: float, max_iters: int):
    n = simplex.shape[1]
    it = 0
    while True:
        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]
        if fvals[-1] - fvals[0] < tol:
            return simplex, fvals, it, True
        if it >= max_iters:
            return simplex, fvals, it, False
        it += 1

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + REFLECT * (centroid - worst)
        fr = _safe(f, xr)
        if fr < fvals[0]:
            xe = centroid + EXPAND * (xr - centroid)
            fe = _safe(f, xe)
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[-1]:
            xc = centroid + CONTRACT * (xr - centroid)
            fc = _safe(f, xc)
            if fc <= fr:
                simplex[-1], fvals[-1] = xc, fc
                continue
        else:
            xc = centroid + CONTRACT * (worst - centroid)
            fc = _safe(f, xc)
            if fc < fvals[-1]:
                simplex[-1], fvals[-1] = xc, fc
                continue
        best = simplex[0]
        for i in range(1, n + 1):
            simplex[i] = best + SHRINK * (simplex[i] - best)
            fvals[i] = _safe(f, simplex[i])


def nelder_mead(objective, init, opts: OptimizerOptions = OptimizerOptions()) -> FitResult:
    """Minimize ``objective`` from ``init``.

    Stops when the spread of objective values over the simplex drops below
    ``opts.tol`` or after ``opts.max_iters`` iterations.  With ``opts.polish``
    the search is restarted from the converged vertex with a fresh simplex
    until a restart no longer improves the best value; this unsticks
    simplices that collapsed on a ridge or came to rest straddling the
    minimum.  Returns the best vertex as a raw
    parameter array.
    """
    x0 = np.atleast_1d(np.asarray(init, dtype=float))
    if x0.ndim != 1 or x0.size < 1:
        raise ValueError("init must be a non-empty vector")
    f0 = objective(x0)
    if not np.isfinite(f0):
        raise NonFiniteObjective(f"objective is {f0} at the initial point {x0.tolist()}")

    step = _SIMPLEX_SCALE * np.diff(opts.box(x0.size), axis=1).ravel()
    best_x, best_f = x0, float(f0)
    total_iters = 0
    converged = False
    while True:
        simplex = np.vstack([best_x, best_x + np.diag(step)])
        # a simplex can stall symmetrically around a minimum with equal vertex
        # values; the next restart is flipped and smaller so it cannot repeat
        step = -0.5 * step
        fvals = np.array([best_f] + [_safe(objective, v) for v in simplex[1:]])
        simplex, fvals, iters, converged = _nm_run(objective, simplex, fvals, opts.tol, opts.max_iters - total_iters)
        total_iters += iters
        improved = fvals[0] < best_f - opts.tol
        if fvals[0] < best_f:
            best_x, best_f = simplex[0].copy(), float(fvals[0])
        if not (opts.polish and converged and improved and total_iters < opts.max_iters):
            break
    return FitResult(params=best_x, loss=best_f, iterations=total_iters, converged=converged)


def _validate_data(data):
    x, y = (np.asarray(a, dtype=float) for a in data)
    if x.size == 0:
        raise LengthMismatch("no data to fit")
    if x.shape != y.shape:
        raise LengthMismatch(f"x has {x.size} samples, y has {y.size}")
    return x, y


def initial_points(dim: int, opts: OptimizerOptions) -> np.ndarray:
    """``n_restarts`` starting points drawn uniformly from the init box."""
    box = opts.box(dim)
    rng = np.random.default_rng(opts.seed)
    return rng.uniform(box[:, 0], box[:, 1], size=(opts.n_restarts, dim))


def multistart_fit(spec: LossSpec, data, opts: OptimizerOptions = OptimizerOptions()) -> FitResult:
    """Run Nelder-Mead from every seeded start; keep the lowest loss.

    Equal losses resolve to the lower restart index, so the outcome does not
    depend on the order restarts finish in.
    """
    x, y = _validate_data(data)
    objective = make_objective(spec, x, y)
    family = spec.family
    starts = initial_points(family.n_params, opts)

    best: FitResult | None = None
    for index, start in enumerate(starts):
        run = nelder_mead(objective, start, opts)
        run.restart_index = index
        if best is None or run.loss < best.loss:
            best = run
    best.params = ModelParams(family, best.params)
    best.starts = [tuple(s) for s in starts]
    return best


def grid_oracle(spec: LossSpec, data, grid_per_dim: int = 41, box=(-2.0, 2.0)) -> FitResult:
    """Exhaustive search over a Cartesian grid of ``grid_per_dim`` points per axis.

    Costs ``grid_per_dim ** dim`` loss evaluations. Ties go to the first grid
    point in lexicographic order.
    """
    if grid_per_dim < 2:
        raise ValueError(f"grid_per_dim must be >= 2, got {grid_per_dim}")
    x, y = _validate_data(data)
    family = spec.family
    bounds = OptimizerOptions(init_box=box).box(family.n_params)
    axes = [np.linspace(lo, hi, grid_per_dim) for lo, hi in bounds]
    grid = np.array(list(itertools.product(*axes)))
    losses = loss_many(spec, grid, x, y)
    i = int(np.argmin(losses))
    return FitResult(
        params=ModelParams(family, grid[i]),
        loss=float(losses[i]),
        iterations=grid.shape[0],
        converged=True,
    )
