"""
Error-penalty sweep: fit every (p, model) cell on one session and score each
fitted curve by its mean squared distance from the Infomax response.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .eda import DEFAULT_WINDOW_S, response_from_gsr, standardize
from .errors import EmptyModelSet, LengthMismatch, RaggedReport
from .ingest import AlignedSession
from .losses import DEFAULT_W_PENALTY, NOISE_SIGMA, LossSpec, add_noise
from .models import ModelParams, eval_curve, g1, infomax_response, write_curve_csv
from .optimizer import OptimizerOptions, multistart_fit

log = logging.getLogger(__name__)

TABLE_P_VALUES = (0.10, 0.31, 0.52, 0.73, 0.94, 1.16, 1.37, 1.58, 1.79, 2.00)
MODELS = ("bec", "fmc", "lnp")
# report column for each model, in table order
COLUMNS = {"bec": "bec", "fmc": "bec_fmc", "lnp": "lnp"}


class TargetMode(enum.Enum):
    OBSERVED = "observed"
    SIMULATED = "simulated"


@dataclass(frozen=True)
class SweepConfig:
    p_values: tuple[float, ...] = TABLE_P_VALUES
    models: tuple[str, ...] = MODELS
    target_mode: TargetMode = TargetMode.OBSERVED
    w_penalty: float = DEFAULT_W_PENALTY
    optimizer: OptimizerOptions = OptimizerOptions()
    eda_window_s: float = DEFAULT_WINDOW_S
    # SIMULATED targets: y = g1(x_std; theta_star) + N(0, noise_sigma^2)
    theta_star: tuple[float, float] | None = None
    noise_sigma: float = NOISE_SIGMA
    noise_seed: int = 0

    def __post_init__(self):
        p = np.asarray(self.p_values, dtype=float)
        if p.size == 0:
            raise ValueError("p_values must not be empty")
        if np.any(p <= 0) or np.any(p > 2):
            raise ValueError(f"p_values must lie in (0, 2], got {list(self.p_values)}")
        if np.any(np.diff(p) <= 0):
            raise ValueError("p_values must be strictly ascending")
        if not self.models:
            raise EmptyModelSet("no models selected")
        unknown = set(self.models) - set(MODELS)
        if unknown:
            raise ValueError(f"unknown model(s) {sorted(unknown)}; choose from {MODELS}")
        if self.w_penalty < 0:
            raise ValueError(f"w_penalty must be >= 0, got {self.w_penalty}")
        target_mode = TargetMode(self.target_mode)
        object.__setattr__(self, "target_mode", target_mode)
        if target_mode is TargetMode.SIMULATED and self.theta_star is None:
            raise ValueError("simulated targets need theta_star")


@dataclass
class SweepRow:
    p: float
    model: str
    mse_vs_infomax: float
    fit_loss: float
    params: ModelParams
    converged: bool


@dataclass
class SweepReport:
    rows: list[SweepRow]
    # (model, p) -> (x_std, fitted, infomax), for curve export
    curves: dict = field(default_factory=dict, repr=False)

    def row(self, model: str, p: float) -> SweepRow:
        for r in self.rows:
            if r.model == model and np.isclose(r.p, p):
                return r
        raise KeyError((model, p))


def mse(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.size == 0:
        raise LengthMismatch(f"mse needs equal non-empty inputs, got {a.size} and {b.size}")
    d = a - b
    return float(np.mean(d * d))


def build_target(session: AlignedSession, x_std: np.ndarray, config: SweepConfig) -> np.ndarray:
    if config.target_mode is TargetMode.OBSERVED:
        return response_from_gsr(session.gsr, session.rate_hz, config.eda_window_s)
    clean = g1(x_std, *config.theta_star)
    return add_noise(clean, config.noise_sigma, config.noise_seed).y_noise


def fit_cell(model: str, p: float, x_std, y, config: SweepConfig):
    spec = LossSpec.make(model, p, config.w_penalty)
    return multistart_fit(spec, (x_std, y), config.optimizer)


def sweep_arrays(x_std, y, config: SweepConfig) -> SweepReport:
    """Sweep on an already standardized stimulus and response target."""
    x_std = np.asarray(x_std, dtype=float)
    y = np.asarray(y, dtype=float)
    if x_std.shape != y.shape:
        raise LengthMismatch(f"x_std has {x_std.size} samples, y has {y.size}")
    infomax = infomax_response(x_std, x_std)
    rows, curves = [], {}
    for p in config.p_values:
        for model in config.models:
            fit = fit_cell(model, p, x_std, y, config)
            fitted = eval_curve(x_std, fit.params)
            score = mse(fitted, infomax)
            log.info("p=%.2f %s: loss=%.6g mse=%.6f", p, model, fit.loss, score)
            rows.append(SweepRow(float(p), model, score, fit.loss, fit.params, fit.converged))
            curves[(model, float(p))] = (x_std, fitted, infomax)
    return SweepReport(rows, curves)


def run_sweep(session: AlignedSession, config: SweepConfig = SweepConfig()) -> SweepReport:
    """Standardize speed, build the response target, and sweep every cell."""
    x_std = standardize(session.speed).x_std
    y = build_target(session, x_std, config)
    return sweep_arrays(x_std, y, config)


# --------------------------------------------------------------------------
# output


def render_table(report: SweepReport) -> str:
    """One CSV line per p with six-decimal MSEs; ``NA`` for models not in the report."""
    by_model: dict[str, dict[float, float]] = {}
    for r in report.rows:
        by_model.setdefault(r.model, {})[round(r.p, 9)] = r.mse_vs_infomax
    p_sets = {m: set(v) for m, v in by_model.items()}
    all_p = sorted(set().union(*p_sets.values())) if p_sets else []
    for m, ps in p_sets.items():
        if ps != set(all_p):
            missing = sorted(set(all_p) - ps)
            raise RaggedReport(f"{m} has no rows for p={missing}")
    lines = ["p," + ",".join(COLUMNS[m] for m in MODELS)]
    for p in all_p:
        cells = [f"{p:.6f}"]
        for m in MODELS:
            cells.append(f"{by_model[m][p]:.6f}" if m in by_model else "NA")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def curve_filename(model: str, p: float) -> str:
    return f"{model}_p{p:.2f}.csv"


def write_curves(report: SweepReport, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for (model, p), (x, fitted, infomax) in sorted(report.curves.items()):
        order = np.argsort(x, kind="stable")
        path = out / curve_filename(model, p)
        write_curve_csv(path, x[order], fitted[order], infomax[order], header=("x", "fitted", "infomax"))
        paths.append(path)
    return paths

