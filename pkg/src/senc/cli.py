"""
``senc`` command line.

Settings resolve in three layers: built-in defaults, then a JSON file given
with ``--config``, then explicit flags.  The seed falls back to ``$SENC_SEED``
when neither the flags nor the config file set it.

Exit codes: 0 success, 1 pipeline error, 2 usage error.
"""

from __future__ import annotations

import argparse
import copy
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .eda import standardize
from .errors import SencError
from .ingest import align, load_session
from .losses import LossSpec
from .models import eval_curve, infomax_response, write_curve_csv
from .optimizer import OptimizerOptions, multistart_fit
from .plot import report_svg
from .sweep import (
    MODELS,
    TABLE_P_VALUES,
    SweepConfig,
    TargetMode,
    build_target,
    curve_filename,
    mse,
    render_table,
    run_sweep,
    write_curves,
)
from .synth import gen_g1_session, gen_infomax_like, write_synthetic

log = logging.getLogger("senc")

DEFAULTS = {
    "data_dir": None,
    "out_dir": "senc_out",
    "seed": None,
    "eda": {"window_s": 8.0},
    "sweep": {
        "p_values": list(TABLE_P_VALUES),
        "models": list(MODELS),
        "target_mode": "observed",
        "w_penalty": 0.1,
        "noise_sigma": 0.05,
        "theta_star": None,
    },
    "optimizer": {"n_restarts": 16, "init_box": [-2.0, 2.0], "tol": 1e-8, "max_iters": 2000},
}


class UsageError(Exception):
    """Bad arguments or configuration (exit code 2)."""


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def _float_list(text: str, flag: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated numbers, got {text!r}") from None
    if not values:
        raise UsageError(f"{flag} must not be empty")
    return values


def _model_list(text: str) -> list[str]:
    models = [m.strip().lower() for m in text.split(",") if m.strip()]
    if not models:
        raise UsageError("--models must name at least one of bec, fmc, lnp")
    bad = [m for m in models if m not in MODELS]
    if bad:
        raise UsageError(f"--models: unknown model(s) {bad}; choose from bec, fmc, lnp")
    return models


def resolve_config(args) -> dict:
    cfg = copy.deepcopy(DEFAULTS)
    if getattr(args, "config", None):
        try:
            cfg = _merge(cfg, json.loads(Path(args.config).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None

    flags = {}
    if getattr(args, "data", None) is not None:
        flags["data_dir"] = args.data
    if getattr(args, "out", None) is not None:
        flags["out_dir"] = args.out
    if getattr(args, "seed", None) is not None:
        flags["seed"] = args.seed
    sweep = {}
    if getattr(args, "p_values", None) is not None:
        sweep["p_values"] = _float_list(args.p_values, "--p-values")
    if getattr(args, "models", None) is not None:
        sweep["models"] = _model_list(args.models)
    if getattr(args, "w_penalty", None) is not None:
        sweep["w_penalty"] = args.w_penalty
    if getattr(args, "target_mode", None) is not None:
        sweep["target_mode"] = args.target_mode
    if sweep:
        flags["sweep"] = sweep
    cfg = _merge(cfg, flags)

    if cfg["seed"] is None:
        env = os.environ.get("SENC_SEED")
        try:
            cfg["seed"] = int(env) if env else 0
        except ValueError:
            raise UsageError(f"SENC_SEED must be an integer, got {env!r}") from None
    if int(cfg["seed"]) < 0:
        raise UsageError("seed must be a nonnegative integer")
    return cfg


def _optimizer_options(cfg: dict) -> OptimizerOptions:
    o = cfg["optimizer"]
    try:
        return OptimizerOptions(
            n_restarts=int(o["n_restarts"]),
            init_box=tuple(map(tuple, o["init_box"])) if np.ndim(o["init_box"]) == 2 else tuple(o["init_box"]),
            tol=float(o["tol"]),
            max_iters=int(o["max_iters"]),
            seed=int(cfg["seed"]),
        )
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"optimizer settings: {exc}") from None


def _theta_star(cfg: dict, data_dir: Path):
    theta = cfg["sweep"].get("theta_star")
    if theta is None:
        truth = data_dir / "truth.json"
        if truth.is_file():
            theta = json.loads(truth.read_text(encoding="utf-8"))["theta_star"]
    if theta is None:
        raise UsageError("--target-mode simulated needs sweep.theta_star in the config or a truth.json next to the data")
    return tuple(float(v) for v in theta)


def _sweep_config(cfg: dict, data_dir: Path) -> SweepConfig:
    s = cfg["sweep"]
    try:
        mode = TargetMode(s["target_mode"])
    except ValueError:
        raise UsageError(f"target mode must be observed or simulated, got {s['target_mode']!r}") from None
    theta_star = _theta_star(cfg, data_dir) if mode is TargetMode.SIMULATED else None
    try:
        return SweepConfig(
            p_values=tuple(float(p) for p in s["p_values"]),
            models=tuple(s["models"]),
            target_mode=mode,
            w_penalty=float(s["w_penalty"]),
            optimizer=_optimizer_options(cfg),
            eda_window_s=float(cfg["eda"]["window_s"]),
            theta_star=theta_star,
            noise_sigma=float(s["noise_sigma"]),
            noise_seed=int(cfg["seed"]),
        )
    except (ValueError, SencError) as exc:
        raise UsageError(str(exc)) from None


def _load_aligned(cfg: dict):
    if not cfg["data_dir"]:
        raise UsageError("--data is required")
    data_dir = Path(cfg["data_dir"])
    return data_dir, align(load_session(data_dir))


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# --------------------------------------------------------------------------
# subcommands


def cmd_fit(args) -> int:
    if not args.p > 0:
        raise UsageError(f"--p must satisfy p > 0, got {args.p}")
    cfg = resolve_config(args)
    data_dir, session = _load_aligned(cfg)
    config = _sweep_config(cfg, data_dir)
    x_std = standardize(session.speed).x_std
    y = build_target(session, x_std, config)

    spec = LossSpec.make(args.model, args.p, config.w_penalty)
    fit = multistart_fit(spec, (x_std, y), config.optimizer)
    fitted = eval_curve(x_std, fit.params)
    infomax = infomax_response(x_std, x_std)

    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    order = np.argsort(x_std, kind="stable")
    curve_path = out / curve_filename(args.model, args.p)
    write_curve_csv(curve_path, x_std[order], fitted[order], infomax[order], header=("x", "fitted", "infomax"))
    _write_json(out / "fit.json", {
        "participant_id": session.participant_id,
        "model": args.model,
        "p": args.p,
        "w_penalty": spec.w_penalty,
        "family": fit.params.family.name,
        "params": list(fit.params.theta),
        "loss": fit.loss,
        "mse_vs_infomax": mse(fitted, infomax),
        "iterations": fit.iterations,
        "converged": fit.converged,
        "restart_index": fit.restart_index,
        "n_samples": int(x_std.size),
        "target_mode": config.target_mode.value,
        "seed": int(cfg["seed"]),
        "curve": curve_path.name,
    })
    print(f"{args.model} p={args.p}: params={list(fit.params.theta)} loss={fit.loss:.6g} -> {out / 'fit.json'}")
    return 0


def cmd_sweep(args) -> int:
    cfg = resolve_config(args)
    data_dir, session = _load_aligned(cfg)
    config = _sweep_config(cfg, data_dir)
    report = run_sweep(session, config)
    table = render_table(report)

    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.csv").write_text(table, encoding="utf-8", newline="\n")
    write_curves(report, out / "curves")
    (out / "report.svg").write_text(report_svg(report), encoding="utf-8", newline="\n")
    sys.stdout.write(table)
    return 0


def cmd_synth(args) -> int:
    if args.n < 10:
        raise UsageError(f"--n must be >= 10, got {args.n}")
    if not args.sigma >= 0:
        raise UsageError(f"--sigma must be >= 0, got {args.sigma}")
    cfg = resolve_config(args)
    seed = int(cfg["seed"])
    if args.kind == "g1":
        theta = _float_list(args.theta, "--theta")
        if len(theta) != 2:
            raise UsageError(f"--theta needs two values for g1, got {len(theta)}")
        synth = gen_g1_session(theta, args.n, args.sigma, seed)
    else:
        synth = gen_infomax_like(args.n, args.sigma, seed)
    out = write_synthetic(synth, cfg["out_dir"])
    print(f"wrote {synth.kind} session (n={args.n}, sigma={args.sigma}, seed={seed}) to {out}")
    return 0


def cmd_ingest_check(args) -> int:
    cfg = resolve_config(args)
    if not cfg["data_dir"]:
        raise UsageError("--data is required")
    raw = load_session(cfg["data_dir"])
    aligned = align(raw)
    summary = {
        "participant_id": raw.participant_id,
        "channels": {
            name: {"sample_rate_hz": ch.sample_rate_hz, "n": int(ch.values.size), "t0": ch.t0, "t_end": ch.t_end}
            for name, ch in sorted(raw.channels.items())
        },
        "aligned": {"rate_hz": aligned.rate_hz, "n": len(aligned), "t_start": aligned.t_start},
        "warnings": raw.warnings,
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="senc", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"senc {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, data=True):
        if data:
            p.add_argument("--data", help="session directory or zip archive")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, help="random seed (default: $SENC_SEED or 0)")
        p.add_argument("--config", help="JSON config file")

    def fitting(p):
        p.add_argument("--w-penalty", type=float, help="LNP penalty weight")
        p.add_argument("--target-mode", choices=[m.value for m in TargetMode])

    p = sub.add_parser("fit", help="fit one (model, p) pair")
    common(p)
    fitting(p)
    p.add_argument("--model", choices=MODELS, default="bec")
    p.add_argument("--p", type=float, default=2.0, help="error penalty, p > 0")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("sweep", help="fit every model over a p grid and write the MSE report")
    common(p)
    fitting(p)
    p.add_argument("--p-values", help="comma-separated p grid (default: 0.10 ... 2.00)")
    p.add_argument("--models", help="comma-separated subset of bec,fmc,lnp")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="write a synthetic session with known ground truth")
    common(p, data=False)
    p.add_argument("--kind", choices=["g1", "infomax"], default="g1")
    p.add_argument("--theta", default="1.5,-0.3", help="g1 parameters theta1,theta2")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--sigma", type=float, default=0.05)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest-check", help="load and align a session, print a summary")
    common(p)
    p.set_defaults(func=cmd_ingest_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"senc: error: {exc}", file=sys.stderr)
        return 2
    except (SencError, FileNotFoundError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
