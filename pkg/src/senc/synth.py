"""Synthetic sessions with a known generating response, for recovery and trend checks."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .eda import standardize
from .ingest import AlignedSession, DEFAULT_RATE_HZ, write_session
from .losses import LossSpec, add_noise
from .models import Family, ModelParams, eval_g1, infomax_response
from .optimizer import grid_oracle

MIN_SAMPLES = 10
GSR_BASELINE = 5.0  # microsiemens
# plausible walking speeds in m/s; only the standardized stimulus matters downstream
SPEED_MEAN, SPEED_SD = 1.2, 0.3


@dataclass
class SyntheticSession:
    session: AlignedSession
    theta_star: ModelParams
    sigma: float
    seed: int
    y: np.ndarray
    clamped_fraction: float
    kind: str = "g1"

    @property
    def x_std(self) -> np.ndarray:
        return standardize(self.session.speed).x_std

    def truth(self) -> dict:
        return {
            "kind": self.kind,
            "theta_star": list(self.theta_star.theta),
            "sigma": self.sigma,
            "seed": self.seed,
            "n": int(self.y.size),
            "clamped_fraction": self.clamped_fraction,
        }


def _streams(seed: int) -> tuple[np.random.Generator, int]:
    """Independent stimulus generator and noise seed derived from one user seed."""
    stim, noise = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(stim), int(noise.generate_state(1)[0])


def _stimulus(rng: np.random.Generator, n: int) -> np.ndarray:
    # exact z-scoring makes the pipeline's own standardization a no-op on x
    return standardize(rng.standard_normal(n)).x_std


def _package(x, y, participant_id: str) -> AlignedSession:
    n = x.size
    return AlignedSession(
        participant_id=participant_id,
        rate_hz=DEFAULT_RATE_HZ,
        t=np.arange(n) / DEFAULT_RATE_HZ,
        speed=SPEED_MEAN + SPEED_SD * x,
        gsr=GSR_BASELINE + y,
    )


def _noisy_clamped(clean, sigma: float, noise_seed: int) -> tuple[np.ndarray, float]:
    noisy = add_noise(clean, sigma, noise_seed).y_noise
    y = np.clip(noisy, 0.0, 1.0)
    return y, float(np.mean(noisy != y))


def _check(n: int, sigma: float) -> None:
    if n < MIN_SAMPLES:
        raise ValueError(f"n must be >= {MIN_SAMPLES}, got {n}")
    if not sigma >= 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")


def gen_g1_session(theta_star: ModelParams, n: int, sigma: float = 0.05, seed: int = 0) -> SyntheticSession:
    """Response ``clamp(g1(x; theta_star) + noise, 0, 1)`` to a standard-normal stimulus."""
    _check(n, sigma)
    if not isinstance(theta_star, ModelParams):
        theta_star = ModelParams(Family.G1, theta_star)
    rng, noise_seed = _streams(seed)
    x = _stimulus(rng, n)
    y, clamped = _noisy_clamped(eval_g1(x, theta_star), sigma, noise_seed)
    session = _package(x, y, f"synth-g1-{seed}")
    return SyntheticSession(session, theta_star, float(sigma), seed, y, clamped, kind="g1")


def gen_infomax_like(n: int, sigma: float = 0.05, seed: int = 0) -> SyntheticSession:
    """Response equal to the stimulus's own empirical CDF plus clamped noise.

    ``theta_star`` is the best sigmoid on a 41-point grid (p = 2) for the
    noise-free CDF, kept for reference and for simulated-target sweeps.
    """
    _check(n, sigma)
    rng, noise_seed = _streams(seed)
    x = _stimulus(rng, n)
    cdf = infomax_response(x, x)
    y, clamped = _noisy_clamped(cdf, sigma, noise_seed)
    theta_star = grid_oracle(LossSpec.make("bec", 2.0), (x, cdf), 41, (-2.0, 2.0)).params
    session = _package(x, y, f"synth-infomax-{seed}")
    return SyntheticSession(session, theta_star, float(sigma), seed, y, clamped, kind="infomax")


def write_synthetic(synth: SyntheticSession, out_dir) -> Path:
    """Write the session in the ingest directory layout plus ``truth.json``."""
    out = write_session(synth.session, out_dir)
    (out / "truth.json").write_text(json.dumps(synth.truth(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return out
