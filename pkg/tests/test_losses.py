import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from senc.errors import FamilyMismatch, LengthMismatch, SeriesTooShort
from senc.losses import (
    LossKind,
    LossSpec,
    add_noise,
    loss_bec,
    loss_fmc,
    loss_lnp,
    loss_many,
    make_objective,
)
from senc.models import Family, ModelParams

BEC2 = LossSpec.make("bec", 2.0)


def G1(*t):
    return ModelParams(Family.G1, t)


def G2(*t):
    return ModelParams(Family.G2, t)


def lnp_oracle(theta, p, w, xs, ys):
    """Loop-by-loop reference for the LNP loss."""
    pts = sorted(zip(xs, ys), key=lambda pt: pt[0])
    g = [max(0.0, theta[0] * x * x + theta[1] * x + theta[2]) for x, _ in pts]
    data = sum(abs(y - gi) ** p for (_, y), gi in zip(pts, g))
    gap = abs(sum(y for _, y in pts) / len(pts) - sum(g) / len(g))
    curv = sum(abs(g[i + 1] - 2 * g[i] + g[i - 1]) for i in range(1, len(g) - 1))
    return data + w * (gap + curv)


def bec_oracle(theta, p, xs, ys, weighted=False):
    total = 0.0
    for x, y in zip(xs, ys):
        g = 0.5 * (1 + math.tanh(theta[0] * x + theta[1]))
        total += (abs(y) if weighted else 1.0) * abs(y - g) ** p
    return total


def test_spec_validation():
    with pytest.raises(ValueError):
        LossSpec(LossKind.BEC, 0.0)
    with pytest.raises(ValueError):
        LossSpec(LossKind.LNP, 1.0)  # needs a penalty weight
    with pytest.raises(ValueError):
        LossSpec(LossKind.BEC, 1.0, 0.1)
    assert LossSpec.make("lnp", 1.0).w_penalty == 0.1
    assert LossSpec.make("fmc", 1.0).w_penalty is None


# noise


def test_zero_noise_is_identity(rng):
    clean = rng.uniform(size=50)
    np.testing.assert_array_equal(add_noise(clean, 0.0, 3).y_noise, clean)


def test_noise_deterministic(rng):
    clean = rng.uniform(size=50)
    a, b = add_noise(clean, 0.05, 9), add_noise(clean, 0.05, 9)
    assert a.y_noise.tobytes() == b.y_noise.tobytes()
    assert add_noise(clean, 0.05, 10).y_noise.tobytes() != a.y_noise.tobytes()


def test_noise_moments():
    eps = add_noise(np.zeros(100_000), 0.05, 1234).y_noise
    assert abs(eps.mean()) < 0.001
    assert abs(eps.std() - 0.05) < 0.002


# BEC / FMC


@pytest.mark.parametrize("p", [0.1, 0.73, 1.0, 2.0])
def test_bec_perfect_fit(rng, p):
    x = rng.normal(size=40)
    theta = G1(1.3, -0.2)
    y = 0.5 * (1 + np.tanh(1.3 * x - 0.2))
    assert loss_bec(theta, LossSpec.make("bec", p), x, y) == 0.0


def test_bec_single_point():
    assert loss_bec(G1(1, 0), LossSpec.make("bec", 2), [0.0], [1.0]) == pytest.approx(abs(1 - 0.5) ** 2)
    assert loss_bec(G1(1, 0), LossSpec.make("bec", 2), [0.0], [1.0]) == pytest.approx(0.25)
    assert loss_bec(G1(1, 0), LossSpec.make("bec", 1), [0.0], [1.0]) == pytest.approx(0.5)


def test_fmc_zero_weights(rng):
    x = rng.normal(size=30)
    assert loss_fmc(G1(0.4, 1.1), LossSpec.make("fmc", 0.52), x, np.zeros(30)) == 0.0


def test_fmc_single_point():
    expected = 0.8 * (0.8 - 0.5) ** 2
    assert loss_fmc(G1(1, 0), LossSpec.make("fmc", 2), [0.0], [0.8]) == pytest.approx(expected)
    assert loss_fmc(G1(1, 0), LossSpec.make("fmc", 2), [0.0], [0.8]) == pytest.approx(0.072)


@pytest.mark.parametrize("kind", ["bec", "fmc"])
@pytest.mark.parametrize("p", [0.1, 0.94, 2.0])
def test_g1_losses_match_loop_oracle(rng, kind, p):
    x, y = rng.normal(size=60), rng.uniform(size=60)
    theta = (0.7, 0.2)
    got = (loss_bec if kind == "bec" else loss_fmc)(G1(*theta), LossSpec.make(kind, p), x, y)
    assert got == pytest.approx(bec_oracle(theta, p, x, y, weighted=kind == "fmc"), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.1, 2.0))
def test_fmc_equals_bec_for_unit_responses(seed, p):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=25)
    y = rng.choice([-1.0, 1.0], size=25)
    theta = G1(*rng.uniform(-2, 2, size=2))
    bec = loss_bec(theta, LossSpec.make("bec", p), x, y)
    fmc = loss_fmc(theta, LossSpec.make("fmc", p), x, y)
    assert fmc == pytest.approx(bec, rel=1e-12, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.1, 2.0))
def test_fmc_terms_below_bec_terms(seed, p):
    rng = np.random.default_rng(seed)
    x, y = rng.normal(size=20), rng.uniform(size=20)
    theta = G1(*rng.uniform(-2, 2, size=2))
    for xi, yi in zip(x, y):
        b = loss_bec(theta, LossSpec.make("bec", p), [xi], [yi])
        f = loss_fmc(theta, LossSpec.make("fmc", p), [xi], [yi])
        assert 0 <= f <= b + 1e-15


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        loss_bec(G1(1, 0), BEC2, [0.0, 1.0], [0.5])


def test_family_checked():
    with pytest.raises(FamilyMismatch):
        loss_bec(G2(1, 0, 0), BEC2, [0.0], [0.5])


def _bec2_grad_theta2(theta1, theta2, x, y):
    # d/dtheta2 sum (y - g)^2 with g' = 0.5 * sech^2(theta1 x + theta2)
    u = theta1 * x + theta2
    g = 0.5 * (1 + np.tanh(u))
    return float(np.sum(-2 * (y - g) * 0.5 / np.cosh(u) ** 2))


@pytest.mark.parametrize("theta2", [-1.0, -0.3, 0.0, 0.4, 1.2])
def test_bec_finite_difference_gradient(rng, theta2):
    theta1 = 0.8
    x = rng.uniform(-2, 2, size=200)  # keeps |theta1 x + theta2| < 3
    y = rng.uniform(size=200)
    f = lambda t2: loss_bec(G1(theta1, t2), BEC2, x, y)  # noqa: E731
    h = 1e-5
    fd = (f(theta2 + h) - f(theta2 - h)) / (2 * h)
    assert fd == pytest.approx(_bec2_grad_theta2(theta1, theta2, x, y), rel=1e-4)


# LNP


@pytest.mark.parametrize("p", [0.1, 1.0, 2.0])
@pytest.mark.parametrize("w", [0.0, 0.1, 3.0])
def test_lnp_constant_perfect_fit(rng, p, w):
    x = rng.normal(size=30)
    assert loss_lnp(G2(0, 0, 0.7), LossSpec.make("lnp", p, w), x, np.full(30, 0.7)) == 0.0


def test_lnp_three_points():
    spec = LossSpec.make("lnp", 2.0, 0.1)
    expected = lnp_oracle((1, 0, 0), 2.0, 0.1, [-1, 0, 1], [0, 0, 0])
    assert expected == pytest.approx(2 + 0.1 * (2 / 3 + 2))
    assert loss_lnp(G2(1, 0, 0), spec, [-1, 0, 1], [0, 0, 0]) == pytest.approx(expected, abs=1e-12)
    assert loss_lnp(G2(1, 0, 0), spec, [-1, 0, 1], [0, 0, 0]) == pytest.approx(2.26667, abs=1e-5)


def test_lnp_without_penalty(rng):
    x, y = rng.normal(size=50), rng.uniform(size=50)
    theta = (0.3, -0.5, 0.2)
    g = np.maximum(0, 0.3 * x**2 - 0.5 * x + 0.2)
    assert loss_lnp(G2(*theta), LossSpec.make("lnp", 1.37, 0.0), x, y) == pytest.approx(np.sum(np.abs(y - g) ** 1.37))


@pytest.mark.parametrize("p", [0.1, 0.94, 2.0])
def test_lnp_matches_loop_oracle(rng, p):
    x, y = rng.normal(size=80), rng.uniform(size=80)
    theta = (-0.4, 0.6, 0.3)
    got = loss_lnp(G2(*theta), LossSpec.make("lnp", p, 0.1), x, y)
    assert got == pytest.approx(lnp_oracle(theta, p, 0.1, x, y), rel=1e-12)


def test_lnp_too_short():
    with pytest.raises(SeriesTooShort):
        loss_lnp(G2(1, 0, 0), LossSpec.make("lnp", 2.0), [0.0, 1.0], [0.0, 0.0])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31))
def test_lnp_permutation_invariant(seed):
    rng = np.random.default_rng(seed)
    x, y = rng.normal(size=40), rng.uniform(size=40)
    theta = G2(*rng.uniform(-2, 2, size=3))
    spec = LossSpec.make("lnp", float(rng.uniform(0.1, 2)), 0.1)
    perm = rng.permutation(40)
    assert loss_lnp(theta, spec, x[perm], y[perm]) == pytest.approx(loss_lnp(theta, spec, x, y), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from(["bec", "fmc", "lnp"]))
def test_losses_nonnegative(seed, kind):
    rng = np.random.default_rng(seed)
    spec = LossSpec.make(kind, float(rng.uniform(0.1, 2)))
    theta = rng.uniform(-2, 2, size=spec.family.n_params)
    x, y = rng.normal(size=30), rng.uniform(size=30)
    assert loss_many(spec, theta, x, y)[0] >= 0


@pytest.mark.parametrize("kind", ["bec", "fmc", "lnp"])
def test_batched_matches_single(rng, kind):
    spec = LossSpec.make(kind, 0.73)
    x, y = rng.normal(size=100), rng.uniform(size=100)
    thetas = rng.uniform(-2, 2, size=(17, spec.family.n_params))
    objective = make_objective(spec, x, y)
    np.testing.assert_allclose(loss_many(spec, thetas, x, y), [objective(t) for t in thetas], rtol=1e-12)
