import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from senc.errors import FamilyMismatch, TooFewPoints
from senc.models import (
    EmpiricalCdf,
    Family,
    ModelParams,
    empirical_cdf_eval,
    empirical_nonlinearity,
    eval_g1,
    eval_g2,
    infomax_response,
    write_curve_csv,
)

G1 = lambda *t: ModelParams(Family.G1, t)  # noqa: E731
G2 = lambda *t: ModelParams(Family.G2, t)  # noqa: E731


def test_params_length_checked():
    with pytest.raises(ValueError):
        ModelParams(Family.G1, (1.0, 2.0, 3.0))
    with pytest.raises(ValueError):
        ModelParams(Family.G2, (1.0, float("nan"), 0.0))


def test_g1_values():
    assert eval_g1(0.0, G1(1, 0)) == 0.5
    assert eval_g1(1.0, G1(1, 0)) == pytest.approx(0.5 * (1 + math.tanh(1.0)), abs=1e-15)
    assert eval_g1(1.0, G1(1, 0)) == pytest.approx(0.880797, abs=1e-6)
    assert eval_g1(100.0, G1(1, 0)) > 1 - 1e-12


def test_g2_values():
    assert eval_g2(2.0, G2(1, 0, 0)) == 4.0
    assert eval_g2(-1.0, G2(0, 1, 0)) == 0.0
    np.testing.assert_array_equal(eval_g2(np.linspace(-5, 5, 11), G2(0, 0, -1)), 0.0)


def test_family_mismatch():
    with pytest.raises(FamilyMismatch):
        eval_g1(0.0, G2(1, 0, 0))
    with pytest.raises(FamilyMismatch):
        eval_g2(0.0, G1(1, 0))


@settings(max_examples=100, deadline=None)
@given(x=st.floats(-20, 20), t1=st.floats(-5, 5))
def test_g1_symmetry_and_range(x, t1):
    a = eval_g1(x, G1(t1, 0.0))
    b = eval_g1(-x, G1(t1, 0.0))
    assert a + b == pytest.approx(1.0, abs=1e-12)
    # strictly inside (0, 1) wherever tanh has not rounded to +-1
    if abs(t1 * x) < 18:
        assert 0 < a < 1


@settings(max_examples=100, deadline=None)
@given(x=st.floats(-10, 10), t=st.tuples(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3)))
def test_g2_rectified_quadratic(x, t):
    q = t[0] * x * x + t[1] * x + t[2]
    v = eval_g2(x, G2(*t))
    assert v >= 0
    if q >= 0:
        assert v == pytest.approx(q, abs=1e-12)


# empirical CDF / Infomax


def test_cdf_steps():
    cdf = EmpiricalCdf.from_samples([1, 2, 3, 4])
    assert empirical_cdf_eval(cdf, 2.5) == 0.5
    assert empirical_cdf_eval(cdf, 4) == 1.0
    assert empirical_cdf_eval(cdf, 0) == 0.0


def test_infomax_at_own_samples():
    np.testing.assert_allclose(infomax_response([1, 2, 3, 4], [3, 1, 4, 2]), [0.25, 0.5, 0.75, 1.0])


def test_infomax_degenerate():
    np.testing.assert_array_equal(infomax_response([2.0, 3.0, 100.0], [2.0] * 5), 1.0)


def test_infomax_standard_normal_median():
    x = np.random.default_rng(11).standard_normal(10_000)
    phi0 = 0.5 * (1 + math.erf(0 / math.sqrt(2)))
    assert abs(infomax_response([0.0], x)[0] - phi0) < 0.02


@settings(max_examples=60, deadline=None)
@given(arrays(float, st.integers(1, 200), elements=st.floats(-1e3, 1e3)), st.lists(st.floats(-2e3, 2e3), min_size=2))
def test_cdf_monotone(samples, points):
    cdf = EmpiricalCdf.from_samples(samples)
    pts = np.sort(points)
    v = empirical_cdf_eval(cdf, pts)
    assert np.all(np.diff(v) >= 0)
    assert np.all((0 <= v) & (v <= 1))


@settings(max_examples=40, deadline=None)
@given(st.integers(10, 2000), st.integers(0, 2**31))
def test_probability_integral_transform(n, seed):
    x = np.random.default_rng(seed).standard_normal(n)
    u = infomax_response(x, x)
    assert u.mean() == pytest.approx((n + 1) / (2 * n), abs=1e-12)
    counts, _ = np.histogram(u, bins=10, range=(0, 1))
    # each bin holds ranks k with k/n in it: n/10 up to one rank of slack
    assert np.all(np.abs(counts - n / 10) <= 1)


# empirical nonlinearity


def test_binned_constant_response(rng):
    b = empirical_nonlinearity(rng.normal(size=103), np.full(103, 0.3), n_bins=5)
    np.testing.assert_allclose(b.bin_mean_y, 0.3)


def test_binned_identity_blocks():
    x = np.arange(1, 101, dtype=float)
    expected = [sum(range(lo, lo + 25)) / 25 for lo in (1, 26, 51, 76)]
    b = empirical_nonlinearity(x, x, n_bins=4)
    np.testing.assert_allclose(b.bin_mean_y, expected)
    np.testing.assert_allclose(b.bin_mean_y, [13, 38, 63, 88])
    assert list(b.bin_counts) == [25, 25, 25, 25]
    assert np.all(np.diff(b.bin_edges) > 0)


def test_binned_too_few():
    with pytest.raises(TooFewPoints):
        empirical_nonlinearity([1, 2, 3], [1, 2, 3], n_bins=5)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 30), st.integers(0, 300), st.integers(0, 2**31))
def test_binned_counts_sum(n_bins, extra, seed):
    n = n_bins + extra
    rng = np.random.default_rng(seed)
    b = empirical_nonlinearity(rng.normal(size=n), rng.uniform(size=n), n_bins)
    assert b.bin_counts.sum() == n
    assert np.all(b.bin_counts >= 1)
    assert b.bin_edges.size == n_bins + 1


def test_curve_csv(tmp_path):
    path = tmp_path / "c.csv"
    write_curve_csv(path, [0.0, 1.0], [0.5, 0.25])
    assert path.read_text() == "x,value\n0.000000,0.500000\n1.000000,0.250000\n"
