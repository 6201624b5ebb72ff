from fractions import Fraction

import numpy as np
import pytest

from slicelab.bitcore import DimensionError, character_table
from slicelab.gowers import (
    BudgetExceeded,
    GowersEstimate,
    derivative,
    gowers_norm_bruteforce,
    gowers_norm_exact,
    gowers_norm_mc,
    weight_symmetric,
)
from slicelab.slicemodel import dense_model_difference

from oracles import dense_model_by_weight, symmetric_u2_pow


def test_derivative_of_character_is_constant():
    chi = character_table(0b0110, 4)
    for h in range(16):
        d = derivative(chi, h)
        assert np.all(d == chi[h])


def test_derivative_at_zero_is_square():
    f = np.arange(8, dtype=float) - 3
    np.testing.assert_array_equal(derivative(f, 0), f**2)


def test_derivative_disjoint_supports():
    f = np.zeros(16)
    f[0] = 1
    np.testing.assert_array_equal(derivative(f, 0b0001), np.zeros(16))


def test_derivative_conjugates():
    f = np.exp(2j * np.pi * np.arange(4) / 4)
    d = derivative(f, 1)
    np.testing.assert_allclose(d, np.conj(f[[1, 0, 3, 2]]) * f)


def test_derivative_dimension_mismatch():
    with pytest.raises(DimensionError):
        derivative(np.ones(4), 0b100)


def test_derivatives_commute_exactly_on_integer_tables():
    rng = np.random.default_rng(0)
    f = rng.integers(-3, 4, 64).astype(float)
    for a, b in [(1, 2), (5, 12), (63, 7)]:
        np.testing.assert_array_equal(derivative(derivative(f, a), b), derivative(derivative(f, b), a))


@pytest.mark.parametrize("s", [1, 2, 3, 4])
def test_constant_one(s):
    est = gowers_norm_exact(np.ones(16), s)
    assert est.value == 1 and est.value_pow == 1 and est.mode == "exact"


def test_character_u2_is_one():
    assert gowers_norm_exact(character_table(0b101, 5), 2).value == 1


def test_u1_is_abs_mean():
    f = np.array([1.0, -3.0, 0.5, 0.5])
    est = gowers_norm_exact(f, 1)
    assert est.value == pytest.approx(0.25)
    assert est.value_pow == pytest.approx(0.0625)


def test_dense_model_u1_vanishes():
    assert gowers_norm_exact(dense_model_difference(8, 2), 1).value < 1e-14


def test_u2_fourier_matches_bruteforce():
    rng = np.random.default_rng(1)
    for _ in range(10):
        f = rng.normal(size=64)
        a = gowers_norm_exact(f, 2).value_pow
        b = gowers_norm_bruteforce(f, 2)
        assert a == pytest.approx(b, rel=1e-10)


def test_u3_recursion_matches_bruteforce():
    rng = np.random.default_rng(2)
    for _ in range(3):
        f = rng.normal(size=16)
        assert gowers_norm_exact(f, 3).value_pow == pytest.approx(gowers_norm_bruteforce(f, 3), rel=1e-10)


def test_complex_u2_matches_bruteforce():
    rng = np.random.default_rng(3)
    f = rng.normal(size=16) + 1j * rng.normal(size=16)
    assert gowers_norm_exact(f, 2).value_pow == pytest.approx(gowers_norm_bruteforce(f, 2).real, rel=1e-10)


def test_monotone_in_order():
    rng = np.random.default_rng(4)
    for _ in range(20):
        f = rng.uniform(-1, 1, 256)
        u1, u2, u3 = (gowers_norm_exact(f, s).value for s in (1, 2, 3))
        assert u1 <= u2 + 1e-9 and u2 <= u3 + 1e-9


def test_pm1_functions_have_norm_at_most_one():
    # every +-1 table on {0,1}^2
    for bits in range(16):
        f = np.array([1.0 - 2 * (bits >> i & 1) for i in range(4)])
        u2 = gowers_norm_exact(f, 2).value
        assert u2 <= 1 + 1e-12
        is_char = any(np.array_equal(f, c * character_table(s, 2)) for s in range(4) for c in (1, -1))
        assert (abs(u2 - 1) < 1e-12) == is_char


def test_pm1_exhaustive_dim4_vectorized():
    from slicelab.fourier import wht_unnormalized

    bits = np.arange(1 << 16)[:, None] >> np.arange(16)[None, :] & 1
    tables = 1 - 2 * bits
    spec = wht_unnormalized(tables, axis=1) / 16
    u2pow = (spec.astype(float) ** 4).sum(axis=1)
    # encode each signed character as the integer whose bit x is set where it equals -1
    codes = set()
    for sub in range(16):
        neg = (character_table(sub, 4) < 0).astype(int)
        for c in (neg, 1 - neg):
            codes.add(int((c << np.arange(16)).sum()))
    is_char = np.isin(np.arange(1 << 16), sorted(codes))
    assert np.all(u2pow <= 1 + 1e-12)
    np.testing.assert_array_equal(np.isclose(u2pow, 1, atol=1e-12), is_char)
    assert is_char.sum() == 32


def test_dense_model_u2_matches_krawtchouk_oracle():
    expected = {8: Fraction(166, 6125), 12: Fraction(123922, 12326391)}
    for m, val in expected.items():
        assert symmetric_u2_pow(m, dense_model_by_weight(m, 2)) == val
        assert gowers_norm_exact(dense_model_difference(m, 2), 2).value_pow == pytest.approx(float(val), rel=1e-12)


def test_symmetric_shortcut_matches_full_recursion():
    for m, k in [(6, 3), (8, 3), (8, 2)]:
        f = dense_model_difference(m, k)
        assert weight_symmetric(f)
        full = gowers_norm_exact(f, 3).value_pow
        fast = gowers_norm_exact(f, 3, symmetric=True).value_pow
        assert fast == pytest.approx(full, rel=1e-12)


def test_weight_symmetric_detects_asymmetry():
    assert not weight_symmetric(character_table(1, 3))
    assert weight_symmetric(character_table(7, 3))


def test_budget_error_points_to_mc():
    with pytest.raises(BudgetExceeded, match="gowers_norm_mc"):
        gowers_norm_exact(np.ones(1 << 16), 3)


def test_mc_trivial_cases():
    est = gowers_norm_mc(np.ones(64), 3, samples=50, seed=1)
    assert est.value_pow == 1 and est.ci_radius == 0 and est.mode == "monte-carlo"
    est = gowers_norm_mc(character_table(0b1011, 6), 4, samples=30, seed=2)
    assert est.value_pow == 1


def test_mc_is_deterministic_and_thread_independent():
    f = dense_model_difference(10, 3)
    a = gowers_norm_mc(f, 3, 300, seed=7, threads=1)
    b = gowers_norm_mc(f, 3, 300, seed=7, threads=4)
    assert a == b
    assert gowers_norm_mc(f, 3, 300, seed=8) != a


def test_mc_matches_exact_within_ci():
    f = dense_model_difference(12, 3)
    exact = gowers_norm_exact(f, 3, symmetric=True).value_pow
    est = gowers_norm_mc(f, 3, 4096, seed=0)
    assert abs(est.value_pow - exact) <= 3 * est.ci_radius
    assert est.ci_radius == pytest.approx(1.959963984540054 * est.std_error)


def test_mc_rejects_low_order():
    with pytest.raises(ValueError):
        gowers_norm_mc(np.ones(4), 2, 10)


def test_threads_do_not_change_exact():
    f = np.random.default_rng(9).normal(size=256)
    assert gowers_norm_exact(f, 3, threads=1) == gowers_norm_exact(f, 3, threads=4)


def test_clipped_flag():
    from slicelab.gowers import _estimate

    est = _estimate(3, -1e-6, "monte-carlo", 10, 0, 1e-5)
    assert est.clipped and est.value == 0
    assert isinstance(est, GowersEstimate)
