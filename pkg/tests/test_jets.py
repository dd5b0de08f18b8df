"""Truncated power series arithmetic against stdlib and numpy references."""

import math

import numpy as np
import pytest

from nlrogue import jets
from nlrogue.jets import Jet, NumericOverflowError


def test_constant_and_variable():
    c = Jet.constant(3.5, 4)
    assert c.coeffs == (3.5, 0.0, 0.0, 0.0, 0.0)
    assert c.order == 4
    v = Jet.variable(3, scale=2.0)
    assert v.coeffs == (0.0, 2.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        Jet.variable(0)


def test_constructor_guards():
    with pytest.raises(ValueError):
        Jet(())
    with pytest.raises(ValueError):
        Jet([0.0] * (jets.MAX_ORDER + 2))


def test_square_of_one_plus_eps():
    z = Jet((1.0, 1.0, 0.0))
    assert (z * z).coeffs == (1.0, 2.0, 1.0)


def test_mul_matches_truncated_convolution():
    rng = np.random.default_rng(7)
    for _ in range(20):
        a = rng.standard_normal(7) + 1j * rng.standard_normal(7)
        b = rng.standard_normal(7) + 1j * rng.standard_normal(7)
        got = (Jet(a) * Jet(b)).coeffs
        ref = np.convolve(a, b)[:7]
        assert np.allclose(got, ref, rtol=1e-14, atol=1e-14)


def test_add_sub_neg_and_scalar_mul():
    a = Jet((1.0, 2.0, 3.0))
    b = Jet((0.5, -1.0, 4.0))
    assert (a + b).coeffs == (1.5, 1.0, 7.0)
    assert (a - b).coeffs == (0.5, 3.0, -1.0)
    assert (-a).coeffs == (-1.0, -2.0, -3.0)
    assert (2.0 * a).coeffs == (2.0, 4.0, 6.0)
    assert (a * 2.0).coeffs == (2.0, 4.0, 6.0)


def test_order_mismatch_rejected():
    with pytest.raises(ValueError):
        Jet((1.0, 2.0)) + Jet((1.0, 2.0, 3.0))
    with pytest.raises(TypeError):
        Jet((1.0, 2.0))._matched(3.0)


def test_exp_of_pure_eps():
    z = Jet((0.0, 1.0, 0.0, 0.0))
    got = jets.exp(z).coeffs
    assert np.allclose(got, [1.0, 1.0, 0.5, 1.0 / 6.0], rtol=1e-15)


def test_exp_factors_out_constant():
    z = Jet((2.0, 1.0))
    got = jets.exp(z).coeffs
    e2 = math.exp(2.0)
    assert np.allclose(got, [e2, e2], rtol=1e-15)


def test_exp_overflow_raises():
    with pytest.raises(NumericOverflowError) as exc:
        jets.exp(Jet((800.0, 1.0)))
    assert exc.value.exponent == 800.0


def test_apply_entire_needs_zero_constant():
    with pytest.raises(ValueError):
        jets.apply_entire(jets.exp_term, Jet((1.0, 1.0)))


def test_series_terms_against_factorials():
    for k in range(9):
        assert jets.exp_term(k) == pytest.approx(1.0 / math.factorial(k), rel=1e-15)
        sgn = -1.0 if k % 2 else 1.0
        assert jets.cos_square_term(k) == pytest.approx(
            sgn / math.factorial(2 * k), rel=1e-15
        )
        assert jets.sinc_square_term(k) == pytest.approx(
            sgn / math.factorial(2 * k + 1), rel=1e-15
        )


def test_entire_series_reproduce_cos_and_sinc():
    # cos(sqrt(w)) and sin(sqrt(w))/sqrt(w) evaluated through the jet series
    # at a numeric argument: sum the truncated series at w = z^2.
    z = 0.3
    w = Jet((0.0, z * z, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0))
    cosj = jets.apply_entire(jets.cos_square_term, w)
    sincj = jets.apply_entire(jets.sinc_square_term, w)
    assert sum(cosj.coeffs) == pytest.approx(math.cos(z), abs=1e-15)
    assert sum(sincj.coeffs) == pytest.approx(math.sin(z) / z, abs=1e-15)


def test_array_valued_coefficients():
    xs = np.linspace(-1.0, 1.0, 5)
    z = Jet((np.zeros(5), xs, np.zeros(5)))
    got = jets.exp(z)
    assert np.allclose(got.coeffs[0], 1.0)
    assert np.allclose(got.coeffs[1], xs)
    assert np.allclose(got.coeffs[2], xs * xs / 2.0)
