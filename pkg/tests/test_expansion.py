"""Coefficient tables, jet route, and seed-vector handling.

The binomial tables and the jet propagators are two independent routes to
the same Taylor data; their agreement is the core correctness argument, so
this file pins hand-derived values on top of the route comparison."""

import numpy as np
import pytest
from scipy.linalg import expm

from nlrogue.expansion import (
    Generating,
    WaveSpec,
    expansion_vectors,
    generating_coefficients,
    generating_wave,
    propagator_jets,
    scalar_wave,
    series_matrices,
    series_tables,
    taylor_monomial,
    vector_wave,
    wave_omegas,
)
from nlrogue.jets import NumericOverflowError
from nlrogue.laxcore import SpectralSetup, flow_generators


def test_taylor_monomial_values():
    assert taylor_monomial("A", 2, 1.0, 2.0) == pytest.approx(2.0)
    assert taylor_monomial("B", 3, 1.0, 1.0) == pytest.approx(4.0 / 3.0)
    assert taylor_monomial("A", -1, 1.0, 2.0) == 0.0
    with pytest.raises(ValueError):
        taylor_monomial("C", 0, 1.0, 1.0)


def test_table_leading_entries():
    rng = np.random.default_rng(3)
    for _ in range(6):
        rho = float(rng.uniform(0.3, 2.0))
        x = float(rng.uniform(-2, 2))
        t = float(rng.uniform(-2, 2))
        tb = series_tables(2, rho, np.asarray(x), np.asarray(t))
        assert tb.alpha[0] == pytest.approx(1.0, abs=1e-15)
        assert tb.gamma[0] == pytest.approx(1.0, abs=1e-15)
        assert tb.beta[0] == pytest.approx(rho * x, rel=1e-14)
        assert tb.theta[0] == pytest.approx(2 * rho**2 * t, rel=1e-14)


def test_table_anchors_at_unit_arguments():
    tb = series_tables(2, 1.0, np.asarray(1.0), np.asarray(1.0))
    assert tb.alpha[1] == pytest.approx(1.0, rel=1e-14)
    assert tb.alpha[2] == pytest.approx(2.0 / 3.0, rel=1e-14)
    assert tb.beta[1] == pytest.approx(1.0 / 3.0, rel=1e-14)
    assert tb.gamma[1] == pytest.approx(-4.0, rel=1e-14)
    assert tb.theta[1] == pytest.approx(-2.0 / 3.0, rel=1e-14)


def test_third_component_families():
    tb = series_tables(3, 1.0, np.asarray(1.0), np.asarray(1.0), dim=3)
    # x family is (rho x)^n / n!; t family starts 1, 4i, -8+2i.
    assert np.allclose(tb.a3, [1.0, 1.0, 0.5, 1.0 / 6.0], rtol=1e-14)
    assert np.allclose(tb.rho3[:3], [1.0, 4j, -8 + 2j], rtol=1e-13)


def test_degenerate_matrices_at_order_zero():
    s = SpectralSetup(1.0, 2)
    tb = series_tables(2, 1.0, np.asarray(1.0), np.asarray(1.0))
    R0, E0 = series_matrices(s, 0, tb)
    assert np.allclose(R0, [[0.0, -1.0], [1.0, 2.0]], atol=1e-14)
    assert np.allclose(E0, [[1 - 2j, -2j], [2j, 1 + 2j]], atol=1e-14)


def test_matrix_entries_carry_the_families():
    s = SpectralSetup(1.4, 2)
    tb = series_tables(4, 1.4, np.asarray(0.7), np.asarray(-0.4))
    for n in range(5):
        Rn, En = series_matrices(s, n, tb)
        assert Rn[..., 0, 1] == pytest.approx(-tb.beta[n], rel=1e-13)
        assert Rn[..., 1, 0] == pytest.approx(tb.beta[n], rel=1e-13)
        assert complex(En[..., 0, 1]) == pytest.approx(-1j * tb.theta[n], rel=1e-13)
        assert complex(En[..., 1, 0]) == pytest.approx(1j * tb.theta[n], rel=1e-13)
        assert Rn[..., 0, 0] + Rn[..., 1, 1] == pytest.approx(2 * tb.alpha[n], rel=1e-13)


def test_tables_match_jets_on_a_grid():
    rng = np.random.default_rng(5)
    xs = rng.uniform(-2, 2, 6)
    ts = rng.uniform(-1.5, 1.5, 6)
    for dim in (2, 3):
        rho = 1.15
        s = SpectralSetup(rho, dim)
        tb = series_tables(6, rho, xs, ts, dim=dim)
        R, E = propagator_jets(s, xs, ts, 6)
        for n in range(7):
            Rn, En = series_matrices(s, n, tb)
            for i in range(dim):
                for j in range(dim):
                    assert np.allclose(Rn[..., i, j], R[i][j].coeffs[n], rtol=1e-10, atol=1e-13)
                    assert np.allclose(En[..., i, j], E[i][j].coeffs[n], rtol=1e-10, atol=1e-13)


def test_generating_coefficients_match_cauchy_integral():
    # Independent reference: sample exp(i theta x0) exp(i omega t0) l on a
    # circle around the dressing point and extract Taylor terms by DFT.
    setup = SpectralSetup(1.3, 3)
    l = (2.0, 1j, 0.5)
    r = (0.3, 0.1)
    s = (0.2, -0.4, 0.05)
    n_max = 6
    got = generating_coefficients(setup, l, r, s, n_max)

    m, rad = 64, 0.25
    eps = rad * np.exp(2j * np.pi * np.arange(m) / m)
    samples = np.zeros((m, 3), dtype=complex)
    for i, e in enumerate(eps):
        th, om = flow_generators(setup, 1j * setup.rho * (1 + e))
        x0 = sum(c * e**j for j, c in enumerate(r))
        t0 = sum(c * e**j for j, c in enumerate(s))
        samples[i] = expm(1j * th * x0) @ expm(1j * om * t0) @ np.array(l, dtype=complex)
    for n in range(n_max + 1):
        ref = (samples * eps[:, None] ** (-n)).mean(axis=0)
        assert np.allclose(got[n], ref, rtol=1e-10, atol=1e-12)


def test_generating_requires_three_components():
    with pytest.raises(ValueError):
        generating_coefficients(SpectralSetup(1.0, 2), (1.0, 0.0), (), (), 2)


def test_wave_spec_validation():
    with pytest.raises(ValueError):
        scalar_wave(1.0, 0, [(1, 0)])
    with pytest.raises(ValueError):
        scalar_wave(1.0, 11, [(1, 0)])
    with pytest.raises(ValueError):
        scalar_wave(1.0, 1, [(0, 0)])
    with pytest.raises(ValueError):
        scalar_wave(1.0, 1, [(1, 0, 0)])
    with pytest.raises(ValueError):
        WaveSpec(SpectralSetup(1.0, 2), 1)
    with pytest.raises(ValueError):
        WaveSpec(
            SpectralSetup(1.0, 2),
            1,
            omega=((1.0, 0.0),),
            generating=Generating((1.0, 0.0, 0.0)),
        )
    with pytest.raises(ValueError):
        generating_wave(1.0, 1, (0, 0, 0))
    with pytest.raises(ValueError):
        WaveSpec(SpectralSetup(1.0, 2), 1, None, Generating((1.0, 0.0, 0.0)))


def test_wave_omegas_pads_with_zeros():
    spec = scalar_wave(1.0, 3, [(1, 2j)])
    ws = wave_omegas(spec)
    assert len(ws) == 4
    assert np.allclose(ws[0], [1, 2j])
    for w in ws[1:]:
        assert np.allclose(w, 0.0)


def test_expansion_vectors_two_routes_agree():
    specs = (
        scalar_wave(1.0, 3, [(1, 2j), (0.3, -1j), (0, 0), (2, 0.5j)]),
        vector_wave(1.7, 2, [(1, 2j, 1j), (0, 1000j, 0)]),
        generating_wave(0.9, 2, (2.0, 1j, 0.5), r=(0.3,), s=(0.2, -0.4)),
    )
    rng = np.random.default_rng(17)
    xs = rng.uniform(-2, 2, 5)
    ts = rng.uniform(-1.5, 1.5, 5)
    for spec in specs:
        a = expansion_vectors(spec, xs, ts, path="table")
        b = expansion_vectors(spec, xs, ts, path="jet")
        assert a.shape == (spec.order + 1, 5, spec.setup.dim)
        assert np.allclose(a, b, rtol=1e-9, atol=1e-12)
    with pytest.raises(ValueError):
        expansion_vectors(specs[0], 0.0, 0.0, path="nope")


def test_huge_shift_overflows_loudly():
    setup = SpectralSetup(1.0, 3)
    with pytest.raises(NumericOverflowError):
        generating_coefficients(setup, (1.0, 0.0, 0.0), (800.0,), (), 2)
