"""Verification harness: samplers, order fits, census, and the residual
machinery itself (tested on synthetic data wherever that is sharper)."""

import numpy as np
import pytest

from nlrogue.expansion import scalar_wave
from nlrogue.fields import Field, FieldGrid
from nlrogue.verify import (
    MIN_ORDER,
    PoleCensus,
    _order_estimate,
    background_check,
    dressing_agreement,
    dt_covariance_check,
    halton_points,
    lax_check,
    nonlocality_witness,
    normalized_residual,
    pde_residual,
    pole_census,
    radial_bands,
    residual_report,
)
from nlrogue.laxcore import SpectralSetup

FIG1 = scalar_wave(1.0, 1, [(1, 2j)])


def test_halton_points_deterministic_and_in_window():
    a = halton_points(40, (-2.0, 3.0, -1.0, 4.0))
    b = halton_points(40, (-2.0, 3.0, -1.0, 4.0))
    xs, ts = a
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    assert xs.min() >= -2.0 and xs.max() <= 3.0
    assert ts.min() >= -1.0 and ts.max() <= 4.0
    assert len(np.unique(xs)) == 40


def test_order_estimate_recovers_clean_fourth_order():
    h = np.array([4e-3, 2e-3, 1e-3])
    res = np.outer(h**4, np.array([2.0, 5.0, 1.0]))
    got = _order_estimate(h, res)
    assert got == pytest.approx(4.0, abs=1e-10)


def test_order_estimate_floor_regime_reports_converged():
    h = np.array([4e-3, 2e-3, 1e-3])
    # roundoff-dominated: residuals grow as h shrinks but sit far under cap
    res = np.outer(1.0 / h**2, np.array([1e-17, 2e-17]))
    got = _order_estimate(h, res, small_cap=1e-9)
    assert got == float("inf")


def test_order_estimate_respects_floors():
    h = np.array([4e-3, 2e-3, 1e-3])
    res = np.outer(h**4, np.array([1.0]))
    floors = np.full_like(res, 1e-3)  # everything below the claimed noise
    got = _order_estimate(h, res, floors=floors, small_cap=1e-9)
    assert got == float("inf")


def test_order_estimate_empty_is_nan():
    assert np.isnan(_order_estimate(np.array([1e-3]), np.zeros((1, 0))))


def test_normalized_residual_scaling():
    r = np.array([2.0])
    psi = np.array([[3.0 + 4j]])  # |psi| = 5
    got = normalized_residual(r, psi)
    assert got == pytest.approx(2.0 / (1.0 + 5.0 + 125.0))


def _synthetic_field(mag, pole_mask=None):
    nt, nx = mag.shape
    grid = FieldGrid(0.0, float(nx - 1), nx, 0.0, float(nt - 1), nt)
    values = mag[..., None].astype(complex)
    lvl = np.full(mag.shape, -1)
    if pole_mask is not None:
        lvl[pole_mask] = 0
    return Field(grid=grid, values=values, pole_level=lvl)


def test_census_four_connectivity():
    mag = np.zeros((7, 7))
    mag[1, 1] = 99.0
    mag[2, 2] = 99.0  # diagonal neighbor: separate cluster
    mag[4, 4] = 99.0
    mag[4, 5] = 99.0  # edge neighbor: same cluster
    c = pole_census(_synthetic_field(mag), threshold=10.0)
    assert c.n_clusters == 3
    sizes = sorted(cl.size for cl in c.clusters)
    assert sizes == [1, 1, 2]


def test_census_counts_flagged_and_nonfinite_cells():
    mag = np.zeros((5, 5))
    mag[2, 2] = np.nan
    pole = np.zeros((5, 5), dtype=bool)
    pole[0, 0] = True
    c = pole_census(_synthetic_field(mag, pole), threshold=10.0)
    assert c.n_clusters == 2


def test_census_bounded_peaks():
    mag = np.ones((9, 9))
    mag[4, 4] = 3.0  # bounded local max
    mag[1, 1] = 50.0  # singular
    mag[1, 2] = 4.0  # above floor but adjacent to the singular cell
    c = pole_census(_synthetic_field(mag), threshold=10.0, bounded_floor=2.0)
    assert c.n_clusters == 1
    assert c.n_bounded == 1
    pk = c.bounded[0]
    assert (pk.x, pk.t, pk.magnitude) == (4.0, 4.0, 3.0)


def test_census_plateau_counts_once():
    mag = np.ones((9, 9))
    mag[4, 4] = 3.0
    mag[4, 5] = 3.0  # two-cell plateau is one peak
    c = pole_census(_synthetic_field(mag), threshold=10.0, bounded_floor=2.0)
    assert c.n_bounded == 1


def test_radial_bands_split_at_largest_gap():
    mag = np.zeros((41, 41))
    # grid coordinates are (x, t) = (col, row) here; center (20, 20)
    for dx, dt in ((2, 0), (0, 2), (-2, 0), (12, 0), (0, -13)):
        mag[20 + dt, 20 + dx] = 99.0
    c = pole_census(_synthetic_field(mag), threshold=10.0)
    inner, outer = radial_bands(c, origin=(20.0, 20.0))
    assert (len(inner), len(outer)) == (3, 2)
    single = PoleCensus(10.0, c.clusters[:1], (), c.mask)
    assert radial_bands(single) == (c.clusters[:1], ())


def test_pde_residual_small_on_solution():
    r = pde_residual(FIG1, (0.37, -0.52))
    assert r < 1e-6
    # wrong update orientation must fail loudly
    r_bad = pde_residual(FIG1, (0.37, -0.52), sign=+1)
    assert r_bad > 1e-2


def test_residual_report_on_fig1():
    rep = residual_report(FIG1, (-4.0, 4.0, -4.0, 4.0), n_points=12)
    assert rep.passed
    assert rep.points.shape[0] >= 12
    assert rep.details["max_fine"] < 1e-4
    assert rep.estimated_order == float("inf") or rep.estimated_order >= MIN_ORDER


def test_lax_check_generic_and_degenerate():
    s = SpectralSetup(1.0, 2)
    for lam in (0.3 + 0.4j, 1j):
        rep = lax_check(s, lam, (1.0, 2j), n_points=6)
        assert rep.passed, (lam, rep)


def test_dt_covariance_smoke():
    x, t, ok = dt_covariance_check(SpectralSetup(1.0, 2), 0.3 + 0.4j, (1.0, 2j), (0.7, -0.3j))
    assert ok
    assert max(x, t) < 1e-6


def test_dressing_agreement_tight():
    assert dressing_agreement(FIG1, n_points=10) < 1e-9


def test_background_level():
    dev, ok = background_check(FIG1, radius=50.0, t_samples=(-5.0, 0.0, 5.0))
    assert ok
    assert dev < 1e-2


def test_nonlocality_witness_separates_variants():
    local_raw, nonlocal_norm = nonlocality_witness(FIG1)
    assert local_raw >= 0.1
    assert nonlocal_norm <= 1e-5
