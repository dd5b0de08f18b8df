"""Grid mechanics and chunked evaluation."""

import numpy as np

from nlrogue.chain import rogue_point
from nlrogue.expansion import scalar_wave, vector_wave
from nlrogue.fields import FieldGrid, compute_field


def test_grid_axes():
    g = FieldGrid(-2.0, 2.0, 5, 0.0, 1.0, 3)
    assert np.allclose(g.xs(), [-2, -1, 0, 1, 2])
    assert np.allclose(g.ts(), [0.0, 0.5, 1.0])


def test_refined_keeps_endpoints_and_nodes():
    g = FieldGrid(-2.0, 2.0, 5, 0.0, 1.0, 3)
    r = g.refined(2)
    assert (r.nx, r.nt) == (9, 5)
    assert np.allclose(r.xs()[::2], g.xs())
    assert np.allclose(r.ts()[::2], g.ts())
    assert r.xs()[0] == g.xs()[0] and r.xs()[-1] == g.xs()[-1]


def test_compute_field_matches_pointwise_chain():
    spec = vector_wave(1.0, 1, [(1, 2j, 1j)])
    g = FieldGrid(-1.0, 1.0, 4, -1.0, 1.0, 3)
    f = compute_field(spec, g)
    assert f.values.shape == (3, 4, 2)
    xs, ts = np.meshgrid(g.xs(), g.ts())
    ref = rogue_point(spec, xs, ts).solutions.here[-1]
    assert np.allclose(f.values, ref, rtol=1e-14)
    assert np.allclose(f.magnitudes, np.abs(ref), rtol=1e-14)


def test_threaded_path_used_for_tall_grids():
    # 40 rows crosses several 16-row chunks; results must not depend on the
    # executor at all.
    spec = scalar_wave(1.0, 2, [(1, 0), (0, 1000j)])
    g = FieldGrid(-3.0, 3.0, 21, -3.0, 3.0, 40)
    a = compute_field(spec, g, threads=1)
    b = compute_field(spec, g, threads=3)
    assert np.array_equal(a.values, b.values, equal_nan=True)
    assert np.array_equal(a.pole_level, b.pole_level)
