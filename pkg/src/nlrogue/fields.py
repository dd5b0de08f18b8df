"""Grid evaluation of rogue-wave fields.

Work is split into fixed row chunks handed to a thread pool.  The chunking
is independent of the thread count, and every chunk is a pure elementwise
numpy computation, so output bytes do not depend on how many workers ran.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .chain import DELTA_POLE, rogue_point

# Rows per work item.  Fixed so that the floating-point evaluation order,
# and hence the output, is identical for any thread count.
CHUNK_ROWS = 16


@dataclass(frozen=True)
class FieldGrid:
    """Rectangular evaluation window, t-major when rasterized."""

    x0: float
    x1: float
    nx: int
    t0: float
    t1: float
    nt: int

    def __post_init__(self):
        if self.nx < 2 or self.nt < 2:
            raise ValueError("grid needs at least 2 samples per axis")
        if not (self.x1 > self.x0 and self.t1 > self.t0):
            raise ValueError("grid bounds must be increasing")

    def xs(self):
        return np.linspace(self.x0, self.x1, self.nx)

    def ts(self):
        return np.linspace(self.t0, self.t1, self.nt)

    def refined(self, factor=2):
        """Same window with factor times the sample density."""
        return FieldGrid(
            self.x0,
            self.x1,
            (self.nx - 1) * factor + 1,
            self.t0,
            self.t1,
            (self.nt - 1) * factor + 1,
        )


@dataclass(frozen=True)
class Field:
    """Evaluated field on a grid.

    values has shape (nt, nx, ncomp); pole_level shape (nt, nx) holds the
    chain step whose denominator collapsed (-1 where none did).  Cells with
    pole_level >= 0 carry NaN values and are rendered as poles downstream.
    """

    grid: FieldGrid
    values: np.ndarray
    pole_level: np.ndarray

    @property
    def magnitudes(self):
        return np.abs(self.values)


def compute_field(spec, grid, threads=1, sign=None, delta_pole=DELTA_POLE):
    """Evaluate the top-order solution of spec on the grid.

    threads > 1 parallelizes over row chunks; results are byte-identical
    for any thread count because the chunk boundaries are fixed.
    """
    xs = grid.xs()
    ts = grid.ts()
    ncomp = spec.setup.ncomp
    values = np.empty((grid.nt, grid.nx, ncomp), dtype=complex)
    pole_level = np.empty((grid.nt, grid.nx), dtype=int)

    def run_chunk(row0):
        row1 = min(row0 + CHUNK_ROWS, grid.nt)
        tt = ts[row0:row1][:, None]
        xx = xs[None, :]
        res = rogue_point(spec, xx, tt, sign=sign, delta_pole=delta_pole, diagnostics=False)
        values[row0:row1] = res.solutions.here[spec.order]
        pole_level[row0:row1] = res.pole_level

    starts = range(0, grid.nt, CHUNK_ROWS)
    if threads <= 1:
        for row0 in starts:
            run_chunk(row0)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run_chunk, starts))
    return Field(grid=grid, values=values, pole_level=pole_level)
