"""Plane-wave background, spectral matrices, and closed-form eigenfunctions.

The linear system is

    Psi_x = U Psi,   Psi_t = V Psi,
    U = i lam sigma3 + Q,
    V = 2i lam^2 sigma3 + 2 lam Q + i sigma3 (Q^2 - Q_x),

where the potential couples the field at (x, t) with its value at (x, -t).
On the plane-wave background the system separates into commuting x and t
propagators, which this module evaluates in closed form for any lam,
including the degenerate dressing point lam = i rho.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SpectralSetup:
    """Background amplitude and problem size; the dressing point is i*rho."""

    rho: float
    dim: int = 2

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 (scalar field) or 3 (two components)")

    @property
    def lambda1(self):
        return 1j * self.rho

    @property
    def ncomp(self):
        return self.dim - 1


def sigma3(dim):
    """diag(1, -1[, -1]) as a complex matrix."""
    return np.diag([1.0] + [-1.0] * (dim - 1)).astype(complex)


def seed_background(setup, t):
    """Background field components at time t: (rho e^{2 i rho^2 t}, 0...)."""
    t = np.asarray(t, dtype=float)
    phase = setup.rho * np.exp(2j * setup.rho**2 * t)
    comps = [phase] + [np.zeros_like(phase)] * (setup.dim - 2)
    return np.stack(comps, axis=-1)


def flow_generators(setup, lam):
    """Space and time generators (theta, omega) of the separable solution.

    omega = theta^2 + 2 lam theta - (lam^2 + rho^2) I; the two commute, so
    the x and t propagators can be applied in either order.
    """
    r = setup.rho
    theta = np.zeros((setup.dim, setup.dim), dtype=complex)
    theta[0, 0] = lam
    theta[0, 1] = 1j * r
    theta[1, 0] = -1j * r
    theta[1, 1] = -lam
    if setup.dim == 3:
        theta[2, 2] = -lam
    omega = theta @ theta + 2 * lam * theta - (lam**2 + r**2) * np.eye(setup.dim)
    return theta, omega


_SMALL = 1e-4


def _cos_sinc(z):
    """cos(z) and sin(z)/z, both even in z and finite at z = 0.

    Below |z| = 1e-4 the sinc ratio switches to its series; the truncation
    error there is ~|z|^6/5040, far under double roundoff.
    """
    z = np.asarray(z, dtype=complex)
    w = z * z
    small = np.abs(z) < _SMALL
    zsafe = np.where(small, 1.0, z)
    sinc = np.where(small, 1.0 - w / 6.0 * (1.0 - w / 20.0), np.sin(zsafe) / zsafe)
    return np.cos(z), sinc


def propagators(setup, lam, x, t, _tau=None):
    """Closed-form factors (R, E, L) with Psi = L R E Z.

    R = exp(i theta x) and E = exp(i omega t) are written through cos(z) and
    z*sinc(z) only, so they are insensitive to the branch of
    tau = sqrt(lam^2 + rho^2) and stay finite at the degenerate point tau = 0.
    L carries the background phases.  _tau overrides the root for the
    branch-flip regression test.
    """
    r = setup.rho
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    x, t = np.broadcast_arrays(x, t)
    tau = np.sqrt(lam**2 + r**2 + 0j) if _tau is None else _tau

    cx, sx = _cos_sinc(tau * x)
    xsinc = x * sx  # sin(tau x)/tau, equal to x at tau = 0
    xi = 2 * lam * tau
    ct, st = _cos_sinc(xi * t)
    tsinc = t * st  # sin(xi t)/xi

    d = setup.dim
    shape = x.shape + (d, d)
    R = np.zeros(shape, dtype=complex)
    E = np.zeros(shape, dtype=complex)
    L = np.zeros(shape, dtype=complex)

    R[..., 0, 0] = cx + 1j * lam * xsinc
    R[..., 0, 1] = -r * xsinc
    R[..., 1, 0] = r * xsinc
    R[..., 1, 1] = cx - 1j * lam * xsinc

    # E = cos(xi t) I + i t sinc(xi t) omega with omega = 2 lam theta on the
    # upper block, so the entries mirror R with xi in place of tau.
    E[..., 0, 0] = ct + 2j * lam**2 * tsinc
    E[..., 0, 1] = -2 * lam * r * tsinc
    E[..., 1, 0] = 2 * lam * r * tsinc
    E[..., 1, 1] = ct - 2j * lam**2 * tsinc

    phase = np.exp(1j * r**2 * t)
    L[..., 0, 0] = 1.0 / phase
    L[..., 1, 1] = phase
    if d == 3:
        R[..., 2, 2] = np.exp(-1j * lam * x)
        E[..., 2, 2] = np.exp(-1j * (r**2 + 2 * lam**2) * t)
        L[..., 2, 2] = phase
    return R, E, L


def fundamental_solution(setup, lam, x, t, Z):
    """L R E Z for a constant vector Z; broadcasts over x and t."""
    R, E, L = propagators(setup, lam, x, t)
    Z = np.asarray(Z, dtype=complex)
    v = np.einsum("...ij,j->...i", E, Z)
    v = np.einsum("...ij,...j->...i", R, v)
    return np.einsum("...ij,...j->...i", L, v)


def q_matrix(setup, q_here, q_mirror):
    """Potential matrix from the field components at (x, t) and (x, -t).

    First column carries the field, first row carries minus its mirror.
    """
    q_here = np.asarray(q_here, dtype=complex)
    q_mirror = np.asarray(q_mirror, dtype=complex)
    q_here, q_mirror = np.broadcast_arrays(q_here, q_mirror)
    d = setup.dim
    Q = np.zeros(q_here.shape[:-1] + (d, d), dtype=complex)
    Q[..., 1:, 0] = q_here
    Q[..., 0, 1:] = -q_mirror
    return Q


def lax_matrices(setup, lam, q_here, q_mirror, qx_here=None, qx_mirror=None):
    """(U, V) for the given field pair; derivatives default to zero."""
    Q = q_matrix(setup, q_here, q_mirror)
    if qx_here is None:
        Qx = np.zeros_like(Q)
    else:
        Qx = q_matrix(setup, qx_here, qx_mirror)
    s3 = sigma3(setup.dim)
    U = 1j * lam * s3 + Q
    V = 2j * lam**2 * s3 + 2 * lam * Q + 1j * s3 @ (Q @ Q - Qx)
    return U, V
