"""Series expansion of the eigenfunctions at the degenerate dressing point.

Everything here expands around lam = i rho (1 + eps).  There tau^2 =
lam^2 + rho^2 = -rho^2 eps (2 + eps) vanishes at eps = 0, the generic
eigenvector pair collapses, and the dressing chain needs the Taylor
coefficients Psi_0, Psi_1, ... of the fundamental solution in eps.

Two permanent evaluation routes exist for the propagator coefficients:

* binomial-sum tables (series_tables / series_matrices), fast and
  vectorized over grid points;
* jets pushed through the entire-series kernels (propagator_jets), slower
  but with no hand-derived combinatorics.

Their agreement at 1e-9 relative is enforced by the oracle suite and is the
standing defense against table typos.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import jets
from .jets import Jet
from .laxcore import SpectralSetup

MAX_N = jets.MAX_ORDER
MAX_WAVE_ORDER = 10


def taylor_monomial(kind, m, rho, u):
    """Building blocks of the tables: "A" -> (rho u)^m/m!, "B" -> (2 rho^2 u)^m/m!.

    Negative m returns 0, the convention used for the n-1 entries at n = 0.
    """
    if kind == "A":
        base = rho * np.asarray(u, dtype=float)
    elif kind == "B":
        base = 2.0 * rho**2 * np.asarray(u, dtype=float)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    if m < 0:
        return np.zeros_like(base)
    out = np.ones_like(base)
    for i in range(1, m + 1):
        out = out * base / i
    return out


def _monomials(base, m_max):
    """[base^m / m! for m = 0..m_max] by iterated multiplication."""
    out = [np.ones_like(base)]
    for m in range(1, m_max + 1):
        out.append(out[-1] * base / m)
    return out


@dataclass(frozen=True)
class CoeffTables:
    """Taylor coefficient families stacked over n, shape (n_max+1,) + grid.

    alpha/beta expand cos(tau x) and rho x sinc(tau x); gamma/theta expand
    cos(xi t) and the matching odd kernel in t.  a3/rho3 are the extra
    diagonal families of the three-component problem (None for dim 2).
    """

    n_max: int
    rho: float
    x: np.ndarray
    t: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    theta: np.ndarray
    a3: np.ndarray | None = None
    rho3: np.ndarray | None = None


def series_tables(n_max, rho, x, t, dim=2):
    """Binomial-sum coefficient tables; see series_matrices for assembly.

    The sums come from expanding eps^k (2+eps)^k (1+eps)^p factors of the
    closed kernels; binomial(a, b) is zero outside 0 <= b <= a, which makes
    the loop bounds below exact.
    """
    if n_max > MAX_N:
        raise ValueError(f"n_max {n_max} exceeds the validated cap {MAX_N}")
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    x, t = np.broadcast_arrays(x, t)
    A = _monomials(rho * x, 2 * n_max + 1)
    B = _monomials(2.0 * rho**2 * t, 2 * n_max + 1)

    alpha, beta, gamma, theta = [], [], [], []
    for n in range(n_max + 1):
        a = np.zeros_like(x)
        b = np.zeros_like(x)
        for l in range(n // 2 + 1):
            w = math.comb(n - l, l) * 2 ** (n - 2 * l)
            a = a + w * A[2 * (n - l)]
            b = b + w * A[2 * (n - l) + 1]
        g = np.zeros_like(x)
        th = np.zeros_like(x)
        for l in range(n + 1):
            k = n - l
            sgn = -1.0 if k % 2 else 1.0
            for m in range(min(l, k) + 1):
                j = l - m
                w = math.comb(k, m) * 2 ** (k - m)
                if j <= 2 * k:
                    g = g + sgn * w * math.comb(2 * k, j) * B[2 * k]
                if j <= 2 * k + 1:
                    th = th + sgn * w * math.comb(2 * k + 1, j) * B[2 * k + 1]
        alpha.append(a)
        beta.append(b)
        gamma.append(g)
        theta.append(th)

    a3 = rho3 = None
    if dim == 3:
        a3 = [A[n] for n in range(n_max + 1)]
        rho3 = []
        for n in range(n_max + 1):
            acc = np.zeros_like(t, dtype=complex)
            for l in range(n // 2 + 1):
                acc = acc + math.comb(n - l, l) * 1j ** (n - l) * 2 ** (n - 2 * l) * B[n - l]
            rho3.append(acc)
        a3 = np.stack(a3)
        rho3 = np.stack(rho3)

    return CoeffTables(
        n_max=n_max,
        rho=rho,
        x=x,
        t=t,
        alpha=np.stack(alpha),
        beta=np.stack(beta),
        gamma=np.stack(gamma),
        theta=np.stack(theta),
        a3=a3,
        rho3=rho3,
    )


def series_matrices(setup, n, tables):
    """n-th Taylor matrices (R_n, E_n) of the propagators at the degenerate point.

    The E off-diagonals are +-i theta_n: the eps^0 limit is the nilpotent
    propagator I + i omega t, and the jet oracle pins the higher orders.
    """
    a, b = tables.alpha[n], tables.beta[n]
    bm = tables.beta[n - 1] if n >= 1 else np.zeros_like(b)
    g, th = tables.gamma[n], tables.theta[n]
    thm = tables.theta[n - 1] if n >= 1 else np.zeros_like(th)
    d = setup.dim
    shape = np.shape(a) + (d, d)
    R = np.zeros(shape, dtype=complex)
    E = np.zeros(shape, dtype=complex)
    R[..., 0, 0] = a - b - bm
    R[..., 0, 1] = -b
    R[..., 1, 0] = b
    R[..., 1, 1] = a + b + bm
    E[..., 0, 0] = g - 1j * (th + thm)
    E[..., 0, 1] = -1j * th
    E[..., 1, 0] = 1j * th
    E[..., 1, 1] = g + 1j * (th + thm)
    if d == 3:
        R[..., 2, 2] = np.exp(setup.rho * tables.x) * tables.a3[n]
        E[..., 2, 2] = np.exp(1j * setup.rho**2 * tables.t) * tables.rho3[n]
    return R, E


def _poly(coeffs, order):
    """Jet from leading coefficients, zero padded or truncated to the order."""
    c = list(coeffs)[: order + 1]
    c += [0.0] * (order + 1 - len(c))
    return Jet(c)


def _as_jet(v, order):
    return v if isinstance(v, Jet) else Jet.constant(v, order)


def propagator_jets(setup, x, t, n_max):
    """R(eps) and E(eps) at lam = i rho (1+eps) as dim x dim matrices of jets.

    x and t may be numbers, arrays, or jets; jet arguments realize shifted
    arguments such as x -> r0 + r1 eps + ... of the generating construction.
    Only even combinations tau^2 x^2 and xi^2 t^2 enter the trigonometric
    kernels, so no square root of a jet is ever taken.
    """
    if n_max > MAX_N:
        raise ValueError(f"n_max {n_max} exceeds the validated cap {MAX_N}")
    r = setup.rho
    x = _as_jet(x, n_max)
    t = _as_jet(t, n_max)

    lam = _poly([1j * r, 1j * r], n_max)
    lam2 = _poly([-(r**2), -2 * r**2, -(r**2)], n_max)  # lam^2
    tau2 = _poly([0.0, -2 * r**2, -(r**2)], n_max)  # lam^2 + rho^2
    xi2 = 4.0 * (lam2 * tau2)

    wx = tau2 * (x * x)
    cx = jets.apply_entire(jets.cos_square_term, wx)
    sx = x * jets.apply_entire(jets.sinc_square_term, wx)  # sin(tau x)/tau
    wt = xi2 * (t * t)
    ct = jets.apply_entire(jets.cos_square_term, wt)
    st = t * jets.apply_entire(jets.sinc_square_term, wt)  # sin(xi t)/xi

    zero = Jet.constant(0.0, n_max)
    R = [[zero] * setup.dim for _ in range(setup.dim)]
    E = [[zero] * setup.dim for _ in range(setup.dim)]

    lam_sx = lam * sx
    R[0][0] = cx + 1j * lam_sx
    R[0][1] = (-r) * sx
    R[1][0] = r * sx
    R[1][1] = cx - 1j * lam_sx

    lam2_st = lam2 * st
    lam_st = lam * st
    E[0][0] = ct + 2j * lam2_st
    E[0][1] = (-2 * r) * lam_st
    E[1][0] = (2 * r) * lam_st
    E[1][1] = ct - 2j * lam2_st

    if setup.dim == 3:
        # exp(-i lam x) = exp(rho (1+eps) x) and
        # exp(-i (rho^2 + 2 lam^2) t) = exp(i rho^2 (1 + 4 eps + 2 eps^2) t).
        R[2][2] = jets.exp(_poly([r, r], n_max) * x)
        E[2][2] = jets.exp(1j * (_poly([r**2, 4 * r**2, 2 * r**2], n_max) * t))
    return R, E


def jet_matvec(M, v):
    """Matrix (of jets) times vector (of jets)."""
    out = []
    for row in M:
        acc = row[0] * v[0]
        for entry, comp in zip(row[1:], v[1:]):
            acc = acc + entry * comp
        out.append(acc)
    return out


def generating_coefficients(setup, l, r, s, n_max):
    """Expansion seed vectors from the generating construction.

    The seed polynomial coefficients are the Taylor coefficients in eps of
    exp(i theta(eps) x0(eps) + i omega(eps) t0(eps)) l with x0 = sum r_j eps^j
    and t0 = sum s_j eps^j.  theta and omega commute, so the exponential
    factors into the two closed-form propagators with jet arguments.
    """
    if setup.dim != 3:
        raise ValueError("the generating construction is defined for dim 3")
    x0 = _poly(r, n_max)
    t0 = _poly(s, n_max)
    R, E = propagator_jets(setup, x0, t0, n_max)
    lvec = [Jet.constant(complex(c), n_max) for c in l]
    w = jet_matvec(R, jet_matvec(E, lvec))
    return [np.array([w[i].coeffs[k] for i in range(3)], dtype=complex) for k in range(n_max + 1)]


@dataclass(frozen=True)
class Generating:
    """l vector plus shift polynomials of the generating construction."""

    l: tuple
    r: tuple = ()
    s: tuple = ()


@dataclass(frozen=True)
class WaveSpec:
    """Everything that identifies one rogue-wave solution.

    Exactly one of omega (explicit seed vectors, outer index = eps power) or
    generating must be given.  order is the number of dressing steps.
    """

    setup: SpectralSetup
    order: int
    omega: tuple | None = None
    generating: Generating | None = None

    def __post_init__(self):
        if not 1 <= self.order <= MAX_WAVE_ORDER:
            raise ValueError(f"order must be in 1..{MAX_WAVE_ORDER}")
        if (self.omega is None) == (self.generating is None):
            raise ValueError("give exactly one of omega or generating")
        if self.omega is not None:
            for k, row in enumerate(self.omega):
                if len(row) != self.setup.dim:
                    raise ValueError(f"omega[{k}] must have {self.setup.dim} components")
            if not any(abs(complex(c)) > 0 for c in self.omega[0]):
                raise ValueError("omega[0] must be nonzero")
        else:
            if self.setup.dim != 3:
                raise ValueError("the generating construction needs dim 3")
            if len(self.generating.l) != 3 or not any(
                abs(complex(c)) > 0 for c in self.generating.l
            ):
                raise ValueError("generating l must be a nonzero 3-vector")


def scalar_wave(rho, order, omega):
    return WaveSpec(SpectralSetup(rho, 2), order, tuple(tuple(map(complex, row)) for row in omega))


def vector_wave(rho, order, omega):
    return WaveSpec(SpectralSetup(rho, 3), order, tuple(tuple(map(complex, row)) for row in omega))


def generating_wave(rho, order, l, r=(), s=()):
    gen = Generating(tuple(map(complex, l)), tuple(map(float, r)), tuple(map(float, s)))
    return WaveSpec(SpectralSetup(rho, 3), order, None, gen)


def wave_omegas(spec, n_max=None):
    """Seed vectors omega_0..omega_n_max, zero padded past the given data."""
    if n_max is None:
        n_max = spec.order
    if spec.generating is not None:
        return generating_coefficients(
            spec.setup, spec.generating.l, spec.generating.r, spec.generating.s, n_max
        )
    out = []
    for k in range(n_max + 1):
        if k < len(spec.omega):
            out.append(np.asarray(spec.omega[k], dtype=complex))
        else:
            out.append(np.zeros(spec.setup.dim, dtype=complex))
    return out


def _background_diag(setup, t):
    """Diagonal of the background phase factor L."""
    phase = np.exp(1j * setup.rho**2 * np.asarray(t, dtype=float))
    cols = [1.0 / phase, phase] + [phase] * (setup.dim - 2)
    return np.stack(cols, axis=-1)


def expansion_vectors(spec, x, t, path="table"):
    """Taylor vectors Psi_0..Psi_N of the eigenfunction at (x, t).

    Returns an array of shape (N+1,) + broadcast(x, t).shape + (dim,).
    path selects the table route (default) or the jet route; the two agree
    to 1e-10 relative and are both kept on purpose.
    """
    setup = spec.setup
    N = spec.order
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    x, t = np.broadcast_arrays(x, t)
    om = wave_omegas(spec, N)
    lam_diag = _background_diag(setup, t)

    if path == "table":
        tables = series_tables(N, setup.rho, x, t, dim=setup.dim)
        Rn = []
        En = []
        for n in range(N + 1):
            r_n, e_n = series_matrices(setup, n, tables)
            Rn.append(r_n)
            En.append(e_n)
        # S_q = sum_{j+m=q} E_j omega_m, then Psi_n = L sum_k R_k S_{n-k}.
        S = []
        for q in range(N + 1):
            acc = np.zeros(x.shape + (setup.dim,), dtype=complex)
            for j in range(q + 1):
                acc = acc + np.einsum("...ij,j->...i", En[j], om[q - j])
            S.append(acc)
        psi = np.empty((N + 1,) + x.shape + (setup.dim,), dtype=complex)
        for n in range(N + 1):
            acc = np.zeros(x.shape + (setup.dim,), dtype=complex)
            for k in range(n + 1):
                acc = acc + np.einsum("...ij,...j->...i", Rn[k], S[n - k])
            psi[n] = lam_diag * acc
        return psi

    if path == "jet":
        R, E = propagator_jets(setup, x, t, N)
        z = [Jet([om[k][i] for k in range(N + 1)]) for i in range(setup.dim)]
        w = jet_matvec(R, jet_matvec(E, z))
        psi = np.empty((N + 1,) + x.shape + (setup.dim,), dtype=complex)
        for n in range(N + 1):
            for i in range(setup.dim):
                c = np.asarray(w[i].coeffs[n], dtype=complex)
                psi[n][..., i] = np.broadcast_to(c, x.shape)
            psi[n] = lam_diag * psi[n]
        return psi

    raise ValueError(f"unknown path {path!r}")
