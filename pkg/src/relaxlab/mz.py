"""Exact Fourier-space solvers and the Mori-Zwanzig coupling kernel.

Fields live on the periodic box ``[0, 2 pi)^d`` and are stored as Fourier
coefficients on the integer lattice ``|xi|_inf <= N``. Each mode evolves by
``exp(H(xi, eta) t)``, so no spatial grid or time stepping is involved and
all norms follow from Parseval.

Slow/fast splitting uses the block transformation ``P``: the slow part of a
state ``U`` is ``(P U)[:n-r]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .linalg import mat_exp
from .model import block_decompose, symbol, symbol_matrix

__all__ = [
    "FourierField",
    "ConvergenceRecord",
    "ConvergenceSummary",
    "lattice",
    "make_initial_data",
    "coupling_kernel",
    "coupling_kernel_quadrature",
    "gauss_panels",
    "full_solve",
    "reduced_solve",
    "mz_residual",
    "slow_error",
    "convergence_study",
    "default_panels",
]


def lattice(d, N):
    """Integer frequencies with ``|xi|_inf <= N`` in lexicographic order."""
    axis = np.arange(-N, N + 1)
    return np.array(list(itertools.product(axis, repeat=d)), dtype=float).reshape(-1, d)


@dataclass(frozen=True)
class FourierField:
    """Truncated Fourier coefficients of a vector field.

    ``coefficients[k]`` is the state vector at frequency ``freqs[k]``.
    """

    d: int
    N: int
    freqs: np.ndarray
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=complex)
        f = np.array(self.freqs, dtype=float).reshape(-1, self.d)
        if c.ndim != 2 or c.shape[0] != f.shape[0]:
            raise ValueError("coefficients must have shape (len(freqs), m)")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "freqs", f)

    @classmethod
    def from_coefficients(cls, d, N, coefficients):
        return cls(d, N, lattice(d, N), coefficients)

    @property
    def components(self):
        return self.coefficients.shape[1]

    def with_coefficients(self, coefficients):
        return FourierField(self.d, self.N, self.freqs, coefficients)

    def hs_norm(self, s=0.0):
        """``(sum_xi (1 + |xi|^2)^s |c(xi)|^2)^(1/2)``."""
        w = (1.0 + np.sum(self.freqs**2, axis=1)) ** s
        return float(np.sqrt(np.sum(w * np.sum(np.abs(self.coefficients) ** 2, axis=1))))

    def l2_norm(self):
        return self.hs_norm(0.0)


@dataclass(frozen=True)
class ConvergenceRecord:
    epsilon: float
    t: float
    l2_error: float
    low_freq_error: float
    high_freq_error: float
    rate_ratio: float
    h2_norm_u0: float


@dataclass(frozen=True)
class ConvergenceSummary:
    records: tuple
    max_rate_ratio: float
    min_rate_ratio: float
    error_decreasing: bool
    log_base: str = field(default="natural")

    @property
    def rate_spread(self):
        return self.max_rate_ratio / self.min_rate_ratio


def make_initial_data(d=1, n=2, N=64, s=2.0, seed=0):
    """Seeded initial data with algebraically decaying coefficients.

    Every component has modulus ``(1 + |xi|^2)^(-(s + d)/2 - 0.1)`` and an
    independent uniformly random phase, so the ``H^s`` norm is finite for
    every ``N`` and the moduli (hence all norms) do not depend on ``seed``.
    """
    if N < 1:
        raise ValueError("cutoff N must be at least 1")
    freqs = lattice(d, N)
    mod = (1.0 + np.sum(freqs**2, axis=1)) ** (-(s + d) / 2.0 - 0.1)
    rng = np.random.default_rng(seed)
    phases = np.exp(2j * np.pi * rng.random((len(freqs), n)))
    return FourierField(d, N, freqs, mod[:, None] * phases)


# --- kernels -------------------------------------------------------------


def _blocks(system, decomp, xi, eta):
    return symbol(system, decomp, np.atleast_1d(xi), eta)


def coupling_kernel(system, decomp, t, xi, eta):
    """``G(t) = int_0^t exp(H11 (t-s)) H12 exp(H22 s) ds`` via one exponential.

    ``G`` is the upper-right block of ``exp([[H11, H12], [0, H22]] t)``.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if decomp is None:
        decomp = block_decompose(system)
    b = _blocks(system, decomp, xi, eta)
    m = b.H11.shape[0]
    aug = b.H.copy()
    aug[m:, :m] = 0.0
    return mat_exp(aug, t)[:m, m:]


_GL_ORDER = 8


def gauss_panels(a, b, panels, order=_GL_ORDER):
    """Composite Gauss-Legendre nodes and weights on ``[a, b]``."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    h = np.diff(edges)
    nodes = edges[:-1, None] + 0.5 * h[:, None] * (x[None, :] + 1.0)
    weights = 0.5 * h[:, None] * w[None, :]
    return nodes.ravel(), weights.ravel()


def default_panels(eta, t, minimum=16):
    """Panel count resolving oscillation or decay at rate ``eta`` over ``[0, t]``."""
    return max(int(minimum), int(np.ceil(8.0 * eta * t / np.pi)))


def coupling_kernel_quadrature(system, decomp, t, xi, eta, panels=None):
    """``G(t, xi, eta)`` by composite Gauss-Legendre quadrature of its integrand."""
    if decomp is None:
        decomp = block_decompose(system)
    if panels is None:
        panels = default_panels(eta, t)
    if panels < 4:
        raise ValueError("panels must be at least 4")
    b = _blocks(system, decomp, xi, eta)
    if t == 0:
        return np.zeros(b.H12.shape, dtype=complex)
    s, w = gauss_panels(0.0, t, panels)
    E11 = mat_exp(b.H11, t - s)
    E22 = mat_exp(b.H22, s)
    return np.einsum("k,kij,jl,klm->im", w, E11, b.H12, E22)


# --- solvers -------------------------------------------------------------


def full_solve(system, decomp, U0, t, eta):
    """Propagate every mode exactly: ``U(t, xi) = exp(H(xi, eta) t) U0(xi)``.

    Works in the original coordinates of ``system``; ``decomp`` is accepted
    for interface symmetry and is not needed.
    """
    if eta < 0:
        raise ValueError("eta must be non-negative")
    if U0.components != system.n:
        raise ValueError(f"U0 must have {system.n} components")
    if t == 0:
        return U0
    H = np.stack([symbol_matrix(system, None, xi, eta) for xi in U0.freqs])
    E = mat_exp(H, np.full(len(H), float(t)))
    return U0.with_coefficients(np.einsum("kij,kj->ki", E, U0.coefficients))


def _slow_part(decomp, field_):
    return (field_.coefficients @ decomp.P.T)[:, decomp.slow]


def slow_initial_data(decomp, U0):
    """Slow component ``u0 = (P U0)[:n-r]`` as a field."""
    return U0.with_coefficients(_slow_part(decomp, U0))


def reduced_solve(system, decomp, u0, t):
    """Propagate slow data by ``exp(H11(xi, 0) t)`` mode by mode."""
    if decomp is None:
        decomp = block_decompose(system)
    m = system.n - decomp.r
    if u0.components != m:
        raise ValueError(f"u0 must have {m} components")
    if t == 0:
        return u0
    H11 = np.stack([symbol(system, decomp, xi, 0.0).H11 for xi in u0.freqs])
    E = mat_exp(H11, np.full(len(H11), float(t)))
    return u0.with_coefficients(np.einsum("kij,kj->ki", E, u0.coefficients))


def _mz_mode(system, decomp, xi, U0k, t, eta, panels):
    b = _blocks(system, decomp, xi, eta)
    m = b.H11.shape[0]
    Hfull = symbol_matrix(system, None, xi, eta)
    W0 = decomp.P @ U0k
    u0, v0 = W0[:m], W0[m:]

    lhs = (decomp.P @ (mat_exp(Hfull, t) @ U0k))[:m]

    s, w = gauss_panels(0.0, t, panels)
    aug = b.H.copy()
    aug[m:, :m] = 0.0
    G_nodes = mat_exp(aug, t - s)[:, :m, m:]
    u_nodes = np.einsum("ij,kjl,l->ki", decomp.P, mat_exp(Hfull, s), U0k)[:, :m]
    memory = np.einsum("k,kij,jl,kl->i", w, G_nodes, b.H21, u_nodes)
    G_t = mat_exp(aug, t)[:m, m:]
    rhs = mat_exp(b.H11, t) @ u0 + G_t @ v0 + memory
    return float(np.linalg.norm(lhs - rhs))


def mz_residual(system, decomp, U0, t, eta, panels=None):
    """Largest violation of the Mori-Zwanzig identity over the modes of ``U0``.

    The left side is the slow block of the exact solution; the right side is

        exp(H11 t) u0 + G(t) v0 + int_0^t G(t - s) H21 u(s) ds

    with ``u(s)`` taken from the exact solution at the quadrature nodes.
    ``U0`` may be a :class:`FourierField` or a single ``(xi, U0(xi))`` pair.
    """
    if decomp is None:
        decomp = block_decompose(system)
    if panels is None:
        panels = default_panels(eta, t)
    if panels < 16:
        raise ValueError("panels must be at least 16")
    if isinstance(U0, FourierField):
        modes = zip(U0.freqs, U0.coefficients)
    else:
        xi, vec = U0
        modes = [(np.atleast_1d(np.asarray(xi, dtype=float)), np.asarray(vec, dtype=complex))]
    return max(
        _mz_mode(system, decomp, xi, np.asarray(vec, dtype=complex), t, eta, panels)
        for xi, vec in modes
    )


def slow_error(system, decomp, U0, t, epsilon, beta_tilde=10.0, eps_max=0.2):
    """Slow-variable error ``||u(t, ., 1/eps) - u_reduced(t, .)||_L2``.

    The error is split orthogonally at ``|xi| = eta / beta_tilde - 1``; the
    rate ratio ``error / (eps |log eps|)`` uses the natural logarithm and is
    reported only for ``eps <= eps_max`` (NaN otherwise).
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if decomp is None:
        decomp = block_decompose(system)
    eta = 1.0 / epsilon
    u_full = _slow_part(decomp, full_solve(system, decomp, U0, t, eta))
    u_red = reduced_solve(system, decomp, slow_initial_data(decomp, U0), t).coefficients
    per_mode = np.sum(np.abs(u_full - u_red) ** 2, axis=1)
    cutoff = eta / beta_tilde - 1.0
    low = np.linalg.norm(U0.freqs, axis=1) <= cutoff
    low_sq, high_sq = float(np.sum(per_mode[low])), float(np.sum(per_mode[~low]))
    total = float(np.sqrt(np.sum(per_mode)))
    rate = total / (epsilon * abs(np.log(epsilon))) if epsilon <= eps_max else np.nan
    return ConvergenceRecord(
        epsilon=float(epsilon),
        t=float(t),
        l2_error=total,
        low_freq_error=float(np.sqrt(low_sq)),
        high_freq_error=float(np.sqrt(high_sq)),
        rate_ratio=float(rate),
        h2_norm_u0=U0.hs_norm(2.0),
    )


def convergence_study(system, decomp, U0, t, eps_list, beta_tilde=10.0, eps_max=0.2):
    """One :class:`ConvergenceRecord` per epsilon plus a summary."""
    eps = [float(e) for e in eps_list]
    if any(not 0.0 < e < 1.0 for e in eps):
        raise ValueError("every epsilon must lie in (0, 1)")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("eps_list must be strictly decreasing")
    if decomp is None:
        decomp = block_decompose(system)
    records = tuple(slow_error(system, decomp, U0, t, e, beta_tilde, eps_max) for e in eps)
    rates = np.array([r.rate_ratio for r in records])
    rates = rates[np.isfinite(rates)]
    errs = [r.l2_error for r in records]
    return ConvergenceSummary(
        records=records,
        max_rate_ratio=float(rates.max()) if rates.size else np.nan,
        min_rate_ratio=float(rates.min()) if rates.size else np.nan,
        error_decreasing=all(b < a for a, b in zip(errs, errs[1:])),
    )
