"""Stability classification and resolvent measurements.

Quasi-stability of a single matrix is decided from its spectrum (real parts
non-positive, imaginary-axis eigenvalues semi-simple) and cross-checked by
sampling ``sup_t ||exp(Mt)||``. The Kreiss measurement

    K(M) = sup_{Re z > 0} ||(zI - M)^{-1}|| * min_{lambda not in H} |z - lambda|

is estimated on grids that concentrate near the imaginary axis and near the
spectrum; the value reported is always a sampled lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .linalg import (
    ExpOverflowError,
    LinalgError,
    as_matrix,
    mat_exp,
    matrix_scale,
    operator_norm,
    spectrum,
)

__all__ = [
    "StabilityReport",
    "SemigroupEstimate",
    "KreissEstimate",
    "RatioCheck",
    "RegionQuery",
    "PowerReport",
    "YongReport",
    "RegionError",
    "is_quasi_stable",
    "sup_semigroup_norm",
    "kreiss_measure",
    "kreiss_grid",
    "resolvent_ratio",
    "check_improved_resolvent",
    "region_resolvent_check",
    "region_boundary_samples",
    "half_plane_samples",
    "in_region",
    "is_power_bounded",
    "unit_triangular_inverse_check",
    "yong_check",
]


# ratios are evaluated to a few ulps; comparisons with K allow for that
RATIO_RTOL = 1e-12


class RegionError(ValueError):
    """A sample point violates the membership predicate of its region."""


@dataclass(frozen=True)
class StabilityReport:
    quasi_stable: bool
    spectral_abscissa: float
    boundary_defects: tuple
    sup_semigroup: float
    kreiss_estimate: float
    tolerance: float
    still_increasing: bool = False
    spectrum: object = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class SemigroupEstimate:
    """Sampled ``sup_t ||exp(Mt)||`` on ``[0, t_max]``."""

    sup: float
    t_at_sup: float
    still_increasing: bool

    def __float__(self):
        return self.sup


@dataclass(frozen=True)
class KreissEstimate:
    """Sampled Kreiss measurement, a lower bound of the true supremum.

    ``levels`` holds the estimates on the successively refined grids; a
    growth by more than ``10x`` on the last refinement sets ``divergent``.
    """

    value: float
    divergent: bool
    levels: tuple
    z_at_max: complex
    scale: float

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class RatioCheck:
    max_ratio: float
    bound: float
    holds: bool
    z_at_max: complex

    def __float__(self):
        return self.max_ratio


@dataclass(frozen=True)
class RegionQuery:
    """Sample points of a region attached to a matrix.

    ``kind`` is one of ``"half_plane_H"``, ``"miller_S"`` and ``"power_T"``;
    ``r`` is ignored for the half plane.
    """

    kind: str
    sample_points: np.ndarray
    r: float = 1.0

    def __post_init__(self):
        if self.kind not in ("half_plane_H", "miller_S", "power_T"):
            raise ValueError(f"unknown region kind {self.kind!r}")
        if self.kind != "half_plane_H" and not self.r > 0:
            raise ValueError("region parameter r must be positive")
        object.__setattr__(
            self, "sample_points", np.atleast_1d(np.asarray(self.sample_points, dtype=complex))
        )


@dataclass(frozen=True)
class PowerReport:
    power_bounded: bool
    spectral_radius: float
    boundary_defects: tuple
    sup_power: float
    overflow_power: int | None
    tolerance: float


@dataclass(frozen=True)
class YongReport:
    """Per-condition verdicts of the Yong stability certificate.

    Margins are worst eigenvalues: ``max Re lambda(B)`` for (i),
    ``min lambda(A0)`` and the largest symmetrizer defect for (ii), and the
    largest eigenvalue of the dissipation form for (iii).
    """

    condition_i: bool
    condition_ii: bool
    condition_iii: bool
    strong: bool
    margins: dict

    @property
    def passed(self):
        return self.condition_i and self.condition_ii and self.condition_iii


# --- quasi-stability ------------------------------------------------------


def _classify(spec, axis_tol):
    abscissa = spec.abscissa()
    defects = tuple(
        c.value for c in spec if abs(c.value.real) <= axis_tol and not c.semisimple
    )
    stable = abscissa <= axis_tol and not defects
    return stable, abscissa, defects


def _log_grid(t_max, samples):
    t_max = float(t_max)
    inner = np.logspace(np.log10(t_max) - 5.0, np.log10(t_max), samples - 1)
    return np.concatenate([[0.0], inner])


def _semigroup_norms(A, ts):
    E = mat_exp(A, ts)
    return np.linalg.norm(E, 2, axis=(-2, -1))


def _sup_semigroup(A, t_max, samples):
    ts = _log_grid(t_max, samples)
    norms = _semigroup_norms(A, ts)
    k = int(np.argmax(norms))
    best_t, best = float(ts[k]), float(norms[k])
    if 0 < k < len(ts) - 1:
        # polish the interior maximum between its neighbours
        res = scipy.optimize.minimize_scalar(
            lambda t: -operator_norm(mat_exp(A, t)),
            bounds=(ts[k - 1], ts[k + 1]),
            method="bounded",
            options={"xatol": 1e-10 * max(ts[k], 1.0)},
        )
        if -res.fun > best:
            best, best_t = float(-res.fun), float(res.x)
    return best, best_t, k >= len(ts) - max(1, len(ts) // 10)


def sup_semigroup_norm(M, t_max=100.0, samples=200, tol=1e-8):
    """Sampled ``sup_{0 <= t <= t_max} ||exp(Mt)||``.

    The grid is ``t = 0`` plus ``samples - 1`` log-spaced points spanning
    five decades below ``t_max``; an interior maximum is polished by a
    bounded scalar search. ``still_increasing`` is set when the maximum
    falls in the last decile of the grid and ``M`` is not quasi-stable.

    Raises
    ------
    ExpOverflowError
        Propagated from :func:`mat_exp`.
    """
    A = as_matrix(M)
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    if samples < 2:
        raise ValueError("samples must be at least 2")
    sup, t_at, late = _sup_semigroup(A, t_max, samples)
    if late:
        stable, _, _ = _classify(spectrum(A), tol * matrix_scale(A))
        late = not stable
    return SemigroupEstimate(sup, t_at, late)


def is_quasi_stable(M, tol=1e-8, t_max=100.0, samples=200, kreiss=False):
    """Decide quasi-stability of ``M`` from its spectrum.

    ``M`` is quasi-stable iff every eigenvalue has ``Re lambda <= tol`` and
    every eigenvalue with ``|Re lambda| <= tol`` is semi-simple; ``tol`` is
    relative to ``||M||``. The report also carries the sampled semigroup
    supremum and, when ``kreiss`` is set, the sampled Kreiss measurement.
    """
    A = as_matrix(M)
    axis_tol = tol * matrix_scale(A)
    spec = spectrum(A)
    stable, abscissa, defects = _classify(spec, axis_tol)
    try:
        sup, _, late = _sup_semigroup(A, t_max, samples)
    except ExpOverflowError:
        sup, late = np.inf, True
    k_est = kreiss_measure(A).value if kreiss else np.nan
    return StabilityReport(
        quasi_stable=stable,
        spectral_abscissa=abscissa,
        boundary_defects=defects,
        sup_semigroup=sup,
        kreiss_estimate=k_est,
        tolerance=axis_tol,
        still_increasing=bool(late and not stable),
        spectrum=spec,
    )


# --- resolvent ratios and the Kreiss measurement ------------------------


def _schur_diagonal(A):
    T = scipy.linalg.schur(np.asarray(A, dtype=complex), output="complex")[0]
    return T, np.diag(T).copy()


def _inverse_norms(T, diag, z, chunk_entries=2_000_000):
    # ||(zI - T)^{-1}|| by batched back substitution on the triangular factor;
    # the pivots z - T_ii are exactly the distances used in the ratio
    n = T.shape[0]
    out = np.empty(z.size)
    step = max(1, chunk_entries // (n * n))
    for lo in range(0, z.size, step):
        zc = z[lo:lo + step]
        X = np.zeros((zc.size, n, n), dtype=complex)
        for i in range(n - 1, -1, -1):
            row = np.zeros((zc.size, n), dtype=complex)
            row[:, i] = 1.0
            if i < n - 1:
                row += np.einsum("k,bkj->bj", T[i, i + 1:], X[:, i + 1:, :])
            X[:, i, :] = row / (zc - diag[i])[:, None]
        out[lo:lo + step] = np.linalg.norm(X, 2, axis=(-2, -1))
    return out


def resolvent_ratio(M, z, exclude_right=True, axis_tol=None, schur=None):
    """Vectorised ``||(zI - M)^{-1}|| / max_lambda |z - lambda|^{-1}``.

    With ``exclude_right`` the maximum runs over eigenvalues outside the open
    right half plane only, as in the Kreiss measurement; otherwise over the
    whole spectrum. Both factors are evaluated in complex Schur coordinates,
    with the eigenvalues read off the triangular factor, so the ratio keeps
    its relative accuracy at points very close to an eigenvalue. ``schur``
    may carry a precomputed ``(T, diag T)`` pair.
    """
    A = as_matrix(M)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    T, diag = _schur_diagonal(A) if schur is None else schur
    vals = diag
    if exclude_right:
        if axis_tol is None:
            axis_tol = 1e-8 * matrix_scale(A)
        vals = vals[vals.real <= axis_tol]
        if vals.size == 0:
            return np.full(z.shape, np.inf)
    dist = np.min(np.abs(z[:, None] - vals[None, :]), axis=1)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        norms = _inverse_norms(T, diag, z)
        ratio = norms * dist
    hit = np.any(z[:, None] == diag[None, :], axis=1)
    return np.where(hit | ~np.isfinite(ratio), np.inf, ratio)


def kreiss_grid(M, level=3, per_decade=6):
    """Sample points in the open right half plane for the Kreiss measurement.

    Real parts are log-spaced on ``[10^{-2 level}, 10^3] * ||M||``; imaginary
    parts are the same offsets on both sides of ``0`` and of every ``Im
    lambda``. Points on small circles around eigenvalues lying in the half
    plane are added so that a pole there is seen.
    """
    A = as_matrix(M)
    s = matrix_scale(A)
    vals = spectrum(A).eigenvalues
    lo = -2.0 * level
    count = int(per_decade * (3.0 - lo)) + 1
    offsets = s * np.logspace(lo, 3.0, count)
    xs = offsets
    centres = np.unique(np.concatenate([[0.0], vals.imag]))
    ys = np.concatenate(
        [centres] + [c + offsets for c in centres] + [c - offsets for c in centres]
    )
    X, Y = np.meshgrid(xs, ys)
    pts = [(X + 1j * Y).ravel()]
    phis = np.exp(1j * np.linspace(0.0, 2 * np.pi, 16, endpoint=False))
    for lam in vals[vals.real > 0]:
        ring = (lam + offsets[:, None] * phis[None, :]).ravel()
        pts.append(ring[ring.real > 0])
    return np.concatenate(pts)


def _kreiss_level(A, schur, axis_tol, level, keep=1):
    z = kreiss_grid(A, level)
    ratios = resolvent_ratio(A, z, axis_tol=axis_tol, schur=schur)
    order = np.argsort(-ratios, kind="stable")[:keep]
    return float(ratios[order[0]]), complex(z[order[0]]), z[order]


def _polish(A, schur, axis_tol, starts, x_lo, x_hi):
    # bounded Nelder-Mead in (log Re z, Im z / s) from several starts, then a
    # 1-D search in Im z along the lower edge, where the supremum often sits
    s = matrix_scale(A)

    def ratio(x, y):
        return float(resolvent_ratio(A, [x + 1j * y], axis_tol=axis_tol, schur=schur)[0])

    def neg(p):
        return -ratio(min(max(np.exp(p[0]), x_lo), x_hi), s * p[1])

    best_v, best_z = -np.inf, None
    bounds = [(np.log(x_lo), np.log(x_hi)), (None, None)]
    for z0 in starts:
        p0 = np.array([np.log(min(max(z0.real, x_lo), x_hi)), z0.imag / s])
        step = max(abs(z0.real) / s, 1e-6)
        simplex = np.array([p0, p0 + [0.5, 0.0], p0 + [0.0, step]])
        res = scipy.optimize.minimize(
            neg, p0, method="Nelder-Mead", bounds=bounds,
            options={"initial_simplex": simplex, "xatol": 1e-12, "fatol": 1e-15, "maxiter": 600},
        )
        v = -float(res.fun)
        if v > best_v:
            best_v = v
            best_z = min(max(np.exp(res.x[0]), x_lo), x_hi) + 1j * s * res.x[1]
    if best_z.real <= x_lo * 1.5:
        # the supremum is approached as Re z -> 0+: follow it to the axis limit
        x_edge = 1e-12 * s
        half = max(10.0 * x_lo, 5e-2 * s)
        ys = best_z.imag + np.linspace(-half, half, 4001)
        r = resolvent_ratio(A, x_edge + 1j * ys, axis_tol=axis_tol, schur=schur)
        r = np.where(np.isfinite(r), r, -np.inf)
        k = int(np.argmax(r))
        lo, hi = ys[max(k - 1, 0)], ys[min(k + 1, len(ys) - 1)]
        res = scipy.optimize.minimize_scalar(
            lambda y: -ratio(x_edge, y), bounds=(lo, hi), method="bounded",
            options={"xatol": 1e-14 * s},
        )
        cand = [(float(r[k]), x_edge + 1j * ys[k]), (float(-res.fun), x_edge + 1j * float(res.x))]
        for v, z in cand:
            if np.isfinite(v) and v > best_v:
                best_v, best_z = v, z
    return best_v, complex(best_z)


def kreiss_measure(M, levels=3, tol=1e-8, polish=True):
    """Sampled Kreiss measurement ``K(M)`` with a divergence flag.

    The estimate is computed on ``levels`` successively refined grids
    (:func:`kreiss_grid`); growth by more than a factor 10 on the last
    refinement flags divergence (``K(M) = +inf``). When the whole spectrum
    lies in the open right half plane the value is ``+inf`` by convention.
    The four best points of the finest grid are polished by a bounded
    Nelder-Mead search; when the best point sits on the lowest real part of
    the grid, the search continues along ``Re z = 1e-12 ||M||``, where the
    ratio has reached its limit on the imaginary axis.
    """
    A = as_matrix(M)
    s = matrix_scale(A)
    axis_tol = tol * s
    vals = spectrum(A).eigenvalues
    if np.all(vals.real > axis_tol):
        return KreissEstimate(np.inf, True, (np.inf,) * levels, complex(np.nan), s)
    schur = _schur_diagonal(A)
    results = [_kreiss_level(A, schur, axis_tol, lev, keep=4) for lev in range(1, levels + 1)]
    value, z_best, starts = results[-1]
    if polish and np.isfinite(value):
        x_lo, x_hi = s * 10.0 ** (-2.0 * levels), s * 1e3
        v, z = _polish(A, schur, axis_tol, starts, x_lo, x_hi)
        if v > value:
            value, z_best = v, z
    levels_vals = tuple(r[0] for r in results[:-1]) + (value,)
    divergent = levels > 1 and levels_vals[-1] > 10.0 * levels_vals[-2]
    return KreissEstimate(value, bool(divergent), levels_vals, complex(z_best), s)


def check_improved_resolvent(M, K, query):
    """Largest sampled ratio ``||(zI - M)^{-1}|| / max_lambda |z - lambda|^{-1}``.

    Points must lie in the open right half plane; the ratio is compared with
    ``K`` in the returned :class:`RatioCheck`, up to a relative rounding
    allowance of ``RATIO_RTOL``.
    """
    if query.kind != "half_plane_H":
        raise ValueError("check_improved_resolvent needs a half_plane_H query")
    A = as_matrix(M)
    z = query.sample_points
    bad = z[~(z.real > 0)]
    if bad.size:
        raise RegionError(f"sample point {complex(bad[0])!r} is not in the right half plane")
    ratios = resolvent_ratio(A, z, exclude_right=False)
    k = int(np.argmax(ratios))
    r = float(ratios[k])
    return RatioCheck(r, float(K), r <= K * (1.0 + RATIO_RTOL), complex(z[k]))


def _region_weights(vals, kind):
    if kind == "miller_S":
        return np.abs(vals.real)
    return 1.0 - np.abs(vals)


def in_region(M, z, kind, r=1.0, rtol=1e-9, eigenvalues=None):
    """Membership predicate of ``H``, ``S(M, r)`` or ``T(M, r)``."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if kind == "half_plane_H":
        return z.real > 0
    vals = spectrum(M).eigenvalues if eigenvalues is None else np.asarray(eigenvalues)
    w = _region_weights(vals, kind)
    dist = np.abs(z[:, None] - vals[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(dist > 0, w[None, :] / dist, np.where(w[None, :] > 0, np.inf, 0.0))
    return np.all(q <= (1.0 + rtol) / r, axis=1) & np.all(dist > 0, axis=1)


def region_resolvent_check(M, K, query):
    """Largest scaled ratio on a region ``S(M, r)`` or ``T(M, r)``.

    The ratio is ``||(zI - M)^{-1}|| / [(1 + 1/r)^{n-1} max_lambda
    |z - lambda|^{-1}]``; the region estimate asserts it is at most ``K``.

    Raises
    ------
    RegionError
        If a sample point fails the membership predicate.
    """
    if query.kind not in ("miller_S", "power_T"):
        raise ValueError("region_resolvent_check needs a miller_S or power_T query")
    A = as_matrix(M)
    n = A.shape[0]
    vals = spectrum(A).eigenvalues
    z = query.sample_points
    inside = in_region(A, z, query.kind, query.r, eigenvalues=vals)
    if not np.all(inside):
        bad = complex(z[~inside][0])
        raise RegionError(f"sample point {bad!r} is outside {query.kind}(M, r={query.r})")
    ratios = resolvent_ratio(A, z, exclude_right=False)
    ratios = ratios / (1.0 + 1.0 / query.r) ** (n - 1)
    k = int(np.argmax(ratios))
    m = float(ratios[k])
    return RatioCheck(m, float(K), m <= K * (1.0 + RATIO_RTOL), complex(z[k]))


def region_boundary_samples(M, kind, r=1.0, per_circle=64, far=True):
    """Points on the boundary of ``S(M, r)`` or ``T(M, r)``.

    The region is the complement of the open discs ``|z - lambda| < r w``
    (``w = |Re lambda|`` for S, ``1 - |lambda|`` for T). Points on each
    circle, pushed out by a relative ``1e-9``, are kept when they lie in the
    region; a ring of distant points is appended when ``far`` is set.
    """
    A = as_matrix(M)
    vals = spectrum(A).eigenvalues
    w = _region_weights(vals, kind)
    phis = np.exp(1j * np.linspace(0.0, 2 * np.pi, per_circle, endpoint=False))
    pts = []
    for lam, wi in zip(vals, w):
        rad = r * wi
        if rad <= 0:
            rad = 1e-3 * matrix_scale(A)
        pts.append(lam + rad * (1 + 1e-9) * phis)
    if far:
        R = 10.0 * (matrix_scale(A) + r * np.max(np.abs(w)) + 1.0)
        pts.append(R * phis)
    z = np.concatenate(pts)
    return z[in_region(A, z, kind, r, eigenvalues=vals)]


def half_plane_samples(M, count=2000, seed=0):
    """Random points of the open right half plane at the scale of ``M``.

    Real parts are log-uniform on ``[1e-5, 1e3] ||M||``; imaginary parts are
    drawn around the spectrum's imaginary parts with log-uniform offsets.
    """
    A = as_matrix(M)
    s = matrix_scale(A)
    rng = np.random.default_rng(seed)
    vals = spectrum(A).eigenvalues
    centres = np.concatenate([[0.0], vals.imag])
    x = s * 10.0 ** rng.uniform(-5, 3, count)
    off = s * 10.0 ** rng.uniform(-5, 3, count) * rng.choice([-1.0, 1.0], count)
    y = rng.choice(centres, count) + off
    return x + 1j * y


# --- power-bounded matrices ----------------------------------------------


def is_power_bounded(M, tol=1e-8, nu_max=2**20):
    """Power-boundedness from the spectral characterisation.

    ``M`` is power-bounded iff ``|lambda| <= 1 + tol`` and eigenvalues with
    ``||lambda| - 1| <= tol`` are semi-simple. ``sup_power`` is the largest
    ``||M^nu||`` over ``nu = 0, 1, 2, 4, ..., nu_max`` computed by repeated
    squaring; an overflow marks the matrix as not power-bounded.
    """
    A = as_matrix(M)
    spec = spectrum(A)
    mods = np.array([abs(c.value) for c in spec])
    defects = tuple(
        c.value for c in spec if abs(abs(c.value) - 1.0) <= tol and not c.semisimple
    )
    verdict = bool(np.all(mods <= 1.0 + tol) and not defects)

    sup = 1.0
    P = A.copy()
    nu = 1
    overflow = None
    with np.errstate(over="ignore", invalid="ignore"):
        while nu <= nu_max:
            norm = operator_norm(P) if np.all(np.isfinite(P)) else np.inf
            if not np.isfinite(norm):
                overflow = nu
                verdict = False
                sup = np.inf
                break
            sup = max(sup, norm)
            P = P @ P
            nu *= 2
    return PowerReport(verdict, float(mods.max()), defects, float(sup), overflow, tol)


# --- auxiliary resolvent inequalities --------------------------------


def unit_triangular_inverse_check(A):
    """``(||A^{-1}||, (n ||A||)^{n-1})`` for a unit upper triangular ``A``."""
    U = as_matrix(A, name="A")
    n = U.shape[0]
    if np.any(np.tril(U, -1) != 0) or np.any(np.diag(U) != 1):
        raise LinalgError("A must be unit upper triangular (ones on the diagonal)")
    inv = np.linalg.inv(U)
    alpha = operator_norm(U)
    return operator_norm(inv), float((n * alpha) ** (n - 1))


# --- Yong certificates ---------------------------------------------------


def _max_eig_hermitian(X):
    return float(np.max(np.linalg.eigvalsh((X + X.conj().T) / 2)))


def yong_check(system, A0, strong=False, decomp=None, coordinates="transformed", tol=1e-10):
    """Check Yong's stability conditions for a supplied symmetrizer ``A0``.

    Parameters
    ----------
    system : RelaxationSystem
    A0 : array_like
        Hermitian candidate symmetrizer.
    strong : bool
        Check the coupled condition (iii)' instead of (iii).
    decomp : BlockDecomposition, optional
        Computed with :func:`relaxlab.model.block_decompose` when omitted.
    coordinates : {"transformed", "original"}
        Frame in which ``A0`` is given. In transformed coordinates ``P = I``
        and ``Q = diag(0, B)``.
    tol : float
        Relative tolerance of the semidefiniteness tests.

    Returns
    -------
    YongReport
    """
    from .model import block_decompose

    H0 = as_matrix(A0, name="A0")
    if not np.allclose(H0, H0.conj().T, rtol=0, atol=tol * matrix_scale(H0)):
        raise LinalgError("A0 must be Hermitian")
    H0 = (H0 + H0.conj().T) / 2
    if decomp is None:
        decomp = block_decompose(system)
    n, r = system.n, decomp.r
    if coordinates == "transformed":
        As, Q = decomp.transformed_A, decomp.transformed_Q
        P = np.eye(n)
    elif coordinates == "original":
        As, Q = [np.asarray(a, dtype=complex) for a in system.A], np.asarray(system.Q, dtype=complex)
        P = decomp.P
    else:
        raise ValueError("coordinates must be 'transformed' or 'original'")

    margins = {}
    if r > 0:
        re_b = float(np.max(spectrum(decomp.B).eigenvalues.real))
    else:
        re_b = -np.inf
    margins["max_re_B"] = re_b
    cond_i = re_b < -tol * matrix_scale(decomp.B) if r > 0 else True

    scale = matrix_scale(H0)
    min_a0 = float(np.min(np.linalg.eigvalsh(H0)))
    margins["min_eig_A0"] = min_a0
    sym_defect = max(
        (operator_norm(H0 @ Aj - Aj.conj().T @ H0) for Aj in As), default=0.0
    )
    margins["symmetrizer_defect"] = sym_defect
    a_scale = max((matrix_scale(Aj) for Aj in As), default=1.0)
    cond_ii = min_a0 > tol * scale and sym_defect <= tol * scale * a_scale

    form = H0 @ Q + Q.conj().T @ H0
    if strong:
        D = np.zeros((n, n))
        D[n - r :, n - r :] = np.eye(r)
        form = form + P.conj().T @ D @ P
    worst = _max_eig_hermitian(form)
    margins["max_eig_dissipation"] = worst
    cond_iii = worst <= tol * scale * matrix_scale(Q)
    return YongReport(bool(cond_i), bool(cond_ii), bool(cond_iii), strong, margins)
