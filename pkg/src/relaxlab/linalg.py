"""Dense complex linear algebra for small matrices.

Spectra with multiplicities, resolvents, matrix exponentials and spectral
norms. Every other module of the package is built on these primitives.
All norms are spectral (largest singular value).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

__all__ = [
    "LinalgError",
    "NonSquareError",
    "DimensionError",
    "ExpOverflowError",
    "SingularResolventError",
    "EigenCluster",
    "Spectrum",
    "as_matrix",
    "spectrum",
    "mat_exp",
    "resolvent",
    "operator_norm",
    "matrix_scale",
    "MAX_DIM",
]

MAX_DIM = 64
# log(max double) ~ 709.78; keep a margin for the norm of the non-normal part.
_EXP_LIMIT = 700.0


class LinalgError(ValueError):
    """Base class for errors raised by the linear algebra layer."""


class NonSquareError(LinalgError):
    pass


class DimensionError(LinalgError):
    pass


class ExpOverflowError(OverflowError):
    """Raised when ``exp(M t)`` would overflow double precision."""


class SingularResolventError(LinalgError):
    """Raised when the resolvent is requested at (or next to) an eigenvalue."""

    def __init__(self, z, eigenvalue):
        super().__init__(
            f"z = {complex(z)!r} lies within tolerance of the eigenvalue "
            f"{complex(eigenvalue)!r}; zI - M is singular"
        )
        self.z = z
        self.eigenvalue = eigenvalue


def as_matrix(M, square=True, name="M"):
    """Return ``M`` as a finite complex 2-D array.

    Raises
    ------
    NonSquareError
        If ``square`` is set and ``M`` is not square.
    DimensionError
        If ``M`` is not 2-D, is larger than ``MAX_DIM`` or has non-finite
        entries.
    """
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {A.shape}")
    if square and A.shape[0] != A.shape[1]:
        raise NonSquareError(f"{name} must be square, got shape {A.shape}")
    if max(A.shape) > MAX_DIM:
        raise DimensionError(f"{name} exceeds the maximum dimension {MAX_DIM}")
    if not np.all(np.isfinite(A)):
        raise DimensionError(f"{name} has non-finite entries")
    return A


def operator_norm(M):
    """Spectral norm (largest singular value) of ``M``."""
    A = np.asarray(M, dtype=complex)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def matrix_scale(M):
    """Natural scale of ``M`` used for relative tolerances: ``||M||`` or 1."""
    s = operator_norm(M)
    return s if s > 0.0 else 1.0


@dataclass(frozen=True)
class EigenCluster:
    value: complex
    algebraic: int
    geometric: int
    members: tuple = ()

    @property
    def semisimple(self):
        return self.algebraic == self.geometric


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of a matrix grouped into clusters with multiplicities.

    ``clustering_tolerance`` is the absolute merge radius actually used and
    ``rank_tolerance`` the absolute singular-value cutoff for the numerical
    rank of ``M - lambda I``.
    """

    clusters: tuple
    clustering_tolerance: float
    rank_tolerance: float
    eigenvalues: np.ndarray = field(repr=False, compare=False, default=None)

    def __iter__(self):
        return iter(self.clusters)

    def __len__(self):
        return len(self.clusters)

    @property
    def values(self):
        return np.array([c.value for c in self.clusters], dtype=complex)

    @property
    def size(self):
        return sum(c.algebraic for c in self.clusters)

    def abscissa(self):
        """Largest real part over the spectrum."""
        return float(max(c.value.real for c in self.clusters))

    def radius(self):
        return float(max(abs(c.value) for c in self.clusters))


def _cluster_indices(vals, radius):
    # single-linkage grouping: any two values closer than radius end up together
    n = len(vals)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(vals[i] - vals[j]) <= radius:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: min(g))


def spectrum(M, tol=1e-6, rank_tol=1e-8):
    """Eigenvalues of ``M`` with algebraic and geometric multiplicities.

    Parameters
    ----------
    M : array_like
        Square matrix.
    tol : float
        Relative merge radius: eigenvalues closer than ``tol * ||M||`` are
        treated as one cluster. A defective eigenvalue splits under rounding
        by roughly ``sqrt(eps) ||M||``, which is why the default sits above
        that level.
    rank_tol : float
        Relative singular-value cutoff for the numerical rank of
        ``M - lambda I``. The cutoff is widened to ten times the spread of a
        cluster so that a slightly split semi-simple eigenvalue is not
        mistaken for a defective one.

    Returns
    -------
    Spectrum
    """
    A = as_matrix(M)
    if tol <= 0 or rank_tol <= 0:
        raise ValueError("tolerances must be positive")
    n = A.shape[0]
    scale = matrix_scale(A)
    try:
        vals = scipy.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise LinalgError(f"eigensolver did not converge: {exc}") from exc
    if not np.all(np.isfinite(vals)):
        raise LinalgError("eigensolver returned non-finite eigenvalues")

    radius = tol * scale
    cutoff = rank_tol * scale
    clusters = []
    eye = np.eye(n)
    for group in _cluster_indices(vals, radius):
        members = vals[group]
        centre = complex(members.mean())
        spread = float(np.max(np.abs(members - centre))) if len(group) > 1 else 0.0
        sv = np.linalg.svd(A - centre * eye, compute_uv=False)
        threshold = max(cutoff, 10.0 * spread)
        geo = int(np.sum(sv <= threshold))
        geo = min(max(geo, 1), len(group))
        clusters.append(EigenCluster(centre, len(group), geo, tuple(members)))
    return Spectrum(tuple(clusters), radius, cutoff, vals)


def mat_exp(M, t=1.0):
    """Matrix exponential ``exp(M t)``.

    Scaling and squaring with a Pade approximant (``scipy.linalg.expm``).
    ``M`` may also be a stack of shape ``(..., n, n)``; ``t`` then broadcasts
    against the leading axes.

    Raises
    ------
    ExpOverflowError
        If ``Re(lambda) t`` exceeds the double range for some eigenvalue, or
        the result is not finite.
    """
    A = np.asarray(M, dtype=complex)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise NonSquareError(f"exponent must be square, got shape {A.shape}")
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("t must be finite")
    At = A * t[..., None, None] if t.ndim else A * float(t)
    if A.ndim == 2 and At.ndim == 2:
        growth = np.max(scipy.linalg.eigvals(At).real)
        if growth > _EXP_LIMIT:
            raise ExpOverflowError(
                f"exp(Mt) overflows: max Re(lambda t) = {growth:.4g}"
            )
    with np.errstate(over="ignore", invalid="ignore"):
        E = scipy.linalg.expm(At)
    if not np.all(np.isfinite(E)):
        raise ExpOverflowError("exp(Mt) overflowed double precision")
    return E


def resolvent(M, z, tol=1e-13):
    """Resolvent ``(zI - M)^{-1}``.

    Raises
    ------
    SingularResolventError
        If ``z`` is within ``tol * max(||M||, 1)`` of an eigenvalue of ``M``.
    """
    A = as_matrix(M)
    n = A.shape[0]
    z = complex(z)
    vals = scipy.linalg.eigvals(A)
    k = int(np.argmin(np.abs(vals - z)))
    if abs(vals[k] - z) <= tol * max(operator_norm(A), 1.0):
        raise SingularResolventError(z, vals[k])
    shifted = z * np.eye(n) - A
    try:
        return scipy.linalg.solve(shifted, np.eye(n, dtype=complex))
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise SingularResolventError(z, vals[k]) from exc
