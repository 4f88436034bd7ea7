"""Linear hyperbolic relaxation systems and their Fourier symbols.

A system ``U_t + sum_j A_j U_{x_j} = Q U / eps`` is described by its constant
matrices. After the change of variables ``P`` that brings ``Q`` to
``diag(0, B)`` the symbol

    H(xi, eta) = eta Q - i sum_j xi_j A_j

splits into slow/fast blocks ``H11, H12, H21, H22``. Family scans use the
homogeneity ``H(w xi, w eta) = w H(xi, eta)`` to sample unit directions
only.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

from .linalg import ExpOverflowError, LinalgError, as_matrix, matrix_scale, operator_norm, spectrum
from .stability import _classify, _sup_semigroup

__all__ = [
    "RelaxationSystem",
    "BlockDecomposition",
    "SymbolBlocks",
    "FamilyScanReport",
    "DecompositionError",
    "SchemaError",
    "block_decompose",
    "symbol",
    "symbol_matrix",
    "family_scan",
    "scan_directions",
    "is_stiffly_well_posed",
    "jinxin",
    "osc3",
    "builtin_system",
    "load_system",
    "system_from_dict",
    "system_to_dict",
    "candidate_symmetrizer",
]


class DecompositionError(LinalgError):
    """Zero is not a semi-simple eigenvalue of ``Q``."""


class SchemaError(ValueError):
    """A system description does not match the JSON schema."""


@dataclass(frozen=True)
class RelaxationSystem:
    name: str
    A: tuple
    Q: np.ndarray

    def __post_init__(self):
        A = tuple(np.array(a, dtype=float) for a in self.A)
        Q = np.array(self.Q, dtype=float)
        if len(A) < 1:
            raise ValueError("a relaxation system needs at least one A_j (d >= 1)")
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1] or Q.shape[0] < 2:
            raise ValueError(f"Q must be n x n with n >= 2, got shape {Q.shape}")
        for j, a in enumerate(A):
            if a.shape != Q.shape:
                raise ValueError(f"A[{j}] has shape {a.shape}, expected {Q.shape}")
        if not (np.all(np.isfinite(Q)) and all(np.all(np.isfinite(a)) for a in A)):
            raise ValueError("system matrices must be finite")
        for a in A + (Q,):
            a.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "Q", Q)

    @property
    def d(self):
        return len(self.A)

    @property
    def n(self):
        return self.Q.shape[0]


@dataclass(frozen=True)
class BlockDecomposition:
    """``P Q P^{-1} = diag(0_{n-r}, B)`` with the transformed ``A_j``."""

    P: np.ndarray
    P_inv: np.ndarray
    r: int
    B: np.ndarray
    transformed_A: tuple
    transformed_Q: np.ndarray = field(repr=False)

    @property
    def n(self):
        return self.P.shape[0]

    @property
    def slow(self):
        return slice(0, self.n - self.r)

    @property
    def fast(self):
        return slice(self.n - self.r, self.n)

    @property
    def kappa(self):
        """Condition number ``||P|| ||P^{-1}||``."""
        return operator_norm(self.P) * operator_norm(self.P_inv)


@dataclass(frozen=True)
class SymbolBlocks:
    H: np.ndarray
    H11: np.ndarray
    H12: np.ndarray
    H21: np.ndarray
    H22: np.ndarray
    xi: np.ndarray
    eta: float


@dataclass(frozen=True)
class FamilyScanReport:
    family: str
    grid: np.ndarray
    sups: np.ndarray
    quasi_stable: np.ndarray
    worst_sup_semigroup: float
    worst_direction: tuple
    all_quasi_stable: bool
    kappa_P: float


# --- decomposition -------------------------------------------------------


def _canonical_basis(V):
    # V <- V V[piv]^{-1}: identity on the pivot rows picked by pivoted QR
    k = V.shape[1]
    if k == 0:
        return V
    _, _, piv = scipy.linalg.qr(V.T, pivoting=True)
    rows = np.sort(piv[:k])
    return V @ np.linalg.inv(V[rows, :])


def block_decompose(system, tol=1e-8):
    """Transformation ``P`` with ``P Q P^{-1} = diag(0, B)``.

    The columns of ``P^{-1}`` are a basis of ``ker Q`` followed by a basis of
    ``range Q``, each normalised to the identity on pivot rows. Zero must be
    a semi-simple eigenvalue of ``Q`` so that the two subspaces are
    complementary.

    Raises
    ------
    DecompositionError
        If the zero eigenvalue of ``Q`` is defective.
    """
    Q = np.asarray(system.Q, dtype=float)
    n = Q.shape[0]
    scale = matrix_scale(Q)
    U, sv, Vh = np.linalg.svd(Q)
    rank = int(np.sum(sv > tol * scale))
    kernel = Vh[rank:].conj().T
    image = U[:, :rank]
    zero_alg = sum(
        c.algebraic for c in spectrum(Q) if abs(c.value) <= max(1e-6, tol) * scale
    )
    if zero_alg != n - rank:
        raise DecompositionError(
            f"zero eigenvalue of Q is not semi-simple: algebraic multiplicity "
            f"{zero_alg}, geometric {n - rank}"
        )
    if np.isrealobj(Q):
        kernel, image = kernel.real, image.real
    Pinv = np.hstack([_canonical_basis(kernel), _canonical_basis(image)])
    if np.linalg.cond(Pinv) > 1e12:
        raise DecompositionError("ker Q and range Q are not complementary")
    P = np.linalg.inv(Pinv)
    r = rank
    T = P @ Q @ Pinv
    B = T[n - r :, n - r :].copy()
    off = T.copy()
    off[n - r :, n - r :] = 0.0
    if operator_norm(off) > 1e-8 * scale * max(1.0, np.linalg.cond(Pinv)):
        raise DecompositionError("P Q P^{-1} is not block diagonal")
    Qt = np.zeros_like(T)
    Qt[n - r :, n - r :] = B
    As = tuple(P @ a @ Pinv for a in system.A)
    for m in (P, Pinv, B, Qt) + As:
        m.setflags(write=False)
    return BlockDecomposition(P, Pinv, r, B, As, Qt)


# --- symbol --------------------------------------------------------------


def _xi_vector(system, xi):
    x = np.atleast_1d(np.asarray(xi, dtype=float))
    if x.shape != (system.d,):
        raise ValueError(f"xi must have length d = {system.d}, got shape {x.shape}")
    return x


def symbol_matrix(system, decomp, xi, eta):
    """``H(xi, eta) = eta Q' - i sum_j xi_j A_j'`` in transformed coordinates.

    With ``decomp=None`` the original coordinates are used.
    """
    x = _xi_vector(system, xi)
    if decomp is None:
        Q, As = system.Q, system.A
    else:
        Q, As = decomp.transformed_Q, decomp.transformed_A
    H = eta * np.asarray(Q, dtype=complex)
    for xj, a in zip(x, As):
        H = H - 1j * xj * a
    return H


def symbol(system, decomp, xi, eta):
    """Symbol ``H(xi, eta)`` and its slow/fast blocks."""
    if eta < 0:
        raise ValueError("eta must be non-negative")
    H = symbol_matrix(system, decomp, xi, eta)
    s, f = decomp.slow, decomp.fast
    return SymbolBlocks(
        H=H,
        H11=H[s, s],
        H12=H[s, f],
        H21=H[f, s],
        H22=H[f, f],
        xi=_xi_vector(system, xi),
        eta=float(eta),
    )


# --- direction grids and scans ------------------------------------------


def _fibonacci_sphere(count):
    # near-uniform points on S^2
    i = np.arange(count) + 0.5
    z = 1.0 - 2.0 * i / count
    phi = np.pi * (1.0 + 5**0.5) * i
    rho = np.sqrt(1.0 - z**2)
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)


def _fibonacci_hemisphere(count):
    # last coordinate >= 0
    i = np.arange(count) + 0.5
    z = 1.0 - i / count
    phi = np.pi * (1.0 + 5**0.5) * i
    rho = np.sqrt(1.0 - z**2)
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)


def _tensor_hemisphere_s3(count):
    # hyperspherical angles on S^3 with the last coordinate >= 0
    m = max(2, int(round(count ** (1.0 / 3.0))))
    a1 = np.linspace(0.0, np.pi / 2, m)
    a2 = np.linspace(0.0, np.pi, m)
    a3 = np.linspace(0.0, 2 * np.pi, 2 * m, endpoint=False)
    A1, A2, A3 = np.meshgrid(a1, a2, a3, indexing="ij")
    pts = np.stack(
        [
            np.sin(A1) * np.sin(A2) * np.cos(A3),
            np.sin(A1) * np.sin(A2) * np.sin(A3),
            np.sin(A1) * np.cos(A2),
            np.cos(A1),
        ],
        axis=-1,
    ).reshape(-1, 4)
    return np.unique(np.round(pts, 14), axis=0)


def scan_directions(d, family, count):
    """Unit directions for a family scan.

    Rows are ``(xi_1, ..., xi_d, eta)`` on the half sphere ``eta >= 0`` for
    ``F0``/``F2`` and ``(xi_1, ..., xi_d, 0)`` on the unit sphere for ``F1``.
    ``d = 1`` uses equally spaced angles (nested when ``count - 1`` doubles),
    ``d = 2`` Fibonacci points, ``d = 3`` a tensor grid of angles.
    """
    if family not in ("F0", "F1", "F2"):
        raise ValueError(f"unknown family {family!r}")
    count = max(int(count), 2)
    if family == "F1":
        if d == 1:
            xi = np.array([[-1.0], [1.0]])
        elif d == 2:
            th = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
            xi = np.stack([np.cos(th), np.sin(th)], axis=1)
        elif d == 3:
            xi = _fibonacci_sphere(count)
        else:
            raise ValueError("scans support d <= 3")
        return np.hstack([xi, np.zeros((len(xi), 1))])
    if d == 1:
        th = np.linspace(0.0, np.pi, count)
        return np.stack([np.cos(th), np.sin(th)], axis=1)
    if d == 2:
        return _fibonacci_hemisphere(count)
    if d == 3:
        return _tensor_hemisphere_s3(count)
    raise ValueError("scans support d <= 3")


def _family_member(system, decomp, family, direction):
    xi, eta = direction[:-1], float(direction[-1])
    blocks = symbol(system, decomp, xi, max(eta, 0.0))
    if family == "F0":
        return blocks.H
    if family == "F1":
        return blocks.H11
    return blocks.H22


def family_scan(system, decomp, family="F0", directions=256, t_max=50.0, samples=120, tol=1e-8):
    """Scan ``F0``, ``F1`` or ``F2`` for uniform quasi-stability.

    For every unit direction the member matrix is classified and its
    semigroup supremum sampled on ``[0, t_max]``; homogeneity makes the unit
    directions representative of the whole family. Sups are measured in
    transformed coordinates and differ from original-coordinate sups by at
    most the recorded factor ``kappa_P``. Directions that fail are recorded,
    never raised.
    """
    if decomp is None:
        decomp = block_decompose(system)
    grid = scan_directions(system.d, family, directions)
    sups = np.empty(len(grid))
    stable = np.empty(len(grid), dtype=bool)
    for k, direction in enumerate(grid):
        M = _family_member(system, decomp, family, direction)
        if M.size == 0:
            sups[k], stable[k] = 1.0, True
            continue
        spec = spectrum(M)
        stable[k] = _classify(spec, tol * matrix_scale(M))[0]
        try:
            sups[k] = _sup_semigroup(as_matrix(M), t_max, samples)[0]
        except ExpOverflowError:
            sups[k] = np.inf
    worst = int(np.argmax(sups))
    w = grid[worst]
    return FamilyScanReport(
        family=family,
        grid=grid,
        sups=sups,
        quasi_stable=stable,
        worst_sup_semigroup=float(sups[worst]),
        worst_direction=(tuple(float(v) for v in w[:-1]), float(w[-1])),
        all_quasi_stable=bool(np.all(stable)),
        kappa_P=decomp.kappa,
    )


def is_stiffly_well_posed(system, decomp=None, directions=256, t_max=50.0, threshold=1e3):
    """Scan-based verdict on stiff well-posedness.

    Returns ``"pass"`` when every sampled direction of ``F0`` is quasi-stable
    with semigroup supremum at most ``threshold``, ``"fail"`` when some
    direction is not quasi-stable and ``"inconclusive"`` otherwise.
    """
    if decomp is None:
        try:
            decomp = block_decompose(system)
        except DecompositionError:
            return "fail"
    rep = family_scan(system, decomp, "F0", directions, t_max)
    if not rep.all_quasi_stable:
        return "fail"
    return "pass" if rep.worst_sup_semigroup <= threshold else "inconclusive"


# --- built-in systems and JSON files -------------------------------------


def jinxin(a=1.0, b=0.5):
    """Jin-Xin relaxation of ``u_t + b u_x = 0`` with characteristic speeds ``+-a``."""
    return RelaxationSystem(
        name=f"jinxin:a={a:g},b={b:g}",
        A=([[0.0, 1.0], [a * a, 0.0]],),
        Q=[[0.0, 0.0], [b, -1.0]],
    )


def osc3():
    """Three-component system with an undamped oscillating fast block."""
    return RelaxationSystem(
        name="osc3",
        A=([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]],),
        Q=[[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]],
    )


def candidate_symmetrizer(system):
    """Default symmetrizer candidate in transformed coordinates.

    ``diag(a^2 - b^2, 1)`` for Jin-Xin systems, the identity otherwise.
    """
    m = re.fullmatch(r"jinxin:a=([^,]+),b=(.+)", system.name)
    if m:
        a, b = float(m.group(1)), float(m.group(2))
        return np.diag([a * a - b * b, 1.0])
    return np.eye(system.n)


def builtin_system(spec):
    """Build a named system, e.g. ``"osc3"`` or ``"jinxin:a=1,b=0.5"``."""
    name, _, params = spec.partition(":")
    kwargs = {}
    if params:
        for item in params.split(","):
            key, eq, value = item.partition("=")
            if not eq:
                raise ValueError(f"malformed parameter {item!r} in {spec!r}")
            kwargs[key.strip()] = float(value)
    if name == "jinxin":
        unknown = set(kwargs) - {"a", "b"}
        if unknown:
            raise ValueError(f"unknown jinxin parameters {sorted(unknown)}")
        return jinxin(**kwargs)
    if name == "osc3":
        if kwargs:
            raise ValueError("osc3 takes no parameters")
        return osc3()
    raise ValueError(f"unknown built-in system {name!r}")


def _check_matrix(obj, n, path):
    if not isinstance(obj, list) or len(obj) != n:
        raise SchemaError(f"{path}: expected a list of {n} rows")
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != n:
            raise SchemaError(f"{path}[{i}]: expected a row of {n} numbers")
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise SchemaError(f"{path}[{i}][{j}]: expected a real number")
            if not np.isfinite(v):
                raise SchemaError(f"{path}[{i}][{j}]: non-finite value")


def system_from_dict(obj):
    """Validate a JSON object ``{"name", "d", "n", "A", "Q"}`` and build the system."""
    if not isinstance(obj, dict):
        raise SchemaError("$: expected a JSON object")
    expected = {"name", "d", "n", "A", "Q"}
    missing = expected - set(obj)
    extra = set(obj) - expected
    if missing:
        raise SchemaError(f"$: missing keys {sorted(missing)}")
    if extra:
        raise SchemaError(f"$: unexpected keys {sorted(extra)}")
    if not isinstance(obj["name"], str):
        raise SchemaError("$.name: expected a string")
    for key, low in (("d", 1), ("n", 2)):
        v = obj[key]
        if isinstance(v, bool) or not isinstance(v, int) or v < low:
            raise SchemaError(f"$.{key}: expected an integer >= {low}")
    d, n = obj["d"], obj["n"]
    if not isinstance(obj["A"], list) or len(obj["A"]) != d:
        raise SchemaError(f"$.A: expected a list of {d} matrices")
    for j, a in enumerate(obj["A"]):
        _check_matrix(a, n, f"$.A[{j}]")
    _check_matrix(obj["Q"], n, "$.Q")
    return RelaxationSystem(name=obj["name"], A=tuple(obj["A"]), Q=obj["Q"])


def system_to_dict(system):
    return {
        "name": system.name,
        "d": system.d,
        "n": system.n,
        "A": [a.tolist() for a in system.A],
        "Q": system.Q.tolist(),
    }


def load_system(source):
    """Load a system from a JSON file path or a built-in name."""
    path = Path(source)
    if path.suffix == ".json" or path.is_file():
        try:
            obj = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
        return system_from_dict(obj)
    return builtin_system(source)
