"""Dense complex linear algebra and Muller's method for complex roots."""

from __future__ import annotations

import cmath
import logging
import warnings
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-14
MAX_DIM = 4096
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100


class SingularMatrixError(np.linalg.LinAlgError):
    pass


class ConvergenceError(RuntimeError):
    pass


class NonConvergenceError(ConvergenceError):
    """Muller's method exhausted its iteration budget."""

    def __init__(self, message: str, history: Optional[List[complex]] = None):
        super().__init__(message)
        self.history = history or []


class DegenerateParabolaError(ArithmeticError):
    pass


@dataclass(frozen=True)
class RootResult:
    root: complex
    iterations: int
    residual: float
    converged: bool
    history: Tuple[complex, ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    min_modulus: complex


def _square(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def lu_factor(a: np.ndarray):
    """LU factorization with partial pivoting; rejects numerically singular input."""
    a = _square(a)
    scale = np.max(np.abs(a)) if a.size else 0.0
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularMatrixError
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=True)
    pivots = np.abs(np.diag(lu))
    if scale == 0.0 or pivots.min() < PIVOT_TOL * scale:
        raise SingularMatrixError(
            f"pivot {pivots.min():.3e} below {PIVOT_TOL:g} * max|A| = {PIVOT_TOL * scale:.3e}")
    return lu, piv


def solve_linear(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = _square(a)
    b = np.asarray(b)
    if b.shape[0] != a.shape[0]:
        raise ValueError(f"right-hand side has {b.shape[0]} rows, matrix has {a.shape[0]}")
    return scipy.linalg.lu_solve(lu_factor(a), b)


def reciprocal_condition(a: np.ndarray) -> float:
    """LAPACK estimate of ``1 / cond_1(A)``."""
    a = np.asarray(_square(a), dtype=complex)
    anorm = np.max(np.sum(np.abs(a), axis=0))
    lu, _ = scipy.linalg.lu_factor(a)
    gecon, = scipy.linalg.get_lapack_funcs(("gecon",), (lu,))
    rcond, _ = gecon(lu, anorm, norm="1")
    return float(rcond)


def _min_modulus(eigs: np.ndarray) -> complex:
    order = np.lexsort((np.angle(eigs), np.abs(eigs)))
    return complex(eigs[order[0]])


def eigenvalues(a: np.ndarray) -> SpectrumResult:
    """All eigenvalues via Hessenberg reduction and shifted QR (LAPACK ``geev``)."""
    a = _square(a)
    if a.shape[0] > MAX_DIM:
        raise ValueError(f"dimension {a.shape[0]} exceeds {MAX_DIM}")
    try:
        eigs = scipy.linalg.eigvals(a, check_finite=True)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"QR iteration failed: {exc}") from exc
    eigs = np.asarray(eigs, dtype=complex)
    return SpectrumResult(eigs, _min_modulus(eigs))


def min_modulus_eigenvalue(a: np.ndarray, method: str = "dense") -> complex:
    """Eigenvalue of smallest modulus.

    ``method="arnoldi"`` runs shift-invert Arnoldi at the origin on top of one
    LU factorization, which is much cheaper than the full spectrum for large
    matrices.
    """
    a = _square(a)
    if method == "dense":
        return eigenvalues(a).min_modulus
    if method != "arnoldi":
        raise ValueError(f"unknown method {method!r}")
    n = a.shape[0]
    lu = scipy.linalg.lu_factor(a)
    op = scipy.sparse.linalg.LinearOperator(
        (n, n), matvec=lambda x: scipy.linalg.lu_solve(lu, x), dtype=complex)
    v0 = np.ones(n, dtype=complex)
    try:
        mu = scipy.sparse.linalg.eigs(op, k=3, which="LM", v0=v0, return_eigenvectors=False,
                                      ncv=min(n - 1, 40), tol=1e-14)
    except scipy.sparse.linalg.ArpackNoConvergence as exc:
        raise ConvergenceError(f"Arnoldi did not converge: {exc}") from exc
    return _min_modulus(1.0 / np.asarray(mu, dtype=complex))


def min_singular_value(a: np.ndarray, return_vector: bool = False):
    """Smallest singular value, optionally with its right singular vector."""
    a = _square(a)
    try:
        if not return_vector:
            return float(scipy.linalg.svd(a, compute_uv=False)[-1])
        _, s, vh = scipy.linalg.svd(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"SVD failed: {exc}") from exc
    return float(s[-1]), vh[-1].conj()


def muller(f: Callable[[complex], complex], g0: complex, g1: complex, g2: complex,
           tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> RootResult:
    """Muller's three-point method.

    Stops when ``|f| <= tol`` or when the step is below ``tol * max(1, |x|)``.
    """
    x0, x1, x2 = complex(g0), complex(g1), complex(g2)
    if len({x0, x1, x2}) < 3:
        raise DegenerateParabolaError("initial guesses must be distinct")
    f0, f1, f2 = complex(f(x0)), complex(f(x1)), complex(f(x2))
    history = [x0, x1, x2]
    for it in range(1, max_iter + 1):
        if abs(f2) == 0.0:
            return RootResult(x2, it - 1, 0.0, True, tuple(history))
        h1, h2 = x1 - x0, x2 - x1
        if h1 == 0 or h2 == 0 or h1 + h2 == 0:
            raise DegenerateParabolaError(f"iterates coincide at {x2}")
        d1, d2 = (f1 - f0) / h1, (f2 - f1) / h2
        a = (d2 - d1) / (h2 + h1)
        b = a * h2 + d2
        disc = cmath.sqrt(b * b - 4.0 * a * f2)
        den = b + disc if abs(b + disc) >= abs(b - disc) else b - disc
        if den == 0:
            raise DegenerateParabolaError(f"zero denominator at {x2}")
        step = -2.0 * f2 / den
        x0, x1, x2 = x1, x2, x2 + step
        f0, f1, f2 = f1, f2, complex(f(x2))
        history.append(x2)
        logger.debug("muller it=%d x=%s |f|=%.3e", it, x2, abs(f2))
        if abs(f2) <= tol or abs(step) <= tol * max(1.0, abs(x2)):
            return RootResult(x2, it, abs(f2), True, tuple(history))
    raise NonConvergenceError(f"Muller did not converge in {max_iter} iterations (last x={x2})", history)
