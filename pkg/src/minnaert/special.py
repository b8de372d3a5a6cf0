"""Complex-argument Bessel and Hankel functions of order 0 and 1.

Evaluation uses the ascending power series for ``|z| <= 12`` and the Hankel
asymptotic expansion beyond. Both branches meet a 1e-10 relative target away
from the real zeros of the functions. The logarithm is taken on its principal
branch, so the cut lies on the negative real axis.

Also provides the constants of the small-argument expansion of the 2D
Helmholtz Green function

    -(i/4) H0(k r) = ln(r)/(2 pi) + eta_k + sum_j (b_j ln(k r) + c_j) (k r)^(2j)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

EULER_GAMMA = 0.57721566490153286060651209008240243
LN2 = math.log(2.0)

#: Largest admissible ``|z|``.
MAX_ABS_ARG = 200.0
#: Switch from power series to asymptotic expansion.
SERIES_CUTOFF = 12.0

_EPS = 1e-17
_MAX_SERIES_TERMS = 200
_MAX_ASYMPTOTIC_TERMS = 60


class DomainError(ValueError):
    """Raised when an argument lies outside the supported domain."""


def _as_complex_array(z) -> Tuple[np.ndarray, bool]:
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def _check_domain(z: np.ndarray, allow_zero: bool) -> None:
    if not np.all(np.isfinite(z)):
        raise DomainError("non-finite argument")
    absz = np.abs(z)
    if np.any(absz > MAX_ABS_ARG):
        raise DomainError(f"|z| = {absz.max():.6g} exceeds the validity region |z| <= {MAX_ABS_ARG}")
    if not allow_zero and np.any(absz == 0.0):
        raise DomainError("logarithmic singularity at z = 0")


def _series(z: np.ndarray):
    """Ascending series for J0, J1, Y0, Y1; ``z`` nonzero where Y is wanted."""
    q = 0.25 * z * z
    t = np.ones_like(z)      # (-q)^m / (m!)^2
    u = np.ones_like(z)      # (-q)^m / (m! (m+1)!)
    j0 = t.copy()
    s1 = u.copy()
    y0_tail = np.zeros_like(z)
    psi_m1 = -EULER_GAMMA          # psi(m+1)
    psi_m2 = 1.0 - EULER_GAMMA     # psi(m+2)
    y1_tail = (psi_m1 + psi_m2) * u
    harmonic = 0.0
    for m in range(1, _MAX_SERIES_TERMS):
        t = t * (-q) / (m * m)
        u = u * (-q) / (m * (m + 1))
        harmonic += 1.0 / m
        psi_m1 = psi_m2
        psi_m2 = psi_m2 + 1.0 / (m + 1)
        j0 = j0 + t
        s1 = s1 + u
        y0_tail = y0_tail - harmonic * t
        y1_tail = y1_tail + (psi_m1 + psi_m2) * u
        if np.max(np.abs(t), initial=0.0) * max(harmonic, 1.0) < _EPS * 1e-2 and \
                np.max(np.abs(u), initial=0.0) * (psi_m1 + psi_m2) < _EPS * 1e-2:
            break
    half = 0.5 * z
    j1 = half * s1
    with np.errstate(divide="ignore", invalid="ignore"):
        logh = np.log(half)
        y0 = (2.0 / np.pi) * ((logh + EULER_GAMMA) * j0 + y0_tail)
        y1 = -2.0 / (np.pi * z) + (2.0 / np.pi) * logh * j1 - (half / np.pi) * y1_tail
    return j0, j1, y0, y1


def _asymptotic_hankel(z: np.ndarray, order: int):
    """Hankel expansions of H^(1) and H^(2) for large ``|z|``."""
    mu = 4.0 * order * order
    inv = 1.0 / z
    sum1 = np.ones_like(z)
    sum2 = np.ones_like(z)
    a = 1.0
    zk = np.ones_like(z)
    prev = np.ones(z.shape)
    active = np.ones(z.shape, dtype=bool)
    for k in range(1, _MAX_ASYMPTOTIC_TERMS):
        a = a * (mu - (2 * k - 1) ** 2) / (8.0 * k)
        zk = zk * inv
        term = a * zk
        mag = np.abs(term)
        # stop each element once terms start to grow or become negligible
        active &= mag < prev
        if not np.any(active):
            break
        sum1 = np.where(active, sum1 + (1j ** k) * term, sum1)
        sum2 = np.where(active, sum2 + ((-1j) ** k) * term, sum2)
        prev = mag
        active &= mag > _EPS
        if a == 0.0:
            break
    phase = z - 0.5 * order * np.pi - 0.25 * np.pi
    pref = np.sqrt(2.0 / (np.pi * z))
    h1 = pref * np.exp(1j * phase) * sum1
    h2 = pref * np.exp(-1j * phase) * sum2
    return h1, h2


def bessel_jy01(z) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(J0, J1, Y0, Y1)`` evaluated elementwise at ``z``.

    Vectorized entry point used by the operator assembly. ``z`` must be
    finite, nonzero and inside ``|z| <= 200``.
    """
    z, _ = _as_complex_array(z)
    _check_domain(z, allow_zero=False)
    j0 = np.empty_like(z)
    j1 = np.empty_like(z)
    y0 = np.empty_like(z)
    y1 = np.empty_like(z)
    small = np.abs(z) <= SERIES_CUTOFF
    if np.any(small):
        zs = z[small]
        j0[small], j1[small], y0[small], y1[small] = _series(zs)
    large = ~small
    if np.any(large):
        j0[large], j1[large], y0[large], y1[large] = _asymptotic_jy(z[large])
    return j0, j1, y0, y1


def _asymptotic_jy(z: np.ndarray):
    """J and Y of orders 0, 1 from the Hankel expansions.

    The expansions are used in the closed right half-plane only; the left
    half-plane follows from the reflection z -> -z, with the sign of the
    2i J_n correction fixed by the principal branch (cut on the negative
    real axis, which belongs to the upper side).
    """
    left = z.real < 0
    w = np.where(left, -z, z)
    out = []
    for order in (0, 1):
        h1, h2 = _asymptotic_hankel(w, order)
        jw = 0.5 * (h1 + h2)
        yw = (h1 - h2) / 2j
        sign = -1.0 if order == 1 else 1.0
        turn = np.where(z.imag >= 0, 1.0, -1.0)
        jz = np.where(left, sign * jw, jw)
        yz = np.where(left, sign * (yw + 2j * turn * jw), yw)
        out.append((jz, yz))
    (j0, y0), (j1, y1) = out
    return j0, j1, y0, y1


def _check_order(order: int) -> None:
    if order not in (0, 1):
        raise ValueError(f"order must be 0 or 1, got {order!r}")


def _unwrap(arr: np.ndarray, scalar: bool):
    return complex(arr) if scalar else arr


def bessel_j(order: int, z):
    """Bessel function of the first kind, ``J_order(z)``, for complex ``z``."""
    _check_order(order)
    arr, scalar = _as_complex_array(z)
    _check_domain(arr, allow_zero=True)
    out = np.empty_like(arr)
    small = np.abs(arr) <= SERIES_CUTOFF
    if np.any(small):
        j0, j1, _, _ = _series(arr[small])
        out[small] = j0 if order == 0 else j1
    large = ~small
    if np.any(large):
        j0, j1, _, _ = _asymptotic_jy(arr[large])
        out[large] = j0 if order == 0 else j1
    return _unwrap(out, scalar)


def bessel_y(order: int, z):
    """Bessel function of the second kind, ``Y_order(z)`` (principal branch)."""
    _check_order(order)
    arr, scalar = _as_complex_array(z)
    _check_domain(arr, allow_zero=False)
    _, _, y0, y1 = bessel_jy01(arr)
    return _unwrap(y0 if order == 0 else y1, scalar)


def hankel1(order: int, z):
    """Hankel function of the first kind, ``J_order(z) + i Y_order(z)``."""
    _check_order(order)
    arr, scalar = _as_complex_array(z)
    _check_domain(arr, allow_zero=False)
    j0, j1, y0, y1 = bessel_jy01(arr)
    out = j0 + 1j * y0 if order == 0 else j1 + 1j * y1
    return _unwrap(out, scalar)


def eta(k) -> complex:
    """``eta_k = (ln k + gamma - ln 2) / (2 pi) - i/4`` with the principal log."""
    k = complex(k)
    if not (math.isfinite(k.real) and math.isfinite(k.imag)):
        raise DomainError("non-finite wavenumber")
    if k == 0:
        raise DomainError("eta is singular at k = 0")
    return complex((np.log(k) + EULER_GAMMA - LN2) / (2.0 * np.pi) - 0.25j)


@dataclass(frozen=True)
class ExpansionConstants:
    """Coefficients ``b_j`` and ``c_j`` of the small-argument Green expansion.

    ``b[0]`` and ``c[0]`` hold ``b_1`` and ``c_1``.
    """

    euler_gamma: float
    b: Tuple[float, ...]
    c: Tuple[complex, ...]

    def ratio(self, j: int) -> complex:
        """``c_j / b_j`` for 1-based ``j``."""
        return self.c[j - 1] / self.b[j - 1]


def expansion_constants(jmax: int = 3) -> ExpansionConstants:
    if jmax < 1:
        raise ValueError("jmax must be >= 1")
    b = []
    c = []
    harmonic = 0.0
    for j in range(1, jmax + 1):
        harmonic += 1.0 / j
        bj = (-1) ** j / (2.0 * np.pi) / (4.0 ** j * math.factorial(j) ** 2)
        b.append(bj)
        c.append(bj * complex(EULER_GAMMA - LN2 - harmonic, -0.5 * np.pi))
    return ExpansionConstants(EULER_GAMMA, tuple(b), tuple(c))


_CONSTANTS = expansion_constants(1)
B1: float = _CONSTANTS.b[0]
C1: complex = _CONSTANTS.c[0]
