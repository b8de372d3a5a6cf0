"""Nystrom discretization of 2D layer potentials.

Green function convention: ``G(x, y, k) = -(i/4) H0(k |x - y|)``, whose static
limit is ``ln|x - y| / (2 pi)``. All matrices map nodal density values to
nodal potential values, i.e. quadrature weights and Jacobians are folded into
the columns.

Self-interaction operators with logarithmic kernels are discretized with the
Kress (Martensen-Kussmaul) splitting

    kernel(t, s) = A(t, s) ln(4 sin^2((t - s) / 2)) + B(t, s)

where the log part is integrated exactly against trigonometric interpolants
of ``A`` and the smooth part ``B`` by the trapezoidal rule. This converges
spectrally for analytic curves.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Optional, Tuple

import numpy as np

from .special import B1, C1, bessel_jy01, eta

if TYPE_CHECKING:
    from .geometry import DiscreteBoundary

OVERLAP_TOL = 1e-12
PROXIMITY_FACTOR = 3.0


class SingularityError(ValueError):
    """Two distinct boundaries share (or nearly share) a node."""


class ProximityError(ValueError):
    """An evaluation point is too close to the boundary for plain quadrature."""


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    entries: np.ndarray
    kind: str
    wavenumber: Optional[complex]
    row_boundary: "DiscreteBoundary"
    col_boundary: "DiscreteBoundary"

    @property
    def shape(self) -> Tuple[int, int]:
        return self.entries.shape

    def apply(self, density: np.ndarray) -> np.ndarray:
        return self.entries @ density


def _frozen(kind, entries, k, rows, cols) -> OperatorMatrix:
    entries.setflags(write=False)
    return OperatorMatrix(entries, kind, None if k is None else complex(k), rows, cols)


@lru_cache(maxsize=16)
def kress_log_weights(n: int) -> np.ndarray:
    """Matrix ``R[i, j]`` with ``int ln(4 sin^2((t_i - s)/2)) f(s) ds ~ sum_j R[i, j] f(t_j)``."""
    half = n // 2
    t = 2.0 * np.pi * np.arange(n) / n
    m = np.arange(1, half)
    row = -(2.0 * np.pi / half) * (np.cos(np.outer(t, m)) / m).sum(axis=1) \
        - (np.pi / half ** 2) * np.cos(half * t)
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    mat = row[idx]
    mat.setflags(write=False)
    return mat


def _check_k(k) -> complex:
    k = complex(k)
    if k == 0 or not np.isfinite(k):
        raise ValueError(f"wavenumber must be finite and nonzero, got {k}")
    return k


def _reflected(k: complex) -> complex:
    # Left half-plane wavenumbers use G_k = conj(G_{-conj k}): the outgoing
    # kernel continued through the upper half-plane. The principal-branch
    # Hankel function would instead put quadrant III on another sheet.
    return complex(-k.real, k.imag) if k.real < 0 else k


def _pair(rows, cols):
    diff = rows.nodes[:, None, :] - cols.nodes[None, :, :]
    r = np.hypot(diff[..., 0], diff[..., 1])
    dot = np.einsum("ijk,ik->ij", diff, rows.normals)
    return r, dot


def _self_geometry(boundary):
    """Distances, normal projections and the two log factors for a self pair."""
    n = boundary.n
    r, dot = _pair(boundary, boundary)
    t = boundary.params
    half_sin = 2.0 * np.abs(np.sin(0.5 * (t[:, None] - t[None, :])))
    off = ~np.eye(n, dtype=bool)
    logsin = np.zeros((n, n))
    logsin[off] = 2.0 * np.log(half_sin[off])
    # smooth remainder ln(r / (2|sin|)); tends to ln|x'(t)| on the diagonal
    logratio = np.empty((n, n))
    logratio[off] = np.log(r[off] / half_sin[off])
    np.fill_diagonal(logratio, np.log(boundary.jacobians))
    return r, dot, logsin, logratio, off


def _helmholtz_self(boundary, k: complex):
    n = boundary.n
    r, dot, logsin, _, off = _self_geometry(boundary)
    jac = boundary.jacobians[None, :]
    h = 2.0 * np.pi / n
    kr = np.where(off, k * r, 1.0)
    j0, j1, y0, y1 = bessel_jy01(kr)
    np.fill_diagonal(j0, 1.0)
    np.fill_diagonal(j1, 0.0)
    rr = np.where(off, r, 1.0)

    full_s = -0.25j * (j0 + 1j * y0) * jac
    log_s = (1.0 / (4.0 * np.pi)) * j0 * jac
    smooth_s = full_s - log_s * logsin
    np.fill_diagonal(smooth_s, (np.log(boundary.jacobians) / (2.0 * np.pi) + eta(k)) * boundary.jacobians)

    full_k = 0.25j * k * (j1 + 1j * y1) * dot / rr * jac
    log_k = -(k / (4.0 * np.pi)) * j1 * dot / rr * jac
    np.fill_diagonal(log_k, 0.0)
    smooth_k = full_k - log_k * logsin
    np.fill_diagonal(smooth_k, boundary.curvatures * boundary.jacobians / (4.0 * np.pi))

    R = kress_log_weights(n)
    return R * log_s + h * smooth_s, R * log_k + h * smooth_k


def _check_disjoint(r: np.ndarray) -> None:
    if np.min(r) < OVERLAP_TOL:
        raise SingularityError(f"boundaries overlap (min node distance {np.min(r):.3e})")


def _helmholtz_cross(rows, cols, k: complex):
    r, dot = _pair(rows, cols)
    _check_disjoint(r)
    wj = cols.arclength_weights[None, :]
    j0, j1, y0, y1 = bessel_jy01(k * r)
    s = -0.25j * (j0 + 1j * y0) * wj
    kst = 0.25j * k * (j1 + 1j * y1) * dot / r * wj
    return s, kst


def assemble_helmholtz(rows: "DiscreteBoundary", cols: "DiscreteBoundary", k) -> Tuple[OperatorMatrix, OperatorMatrix]:
    """Single layer and adjoint double layer sharing one Bessel evaluation."""
    k = _check_k(k)
    kk = _reflected(k)
    if rows is cols:
        s, kst = _helmholtz_self(rows, kk)
    else:
        s, kst = _helmholtz_cross(rows, cols, kk)
    if kk != k:
        s, kst = np.conj(s), np.conj(kst)
    return _frozen("S_k", s, k, rows, cols), _frozen("Kstar_k", kst, k, rows, cols)


def assemble_single_layer(rows: "DiscreteBoundary", cols: "DiscreteBoundary", k) -> OperatorMatrix:
    return assemble_helmholtz(rows, cols, k)[0]


def assemble_adjoint_double_layer(rows: "DiscreteBoundary", cols: "DiscreteBoundary", k) -> OperatorMatrix:
    """Adjoint double layer ``K^{k,*}``, kernel ``(ik/4) H1(k r) (x - y).nu(x) / r``."""
    return assemble_helmholtz(rows, cols, k)[1]


def assemble_static_single_layer(boundary: "DiscreteBoundary") -> OperatorMatrix:
    n = boundary.n
    _, _, logsin, logratio, _ = _self_geometry(boundary)
    jac = boundary.jacobians[None, :]
    log_part = np.broadcast_to(jac / (4.0 * np.pi), (n, n))
    smooth = logratio / (2.0 * np.pi) * jac
    entries = kress_log_weights(n) * log_part + (2.0 * np.pi / n) * smooth
    return _frozen("S_static", entries.astype(complex), None, boundary, boundary)


def assemble_static_adjoint(boundary: "DiscreteBoundary") -> OperatorMatrix:
    """Static ``K*``; smooth kernel ``(x - y).nu(x) / (2 pi r^2)`` with diagonal ``curvature / (4 pi)``."""
    n = boundary.n
    r, dot = _pair(boundary, boundary)
    np.fill_diagonal(r, 1.0)
    kernel = dot / (2.0 * np.pi * r * r)
    np.fill_diagonal(kernel, boundary.curvatures / (4.0 * np.pi))
    entries = kernel * boundary.arclength_weights[None, :]
    return _frozen("Kstar_static", entries.astype(complex), None, boundary, boundary)


def assemble_s_hat(boundary: "DiscreteBoundary", k) -> OperatorMatrix:
    """``S_static + eta_k (., 1) 1``."""
    k = _check_k(k)
    static = assemble_static_single_layer(boundary).entries
    rank_one = eta(k) * np.outer(np.ones(boundary.n), boundary.arclength_weights)
    return _frozen("S_hat", static + rank_one, k, boundary, boundary)


def assemble_expansion_ops(boundary: "DiscreteBoundary") -> Tuple[OperatorMatrix, OperatorMatrix, OperatorMatrix, OperatorMatrix]:
    """First-order terms of the small-``k`` expansions of ``S^k`` and ``K^{k,*}``.

    Returns ``(S1_1, S1_2, K1_1, K1_2)`` with kernels ``b1 r^2``,
    ``r^2 (b1 ln r + c1)``, ``2 b1 (x - y).nu(x)`` and
    ``(x - y).nu(x) (2 b1 ln r + 2 c1 + b1)``.
    """
    n = boundary.n
    h = 2.0 * np.pi / n
    r, dot, logsin, logratio, _ = _self_geometry(boundary)
    jac = boundary.jacobians[None, :]
    R = kress_log_weights(n)
    r2 = r * r

    s11 = h * B1 * r2 * jac
    k11 = h * 2.0 * B1 * dot * jac
    # ln r = ln(4 sin^2)/2 + logratio; both log parts vanish on the diagonal
    s12 = R * (0.5 * B1 * r2 * jac) + h * (B1 * r2 * logratio + C1 * r2) * jac
    k12 = R * (B1 * dot * jac) + h * dot * (2.0 * B1 * logratio + 2.0 * C1 + B1) * jac
    return (
        _frozen("S1_1", s11.astype(complex), None, boundary, boundary),
        _frozen("S1_2", s12, None, boundary, boundary),
        _frozen("K1_1", k11.astype(complex), None, boundary, boundary),
        _frozen("K1_2", k12, None, boundary, boundary),
    )


def weighted_adjoint(op: OperatorMatrix) -> np.ndarray:
    """Adjoint with respect to the arclength-weighted pairing: ``W^-1 A^H W``."""
    w_rows = op.row_boundary.arclength_weights
    w_cols = op.col_boundary.arclength_weights
    return (op.entries.conj().T * w_rows[None, :]) / w_cols[:, None]


def _targets(boundary, points) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    d = np.hypot(pts[:, None, 0] - boundary.nodes[None, :, 0], pts[:, None, 1] - boundary.nodes[None, :, 1])
    limit = PROXIMITY_FACTOR * boundary.spacing
    close = d.min(axis=1) <= limit
    if np.any(close):
        raise ProximityError(
            f"{int(close.sum())} evaluation point(s) within {limit:.3g} of the boundary")
    return pts


def evaluate_field(boundary: "DiscreteBoundary", density, k, points) -> np.ndarray:
    """Single-layer field ``S^k[density]`` at off-boundary points."""
    k = _check_k(k)
    pts = _targets(boundary, points)
    density = np.asarray(density, dtype=complex)
    kk = _reflected(k)
    if kk != k:
        return np.conj(evaluate_field(boundary, np.conj(density), kk, pts))
    diff = pts[:, None, :] - boundary.nodes[None, :, :]
    r = np.hypot(diff[..., 0], diff[..., 1])
    j0, _, y0, _ = bessel_jy01(k * r)
    return (-0.25j * (j0 + 1j * y0)) @ (density * boundary.arclength_weights)


def evaluate_gradient(boundary: "DiscreteBoundary", density, k, points) -> np.ndarray:
    """Gradient of the single-layer field, shape ``(len(points), 2)``."""
    k = _check_k(k)
    pts = _targets(boundary, points)
    density = np.asarray(density, dtype=complex)
    kk = _reflected(k)
    if kk != k:
        return np.conj(evaluate_gradient(boundary, np.conj(density), kk, pts))
    diff = pts[:, None, :] - boundary.nodes[None, :, :]
    r = np.hypot(diff[..., 0], diff[..., 1])
    _, j1, _, y1 = bessel_jy01(k * r)
    radial = 0.25j * k * (j1 + 1j * y1) / r * (density * boundary.arclength_weights)[None, :]
    return np.einsum("pj,pjd->pd", radial, diff)
