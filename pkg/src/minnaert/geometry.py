"""Smooth closed planar curves and their equispaced quadrature discretization.

Curves are parametrized counterclockwise over ``t in [0, 2 pi)`` so that the
normal ``(y', -x') / |x'|`` points out of the enclosed domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from . import layerpot

KERNEL_TOL = 1e-8


class GeometryError(ValueError):
    """Invalid curve or discretization parameters."""


class NumericalRankError(RuntimeError):
    """The discrete static operator does not have a one-dimensional kernel."""


class ParametricCurve:
    """Base class: subclasses implement the parametrization and its derivatives."""

    center: Tuple[float, float]

    def position(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def derivative(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def second_derivative(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def descriptor(self) -> dict:
        raise NotImplementedError

    def translated(self, offset: Sequence[float]) -> "ParametricCurve":
        raise NotImplementedError


@dataclass(frozen=True)
class Circle(ParametricCurve):
    center: Tuple[float, float]
    radius: float

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise GeometryError(f"radius must be positive, got {self.radius}")

    def position(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack([self.center[0] + self.radius * np.cos(t),
                         self.center[1] + self.radius * np.sin(t)], axis=-1)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        return self.radius * np.stack([-np.sin(t), np.cos(t)], axis=-1)

    def second_derivative(self, t):
        t = np.asarray(t, dtype=float)
        return -self.radius * np.stack([np.cos(t), np.sin(t)], axis=-1)

    def descriptor(self) -> dict:
        return {"type": "circle", "center": list(self.center), "radius": self.radius}

    def translated(self, offset):
        return Circle((self.center[0] + offset[0], self.center[1] + offset[1]), self.radius)

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius


@dataclass(frozen=True)
class Ellipse(ParametricCurve):
    center: Tuple[float, float]
    semi_axes: Tuple[float, float]

    def __post_init__(self):
        a, b = self.semi_axes
        if not (a > 0 and b > 0):
            raise GeometryError(f"semi_axes must be positive, got {self.semi_axes}")

    def position(self, t):
        t = np.asarray(t, dtype=float)
        a, b = self.semi_axes
        return np.stack([self.center[0] + a * np.cos(t), self.center[1] + b * np.sin(t)], axis=-1)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        a, b = self.semi_axes
        return np.stack([-a * np.sin(t), b * np.cos(t)], axis=-1)

    def second_derivative(self, t):
        t = np.asarray(t, dtype=float)
        a, b = self.semi_axes
        return np.stack([-a * np.cos(t), -b * np.sin(t)], axis=-1)

    def descriptor(self) -> dict:
        return {"type": "ellipse", "center": list(self.center), "semi_axes": list(self.semi_axes)}

    def translated(self, offset):
        return Ellipse((self.center[0] + offset[0], self.center[1] + offset[1]), self.semi_axes)

    @property
    def diameter(self) -> float:
        return 2.0 * max(self.semi_axes)


@dataclass(frozen=True)
class StarCurve(ParametricCurve):
    """Star-shaped curve with radius ``r(t) = sum_m a_m cos(m t) + b_m sin(m t)``."""

    center: Tuple[float, float]
    cos: Tuple[float, ...]
    sin: Tuple[float, ...] = ()

    def __post_init__(self):
        if not self.cos:
            raise GeometryError("StarCurve needs at least the constant coefficient")
        t = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
        if np.min(self._radius(t, 0)) <= 0:
            raise GeometryError("StarCurve radius must stay positive")

    def _radius(self, t, deriv):
        r = np.zeros_like(t)
        for m, a in enumerate(self.cos):
            r = r + a * _trig_derivative(np.cos, m, t, deriv)
        for m, b in enumerate(self.sin):
            r = r + b * _trig_derivative(np.sin, m, t, deriv)
        return r

    def position(self, t):
        t = np.asarray(t, dtype=float)
        r = self._radius(t, 0)
        return np.stack([self.center[0] + r * np.cos(t), self.center[1] + r * np.sin(t)], axis=-1)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        r, dr = self._radius(t, 0), self._radius(t, 1)
        return np.stack([dr * np.cos(t) - r * np.sin(t), dr * np.sin(t) + r * np.cos(t)], axis=-1)

    def second_derivative(self, t):
        t = np.asarray(t, dtype=float)
        r, dr, ddr = self._radius(t, 0), self._radius(t, 1), self._radius(t, 2)
        return np.stack([(ddr - r) * np.cos(t) - 2 * dr * np.sin(t),
                         (ddr - r) * np.sin(t) + 2 * dr * np.cos(t)], axis=-1)

    def descriptor(self) -> dict:
        return {"type": "star", "center": list(self.center), "cos": list(self.cos), "sin": list(self.sin)}

    def translated(self, offset):
        return StarCurve((self.center[0] + offset[0], self.center[1] + offset[1]), self.cos, self.sin)

    @property
    def diameter(self) -> float:
        t = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
        return 2.0 * float(np.max(self._radius(t, 0)))


def _trig_derivative(fn, m, t, deriv):
    # d^n/dt^n of cos(m t) / sin(m t)
    shift = deriv * np.pi / 2
    if fn is np.cos:
        return m ** deriv * np.cos(m * t + shift)
    return m ** deriv * np.sin(m * t + shift)


def curve_from_descriptor(desc: dict) -> ParametricCurve:
    kind = desc.get("type")
    center = tuple(float(c) for c in desc.get("center", (0.0, 0.0)))
    if kind == "circle":
        return Circle(center, float(desc["radius"]))
    if kind == "ellipse":
        a, b = desc["semi_axes"]
        return Ellipse(center, (float(a), float(b)))
    if kind == "star":
        return StarCurve(center, tuple(map(float, desc["cos"])), tuple(map(float, desc.get("sin", ()))))
    raise GeometryError(f"unknown curve type {kind!r}")


@dataclass(frozen=True, eq=False)
class DiscreteBoundary:
    """Equispaced trapezoidal discretization of a closed curve.

    ``weights`` are the parameter weights ``2 pi / N``; the arclength
    quadrature weight of node ``j`` is ``weights[j] * jacobians[j]``.
    """

    params: np.ndarray
    nodes: np.ndarray
    normals: np.ndarray
    jacobians: np.ndarray
    curvatures: np.ndarray
    weights: np.ndarray
    curve: ParametricCurve = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.params)

    @property
    def center(self) -> np.ndarray:
        return np.asarray(self.curve.center, dtype=float)

    @property
    def arclength_weights(self) -> np.ndarray:
        return self.weights * self.jacobians

    @property
    def spacing(self) -> float:
        """Largest distance between consecutive nodes (arclength estimate)."""
        return float(np.max(self.arclength_weights))

    def inner(self, f: np.ndarray, g: np.ndarray) -> complex:
        """Discrete ``L^2`` pairing ``sum f conj(g) w |x'|``."""
        return complex(np.sum(f * np.conj(g) * self.arclength_weights))


def discretize(curve: ParametricCurve, n: int) -> DiscreteBoundary:
    if not isinstance(n, (int, np.integer)) or n < 16 or n % 2:
        raise GeometryError(f"N must be an even integer >= 16, got {n!r}")
    t = 2.0 * np.pi * np.arange(n) / n
    x = curve.position(t)
    dx = curve.derivative(t)
    ddx = curve.second_derivative(t)
    jac = np.hypot(dx[:, 0], dx[:, 1])
    if np.any(jac <= 0):
        raise GeometryError("curve is not regular: vanishing derivative")
    normals = np.stack([dx[:, 1], -dx[:, 0]], axis=-1) / jac[:, None]
    curvature = (dx[:, 0] * ddx[:, 1] - dx[:, 1] * ddx[:, 0]) / jac ** 3
    weights = np.full(n, 2.0 * np.pi / n)
    arrays = (t, x, normals, jac, curvature, weights)
    for a in arrays:
        a.setflags(write=False)
    return DiscreteBoundary(*arrays, curve=curve)


def make_circle(center: Sequence[float], radius: float, n: int) -> DiscreteBoundary:
    return discretize(Circle((float(center[0]), float(center[1])), float(radius)), n)


def make_ellipse(center: Sequence[float], semi_axes: Sequence[float], n: int) -> DiscreteBoundary:
    return discretize(Ellipse((float(center[0]), float(center[1])),
                              (float(semi_axes[0]), float(semi_axes[1]))), n)


def perimeter(boundary: DiscreteBoundary) -> float:
    return float(np.sum(boundary.arclength_weights))


def area(boundary: DiscreteBoundary) -> float:
    """Enclosed area by Green's theorem, ``(1/2) int x . nu ds``."""
    x = boundary.nodes
    xdotn = np.sum(x * boundary.normals, axis=1)
    return float(0.5 * np.sum(xdotn * boundary.arclength_weights))


@dataclass(frozen=True, eq=False)
class EquilibriumDensity:
    """Normalized null function ``psi0`` of ``-1/2 I + K0*``.

    ``gamma0`` is the constant value of the static single layer of ``psi0``
    and ``pairing`` is ``(psi0, 1)``.
    """

    values: np.ndarray
    gamma0: float
    pairing: float
    constancy_defect: float
    residual: float

    def case(self, boundary: DiscreteBoundary) -> str:
        """``"I"`` when ``gamma0`` vanishes (to the noise floor), else ``"II"``."""
        return "I" if abs(self.gamma0) < KERNEL_TOL * perimeter(boundary) else "II"


def equilibrium_density(boundary: DiscreteBoundary) -> EquilibriumDensity:
    kstar = layerpot.assemble_static_adjoint(boundary).entries.real
    op = kstar - 0.5 * np.eye(boundary.n)
    _, s, vh = np.linalg.svd(op)
    if not (s[-1] <= KERNEL_TOL * s[0] and s[-2] > KERNEL_TOL * s[0]):
        raise NumericalRankError(
            f"kernel of -1/2 I + K0* is not one-dimensional (sigma_min={s[-1]:.3e}, "
            f"sigma_next={s[-2]:.3e})")
    psi = vh[-1].real.copy()
    w = boundary.arclength_weights
    psi /= math.sqrt(np.sum(psi * psi * w))
    pairing = float(np.sum(psi * w))
    if pairing < 0:
        psi = -psi
        pairing = -pairing
    s_static = layerpot.assemble_static_single_layer(boundary).entries.real
    image = s_static @ psi
    gamma0 = float(np.mean(image))
    defect = float(np.max(np.abs(image - gamma0)))
    residual = float(np.max(np.abs(op @ psi)))
    psi.setflags(write=False)
    return EquilibriumDensity(psi, gamma0, pairing, defect, residual)
