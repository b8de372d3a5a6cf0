"""Bubble physics: material parameters, the boundary-integral block system,
resonance computations (numerical and closed form) and scattering solves.

For a bubble ``D`` the total field is represented as ``S^{k_b}[psi_b]`` inside
and ``u_in + S^k[psi]`` outside. The transmission conditions then read

    A(omega, delta) [psi_b, psi] = [u_in, delta * du_in/dnu]

with ``A = [[S^{k_b}, -S^k], [-1/2 I + K^{k_b,*}, -delta (1/2 I + K^{k,*})]]``.
"""

from __future__ import annotations

import cmath
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from . import geometry, layerpot, spectral
from .special import B1, C1, eta, hankel1

logger = logging.getLogger(__name__)

#: Reciprocal condition number below which a scattering solve counts as resonant.
RCOND_TOL = 1e-10
#: Relative ``omega`` offsets for the second and third Muller starting points.
GUESS_SPREAD = (0.01, -0.01j)


class ParameterError(ValueError):
    pass


class GuessDomainError(ValueError):
    """Initial guess outside quadrant IV without the override flag."""


class BranchError(RuntimeError):
    """A root landed outside the physical quadrant."""


class ModeCollapseError(RuntimeError):
    """Both normal-mode searches converged to the same frequency."""


class NearResonanceError(np.linalg.LinAlgError):
    """The scattering system is numerically singular at this frequency."""


# --------------------------------------------------------------------------
# parameters and configurations
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MaterialParams:
    """Background ``(rho, kappa)`` and bubble ``(rho_b, kappa_b)`` parameters."""

    rho: float
    kappa: float
    rho_b: float
    kappa_b: float

    def __post_init__(self):
        for name in ("rho", "kappa", "rho_b", "kappa_b"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be a positive finite number, got {value!r}")

    @classmethod
    def table1(cls, delta: float, background: float = 1000.0) -> "MaterialParams":
        """``rho = kappa = background`` and ``rho_b = kappa_b = background * delta``."""
        return cls(background, background, background * delta, background * delta)

    @property
    def v(self) -> float:
        return math.sqrt(self.rho / self.kappa)

    @property
    def v_b(self) -> float:
        return math.sqrt(self.rho_b / self.kappa_b)

    @property
    def delta(self) -> float:
        return self.rho_b / self.rho

    @property
    def tau(self) -> float:
        return math.sqrt(self.rho_b * self.kappa / (self.rho * self.kappa_b))

    def k(self, omega) -> complex:
        return complex(omega) * self.v

    def k_b(self, omega) -> complex:
        return complex(omega) * self.v_b

    def scaled(self, factor: float) -> "MaterialParams":
        return MaterialParams(self.rho * factor, self.kappa * factor,
                              self.rho_b * factor, self.kappa_b * factor)

    def to_dict(self) -> dict:
        return {"rho": self.rho, "kappa": self.kappa, "rho_b": self.rho_b, "kappa_b": self.kappa_b}


@dataclass(frozen=True, eq=False)
class BubbleConfiguration:
    boundaries: Tuple[geometry.DiscreteBoundary, ...]
    materials: MaterialParams
    cross_delta: bool = False
    """Scale the inter-bubble ``K*`` blocks by ``delta`` (off by default)."""

    def __post_init__(self):
        if len(self.boundaries) not in (1, 2):
            raise ParameterError(f"expected 1 or 2 bubbles, got {len(self.boundaries)}")
        if len(self.boundaries) == 2:
            a, b = self.boundaries
            diff = a.nodes[:, None, :] - b.nodes[None, :, :]
            gap = float(np.min(np.hypot(diff[..., 0], diff[..., 1])))
            if gap < layerpot.OVERLAP_TOL:
                raise layerpot.SingularityError(f"bubbles overlap (min node distance {gap:.3e})")

    @property
    def centers(self) -> List[np.ndarray]:
        return [b.center for b in self.boundaries]

    @property
    def n_bubbles(self) -> int:
        return len(self.boundaries)

    @classmethod
    def single(cls, curve: geometry.ParametricCurve, materials: MaterialParams, n: int) -> "BubbleConfiguration":
        return cls((geometry.discretize(curve, n),), materials)

    @classmethod
    def unit_circle(cls, materials: MaterialParams, n: int = 512) -> "BubbleConfiguration":
        return cls((geometry.make_circle((0.0, 0.0), 1.0, n),), materials)

    @classmethod
    def two_circles(cls, d: float, materials: MaterialParams, n: int = 512, radius: float = 1.0,
                    convention: str = "gap", cross_delta: bool = False) -> "BubbleConfiguration":
        """Two equal circles on the x-axis, symmetric about the origin.

        ``convention="gap"`` reads ``d`` as the boundary-to-boundary distance,
        ``"center"`` as the distance between centers.
        """
        separation = center_distance(d, radius, convention)
        half = 0.5 * separation
        b1 = geometry.make_circle((-half, 0.0), radius, n)
        b2 = geometry.make_circle((half, 0.0), radius, n)
        return cls((b1, b2), materials, cross_delta)


def center_distance(d: float, radius: float, convention: str) -> float:
    if convention == "gap":
        separation = d + 2.0 * radius
    elif convention == "center":
        separation = d
    else:
        raise ParameterError(f"distance convention must be 'gap' or 'center', got {convention!r}")
    if not (d > 0 and separation > 2.0 * radius):
        raise ParameterError(f"bubbles of radius {radius} at {convention} distance {d} overlap")
    return separation


@dataclass(frozen=True, eq=False)
class BlockSystem:
    """Dense block matrix with a named block layout.

    ``layout[i][j]`` names block ``(i, j)``; ``"0"`` marks an exact zero block.
    """

    entries: np.ndarray
    layout: Tuple[Tuple[str, ...], ...]
    block_sizes: Tuple[int, ...]
    omega: complex

    def _slice(self, i: int) -> slice:
        start = sum(self.block_sizes[:i])
        return slice(start, start + self.block_sizes[i])

    def block(self, i: int, j: int) -> np.ndarray:
        return self.entries[self._slice(i), self._slice(j)]

    @property
    def norm_max(self) -> float:
        return float(np.max(np.abs(self.entries)))


@dataclass(frozen=True)
class ResonanceResult:
    omega: complex
    method: str
    residual: float
    iterations: int
    flagged: bool = False
    mode: Optional[str] = None

    @property
    def in_quadrant_iv(self) -> bool:
        return self.omega.real > 0 and self.omega.imag <= 0


@dataclass(frozen=True)
class ScatteringCoefficient:
    g: complex
    regime: str
    omega_M: float
    damping_gamma: complex


# --------------------------------------------------------------------------
# assembly
# --------------------------------------------------------------------------


def _check_omega(omega) -> complex:
    omega = complex(omega)
    if omega == 0 or not cmath.isfinite(omega):
        raise ParameterError(f"omega must be finite and nonzero, got {omega}")
    return omega


def _self_blocks(boundary, materials, omega):
    s_kb, k_kb = layerpot.assemble_helmholtz(boundary, boundary, materials.k_b(omega))
    s_k, k_k = layerpot.assemble_helmholtz(boundary, boundary, materials.k(omega))
    eye = np.eye(boundary.n)
    delta = materials.delta
    return (s_kb.entries, -s_k.entries,
            -0.5 * eye + k_kb.entries, -delta * (0.5 * eye + k_k.entries))


def assemble_A(omega, config: BubbleConfiguration) -> BlockSystem:
    omega = _check_omega(omega)
    if config.n_bubbles != 1:
        raise ParameterError("assemble_A needs a single-bubble configuration")
    a11, a12, a21, a22 = _self_blocks(config.boundaries[0], config.materials, omega)
    entries = np.block([[a11, a12], [a21, a22]])
    n = config.boundaries[0].n
    layout = (("S_kb", "-S_k"), ("-1/2+Kstar_kb", "-delta(1/2+Kstar_k)"))
    return BlockSystem(entries, layout, (n, n), omega)


def assemble_A2(omega, config: BubbleConfiguration) -> BlockSystem:
    """Two-bubble system, unknowns ordered ``(psi_b1, psi_1, psi_b2, psi_2)``.

    The exterior densities of the two bubbles interact through the cross
    single-layer and adjoint double-layer blocks; the interior densities do
    not couple. By default the cross ``K*`` blocks carry no ``delta`` factor;
    ``config.cross_delta`` switches to the flux-consistent ``delta``-scaled
    variant.
    """
    omega = _check_omega(omega)
    if config.n_bubbles != 2:
        raise ParameterError("assemble_A2 needs a two-bubble configuration")
    b1, b2 = config.boundaries
    mat = config.materials
    k = mat.k(omega)
    s1 = _self_blocks(b1, mat, omega)
    s2 = _self_blocks(b2, mat, omega)
    s12, k12 = layerpot.assemble_helmholtz(b1, b2, k)
    s21, k21 = layerpot.assemble_helmholtz(b2, b1, k)
    scale = mat.delta if config.cross_delta else 1.0
    z12 = np.zeros((b1.n, b2.n), dtype=complex)
    z21 = np.zeros((b2.n, b1.n), dtype=complex)
    entries = np.block([
        [s1[0], s1[1], z12, -s12.entries],
        [s1[2], s1[3], z12, -scale * k12.entries],
        [z21, -s21.entries, s2[0], s2[1]],
        [z21, -scale * k21.entries, s2[2], s2[3]],
    ])
    kd = "-delta*Kstar_k_ij" if config.cross_delta else "-Kstar_k_ij"
    layout = (
        ("S_kb_1", "-S_k_1", "0", "-S_k_12"),
        ("-1/2+Kstar_kb_1", "-delta(1/2+Kstar_k_1)", "0", kd.replace("ij", "12")),
        ("0", "-S_k_21", "S_kb_2", "-S_k_2"),
        ("0", kd.replace("ij", "21"), "-1/2+Kstar_kb_2", "-delta(1/2+Kstar_k_2)"),
    )
    return BlockSystem(entries, layout, (b1.n, b1.n, b2.n, b2.n), omega)


def assemble_system(omega, config: BubbleConfiguration) -> BlockSystem:
    return assemble_A(omega, config) if config.n_bubbles == 1 else assemble_A2(omega, config)


# --------------------------------------------------------------------------
# characteristic values
# --------------------------------------------------------------------------


def objective(omega, config: BubbleConfiguration, method: str = "eig") -> complex:
    """Min-modulus eigenvalue of the block system divided by ``max |A_ij|``.

    ``method="svd"`` returns the smallest singular value instead and
    ``"arnoldi"`` finds the eigenvalue by shift-invert iteration.
    """
    system = assemble_system(omega, config)
    scale = system.norm_max
    if method == "svd":
        return spectral.min_singular_value(system.entries) / scale
    if method == "eig":
        return spectral.min_modulus_eigenvalue(system.entries, "dense") / scale
    if method == "arnoldi":
        return spectral.min_modulus_eigenvalue(system.entries, "arnoldi") / scale
    raise ParameterError(f"unknown objective method {method!r}")


def _starting_points(guess: complex) -> Tuple[complex, complex, complex]:
    return guess, guess * (1.0 + GUESS_SPREAD[0]), guess * (1.0 + GUESS_SPREAD[1])


def characteristic_value(config: BubbleConfiguration, initial_guess, tol: float = spectral.DEFAULT_TOL,
                         max_iter: int = spectral.DEFAULT_MAX_ITER, allow_upper: bool = False,
                         method: str = "eig") -> ResonanceResult:
    """Muller search for a zero of the min-modulus eigenvalue objective.

    ``allow_upper`` permits guesses and roots with positive imaginary part,
    which the antisymmetric two-bubble mode can have when the bubbles are
    close together.
    """
    guess = complex(initial_guess)
    if guess.real <= 0 or (guess.imag > 0 and not allow_upper):
        raise GuessDomainError(f"initial guess {guess} is not in quadrant IV")
    res = spectral.muller(lambda w: objective(w, config, method), *_starting_points(guess),
                          tol=tol, max_iter=max_iter)
    omega = res.root
    if omega.real <= 0:
        raise BranchError(f"characteristic value {omega} has non-positive real part")
    flagged = omega.imag > 0
    if flagged and not allow_upper:
        raise BranchError(f"characteristic value {omega} is outside quadrant IV")
    return ResonanceResult(omega, "characteristic_value", res.residual, res.iterations, flagged)


def prescan(config: BubbleConfiguration, re_values: Sequence[float], im_values: Sequence[float],
            method: str = "eig") -> Tuple[complex, np.ndarray]:
    """Evaluate ``|objective|`` on a rectangular grid and return its argmin."""
    re_values = np.asarray(re_values, dtype=float)
    im_values = np.asarray(im_values, dtype=float)
    grid = np.empty((len(im_values), len(re_values)))
    for i, y in enumerate(im_values):
        for j, x in enumerate(re_values):
            grid[i, j] = abs(objective(complex(x, y), config, method))
    i, j = np.unravel_index(np.argmin(grid), grid.shape)
    return complex(re_values[j], im_values[i]), grid


def _classify_mode(omega: complex, config: BubbleConfiguration) -> str:
    system = assemble_A2(omega, config)
    _, vec = spectral.min_singular_value(system.entries, return_vector=True)
    b1, b2 = config.boundaries
    n1 = b1.n
    # interior densities of the two bubbles
    m1 = np.sum(vec[:n1] * b1.arclength_weights)
    m2 = np.sum(vec[2 * n1:2 * n1 + b2.n] * b2.arclength_weights)
    return "symmetric" if (m1 * np.conj(m2)).real > 0 else "antisymmetric"


def normal_modes_two_bubbles(config: BubbleConfiguration, guesses: Tuple[complex, complex],
                             tol: float = spectral.DEFAULT_TOL, max_iter: int = spectral.DEFAULT_MAX_ITER,
                             method: str = "eig") -> Tuple[ResonanceResult, ResonanceResult]:
    """Symmetric and antisymmetric characteristic values of the two-bubble system.

    Each guess seeds one search. The modes are labelled from the minimal
    singular vector: in-phase interior densities mean symmetric.
    """
    if config.n_bubbles != 2:
        raise ParameterError("normal modes need a two-bubble configuration")
    found = []
    for guess in guesses:
        r = characteristic_value(config, guess, tol, max_iter, allow_upper=True, method=method)
        found.append(r)
    if abs(found[0].omega - found[1].omega) < max(tol, 1e-8) * max(1.0, abs(found[0].omega)):
        raise ModeCollapseError(f"both searches converged to {found[0].omega}")
    labelled = []
    for r in found:
        mode = _classify_mode(r.omega, config)
        labelled.append(ResonanceResult(r.omega, r.method, r.residual, r.iterations, r.flagged, mode))
    modes = {r.mode for r in labelled}
    if modes != {"symmetric", "antisymmetric"}:
        raise ModeCollapseError(f"both roots classify as {modes.pop()}: "
                                f"{labelled[0].omega}, {labelled[1].omega}")
    labelled.sort(key=lambda r: r.mode != "symmetric")
    return labelled[0], labelled[1]


# --------------------------------------------------------------------------
# closed-form resonances
# --------------------------------------------------------------------------


def resonance_formula_3d(cap: float, vol: float, tau: float, v: float, delta: float) -> Tuple[complex, complex]:
    """Leading-order Minnaert resonances ``(omega00, omega01)`` of a 3D bubble."""
    for name, value in (("cap", cap), ("vol", vol), ("tau", tau), ("v", v)):
        if not value > 0:
            raise ParameterError(f"{name} must be positive, got {value}")
    if delta < 0:
        raise ParameterError(f"delta must be non-negative, got {delta}")
    re = math.sqrt(cap / (tau * tau * v * v * vol)) * math.sqrt(delta)
    im = -cap * cap / (8.0 * math.pi * tau * tau * v * vol) * delta
    return complex(re, im), complex(-re, im)


@dataclass(frozen=True)
class Formula2DTerms:
    """Geometric ingredients of the 2D transcendental resonance equation."""

    vol: float
    gamma0: float
    pairing: float
    case: str


def formula_2d_terms(boundary: geometry.DiscreteBoundary) -> Formula2DTerms:
    eq = geometry.equilibrium_density(boundary)
    return Formula2DTerms(geometry.area(boundary), eq.gamma0, eq.pairing, eq.case(boundary))


def _linear_coefficient(terms: Formula2DTerms, materials: MaterialParams, corrected: bool) -> complex:
    # S_D[psi0] = gamma0 with the 1/(2 pi) kernel gives int ln|x-y| psi0 = 2 pi gamma0,
    # so the consistent term is +2 pi gamma0/p; the printed form carries -gamma0/p
    shift = 2.0 * math.pi * terms.gamma0 / terms.pairing if corrected else -terms.gamma0 / terms.pairing
    return math.log(materials.v_b) + 1.0 + C1 / B1 + shift


def formula_2d_residual(omega, terms: Formula2DTerms, materials: MaterialParams,
                        corrected: bool = False) -> complex:
    """``w^2 ln w + [(ln v_b + 1 + c1/b1) - gamma0/p] w^2 - a delta / (4 Vol b1)``.

    With ``corrected=True`` two changes are made. The ``-gamma0/p`` term
    becomes ``+2 pi gamma0/p``, so the root scales as ``1/R`` under dilation
    by ``R``. The contrast enters as ``delta/v_b^2``, matching the 3D law
    and the full solver for ``v_b != 1``. Both forms agree on the unit disk
    with ``v_b = 1``.
    """
    omega = complex(omega)
    a = _a_constant(omega, terms, materials)
    lin = _linear_coefficient(terms, materials, corrected)
    w2 = omega * omega
    return w2 * cmath.log(omega) + lin * w2 - a * _contrast(materials, corrected) / (4.0 * terms.vol * B1)


def _contrast(materials: MaterialParams, corrected: bool) -> float:
    return materials.delta / materials.v_b ** 2 if corrected else materials.delta


def _a_constant(omega: complex, terms: Formula2DTerms, materials: MaterialParams) -> complex:
    eta_k = eta(materials.k(omega))
    eta_kb = eta(materials.k_b(omega))
    if terms.case == "I":
        return eta_kb / eta_k
    return (terms.gamma0 + terms.pairing * eta_kb) / (terms.gamma0 + terms.pairing * eta_k)


def _formula_2d_seed(terms: Formula2DTerms, materials: MaterialParams, corrected: bool,
                     sweeps: int = 40) -> complex:
    # w = sqrt(Q / (ln w + C')) is contractive for small delta
    lin = _linear_coefficient(terms, materials, corrected)
    omega = complex(math.sqrt(materials.delta), -0.1 * math.sqrt(materials.delta))
    for _ in range(sweeps):
        q = _a_constant(omega, terms, materials) * _contrast(materials, corrected) / (4.0 * terms.vol * B1)
        nxt = cmath.sqrt(q / (cmath.log(omega) + lin))
        if nxt.real < 0:
            nxt = -nxt
        omega = nxt
    return omega


def resonance_formula_2d(config: BubbleConfiguration, tol: float = 1e-14,
                         max_iter: int = spectral.DEFAULT_MAX_ITER,
                         terms: Optional[Formula2DTerms] = None, corrected: bool = False) -> ResonanceResult:
    """Root in quadrant IV of the 2D transcendental resonance equation.

    The constant ``a`` is re-evaluated at every iterate, so Case II shapes
    (nonzero ``gamma0``) and unequal wave speeds are handled.
    """
    if config.n_bubbles != 1:
        raise ParameterError("the 2D formula applies to a single bubble")
    terms = terms or formula_2d_terms(config.boundaries[0])
    mat = config.materials
    seed = _formula_2d_seed(terms, mat, corrected)
    res = spectral.muller(lambda w: formula_2d_residual(w, terms, mat, corrected), *_starting_points(seed),
                          tol=tol, max_iter=max_iter)
    omega = res.root
    if not (omega.real > 0 and omega.imag <= 0):
        raise BranchError(f"2D formula root {omega} is outside quadrant IV")
    return ResonanceResult(omega, "formula_2d", res.residual, res.iterations)


def scattering_coefficient_3d(omega: float, materials: MaterialParams, cap: float, vol: float) -> ScatteringCoefficient:
    """Point-scatterer coefficient ``g`` of a 3D bubble at real frequency ``omega``.

    Regime II (``0.1 sqrt(delta) <= omega <= 10 sqrt(delta)``) uses the
    resonant form ``Cap / (1 - (omega_M/omega)^2 + i gamma)``. Regime III
    returns the leading value ``Cap``; Regime I returns the low-frequency
    estimate ``-Cap (omega/omega_M)^2``, which is of order ``omega^2/delta``.
    """
    if not (omega > 0 and math.isfinite(omega)):
        raise ParameterError(f"omega must be positive, got {omega}")
    if not (cap > 0 and vol > 0):
        raise ParameterError("cap and vol must be positive")
    delta, tau, v = materials.delta, materials.tau, materials.v
    omega_m = math.sqrt(cap * delta / (tau * tau * v * v * vol))
    gamma = (tau + 1.0) * v * cap * omega / (8.0 * math.pi) \
        - (tau - 1.0) * cap * cap * delta / (8.0 * math.pi * tau * tau * v * vol * omega)
    root = math.sqrt(delta)
    if omega < 0.1 * root:
        regime, g = "I", complex(-cap * (omega / omega_m) ** 2)
    elif omega > 10.0 * root:
        regime, g = "III", complex(cap)
    else:
        regime = "II"
        g = cap / (1.0 - (omega_m / omega) ** 2 + 1j * gamma)
    return ScatteringCoefficient(complex(g), regime, omega_m, complex(gamma))


def regime_of(omega: float, delta: float) -> str:
    """Regime tag from the one-decade thresholds on ``omega / sqrt(delta)``."""
    ratio = omega / math.sqrt(delta)
    return "I" if ratio < 0.1 else ("III" if ratio > 10.0 else "II")


# --------------------------------------------------------------------------
# scattering
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ScatteringSolution:
    """Interior and exterior densities per bubble for a plane-wave incidence."""

    psi_b: Tuple[np.ndarray, ...]
    psi: Tuple[np.ndarray, ...]
    omega: complex
    direction: np.ndarray
    config: BubbleConfiguration = field(repr=False)
    rcond: float = float("nan")

    @property
    def k(self) -> complex:
        return self.config.materials.k(self.omega)

    def incident(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.exp(1j * self.k * (pts @ self.direction))

    def scattered(self, points) -> np.ndarray:
        """Exterior scattered field ``sum_i S^k[psi_i]``."""
        total = 0.0
        for b, psi in zip(self.config.boundaries, self.psi):
            total = total + layerpot.evaluate_field(b, psi, self.k, points)
        return np.asarray(total)

    def interior(self, points, bubble: int = 0) -> np.ndarray:
        b = self.config.boundaries[bubble]
        return layerpot.evaluate_field(b, self.psi_b[bubble], self.config.materials.k_b(self.omega), points)


def _unit(direction) -> np.ndarray:
    d = np.asarray(direction, dtype=float).reshape(2)
    norm = float(np.hypot(*d))
    if norm == 0:
        return d
    return d / norm


def solve_scattering(config: BubbleConfiguration, omega, direction=(1.0, 0.0), amplitude: complex = 1.0,
                     allow_near_resonance: bool = False) -> ScatteringSolution:
    """Densities for the incident plane wave ``amplitude * exp(i k d.x)``.

    Raises :class:`NearResonanceError` when the reciprocal condition number
    of the system drops below ``RCOND_TOL``; with ``allow_near_resonance``
    a warning is issued instead and the solve proceeds.
    """
    omega = _check_omega(omega)
    d = _unit(direction)
    system = assemble_system(omega, config)
    k = config.materials.k(omega)
    delta = config.materials.delta
    rhs = []
    for b in config.boundaries:
        u_in = amplitude * np.exp(1j * k * (b.nodes @ d))
        du_in = 1j * k * (b.normals @ d) * u_in
        rhs.extend([u_in, delta * du_in])
    rhs = np.concatenate(rhs)
    rcond = spectral.reciprocal_condition(system.entries)
    if rcond < RCOND_TOL:
        msg = (f"scattering system is near-singular at omega={omega} (rcond={rcond:.2e}); "
               f"omega is close to a characteristic value")
        if not allow_near_resonance:
            raise NearResonanceError(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        sol = np.linalg.solve(system.entries, rhs)
    else:
        sol = spectral.solve_linear(system.entries, rhs)
    psi_b, psi = [], []
    start = 0
    for b in config.boundaries:
        psi_b.append(sol[start:start + b.n])
        psi.append(sol[start + b.n:start + 2 * b.n])
        start += 2 * b.n
    return ScatteringSolution(tuple(psi_b), tuple(psi), omega, d, config, rcond)


def green(x, y, k) -> complex:
    """``G(x, y, k) = -(i/4) H0(k |x - y|)``."""
    r = math.hypot(x[0] - y[0], x[1] - y[1])
    return -0.25j * hankel1(0, k * r)


def extract_monopole(config: BubbleConfiguration, omega, far_point, direction=(1.0, 0.0),
                     solution: Optional[ScatteringSolution] = None) -> complex:
    """Numerical scattering coefficient ``u_s(x) / (u_in(y0) G(x, y0, k))``.

    ``y0`` is the center of the first bubble and ``x`` must lie more than
    50 diameters away from it.
    """
    boundary = config.boundaries[0]
    y0 = boundary.center
    x = np.asarray(far_point, dtype=float)
    dist = float(np.hypot(*(x - y0)))
    diam = boundary.curve.diameter
    if dist <= 50.0 * diam:
        raise layerpot.ProximityError(
            f"far point at distance {dist:.4g} is within 50 diameters ({50 * diam:.4g}) of the bubble")
    sol = solution or solve_scattering(config, omega, direction)
    u_s = complex(sol.scattered(x)[0])
    u_in_y0 = complex(sol.incident(y0)[0])
    return u_s / (u_in_y0 * green(x, y0, sol.k))
