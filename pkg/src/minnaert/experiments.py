"""Experiment runners behind the command-line interface."""

from __future__ import annotations

import logging
import math
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Sequence, TypeVar

import numpy as np

from . import __version__, bubble, geometry, layerpot, spectral
from .config import ExperimentConfig
from .output import ResultTable
from .special import B1, C1, MAX_ABS_ARG

logger = logging.getLogger(__name__)

WORKERS_ENV = "MINNAERT_WORKERS"
T = TypeVar("T")


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}") from None
        if value < 1:
            raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
        return value
    return os.cpu_count() or 1


def parallel_map(fn: Callable[..., T], items: Iterable) -> List[T]:
    """Map in a thread pool; results come back in input order."""
    items = list(items)
    workers = min(worker_count(), len(items)) or 1
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _new_table(cfg: ExperimentConfig, columns: Sequence[str]) -> ResultTable:
    return ResultTable(tuple(columns), metadata={
        "experiment": cfg.experiment,
        "config_hash": cfg.config_hash(),
        "code_version": __version__,
        "config": cfg.to_dict(),
    })


def _finish(table: ResultTable, start: float) -> ResultTable:
    table.metadata["runtime_seconds"] = time.perf_counter() - start
    return table


def _materials(cfg: ExperimentConfig) -> bubble.MaterialParams:
    if cfg.materials is not None:
        return bubble.MaterialParams(**cfg.materials)
    return bubble.MaterialParams.table1(cfg.delta, cfg.background)


def _single_curve(cfg: ExperimentConfig) -> geometry.ParametricCurve:
    if cfg.geometry is not None:
        return geometry.curve_from_descriptor(cfg.geometry)
    return geometry.Circle((0.0, 0.0), cfg.radius)


def _annotate(exc: Exception, label: str) -> Exception:
    exc.args = (f"{label}: {exc.args[0] if exc.args else exc}",) + tuple(exc.args[1:])
    return exc


# --------------------------------------------------------------------------


def run_table1(cfg: ExperimentConfig) -> ResultTable:
    """Characteristic value and formula root per contrast ``delta``."""
    start = time.perf_counter()
    curve = _single_curve(cfg)
    boundary = geometry.discretize(curve, cfg.n)
    terms = bubble.formula_2d_terms(boundary)

    def row(delta):
        try:
            mats = bubble.MaterialParams.table1(delta, cfg.background)
            config = bubble.BubbleConfiguration((boundary,), mats)
            formula = bubble.resonance_formula_2d(config, terms=terms)
            numeric = bubble.characteristic_value(config, formula.omega, cfg.tol, cfg.max_iter,
                                                  method=cfg.objective)
        except Exception as exc:
            raise _annotate(exc, f"delta={delta:g}")
        err = abs(numeric.omega - formula.omega) / abs(numeric.omega) * 100.0
        return (delta, numeric.omega, formula.omega, err, numeric.iterations)

    table = _new_table(cfg, ("delta", "omega_c", "omega_f", "relative_error_percent", "iterations"))
    for r in parallel_map(row, cfg.deltas):
        table.add_row(*r)
    return _finish(table, start)


def single_bubble_omega(mats: bubble.MaterialParams, n: int, radius: float = 1.0,
                        tol: float = spectral.DEFAULT_TOL, method: str = "eig") -> complex:
    config = bubble.BubbleConfiguration((geometry.make_circle((0.0, 0.0), radius, n),), mats)
    # the corrected form tracks delta / v_b^2 and gives the closer seed
    seed = bubble.resonance_formula_2d(config, corrected=True).omega
    return bubble.characteristic_value(config, seed, tol, method=method).omega


def run_table2(cfg: ExperimentConfig) -> ResultTable:
    """Symmetric and antisymmetric modes of two equal circles per distance."""
    start = time.perf_counter()
    mats = _materials(cfg)
    omega_c = single_bubble_omega(mats, cfg.n, cfg.radius, cfg.tol, cfg.objective)

    def row(item):
        i, d = item
        config = bubble.BubbleConfiguration.two_circles(d, mats, cfg.n, cfg.radius, cfg.distance_convention,
                                                        cfg.cross_delta)
        if cfg.seeds is not None:
            seeds = tuple(complex(*c) for c in cfg.seeds[i])
        else:
            seeds = (0.9 * omega_c, 1.1 * omega_c)
        try:
            s, a = bubble.normal_modes_two_bubbles(config, seeds, cfg.tol, cfg.max_iter, cfg.objective)
        except bubble.ModeCollapseError as exc:
            logger.warning("d=%g: %s", d, exc)
            nan = complex(math.nan, math.nan)
            return (d, nan, nan, omega_c, "mode_collapse")
        status = "ok" if not (s.flagged or a.flagged) else "outside_quadrant_iv"
        return (d, s.omega, a.omega, omega_c, status)

    table = _new_table(cfg, ("d", "omega_s", "omega_a", "omega_c", "status"))
    for r in parallel_map(row, enumerate(cfg.distances)):
        table.add_row(*r)
    return _finish(table, start)


def run_distance_sweep(cfg: ExperimentConfig) -> ResultTable:
    """Normalized min-modulus eigenvalue of the two-bubble system over (d, omega) grids."""
    start = time.perf_counter()
    mats = _materials(cfg)
    jobs = [(d, complex(x, y)) for d in cfg.distances for y in cfg.omega_im for x in cfg.omega_re]

    def row(job):
        d, omega = job
        config = bubble.BubbleConfiguration.two_circles(d, mats, cfg.n, cfg.radius, cfg.distance_convention,
                                                        cfg.cross_delta)
        return (d, omega, abs(bubble.objective(omega, config, cfg.objective)))

    table = _new_table(cfg, ("d", "omega", "objective"))
    for r in parallel_map(row, jobs):
        table.add_row(*r)
    return _finish(table, start)


def run_spectrum_map(cfg: ExperimentConfig) -> ResultTable:
    """Normalized min-modulus eigenvalue of the single-bubble system over an omega grid."""
    start = time.perf_counter()
    config = bubble.BubbleConfiguration.single(_single_curve(cfg), _materials(cfg), cfg.n)
    jobs = [complex(x, y) for y in cfg.omega_im for x in cfg.omega_re]
    values = parallel_map(lambda w: abs(bubble.objective(w, config, cfg.objective)), jobs)
    table = _new_table(cfg, ("omega", "objective"))
    for w, v in zip(jobs, values):
        table.add_row(w, v)
    return _finish(table, start)


def monopole_far_point(omega: float, mats: bubble.MaterialParams, center, diameter: float,
                       far_distance: float):
    """Far point on the x-axis, pulled in if needed to keep ``|k x|`` inside the Bessel domain.

    Returns ``None`` when no admissible point exists (closer than 50 diameters).
    """
    limit = 0.9 * MAX_ABS_ARG / abs(mats.k(omega))
    dist = min(far_distance, limit)
    if dist <= 50.0 * diameter:
        return None
    return (center[0] + dist, center[1])


def run_scatter_sweep(cfg: ExperimentConfig) -> ResultTable:
    """Numerical monopole coefficient over a real frequency sweep."""
    start = time.perf_counter()
    mats = _materials(cfg)
    curve = _single_curve(cfg)
    config = bubble.BubbleConfiguration.single(curve, mats, cfg.n)
    center = config.boundaries[0].center

    def row(omega):
        flag = "ok"
        point = monopole_far_point(omega, mats, center, curve.diameter, cfg.far_distance)
        if point is None:
            nan = math.nan
            return (omega, nan, nan, nan, bubble.regime_of(omega, mats.delta), "no_far_field")
        try:
            sol = bubble.solve_scattering(config, omega, cfg.direction)
        except bubble.NearResonanceError:
            flag = "near_resonance"
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                sol = bubble.solve_scattering(config, omega, cfg.direction, allow_near_resonance=True)
        g = bubble.extract_monopole(config, omega, point, cfg.direction, solution=sol)
        return (omega, abs(g), math.atan2(g.imag, g.real), point[0] - center[0],
                bubble.regime_of(omega, mats.delta), flag)

    table = _new_table(cfg, ("omega", "abs_g", "arg_g", "far_distance", "regime", "flag"))
    for r in parallel_map(row, cfg.omegas):
        table.add_row(*r)
    return _finish(table, start)


def run_formula3d(cfg: ExperimentConfig) -> ResultTable:
    start = time.perf_counter()
    w00, w01 = bubble.resonance_formula_3d(cfg.cap, cfg.vol, cfg.tau, cfg.v, cfg.delta)
    table = _new_table(cfg, ("cap", "vol", "tau", "v", "delta", "omega00", "omega01"))
    table.add_row(cfg.cap, cfg.vol, cfg.tau, cfg.v, cfg.delta, w00, w01)
    return _finish(table, start)


def _log_potential_boundary(boundary: geometry.DiscreteBoundary) -> np.ndarray:
    """``int_D ln|x - y| dy`` at the nodes, from the divergence theorem.

    ``Laplacian[r^2 (ln r - 1) / 4] = ln r`` turns the area integral into the
    boundary integral of ``(y - x).nu(y) (2 ln r - 1) / 4``, integrated with
    the same log splitting as the layer potentials.
    """
    n = boundary.n
    _, _, _, logratio, _ = layerpot._self_geometry(boundary)
    diff = boundary.nodes[None, :, :] - boundary.nodes[:, None, :]
    ydotn = np.einsum("ijk,jk->ij", diff, boundary.normals)
    jac = boundary.jacobians[None, :]
    log_part = layerpot.kress_log_weights(n) * (ydotn * jac / 4.0)
    smooth = (2.0 * np.pi / n) * ydotn * (2.0 * logratio - 1.0) / 4.0 * jac
    return (log_part + smooth) @ np.ones(n)


def run_verify_expansions(cfg: ExperimentConfig) -> ResultTable:
    """Residuals of the low-frequency identities and the expansion order ratio."""
    start = time.perf_counter()
    table = _new_table(cfg, ("check", "shape", "value", "target", "residual"))
    shapes = [("unit_circle", geometry.Circle((0.0, 0.0), 1.0)),
              ("ellipse_2x1", geometry.Ellipse((0.0, 0.0), (2.0, 1.0)))]
    for name, curve in shapes:
        b = geometry.discretize(curve, cfg.n)
        vol = geometry.area(b)
        _, _, k11, k12 = layerpot.assemble_expansion_ops(b)
        ones = np.ones(b.n)
        logpot = _log_potential_boundary(b)
        out11 = layerpot.weighted_adjoint(k11) @ ones
        target11 = 4 * np.conj(B1) * vol
        table.add_row("K1_1_adjoint_chi", name, complex(out11.mean()), complex(target11),
                      float(np.max(np.abs(out11 - target11))))
        out12 = layerpot.weighted_adjoint(k12) @ ones
        printed = (2 * np.conj(B1) + 4 * np.conj(C1)) * vol + 4 * np.conj(B1) * logpot
        full = (4 * np.conj(B1) + 4 * np.conj(C1)) * vol + 4 * np.conj(B1) * logpot
        table.add_row("K1_2_adjoint_chi_2b1_constant", name, complex(out12.mean()), complex(printed.mean()),
                      float(np.max(np.abs(out12 - printed))))
        table.add_row("K1_2_adjoint_chi_4b1_constant", name, complex(out12.mean()), complex(full.mean()),
                      float(np.max(np.abs(out12 - full))))
        s11, s12 = layerpot.assemble_expansion_ops(b)[:2]
        rems = []
        for k in (0.1, 0.05):
            rem = layerpot.assemble_single_layer(b, b, k).entries - layerpot.assemble_s_hat(b, k).entries \
                - k * k * math.log(k) * s11.entries - k * k * s12.entries
            rems.append(float(np.linalg.norm(rem, 2)))
        table.add_row("expansion_order_ratio", name, rems[0] / rems[1], 16.0, abs(rems[0] / rems[1] - 16.0))
    return _finish(table, start)


RUNNERS = {
    "table1": run_table1,
    "table2": run_table2,
    "distance_sweep": run_distance_sweep,
    "spectrum_map": run_spectrum_map,
    "scatter_sweep": run_scatter_sweep,
    "formula3d": run_formula3d,
    "verify_expansions": run_verify_expansions,
}

#: Default (x, y) columns for the SVG figure of each experiment.
PLOTS = {
    "table1": ("delta", "relative_error_percent", True, True),
    "table2": ("d", "omega_s_re", True, False),
    "distance_sweep": ("omega_re", "objective", False, True),
    "spectrum_map": ("omega_re", "objective", False, True),
    "scatter_sweep": ("omega", "abs_g", True, True),
    "formula3d": ("delta", "omega00_re", True, False),
    "verify_expansions": None,
}
