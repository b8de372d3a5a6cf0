import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minnaert import geometry as geo
from minnaert import layerpot as lp
from minnaert.special import B1, C1, eta, hankel1

import oracles


@pytest.fixture(scope="module")
def unit64():
    return geo.make_circle((0, 0), 1, 64)


def test_mode0_single_layer_k1(unit64):
    s = lp.assemble_single_layer(unit64, unit64, 1.0)
    ref = oracles.circle_mode0_single_layer(1.0, 1.0)
    assert np.max(np.abs(s.apply(np.ones(64)) - ref)) < 1e-10
    assert s.kind == "S_k" and s.shape == (64, 64)


def test_spectral_convergence_mode0():
    k = 0.02 - 0.005j
    ref = oracles.circle_mode0_single_layer(k, 1.0)
    errors = []
    for n in (32, 64, 128, 256):
        b = geo.make_circle((0, 0), 1, n)
        errors.append(np.max(np.abs(lp.assemble_single_layer(b, b, k).apply(np.ones(n)) - ref)))
    # already at the rounding floor for N = 32
    assert max(errors) < 1e-13


def test_spectral_convergence_ellipse():
    # self-convergence on a shape without exact modes: the error against the
    # finest grid must fall faster than N^-4
    k = 1.3 - 0.1j
    dens = lambda t: np.cos(t) + 0.3 * np.sin(3 * t) + 1.0
    ref_b = geo.make_ellipse((0, 0), (1.5, 0.7), 512)
    coarse = [16, 32, 64]
    errs = []
    for n in coarse:
        b = geo.make_ellipse((0, 0), (1.5, 0.7), n)
        val = lp.assemble_single_layer(b, b, k).apply(dens(b.params))
        ref = lp.assemble_single_layer(ref_b, ref_b, k).apply(dens(ref_b.params))[:: 512 // n]
        errs.append(np.max(np.abs(val - ref)))
    assert errs[1] < errs[0] / 16 ** 2
    assert errs[2] < 1e-11


def test_mode_two_single_layer():
    k = 0.7 - 0.05j
    b = geo.make_circle((0, 0), 1, 128)
    s = lp.assemble_single_layer(b, b, k)
    dens = np.cos(2 * b.params)
    ref = oracles.circle_mode_single_layer(2, k, 1.0)
    assert np.max(np.abs(s.apply(dens) - ref * dens)) < 1e-12


def test_mode0_adjoint_double_layer():
    k = 0.5 - 0.1j
    b = geo.make_circle((0, 0), 1, 64)
    kst = lp.assemble_adjoint_double_layer(b, b, k)
    assert np.max(np.abs(kst.apply(np.ones(64)) - oracles.circle_mode0_adjoint(k, 1.0))) < 1e-12


def test_static_limit_against_s_hat():
    b = geo.make_ellipse((0, 0), (1.2, 0.8), 128)
    dens = np.random.default_rng(0).standard_normal(128)
    diffs = []
    for k in (0.02, 0.01):
        diff = (lp.assemble_single_layer(b, b, k).entries - lp.assemble_s_hat(b, k).entries) @ dens
        diffs.append(np.max(np.abs(diff)))
    # O(k^2 ln k): halving k divides by about 4 ln(k)/ln(k/2)
    ratio = diffs[0] / diffs[1]
    assert 3.0 < ratio < 4.2


def test_cross_operator_is_direct_kernel():
    b1 = geo.make_circle((0, 0), 1, 32)
    b2 = geo.make_circle((10, 0), 1, 32)
    k = 0.02
    s, kst = lp.assemble_helmholtz(b1, b2, k)
    i, j = 5, 17
    r = np.hypot(*(b1.nodes[i] - b2.nodes[j]))
    w = b2.arclength_weights[j]
    assert abs(s.entries[i, j] - (-0.25j) * hankel1(0, k * r) * w) < 1e-15
    dot = np.dot(b1.nodes[i] - b2.nodes[j], b1.normals[i])
    assert abs(kst.entries[i, j] - 0.25j * k * hankel1(1, k * r) * dot / r * w) < 1e-15


def test_overlap_error():
    b1 = geo.make_circle((0, 0), 1, 32)
    b2 = geo.make_circle((0, 0), 1, 32)
    with pytest.raises(lp.SingularityError):
        lp.assemble_single_layer(b1, b2, 1.0)


def test_zero_wavenumber_rejected(unit64):
    with pytest.raises(ValueError):
        lp.assemble_single_layer(unit64, unit64, 0.0)


def test_static_single_layer_circles():
    b = geo.make_circle((0, 0), 1, 128)
    assert np.max(np.abs(lp.assemble_static_single_layer(b).apply(np.ones(128)))) < 1e-10
    b2 = geo.make_circle((0, 0), 2, 128)
    assert np.max(np.abs(lp.assemble_static_single_layer(b2).apply(np.ones(128)) - 2 * math.log(2))) < 1e-12


@pytest.mark.parametrize("radius", [0.5, 1.0, 2.0])
def test_static_adjoint_circle(radius):
    b = geo.make_circle((0, 0), radius, 64)
    k0 = lp.assemble_static_adjoint(b)
    assert np.max(np.abs(k0.entries - k0.entries[0, 0])) < 1e-13
    assert np.max(np.abs(k0.apply(np.ones(64)) - 0.5)) < 1e-13
    psi = np.ones(64) / math.sqrt(2 * math.pi * radius)
    assert np.max(np.abs(k0.apply(psi) - 0.5 * psi)) < 1e-13


def test_s_hat_unit_circle():
    b = geo.make_circle((0, 0), 1, 128)
    k = 0.01
    sh = lp.assemble_s_hat(b, k)
    assert np.max(np.abs(sh.apply(np.ones(128)) - eta(k) * 2 * math.pi)) < 1e-12
    rank1 = sh.entries - lp.assemble_static_single_layer(b).entries
    sv = np.linalg.svd(rank1, compute_uv=False)
    assert sv[1] < 1e-12 * sv[0]


@pytest.mark.parametrize("k", [0.01, 0.1])
def test_s_hat_invertible(k):
    b = geo.make_circle((0, 0), 1, 128)
    smin = np.linalg.svd(lp.assemble_s_hat(b, k).entries, compute_uv=False)[-1]
    assert smin > 1e-4


def test_weighted_symmetry():
    b = geo.make_ellipse((0, 0), (1.4, 0.9), 96)
    s = lp.assemble_single_layer(b, b, 0.8 - 0.1j).entries
    sq = np.sqrt(b.arclength_weights)
    sym = sq[:, None] * s / sq[None, :]
    assert np.max(np.abs(sym - sym.T)) < 1e-12 * np.max(np.abs(sym))


def test_k1_1_identity_unit_disk():
    b = geo.make_circle((0, 0), 1, 256)
    _, _, k11, _ = lp.assemble_expansion_ops(b)
    out = lp.weighted_adjoint(k11) @ np.ones(256)
    assert np.max(np.abs(out - 4 * np.conj(B1) * math.pi)) < 1e-8
    assert np.max(np.abs(out + 0.5)) < 1e-8


def test_k1_2_identity_unit_disk():
    # The divergence-theorem computation gives
    # (K1_2)*[chi] = (4 b1 + 4 c1)^- Vol chi + 4 conj(b1) int_D ln|x - y| dy,
    # since Laplacian(r^2 ln r) = 4 ln r + 4. The frequently quoted constant
    # 2 b1 + 4 c1 misses 2 conj(b1) Vol; both facts are pinned down here.
    b = geo.make_circle((0, 0), 1, 256)
    _, _, _, k12 = lp.assemble_expansion_ops(b)
    out = lp.weighted_adjoint(k12) @ np.ones(256)
    full = (4 * np.conj(B1) + 4 * np.conj(C1)) * math.pi
    assert np.max(np.abs(out - full)) < 1e-8
    quoted = (2 * np.conj(B1) + 4 * np.conj(C1)) * math.pi
    assert np.max(np.abs(out - quoted - 2 * np.conj(B1) * math.pi)) < 1e-8


def test_unit_circle_analytic_k1_2():
    # on the unit circle (y - x).nu(y) = r^2/2, int r^2 dtheta = 4 pi and
    # int r^2 ln r dtheta = 2 pi, hence (4 b1 + 4 c1) pi independently
    assert abs(0.5 * (2 * B1 * 2 * math.pi + (2 * C1 + B1) * 4 * math.pi) - (4 * B1 + 4 * C1) * math.pi) < 1e-15


@settings(max_examples=6, deadline=None)
@given(st.floats(0.5, 2.5), st.floats(0.5, 2.5))
def test_expansion_identities_ellipse(a, b_axis):
    b = geo.make_ellipse((0, 0), (a, b_axis), 256)
    vol = math.pi * a * b_axis
    _, _, k11, k12 = lp.assemble_expansion_ops(b)
    ones = np.ones(256)
    assert np.max(np.abs(lp.weighted_adjoint(k11) @ ones - 4 * np.conj(B1) * vol)) < 1e-8
    log_pot = oracles.log_potential_on_ellipse(b.nodes, (a, b_axis))
    expected = (4 * np.conj(B1) + 4 * np.conj(C1)) * vol + 4 * np.conj(B1) * log_pot
    assert np.max(np.abs(lp.weighted_adjoint(k12) @ ones - expected)) < 1e-6


def test_expansion_order_ratio():
    b = geo.make_circle((0, 0), 1, 256)
    s11, s12, _, _ = lp.assemble_expansion_ops(b)
    errs = []
    for k in (0.1, 0.05):
        rem = lp.assemble_single_layer(b, b, k).entries - lp.assemble_s_hat(b, k).entries \
            - k * k * math.log(k) * s11.entries - k * k * s12.entries
        errs.append(np.linalg.norm(rem, 2))
    assert errs[0] / errs[1] >= 12


def test_evaluate_field_exterior_oracle():
    b = geo.make_circle((0, 0), 1, 64)
    val = lp.evaluate_field(b, np.ones(64), 1.0, [(10.0, 0.0)])
    assert abs(val[0] - oracles.circle_mode0_exterior(1.0, 1.0, 10.0)) < 1e-8


def test_evaluate_field_zero_density_and_proximity():
    b = geo.make_circle((0, 0), 1, 64)
    assert np.all(lp.evaluate_field(b, np.zeros(64), 1.0, [(3.0, 0.0), (0.0, 0.0)]) == 0)
    with pytest.raises(lp.ProximityError):
        lp.evaluate_field(b, np.ones(64), 1.0, [(1.05, 0.0)])


def test_jump_relations():
    # Normal derivatives of S^k[phi] at x +/- h nu, Richardson-extrapolated to
    # h = 0, reproduce (+/- 1/2 I + K^{k,*})[phi].
    k = 0.9 - 0.05j
    fine = geo.make_circle((0, 0), 1, 8192)
    coarse = geo.make_circle((0, 0), 1, 64)
    phi = lambda t: 1.0 + np.cos(2 * t) + 0.5 * np.sin(t)
    kst = lp.assemble_adjoint_double_layer(coarse, coarse, k).apply(phi(coarse.params))
    idx = np.arange(0, 64, 8)
    x, nu = coarse.nodes[idx], coarse.normals[idx]
    hs = 0.04 * 0.5 ** np.arange(5)
    for side, sign in ((1.0, 0.5), (-1.0, -0.5)):
        samples = []
        for h in hs:
            grad = lp.evaluate_gradient(fine, phi(fine.params), k, x + side * h * nu)
            samples.append(np.sum(grad * nu, axis=1))
        samples = np.array(samples)
        # polynomial extrapolation in h
        vander = np.vander(hs, len(hs))
        coef = np.linalg.solve(vander, samples)
        limit = coef[-1]
        expected = sign * phi(coarse.params[idx]) + kst[idx]
        assert np.max(np.abs(limit - expected)) < 1e-6


def test_left_half_plane_reflection():
    # G_{-conj k} = conj(G_k) for the outgoing kernel continued through the
    # upper half-plane; checked against the mode-0 Fourier oracle
    b = geo.make_circle((0, 0), 1, 64)
    k = 0.7 - 0.2j
    s = lp.assemble_single_layer(b, b, k).entries
    mirror = lp.assemble_single_layer(b, b, complex(-k.real, k.imag)).entries
    assert np.array_equal(mirror, np.conj(s))
    # quadrant II: principal branch and the continuation coincide
    k2 = -0.7 + 0.2j
    direct = lp.assemble_single_layer(b, b, k2).entries @ np.ones(64)
    assert np.max(np.abs(direct - oracles.circle_mode0_single_layer(k2, 1.0))) < 1e-10
