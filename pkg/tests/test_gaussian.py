"""Tests for the two-mode Gaussian pipeline."""

import math

import numpy as np
import pytest

import gie
from gie.errors import NumericalConsistencyError
from gie.gaussian import _exact_det4, physicality_defect
from oracles import (
    brute_force_pt_nu_min,
    langevin_evolve,
    random_physical_cov,
    symplectic_spectrum,
)

E2 = math.exp(2.0)


def test_swap_coefficients_endpoints():
    assert gie.swap_coefficients(0.0) == (1.0, 0.0)
    t, s = gie.swap_coefficients(50.0)
    assert t == pytest.approx(0.0, abs=1e-20)
    assert s == pytest.approx(1.0, abs=1e-15)
    t, s = gie.swap_coefficients(math.log(2.0))
    assert t == pytest.approx(0.5, rel=1e-15)
    assert s == pytest.approx(math.sqrt(0.75), rel=1e-15)


def test_swap_coefficients_unitarity():
    for gt in np.linspace(0.0, 6.0, 25):
        t, s = gie.swap_coefficients(float(gt))
        assert t * t + s * s == pytest.approx(1.0, abs=1e-14)


def test_swap_coefficients_rejects_negative():
    with pytest.raises(ValueError):
        gie.swap_coefficients(-0.1)


def test_channel_params_validation():
    with pytest.raises(ValueError):
        gie.ChannelParams(theta=0.1, eta_a=1.5)
    with pytest.raises(ValueError):
        gie.ChannelParams(theta=0.1, n_th=-1.0)
    with pytest.raises(ValueError):
        gie.ChannelParams(theta=0.1, damping=-1e-3)
    with pytest.raises(ValueError):
        gie.ChannelParams(theta=math.inf)
    with pytest.raises(ValueError):
        gie.ChannelParams(theta=0.1, nbar_b=-0.5)


def test_gravity_channel_identity_point():
    ch = gie.gravity_channel(gie.ChannelParams(theta=0.0, damping=0.0, n_th=5.0))
    assert np.allclose(ch.m, -np.eye(4), atol=0)
    assert np.all(ch.v_th == 0.0)


def test_gravity_channel_full_swap():
    ch = gie.gravity_channel(gie.ChannelParams(theta=math.pi / 2, damping=0.0))
    expected = np.zeros((4, 4))
    expected[0, 3] = expected[2, 1] = 1.0
    expected[1, 2] = expected[3, 0] = -1.0
    assert np.allclose(ch.m, expected, atol=1e-16)
    assert np.allclose(ch.m @ ch.m.T, np.eye(4), atol=1e-15)


def test_gravity_channel_block_structure():
    p = gie.ChannelParams(theta=0.83, damping=0.21, n_th=3.5)
    ch = gie.gravity_channel(p)
    c = math.exp(-p.damping) * math.cos(p.theta)
    s = math.exp(-p.damping) * math.sin(p.theta)
    expected = np.zeros((4, 4))
    expected[0, 0] = expected[1, 1] = expected[2, 2] = expected[3, 3] = -c
    expected[0, 3] = expected[2, 1] = s
    expected[1, 2] = expected[3, 0] = -s
    assert np.allclose(ch.m, expected, atol=0)
    assert np.allclose(ch.m @ ch.m.T, math.exp(-2 * p.damping) * np.eye(4), atol=1e-15)


def test_gravity_channel_noise_scale():
    # 2 (1 - e^{-1}) * 10 on the diagonal, cross-checked against integrating
    # the quadrature Langevin equation from a zero initial matrix
    p = gie.ChannelParams(theta=0.4, damping=0.5, n_th=10.0)
    ch = gie.gravity_channel(p)
    expected = 2.0 * (1.0 - math.exp(-1.0)) * 10.0
    assert np.allclose(ch.v_th, expected * np.eye(4), rtol=1e-14)
    integrated = langevin_evolve(np.zeros((4, 4)), p.theta, p.damping, p.n_th)
    assert np.allclose(integrated, ch.v_th, atol=1e-10)


def test_evolve_matches_langevin_integration():
    rng = np.random.default_rng(42)
    for _ in range(5):
        v = random_physical_cov(rng)
        theta = rng.uniform(0.0, 1.2)
        damping = rng.uniform(0.0, 0.4)
        n_th = rng.uniform(0.0, 5.0)
        p = gie.ChannelParams(theta=theta, damping=damping, n_th=n_th)
        out = gie.evolve(v, gie.gravity_channel(p))
        oracle = langevin_evolve(v, theta, damping, n_th)
        assert np.abs(out - oracle).max() < 1e-9


def test_evolve_identity_cases():
    ch = gie.gravity_channel(gie.ChannelParams(theta=0.0, damping=0.0))
    assert np.allclose(gie.evolve(np.eye(4), ch), np.eye(4), atol=0)
    for theta in (0.3, 1.1, 2.7):
        ch = gie.gravity_channel(gie.ChannelParams(theta=theta, damping=0.0, n_th=7.0))
        out = gie.evolve(np.eye(4), ch)
        assert np.abs(out - np.eye(4)).max() < 1e-15


def test_evolve_squeezed_pair_quarter_swap():
    p = gie.ChannelParams(theta=math.pi / 4, damping=0.0)
    out = gie.evolve(gie.input_squeezed_pair(1.0), gie.gravity_channel(p))
    assert gie.ppt_min_symplectic_eigenvalue(out) == pytest.approx(math.exp(-2), rel=1e-12)
    assert gie.gaussian_negativity(out) == pytest.approx((E2 - 1) / 2, rel=1e-12)


def test_evolve_passivity_at_zero_damping():
    rng = np.random.default_rng(3)
    for theta in (0.2, 0.9):
        ch = gie.gravity_channel(gie.ChannelParams(theta=theta, damping=0.0, n_th=100.0))
        assert np.all(ch.v_th == 0.0)
        v = random_physical_cov(rng)
        out = gie.evolve(v, ch)
        assert np.linalg.det(out) == pytest.approx(np.linalg.det(v), rel=1e-10)
        assert np.allclose(symplectic_spectrum(out), symplectic_spectrum(v), rtol=1e-9)


def test_evolve_requires_symmetry():
    ch = gie.gravity_channel(gie.ChannelParams(theta=0.1))
    bad = np.eye(4)
    bad[0, 1] = 0.5
    with pytest.raises(ValueError):
        gie.evolve(bad, ch)


def test_apply_loss_limits():
    rng = np.random.default_rng(11)
    v = random_physical_cov(rng)
    unchanged = gie.apply_loss(v, gie.ChannelParams(theta=0.0, eta_a=1.0, eta_b=1.0))
    assert np.allclose(unchanged, v, atol=1e-15)
    vacuum = gie.apply_loss(v, gie.ChannelParams(theta=0.0, eta_a=0.0, eta_b=0.0))
    assert np.allclose(vacuum, np.eye(4), atol=1e-15)
    half = gie.apply_loss(3.0 * np.eye(4), gie.ChannelParams(theta=0.0, eta_a=0.5, eta_b=0.5))
    assert np.allclose(half, 2.0 * np.eye(4), atol=1e-15)


def test_apply_loss_asymmetric_blocks():
    rng = np.random.default_rng(12)
    v = random_physical_cov(rng)
    p = gie.ChannelParams(theta=0.0, eta_a=0.7, eta_b=0.4, nbar_a=0.3, nbar_b=1.2)
    out = gie.apply_loss(v, p)
    assert np.allclose(out[:2, :2], 0.7 * v[:2, :2] + 0.3 * 1.6 * np.eye(2), atol=1e-14)
    assert np.allclose(out[2:, 2:], 0.4 * v[2:, 2:] + 0.6 * 3.4 * np.eye(2), atol=1e-14)
    assert np.allclose(out[:2, 2:], math.sqrt(0.28) * v[:2, 2:], atol=1e-14)


def test_loss_cannot_increase_entanglement():
    rng = np.random.default_rng(21)
    for _ in range(40):
        zeta = rng.uniform(0.0, 2.0)
        theta = rng.uniform(0.0, math.pi / 2)
        p = gie.ChannelParams(theta=theta, damping=1e-6, n_th=rng.uniform(0, 1e5))
        v = gie.evolve(gie.input_squeezed_pair(zeta), gie.gravity_channel(p))
        lossy = gie.ChannelParams(theta=theta, eta_a=rng.uniform(0.3, 1.0),
                                  eta_b=rng.uniform(0.3, 1.0))
        assert gie.gaussian_negativity(gie.apply_loss(v, lossy)) <= (
            gie.gaussian_negativity(v) + 1e-12
        )


def test_physicality_preservation():
    # the high-temperature noise model is a valid channel for N_th >= 1/2
    rng = np.random.default_rng(31)
    for _ in range(25):
        v = random_physical_cov(rng)
        assert gie.is_physical(v)
        p = gie.ChannelParams(
            theta=rng.uniform(0, 2),
            damping=rng.uniform(0, 0.5),
            n_th=rng.uniform(0.5, 20.0),
            eta_a=rng.uniform(0.2, 1.0),
            eta_b=rng.uniform(0.2, 1.0),
            nbar_a=rng.uniform(0, 2.0),
            nbar_b=rng.uniform(0, 2.0),
        )
        out = gie.evolve(v, gie.gravity_channel(p))
        assert physicality_defect(out) >= -1e-9
        assert physicality_defect(gie.apply_loss(out, p)) >= -1e-9


def test_input_states():
    assert np.allclose(gie.input_squeezed_pair(0.0), np.eye(4), atol=0)
    v = gie.input_squeezed_pair(1.0)
    assert np.allclose(v, np.diag([E2, 1 / E2, E2, 1 / E2]), rtol=1e-15)
    for zeta in (-1.3, 0.4, 2.0):
        v = gie.input_squeezed_pair(zeta)
        assert np.linalg.det(v[:2, :2]) == pytest.approx(1.0, rel=1e-12)
        assert gie.is_physical(v)
    assert np.allclose(gie.input_tmsv(0.0), np.eye(4), atol=0)
    assert gie.is_physical(gie.input_tmsv(1.0))
    with pytest.raises(ValueError):
        gie.input_squeezed_pair(math.nan)


def test_tmsv_ppt_spectrum():
    assert gie.ppt_min_symplectic_eigenvalue(gie.input_tmsv(1.0)) == pytest.approx(
        math.exp(-2.0), rel=1e-12
    )
    assert gie.ppt_min_symplectic_eigenvalue(np.eye(4)) == pytest.approx(1.0, abs=1e-15)


def test_ppt_nu_matches_brute_force_spectrum():
    rng = np.random.default_rng(5)
    for _ in range(300):
        v = random_physical_cov(rng)
        assert gie.ppt_min_symplectic_eigenvalue(v) == pytest.approx(
            brute_force_pt_nu_min(v), abs=1e-10
        )


def test_exact_determinant_matches_lu():
    rng = np.random.default_rng(17)
    for _ in range(50):
        m = rng.normal(size=(4, 4))
        assert float(_exact_det4(m)) == pytest.approx(np.linalg.det(m), rel=1e-10)


def test_ppt_nu_rejects_inconsistent_matrix():
    # symmetric, sigma > 0 and det V > 0, but sigma^2 - 4 det V < 0: the
    # partial-transpose spectrum is not real, so the input cannot be a
    # two-mode covariance matrix
    bad = np.array(
        [
            [1.24432, -0.415838, -1.103534, -0.380359],
            [-0.415838, -0.879393, -1.604256, 1.215209],
            [-1.103534, -1.604256, -2.129536, -0.544555],
            [-0.380359, 1.215209, -0.544555, -1.168148],
        ]
    )
    with pytest.raises(NumericalConsistencyError):
        gie.ppt_min_symplectic_eigenvalue(bad)


def test_ppt_nu_survives_extreme_squeezing():
    # at r = 20 the evolved float matrix itself (entries ~1e17, ulp 16) can
    # no longer represent the O(1) partial-transpose eigenvalue; the exact
    # rational evolution path resolves it, and the float path must at least
    # stay finite and positive
    p = gie.ChannelParams(theta=2 * math.pi * 1e-4, damping=1e-4, n_th=2600.0)
    ch = gie.gravity_channel(p)
    nu_exact = gie.gaussian.evolve_nu_min_exact(gie.input_tmsv(20.0), ch)
    w = 2.0 * (-math.expm1(-2 * p.damping)) * p.n_th
    assert nu_exact == pytest.approx(w / abs(math.cos(2 * p.theta)), rel=1e-9)
    nu_float = gie.ppt_min_symplectic_eigenvalue(gie.evolve(gie.input_tmsv(20.0), ch))
    assert nu_float > 0.0


def test_exact_pipeline_matches_float_at_moderate_squeezing():
    rng = np.random.default_rng(9)
    for _ in range(10):
        p = gie.ChannelParams(theta=rng.uniform(0, 1.5), damping=rng.uniform(0, 0.2),
                              n_th=rng.uniform(0, 30))
        ch = gie.gravity_channel(p)
        v = random_physical_cov(rng)
        a = gie.gaussian.evolve_nu_min_exact(v, ch)
        b = gie.ppt_min_symplectic_eigenvalue(gie.evolve(v, ch))
        assert a == pytest.approx(b, rel=1e-12)


def test_vacuum_stays_separable_without_damping():
    for theta in np.linspace(0.0, math.pi, 17):
        p = gie.ChannelParams(theta=float(theta), damping=0.0, n_th=1e6)
        out = gie.evolve(np.eye(4), gie.gravity_channel(p))
        assert gie.gaussian_negativity(out) <= 1e-12


def test_vacuum_input_with_thermal_noise_stays_separable():
    for n_th in (0.5, 3.0, 1e4):
        p = gie.ChannelParams(theta=0.7, damping=1e-3, n_th=n_th)
        out = gie.evolve(np.eye(4), gie.gravity_channel(p))
        assert gie.gaussian_negativity(out) == 0.0


def test_closed_form_zero_squeezing():
    p = gie.ChannelParams(theta=0.9, damping=1e-3, n_th=100.0)
    assert gie.closed_form_negativity_squeezed(0.0, p) == 0.0


def test_closed_form_quarter_swap_value():
    p = gie.ChannelParams(theta=math.pi / 4, damping=0.0, n_th=0.0)
    assert gie.closed_form_negativity_squeezed(1.0, p) == pytest.approx((E2 - 1) / 2, rel=1e-14)


def test_closed_form_lossless_reduction():
    # f_loss at eta = 1 collapses to (cosh 2z + 4T)^2 - sinh^2 2z cos^2 2theta
    rng = np.random.default_rng(8)
    for _ in range(100):
        zeta = rng.uniform(0.0, 3.0)
        theta = rng.uniform(0.0, math.pi / 2)
        thermal = rng.uniform(0.0, 0.6)
        direct = math.sqrt(
            (math.cosh(2 * zeta) + 4 * thermal) ** 2
            - math.sinh(2 * zeta) ** 2 * math.cos(2 * theta) ** 2
        ) - abs(math.sinh(2 * zeta) * math.sin(2 * theta))
        assert gie.closed_form_nu_squeezed(zeta, theta, thermal, 1.0) == pytest.approx(
            direct, rel=1e-11
        )


def test_closed_form_agrees_with_pipeline():
    rng = np.random.default_rng(13)
    for _ in range(300):
        zeta = rng.uniform(0.0, 3.0)
        theta = rng.uniform(0.0, math.pi / 2)
        thermal = rng.uniform(0.0, 0.5)
        eta = rng.uniform(0.5, 1.0)
        damping = 1e-6
        p = gie.ChannelParams(theta=theta, damping=damping, n_th=thermal / damping,
                              eta_a=eta, eta_b=eta)
        closed = gie.closed_form_negativity_squeezed(zeta, p)
        v = gie.apply_loss(gie.evolve(gie.input_squeezed_pair(zeta), gie.gravity_channel(p)), p)
        numeric = gie.gaussian_negativity(v)
        assert abs(closed - numeric) <= 1e-6 * (1.0 + numeric)


def test_closed_form_parameter_validation():
    p = gie.ChannelParams(theta=0.3, eta_a=0.8, eta_b=0.9)
    with pytest.raises(ValueError):
        gie.closed_form_negativity_squeezed(1.0, p)
    p = gie.ChannelParams(theta=0.3, nbar_a=0.1)
    with pytest.raises(ValueError):
        gie.closed_form_negativity_squeezed(1.0, p)
