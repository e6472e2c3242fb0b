"""Hyperangular machinery against geometry and the Legendre addition
theorem.

The kinematic-rotation oracle builds explicit mass-scaled Jacobi
vectors, applies the orthogonal pair-exchange matrix, and reads the
rotated hyperangle from the vector lengths; it never touches the
closed-form angle formula under test.
"""

import math

import numpy as np
import pytest
from numpy.polynomial.legendre import Legendre

from halo2d import (
    AngularGrid,
    ConfigError,
    NumericalError,
    bound_states,
    gaussian_pair,
    hyperspherical_from_jacobi,
    kernel_average,
    rotated_angle,
    solve_angular,
    zero_range,
)
from halo2d.angular import inner
from oracles import rotated_angle_by_vectors


def _legendre_p(n, x):
    return Legendre.basis(n)(x)


def test_weights_sum_to_one():
    for n, c in [(64, 3.0), (320, 6.0), (801, 9.0)]:
        g = AngularGrid(n=n, grading=c)
        assert math.fsum(g.weights) == pytest.approx(1.0, abs=1e-14)
        assert np.all(np.diff(g.alpha) > 0)
        assert 0.0 < g.alpha[0] and g.alpha[-1] < math.pi / 2


def test_grid_validation():
    with pytest.raises(ConfigError):
        AngularGrid(n=8)
    with pytest.raises(ConfigError):
        AngularGrid(n=100, grading=0.0)
    with pytest.raises(ConfigError):
        AngularGrid(n=100, grading=20.0)


def test_hyperspherical_from_jacobi():
    rho, alpha = hyperspherical_from_jacobi(3.0, 4.0)
    assert rho == pytest.approx(5.0)
    assert alpha == pytest.approx(math.atan2(3.0, 4.0))
    with pytest.raises(ConfigError):
        hyperspherical_from_jacobi(-1.0, 2.0)
    with pytest.raises(ConfigError):
        hyperspherical_from_jacobi(0.0, 0.0)


def test_rotated_angle_limits():
    beta = np.linspace(0.0, 2.0 * math.pi, 17)
    np.testing.assert_allclose(rotated_angle(0.0, beta), math.pi / 3, atol=1e-14)
    np.testing.assert_allclose(rotated_angle(math.pi / 2, beta), math.pi / 6,
                               atol=1e-14)


def test_rotated_angle_against_vector_geometry():
    rng = np.random.default_rng(42)
    n = 1000
    alpha = np.arccos(rng.uniform(-1.0, 1.0, n)) / 2.0  # in (0, pi/2)
    beta = rng.uniform(0.0, 2.0 * math.pi, n)
    worst = 0.0
    for al, be in zip(alpha, beta):
        rho2, a2 = rotated_angle_by_vectors(al, be)
        assert rho2 == pytest.approx(1.0, abs=1e-13)  # rotation preserves rho
        worst = max(worst, abs(a2 - rotated_angle(al, be)))
    assert worst < 1e-12


def test_kernel_average_of_constant_is_one():
    g = AngularGrid(n=320)
    np.testing.assert_allclose(kernel_average(g, np.ones(g.n)), 1.0, atol=5e-9)


def test_kernel_average_endpoint_values():
    # K f(alpha -> pi/2) = f(pi/6) since the rotated angle is beta-free there
    # the last node sits just inside pi/2, so compare against the exact
    # average at that alpha rather than the pi/2 limit itself
    g = AngularGrid(n=640)
    f = np.cos(2.0 * g.alpha)
    kf = kernel_average(g, f)
    want = -0.5 * math.cos(2.0 * g.alpha[-1])  # P_1(-1/2) P_1(cos 2a)
    assert kf[-1] == pytest.approx(want, abs=1e-6)
    assert kf[-1] == pytest.approx(0.5, abs=2e-4)


def test_kernel_addition_theorem():
    # averaging P_n(cos 2a') over orientations is P_n(-1/2) P_n(cos 2a)
    g = AngularGrid(n=640)
    x = np.cos(2.0 * g.alpha)
    for n in range(5):
        kf = kernel_average(g, _legendre_p(n, x))
        want = _legendre_p(n, -0.5) * _legendre_p(n, x)
        np.testing.assert_allclose(kf, want, atol=4e-6,
                                   err_msg=f"degree {n}")


def test_kernel_kills_the_spurious_mode():
    # (1 + 2K) P_1(cos 2a) = 0: the exchange-odd mode carries no norm
    g = AngularGrid(n=640)
    f = np.cos(2.0 * g.alpha)
    resid = f + 2.0 * kernel_average(g, f)
    assert np.max(np.abs(resid)) < 1e-5
    assert abs(inner(g, f, f, with_kernel=True)) < 1e-5


def test_free_spectrum():
    g = AngularGrid(n=400)
    sp = solve_angular(None, 1.0, g, n_channels=3, richardson=True)
    np.testing.assert_allclose(sp.lam, [0.0, 8.0, 24.0], atol=1e-4)


def test_free_eigenfunctions_are_legendre():
    g = AngularGrid(n=400)
    sp = solve_angular(None, 1.0, g, n_channels=2)
    x = -np.cos(2.0 * g.alpha)
    for j, nu in enumerate([0, 1]):
        f = sp.vectors[:, j] / sp.vectors[-1, j]
        want = _legendre_p(nu, x) / _legendre_p(nu, x[-1])
        np.testing.assert_allclose(f, want, atol=5e-4)


def test_interacting_lowest_channel_heads_to_dimer():
    # lambda_0 -> 2 E_2 rho^2 once the pair is tightly bound inside rho
    spec = gaussian_pair(b=1.0, s1=-4.0)
    e2 = bound_states(spec)[0]
    g = AngularGrid(n=420, grading=7.0)
    rho = 18.0
    sp = solve_angular(spec, rho, g, n_channels=2)
    assert sp.lam[0] / rho**2 == pytest.approx(2.0 * e2, rel=0.02)


def test_interacting_channel_norm_and_realness():
    spec = gaussian_pair(b=1.0, s1=-4.0)
    g = AngularGrid(n=320)
    sp = solve_angular(spec, 2.5, g, n_channels=3)
    for j in range(len(sp.lam)):
        assert inner(g, sp.vectors[:, j], sp.vectors[:, j]) == pytest.approx(1.0, rel=1e-8)
    assert np.all(np.isfinite(sp.lam))
    assert np.all(np.diff(sp.lam) > 0)


def test_solve_angular_validation():
    g = AngularGrid(n=64)
    with pytest.raises(ConfigError):
        solve_angular(None, -1.0, g)
    with pytest.raises(ConfigError):
        solve_angular(None, 1.0, g, n_channels=40)
    with pytest.raises(ConfigError):
        solve_angular(zero_range(1.0), 1.0, g)
