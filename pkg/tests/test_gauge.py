import math

import numpy as np
import pytest

from pauli_spectra.fields import Domain, ScalarField2D, constant_field, oscillation
from pauli_spectra.gauge import (
    GaugeError,
    gauge_transform,
    line_integral_gauge,
    local_constant_gauge,
    solve_scalar_potential,
    symmetric_gauge,
)

RNG = np.random.default_rng(42)


def _field(fn, **meta):
    return ScalarField2D(eval=fn, **meta)


# B(x) = 2 + 2 x1 on the unit disc: phi = (r^2-1)/2 + (r^3-r) cos(t)/4,
# h(t) = 1 + cos(t)/2, kappa = 2, flux = 1.
PERTURBED = _field(lambda p: 2.0 + 2.0 * p[..., 0],
                   holder_alpha=1.0, holder_const=2.0, name="2+2x1")


def test_symmetric_gauge_values_and_curl():
    A = symmetric_gauge(2.0)
    pts = RNG.uniform(-1, 1, size=(50, 2))
    vals = A(pts)
    assert np.allclose(vals[:, 0], -pts[:, 1])
    assert np.allclose(vals[:, 1], pts[:, 0])
    assert np.allclose(A.numerical_curl(pts), 2.0, atol=1e-8)

    Ac = symmetric_gauge(-3.0, center=(1.0, -0.5))
    assert np.allclose(Ac(np.array([1.0, -0.5])), 0.0)
    assert np.allclose(Ac.numerical_curl(pts), -3.0, atol=1e-8)


def test_gauge_transform_to_landau():
    b = 1.5
    A = symmetric_gauge(b)
    psi = lambda p: 0.5 * b * p[..., 0] * p[..., 1]
    grad = lambda p: np.stack([0.5 * b * p[..., 1], 0.5 * b * p[..., 0]], axis=-1)
    Ap = gauge_transform(A, grad, psi=psi)
    pts = RNG.uniform(-1, 1, size=(40, 2))
    vals = Ap(pts)
    assert np.allclose(vals[:, 0], 0.0, atol=1e-12)
    assert np.allclose(vals[:, 1], b * pts[:, 0], atol=1e-12)
    assert np.allclose(Ap.numerical_curl(pts), b, atol=1e-7)
    assert Ap.psi is psi
    assert Ap.base is A


def test_gauge_transform_rejects_rotational_field():
    A = symmetric_gauge(1.0)
    bad = lambda p: np.stack([-p[..., 1], p[..., 0]], axis=-1)
    with pytest.raises(GaugeError, match="not a gauge function"):
        gauge_transform(A, bad)


def test_line_integral_gauge_constant_field_matches_symmetric():
    A = line_integral_gauge(constant_field(0.7), center=(0.2, -0.3))
    S = symmetric_gauge(0.7, center=(0.2, -0.3))
    pts = RNG.uniform(-1, 1, size=(30, 2))
    assert np.allclose(A(pts), S(pts), atol=1e-13)


def test_line_integral_gauge_curl_is_field():
    A = line_integral_gauge(PERTURBED)
    pts = RNG.uniform(-0.8, 0.8, size=(30, 2))
    assert np.allclose(A.numerical_curl(pts), PERTURBED(pts), atol=1e-6)


def test_disc_solution_constant_field():
    sol = solve_scalar_potential(constant_field(2.0), N_r=64, N_theta=64)
    assert np.allclose(sol.h_boundary, 1.0, atol=1e-12)
    assert abs(sol.kappa - 1.0) < 1e-12
    assert abs(sol.flux_value - 1.0) < 1e-12
    assert sol.flux_residual < 1e-10
    assert sol.h_positive
    r = sol.r_nodes[:, None]
    assert np.abs(sol.phi - (r ** 2 - 1.0) / 2.0).max() < 1e-8
    assert sol.phi_max_interior < 0.0

    # only the m = 0 mode is present, so A is exactly the symmetric gauge
    pts = RNG.uniform(-0.7, 0.7, size=(40, 2))
    vals = sol.potential(pts)
    assert np.allclose(vals[:, 0], -pts[:, 1], atol=1e-12)
    assert np.allclose(vals[:, 1], pts[:, 0], atol=1e-12)


def test_disc_solution_perturbed_field():
    sol = solve_scalar_potential(PERTURBED, N_r=128, N_theta=128,
                                 positivity_required=True)
    t = sol.theta_nodes
    assert np.abs(sol.h_boundary - (1.0 + 0.5 * np.cos(t))).max() < 1e-10
    assert abs(sol.kappa - 2.0) < 1e-10
    assert abs(sol.flux_value - 1.0) < 1e-12
    assert sol.flux_residual < 1e-10

    r = sol.r_nodes[:, None]
    phi_exact = (r ** 2 - 1.0) / 2.0 + (r ** 3 - r) * np.cos(t)[None, :] / 4.0
    assert np.abs(sol.phi - phi_exact).max() < 1e-8
    assert sol.phi_max_interior < 0.0

    # h on an off-grid theta set via the trigonometric reconstruction
    tf = np.linspace(0.1, 6.0, 37)
    assert np.abs(sol.h_at(tf) - (1.0 + 0.5 * np.cos(tf))).max() < 1e-10

    # A = (-d2 phi, d1 phi); derivatives of the closed form
    pts = RNG.uniform(-0.65, 0.65, size=(60, 2))
    inside = np.hypot(pts[:, 0], pts[:, 1]) < 0.9
    pts = pts[inside]
    x, y = pts[:, 0], pts[:, 1]
    a1 = -(y + 0.5 * x * y)
    a2 = x + 0.25 * (3 * x ** 2 + y ** 2 - 1.0)
    vals = sol.potential(pts)
    assert np.abs(vals[:, 0] - a1).max() < 2e-5
    assert np.abs(vals[:, 1] - a2).max() < 2e-5
    assert np.abs(sol.potential.numerical_curl(pts, h=1e-4)
                  - PERTURBED(pts)).max() < 5e-3


def test_disc_solution_sign_changing_boundary_data():
    Bx = _field(lambda p: p[..., 0], name="x1")
    sol = solve_scalar_potential(Bx, N_r=64, N_theta=64)
    assert not sol.h_positive
    assert math.isinf(sol.kappa)
    t = sol.theta_nodes
    assert np.abs(sol.h_boundary - 0.25 * np.cos(t)).max() < 1e-12
    assert abs(sol.flux_value) < 1e-14
    r = sol.r_nodes[:, None]
    phi_exact = (r ** 3 - r) * np.cos(t)[None, :] / 8.0
    assert np.abs(sol.phi - phi_exact).max() < 1e-12

    with pytest.raises(GaugeError, match="boundary data not positive"):
        solve_scalar_potential(Bx, N_r=64, N_theta=64, positivity_required=True)


def test_disc_solution_input_validation():
    B = constant_field(1.0)
    with pytest.raises(GaugeError, match="N_r"):
        solve_scalar_potential(B, N_r=8)
    with pytest.raises(GaugeError, match="power of two"):
        solve_scalar_potential(B, N_r=32, N_theta=48)
    with pytest.raises(GaugeError, match="radial grid"):
        solve_scalar_potential(B, N_r=32, N_theta=32, radial_grid="chebyshev")


def _polar_fd_residual(sol, B, r_min=0.15):
    """Max |five-point Laplacian of phi - B| over interior nodes with r >= r_min.

    The annulus restriction keeps the stencil's theta-truncation term, which
    carries a 1/r^2 factor, away from the coordinate singularity at the
    origin; the solver itself is uniformly accurate there.
    """
    r = sol.r_nodes
    t = sol.theta_nodes
    dr = r[1] - r[0]
    dt = t[1] - t[0]
    phi = sol.phi
    worst = 0.0
    for i in range(1, r.size - 1):
        if r[i] < r_min:
            continue
        d2r = (phi[i + 1] - 2 * phi[i] + phi[i - 1]) / dr ** 2
        d1r = (phi[i + 1] - phi[i - 1]) / (2 * dr * r[i])
        d2t = (np.roll(phi[i], -1) - 2 * phi[i] + np.roll(phi[i], 1)) / (r[i] * dt) ** 2
        pts = np.stack([r[i] * np.cos(t), r[i] * np.sin(t)], axis=-1)
        worst = max(worst, np.abs(d2r + d1r + d2t - B(pts)).max())
    return worst


def test_disc_solution_pde_residual_second_order():
    B = _field(lambda p: np.exp(p[..., 0]), name="exp_x1")
    res = []
    for n_r, n_t in ((24, 64), (48, 128)):
        sol = solve_scalar_potential(B, N_r=n_r, N_theta=n_t,
                                     radial_grid="uniform")
        res.append(_polar_fd_residual(sol, B))
    assert res[0] / res[1] > 3.0   # second-order truncation halves twice


def test_disc_solution_zero_field():
    sol = solve_scalar_potential(constant_field(0.0), N_r=32, N_theta=32)
    assert np.abs(sol.phi).max() == 0.0
    assert np.abs(sol.h_boundary).max() == 0.0
    assert not sol.h_positive
    assert math.isinf(sol.kappa)
    assert sol.flux_value == 0.0


def test_local_constant_gauge_linear_field():
    s = 0.25
    sq = Domain.square((0.3, -0.1), s)
    beta = oscillation(PERTURBED, sq, s / math.sqrt(2.0))
    assert abs(beta - 2.0 * s / math.sqrt(2.0)) < 1e-12
    lcg = local_constant_gauge(PERTURBED, sq, beta)
    assert abs(lcg.alpha - s ** 2 / 2.0) < 1e-12
    # exact deviation for a linear field: max |x-cx||y-cy| = (s/2)^2
    assert abs(lcg.deviation - s ** 2 / 4.0) < 1e-9
    assert lcg.deviation <= lcg.alpha
    # the frozen constant is the field value at the center
    cx, cy = 0.3 + s / 2, -0.1 + s / 2
    pot, dev, alpha = lcg
    assert np.allclose(pot(np.array([cx, cy])), 0.0)
    assert np.allclose(pot.numerical_curl(np.array([[cx, cy]])),
                       PERTURBED(np.array([[cx, cy]])), atol=1e-8)


def test_local_constant_gauge_centered_x1_field():
    # B(x) = x1 on a side-s square centered at the origin freezes b = 0, so
    # the deviation is the sup of the line-integral gauge itself:
    # |A1| = |x1 x2|/2 <= s^2/8 (attained), |A2| = x1^2/4 <= s^2/16.
    s = 0.4
    sq = Domain.square((-s / 2, -s / 2), s)
    Bx = _field(lambda p: p[..., 0], holder_alpha=1.0, holder_const=1.0, name="x1")
    beta = oscillation(Bx, sq, s / math.sqrt(2.0))
    lcg = local_constant_gauge(Bx, sq, beta)
    assert abs(lcg.deviation - s ** 2 / 8.0) < 1e-9
    assert lcg.deviation <= lcg.alpha


def test_local_constant_gauge_requires_square():
    with pytest.raises(GaugeError):
        local_constant_gauge(PERTURBED, Domain.disc((0, 0), 1.0), 0.1)
