"""Angle machinery: generating function, the dynamical/geometrical/total
split, cyclic Hannay angle, Lewis phases, and the XYZ oscillator."""

import math

import numpy as np
import pytest

from conftest import grid, stationary_rho, unit_rho
from ermakov.angles import (AngleBundle, XYZParams, adiabatic_rho0,
                            angle_bundle, angle_theta, berry_phase_xyz,
                            generating_function, hannay_cyclic, hannay_xyz,
                            lewis_phase, omega2_from_xyz)
from ermakov.ode import CoefficientSet, integrate
from ermakov.pinney import PinneySolution, solve_direct


def test_generating_function_limits(efrw_closed):
    rho = efrw_closed.pinney
    assert generating_function(0.0, 0.5, rho, 0.3) == 0.0
    # q at the ring edge with stationary rho: S = I pi / 2
    w = 2.0
    rs = stationary_rho(w)
    I = 0.5
    q_edge = math.sqrt(2 * I) * rs.rho(0.0)
    assert abs(generating_function(q_edge, I, rs, 0.0) - I * math.pi / 2) < 1e-12


def test_generating_function_produces_momentum(efrw_closed):
    # dS/dq = p on the upper branch, checked by finite differences
    rho = efrw_closed.pinney
    I = 0.5
    t = 0.8
    r, rd = rho.rho(t), rho.rho_dot(t)
    for frac in (0.0, 0.35, 0.8):
        q = frac * math.sqrt(2 * I) * r
        h = 1e-6
        dS = (generating_function(q + h, I, rho, t)
              - generating_function(q - h, I, rho, t)) / (2 * h)
        p_expected = math.sqrt(2 * I * r * r - q * q) / (r * r) + rd * q / r
        assert abs(dS - p_expected) < 1e-6


def test_generating_function_domain():
    rs = stationary_rho(1.0)
    with pytest.raises(ValueError):
        generating_function(2.0, 0.5, rs, 0.0)  # |q| > sqrt(2 I) rho


def test_angle_theta_values():
    assert angle_theta(0.0, 0.5, 1.0) == 0.0
    assert abs(angle_theta(1.0, 0.5, 1.0) - math.pi / 2) < 1e-15
    # q1 = rho sqrt(2I) sin(theta) inverts the angle
    q = 0.37
    th = angle_theta(q, 0.5, 1.2)
    assert abs(1.2 * math.sin(th) - q) < 1e-15
    with pytest.raises(ValueError):
        angle_theta(2.0, 0.5, 1.0)


def test_angle_bundle_constant_frequency():
    w = 2.0
    rs = stationary_rho(w, window=(0.0, 3.0))
    ab = angle_bundle(rs, (0.0, 3.0))
    assert abs(ab.total - w * 3.0) < 1e-10
    assert ab.geometrical == 0.0
    assert abs(ab.dynamical - w * 3.0) < 1e-10


def test_angle_bundle_split_sums(efrw_closed, helmholtz_bundle):
    for bundle in (efrw_closed, helmholtz_bundle):
        ab = bundle.angles
        assert abs(ab.dynamical + ab.geometrical - ab.total) < 1e-8


def test_angle_bundle_invariant_enforced():
    with pytest.raises(ValueError):
        AngleBundle(1.0, 1.0, 1.0, (0.0, 1.0))


def test_total_angle_suppressed_at_large_ordering(efrw_closed):
    # with strong damping weight e^{-Q Omega} the total advance collapses
    rho = efrw_closed.pinney
    small = angle_bundle(rho, (0.5, 2.0), Q=8.0).total
    base = angle_bundle(rho, (0.5, 2.0), Q=0.0).total
    assert 0.0 < small < 1e-2 * base


def test_hannay_cyclic_cases():
    win = (0.0, 2.0 * math.pi)
    flat = unit_rho(window=win)
    assert hannay_cyclic(flat, 2.0 * math.pi) == 0.0
    wavy = PinneySolution(lambda t: 1.0 + 0.1 * math.sin(t),
                          lambda t: 0.1 * math.cos(t), 1.0, "direct", win)
    val = hannay_cyclic(wavy, 2.0 * math.pi)
    assert abs(val + 0.01 * math.pi) < 1e-12
    # reversed orientation (negative period) flips the sign
    assert abs(hannay_cyclic(wavy, -2.0 * math.pi, t0=2.0 * math.pi) + val) < 1e-12
    # parameterization independence: shifted anchor on the same cycle
    wavy2 = PinneySolution(lambda t: 1.0 + 0.1 * math.sin(t),
                           lambda t: 0.1 * math.cos(t), 1.0, "direct",
                           (1.0, 1.0 + 2 * math.pi))
    assert abs(hannay_cyclic(wavy2, 2.0 * math.pi, t0=1.0) - val) < 1e-8


def test_hannay_cyclic_requires_periodicity():
    win = (0.0, 5.0)
    ramp = PinneySolution(lambda t: 1.0 + 0.1 * t, lambda t: 0.1, 1.0,
                          "direct", win)
    with pytest.raises(ValueError):
        hannay_cyclic(ramp, 5.0)


def test_lewis_phase_values(efrw_closed):
    flat = unit_rho(window=(0.0, 5.0))
    assert abs(lewis_phase(0, flat, (0.0, 2.0)) + 1.0) < 1e-12
    assert abs(lewis_phase(3, flat, (0.0, 2.0)) + 7.0) < 1e-12
    # linear ladder: phase(n)/phase(0) = 2n+1
    rho = efrw_closed.pinney
    p0 = lewis_phase(0, rho, (0.0, 1.0))
    for n in (1, 2, 5):
        assert abs(lewis_phase(n, rho, (0.0, 1.0)) / p0 - (2 * n + 1)) < 1e-12
    # equals minus the total angle for the ground state at Q=0
    ab = angle_bundle(rho, (0.0, 1.0))
    assert abs(p0 + 0.5 * ab.total) < 1e-10


def test_omega2_from_xyz_constant_case():
    params = XYZParams(X=lambda t: 4.0, Y=lambda t: 0.0, Z=lambda t: 1.0,
                       period=2 * math.pi)
    assert abs(omega2_from_xyz(params, 0.7) - 4.0) < 1e-9


def test_omega2_from_xyz_symbolic_case():
    # X = 1, Y = 0, Z = e^{a sin t}: hand-differentiated target
    a = 0.3
    Z = lambda t: math.exp(a * math.sin(t))
    dZ = lambda t: a * math.cos(t) * Z(t)
    d2Z = lambda t: (a * math.cos(t)) ** 2 * Z(t) - a * math.sin(t) * Z(t)
    params = XYZParams(X=lambda t: 1.0, Y=lambda t: 0.0, Z=Z,
                       period=2 * math.pi, dY=lambda t: 0.0, dZ=dZ, d2Z=d2Z)
    for t in (0.0, 0.9, 2.5):
        zr = a * math.cos(t)  # Zdot/Z
        zrr = d2Z(t) / Z(t)
        expected = Z(t) + 0.5 * zrr - 0.75 * zr * zr
        assert abs(omega2_from_xyz(params, t) - expected) < 1e-12


def test_omega2_fd_fallback_matches_analytic():
    Z = lambda t: 1.0 + 0.3 * math.cos(t)
    Y = lambda t: 0.2 * math.sin(t)
    exact = XYZParams(X=lambda t: 1.0, Y=Y, Z=Z, period=2 * math.pi,
                      dY=lambda t: 0.2 * math.cos(t),
                      dZ=lambda t: -0.3 * math.sin(t),
                      d2Z=lambda t: -0.3 * math.cos(t))
    fd = XYZParams(X=lambda t: 1.0, Y=Y, Z=Z, period=2 * math.pi)
    for t in (0.3, 1.7, 4.4):
        assert abs(omega2_from_xyz(exact, t) - omega2_from_xyz(fd, t)) < 1e-8


def test_transformed_coordinate_satisfies_parametric_equation():
    # integrate the quadratic-Hamiltonian flow, map q -> Q = q Z^{-1/2},
    # verify Q'' + Omega^2 Q = 0 by finite differences
    X = lambda t: 1.0
    Y = lambda t: 0.1 * math.sin(0.5 * t)
    Z = lambda t: 1.0 + 0.2 * math.cos(0.5 * t)
    params = XYZParams(X=X, Y=Y, Z=Z, period=4 * math.pi,
                       dY=lambda t: 0.05 * math.cos(0.5 * t),
                       dZ=lambda t: -0.1 * math.sin(0.5 * t),
                       d2Z=lambda t: -0.05 * math.cos(0.5 * t))

    def rhs(t, s):
        q, p = s
        return np.array([Y(t) * q + Z(t) * p, -X(t) * q - Y(t) * p])

    cs = CoefficientSet(omega2=lambda t: 0.0)
    tr = integrate(cs, "custom", (1.0, 0.0), (0.0, 4 * math.pi), 1e-12,
                   rhs=rhs)

    def Qc(t):
        return tr.eval(t)[0] / math.sqrt(Z(t))

    h = 1e-4
    for t in grid((0.5, 4 * math.pi - 0.5), 25):
        qdd = (Qc(t + h) - 2 * Qc(t) + Qc(t - h)) / (h * h)
        assert abs(qdd + omega2_from_xyz(params, t) * Qc(t)) < 1e-6


def test_berry_phase_zero_coupling():
    params = XYZParams(X=lambda t: 1.0, Y=lambda t: 0.0,
                       Z=lambda t: 1.0, period=2 * math.pi,
                       dY=lambda t: 0.0, dZ=lambda t: 0.0, d2Z=lambda t: 0.0)
    assert berry_phase_xyz(params, 0).adiabatic == 0.0


def test_berry_phase_dual_route(xyz_bundle):
    rows = xyz_bundle.extras["sweep"]
    gaps = [r[3] for r in rows]
    assert all(g2 < g1 for g1, g2 in zip(gaps, gaps[1:]))
    assert gaps[0] / gaps[1] >= 1.8


def test_hannay_xyz_is_minus_dgamma_dn(xyz_bundle):
    assert abs(xyz_bundle.extras["hannay"]
               - xyz_bundle.extras["hannay_fd"]) < 1e-10


def test_hannay_xyz_sign_and_value():
    # loop family with nonzero enclosed area
    params = XYZParams(X=lambda t: 1.0, Y=lambda t: 0.2 * math.sin(t),
                       Z=lambda t: 1.0 + 0.3 * math.cos(t), period=2 * math.pi,
                       dY=lambda t: 0.2 * math.cos(t),
                       dZ=lambda t: -0.3 * math.sin(t),
                       d2Z=lambda t: -0.3 * math.cos(t))
    g0 = berry_phase_xyz(params, 0).adiabatic
    g1 = berry_phase_xyz(params, 1).adiabatic
    assert abs(hannay_xyz(params) + (g1 - g0)) < 1e-12
    assert abs(g0) > 1e-3


def test_adiabatic_rho0():
    assert abs(adiabatic_rho0(lambda t: 4.0, 0.0) - 2.0 ** -0.5) < 1e-15
    # power-law profile phi = x^2 has leading amplitude x^{-1/2}
    assert abs(adiabatic_rho0(lambda x: x * x, 3.0) - 3.0 ** -0.5) < 1e-15
    with pytest.raises(ValueError):
        adiabatic_rho0(lambda t: -1.0, 0.0)
