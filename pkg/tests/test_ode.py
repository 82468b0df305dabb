"""Integrator contract: accuracy against closed forms, dense-output quality,
order behaviour, Wronskian laws, reversibility, and failure signalling."""

import math

import numpy as np
import pytest

from ermakov import specfun
from ermakov.ode import (CoefficientSet, IntegrationError, StepSizeUnderflow,
                         fundamental_pair, integrate, wronskian)

HARMONIC = CoefficientSet(omega2=lambda t: 1.0)


def closed_efrw(kappa):
    # kappa=+1: Psi = I0(z) + K0(z), z = e^{-2 Om}/2; kappa=-1: J0 + Y0
    kinds = ("I", "K") if kappa == 1 else ("J", "Y")

    def psi(om):
        z = 0.5 * math.exp(-2.0 * om)
        return sum(specfun.bessel(k, 0, z) for k in kinds)

    def dpsi(om):
        z = 0.5 * math.exp(-2.0 * om)
        return sum(specfun.bessel_deriv(k, 0, z) for k in kinds) * (-2.0 * z)

    return psi, dpsi


def test_cosine_quarter_period():
    tr = integrate(HARMONIC, "linear", (1.0, 0.0), (0.0, math.pi / 2), 1e-10)
    assert abs(tr.value(math.pi / 2)) < 1e-10


def test_dense_output_within_ten_tolerances():
    tol = 1e-10
    tr = integrate(HARMONIC, "linear", (1.0, 0.0), (0.0, 6.0), tol)
    ts = np.linspace(0.0, 6.0, 1777)
    err = max(abs(tr.value(t) - math.cos(t)) for t in ts)
    errd = max(abs(tr.deriv(t) + math.sin(t)) for t in ts)
    assert err < 10 * tol
    assert errd < 10 * tol


@pytest.mark.parametrize("kappa", [1, -1])
def test_efrw_against_closed_form(kappa):
    psi, dpsi = closed_efrw(kappa)
    cs = CoefficientSet(omega2=lambda om: -kappa * math.exp(-4.0 * om))
    tr = integrate(cs, "linear", (psi(-1.0), dpsi(-1.0)), (-1.0, 2.0), 1e-12)
    err = max(abs(tr.value(om) - psi(om)) for om in np.linspace(-1, 2, 301))
    assert err < 1e-8


def test_pinney_stationary_solution():
    cs = CoefficientSet(omega2=lambda t: 4.0)
    tr = integrate(cs, "pinney", (2.0 ** -0.5, 0.0), (0.0, 10.0), 1e-11,
                   h_aux=1.0)
    drift = max(abs(tr.value(t) - 2.0 ** -0.5) for t in np.linspace(0, 10, 200))
    assert drift < 1e-9


def test_pinney_h_zero_reduces_to_linear():
    cs = CoefficientSet(omega2=lambda t: 1.0)
    tr = integrate(cs, "pinney", (1.0, 0.0), (0.0, 5.0), 1e-11, h_aux=0.0)
    err = max(abs(tr.value(t) - math.cos(t)) for t in np.linspace(0, 5, 100))
    assert err < 1e-9  # crosses zero without raising


def test_fundamental_pair_initial_conditions():
    x1, x2 = fundamental_pair(HARMONIC, 0.0, (0.0, 3.0), 1e-11)
    assert abs(x1.value(0.0) - 1.0) < 1e-14
    assert abs(x1.deriv(0.0)) < 1e-14
    assert abs(x2.value(0.0)) < 1e-14
    assert abs(x2.deriv(0.0) - 1.0) < 1e-14
    assert abs(x1.value(1.3) - math.cos(1.3)) < 1e-9
    assert abs(x2.value(1.3) - math.sin(1.3)) < 1e-9


def test_fundamental_pair_interior_anchor():
    cs = CoefficientSet(omega2=lambda om: -math.exp(-4.0 * om))
    x1, x2 = fundamental_pair(cs, 0.0, (-1.0, 2.0), 1e-11)
    assert abs(wronskian(x1, x2, 0.0) - 1.0) < 1e-12
    ws = [wronskian(x1, x2, t) for t in np.linspace(-1, 2, 61)]
    assert max(abs(w - 1.0) for w in ws) < 1e-9


def test_wronskian_damped_abel_law():
    p0 = 0.13
    cs = CoefficientSet(omega2=lambda t: 1.0, damping=lambda t: p0)
    x1, x2 = fundamental_pair(cs, 0.0, (0.0, 6.0), 1e-11)
    for t in np.linspace(0, 6, 31):
        assert abs(wronskian(x1, x2, t) * math.exp(p0 * t) - 1.0) < 1e-8


def test_time_reversal_roundtrip():
    tol = 1e-10
    cs = CoefficientSet(omega2=lambda om: -math.exp(-4.0 * om))
    fwd = integrate(cs, "linear", (1.0, 0.3), (0.0, 2.0), tol)
    back = integrate(cs, "linear", fwd.eval(2.0), (2.0, 0.0), tol)
    assert np.abs(back.eval(0.0) - np.array([1.0, 0.3])).max() < 100 * tol


def test_fixed_step_order():
    # halving the fixed step of the order-5 scheme contracts the endpoint
    # error by at least 8x (expected ~32x)
    def endpoint_error(h):
        tr = integrate(HARMONIC, "linear", (1.0, 0.0), (0.0, 2.0), 1e-3,
                       fixed_step=h)
        return abs(tr.value(2.0) - math.cos(2.0))

    assert endpoint_error(0.1) / endpoint_error(0.05) >= 8.0


def test_tolerance_tightening_reduces_error():
    def err(tol):
        tr = integrate(HARMONIC, "linear", (1.0, 0.0), (0.0, 20.0), tol)
        return abs(tr.value(20.0) - math.cos(20.0))

    assert err(1e-6) / max(err(1e-10), 1e-16) > 10.0


def test_tol_validation():
    with pytest.raises(ValueError):
        integrate(HARMONIC, "linear", (1.0, 0.0), (0.0, 1.0), 1e-2)
    with pytest.raises(ValueError):
        integrate(HARMONIC, "linear", (1.0, 0.0), (0.0, 0.0), 1e-10)


def test_nonfinite_coefficient_signalled():
    cs = CoefficientSet(omega2=lambda t: math.nan)
    with pytest.raises(IntegrationError):
        integrate(cs, "linear", (1.0, 0.0), (0.0, 1.0), 1e-9)


def test_finite_time_blowup_signals_underflow():
    # y' = y^2 blows up at t=1; the controller collapses h and reports
    def rhs(t, y):
        return np.array([y[0] * y[0]])

    with pytest.raises((StepSizeUnderflow, IntegrationError)):
        integrate(HARMONIC, "custom", (1.0,), (0.0, 2.0), 1e-10, rhs=rhs)


def test_out_of_window_evaluation_rejected():
    tr = integrate(HARMONIC, "linear", (1.0, 0.0), (0.0, 1.0), 1e-9)
    with pytest.raises(ValueError):
        tr.value(2.0)
