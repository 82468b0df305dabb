import math

import numpy as np
import pytest

from ermakov import scenarios
from ermakov.ode import CoefficientSet, FunctionTrajectory
from ermakov.pinney import PinneySolution


@pytest.fixture(scope="session")
def efrw_closed():
    return scenarios.efrw_q0(kappa=1, h=1.0)


@pytest.fixture(scope="session")
def efrw_open():
    return scenarios.efrw_q0(kappa=-1, h=1.0)


@pytest.fixture(scope="session")
def efrw_q3():
    return scenarios.efrw_q(kappa=1, Q=3.0, h=1.0)


@pytest.fixture(scope="session")
def efrw_q1_open_h2():
    return scenarios.efrw_q(kappa=-1, Q=1.0, h=2.0)


@pytest.fixture(scope="session")
def helmholtz_bundle():
    return scenarios.helmholtz_power(m=2.0, b=1.0, lam=100.0)


@pytest.fixture(scope="session")
def xyz_bundle():
    return scenarios.xyz_scenario()


def make_trig_pair(window=(-3.0, 3.0), omega=1.0):
    cos = FunctionTrajectory(lambda t: math.cos(omega * t),
                             lambda t: -omega * math.sin(omega * t), window)
    sin = FunctionTrajectory(lambda t: math.sin(omega * t),
                             lambda t: omega * math.cos(omega * t), window)
    return cos, sin


def unit_rho(window=(0.0, 7.0)):
    cs = CoefficientSet(omega2=lambda t: 1.0)
    return PinneySolution(lambda t: 1.0, lambda t: 0.0, 1.0, "direct", window,
                          coeffs=cs, rho_ddot=lambda t: 0.0)


def stationary_rho(omega, window=(0.0, 10.0)):
    cs = CoefficientSet(omega2=lambda t: omega * omega)
    return PinneySolution(lambda t: omega ** -0.5, lambda t: 0.0, 1.0,
                          "direct", window, coeffs=cs, rho_ddot=lambda t: 0.0)


def grid(window, n=101, pad=0.0):
    lo, hi = window
    span = hi - lo
    return np.linspace(lo + pad * span, hi - pad * span, n)
