"""Action-angle machinery: the canonical generating function, the split of
the angle advance into dynamical and geometrical (Hannay) parts, Lewis
phases, and the Berry phase / Hannay angle of the generalized (XYZ)
oscillator with its adiabatic limit.

Total-derivative pieces of the angle integrands are evaluated as endpoint
differences, never differentiated numerically.  The identity

    dynamical + geometrical = total

holds by construction; AngleBundle enforces it to 1e-8.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

from scipy.integrate import IntegrationWarning, quad

from .pinney import PinneySolution

__all__ = [
    "AngleBundle",
    "XYZParams",
    "BerryPhaseResult",
    "generating_function",
    "angle_theta",
    "angle_bundle",
    "hannay_cyclic",
    "lewis_phase",
    "omega2_from_xyz",
    "berry_phase_xyz",
    "hannay_xyz",
    "adiabatic_rho0",
]

_QUAD_OPTS = dict(epsabs=1e-12, epsrel=1e-12, limit=400)


@dataclass(frozen=True)
class AngleBundle:
    """Angle advances over a window; the split sums to the total by definition."""

    dynamical: float
    geometrical: float
    total: float
    window: tuple

    def __post_init__(self):
        gap = abs(self.dynamical + self.geometrical - self.total)
        if gap > 1e-8:
            raise ValueError(f"angle split violates d+g=t by {gap}")


def generating_function(q: float, I: float, rho: PinneySolution, t: float,
                        Q: float = 0.0, eps: float = 1.0) -> float:
    """Generating function of the map to action-angle form,

    S = eps e^{Qt} (q^2/2)(rhodot/rho) + I arcsin(q / sqrt(2 I rho^2))
        + q sqrt(2 I rho^2 - q^2) / (2 rho^2),

    with zero integration constant; dS/dq reproduces the momentum.
    """
    if I <= 0.0:
        raise ValueError("generating function needs I > 0")
    r = rho.rho(t)
    rd = rho.rho_dot(t)
    radicand = 2.0 * I * r * r - q * q
    if radicand < -1e-12 * max(1.0, 2.0 * I * r * r):
        raise ValueError(f"|q| exceeds the ring radius sqrt(2 I) rho at t={t}")
    radicand = max(radicand, 0.0)
    arg = q / math.sqrt(2.0 * I * r * r)
    arg = min(1.0, max(-1.0, arg))
    return (eps * math.exp(Q * t) * 0.5 * q * q * rd / r
            + I * math.asin(arg)
            + q * math.sqrt(radicand) / (2.0 * r * r))


def angle_theta(q: float, I: float, rho_val: float) -> float:
    """Principal-branch angle theta = arcsin(q / sqrt(2 I rho^2)).

    Branch continuation across turning points is the caller's job (the
    momentum sign disambiguates the quadrant).
    """
    denom = math.sqrt(2.0 * I) * rho_val
    arg = q / denom
    if abs(arg) > 1.0 + 1e-12:
        raise ValueError("q outside the ring: |q| > sqrt(2 I) rho")
    return math.asin(min(1.0, max(-1.0, arg)))


def angle_bundle(rho: PinneySolution, window, Q: float = 0.0) -> AngleBundle:
    """Dynamical, geometrical and total angle advances over a window.

    total      = int e^{-Qt} / rho^2
    geometrical = 1/2 [e^{Qt} rhodot rho] - int e^{Qt} rhodot^2
    dynamical  = total - geometrical contributions, via its own quadrature
    """
    a, b = float(window[0]), float(window[1])
    r, rd = rho.rho, rho.rho_dot

    def inv_rho2(t):
        return math.exp(-Q * t) / r(t) ** 2

    def rdot2(t):
        return math.exp(Q * t) * rd(t) ** 2

    with warnings.catch_warnings():
        # highly oscillatory rhodot^2 integrands trip quad's roundoff
        # heuristic well below the tolerances used here
        warnings.simplefilter("ignore", IntegrationWarning)
        total, _ = quad(inv_rho2, a, b, **_QUAD_OPTS)
        kinetic, _ = quad(rdot2, a, b, **_QUAD_OPTS)
    boundary = 0.5 * (math.exp(Q * b) * rd(b) * r(b)
                      - math.exp(Q * a) * rd(a) * r(a))
    geometrical = boundary - kinetic
    dynamical = total + kinetic - boundary
    return AngleBundle(dynamical, geometrical, total, (a, b))


def hannay_cyclic(rho: PinneySolution, period: float,
                  t0: Optional[float] = None) -> float:
    """Nonadiabatic Hannay angle -oint rhodot d(rho) over one cycle.

    Requires (rho, rhodot) to return to themselves after the period; the
    cyclic integral equals -int_0^T rhodot^2 dt for the given orientation
    (negative period integrates the cycle backwards and flips the sign).
    """
    if t0 is None:
        t0 = rho.window[0]
    t1 = t0 + period
    tol = 1e-6
    if (abs(rho.rho(t0) - rho.rho(t1)) > tol
            or abs(rho.rho_dot(t0) - rho.rho_dot(t1)) > tol):
        raise ValueError("rho is not periodic over the stated period")
    val, _ = quad(lambda t: rho.rho_dot(t) ** 2, t0, t1, **_QUAD_OPTS)
    return -val


def lewis_phase(n: int, rho: PinneySolution, window) -> float:
    """Phase -(n + 1/2) int dt / rho^2 of the n-th invariant eigenstate
    (hbar = 1)."""
    a, b = float(window[0]), float(window[1])
    val, _ = quad(lambda t: 1.0 / rho.rho(t) ** 2, a, b, **_QUAD_OPTS)
    return -(n + 0.5) * val


# ---------------------------------------------------------------------------
# Generalized (XYZ) oscillator

def _fd1(f, t, h):
    return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h)


def _fd2(f, t, h):
    return (-f(t + 2 * h) + 16 * f(t + h) - 30 * f(t)
            + 16 * f(t - h) - f(t - 2 * h)) / (12 * h * h)


@dataclass
class XYZParams:
    """Periodic quadratic-Hamiltonian coefficients X(t), Y(t), Z(t).

    Derivatives may be supplied analytically; otherwise fourth-order
    central differences with step ~ period/2000 are used.  Frequency
    realness requires X Z - Y^2 > 0 over the period.
    """

    X: Callable[[float], float]
    Y: Callable[[float], float]
    Z: Callable[[float], float]
    period: float
    dY: Optional[Callable[[float], float]] = None
    dZ: Optional[Callable[[float], float]] = None
    d2Z: Optional[Callable[[float], float]] = None

    def _h(self) -> float:
        return self.period / 2000.0

    def ydot(self, t: float) -> float:
        return self.dY(t) if self.dY is not None else _fd1(self.Y, t, self._h())

    def zdot(self, t: float) -> float:
        return self.dZ(t) if self.dZ is not None else _fd1(self.Z, t, self._h())

    def zddot(self, t: float) -> float:
        return self.d2Z(t) if self.d2Z is not None else _fd2(self.Z, t, self._h())

    def freq2(self, t: float) -> float:
        return self.X(t) * self.Z(t) - self.Y(t) ** 2


def omega2_from_xyz(params: XYZParams, t: float) -> float:
    """Equivalent parametric frequency of the XYZ oscillator after the
    coordinate change q = Z^{1/2} Q:

    Omega^2 = XZ - Y^2 + (Zdot Y - Ydot Z)/Z + (1/2) Zddot/Z - (3/4)(Zdot/Z)^2
    """
    z = params.Z(t)
    if z == 0.0:
        raise ZeroDivisionError("Z(t) = 0")
    zd = params.zdot(t)
    return (params.freq2(t)
            + (zd * params.Y(t) - params.ydot(t) * z) / z
            + 0.5 * params.zddot(t) / z
            - 0.75 * (zd / z) ** 2)


@dataclass(frozen=True)
class BerryPhaseResult:
    adiabatic: float
    exact: Optional[float] = None


def _berry_adiabatic_integrand(params: XYZParams, t: float) -> float:
    w2 = params.freq2(t)
    if w2 <= 0.0:
        raise ValueError("frequency degeneracy: X Z - Y^2 <= 0")
    num = params.zdot(t) * params.Y(t) - params.ydot(t) * params.Z(t)
    return num / (params.Z(t) * math.sqrt(w2))


def berry_phase_xyz(params: XYZParams, n: int,
                    rho: Optional[PinneySolution] = None) -> BerryPhaseResult:
    """Berry phase of the n-th state over one parameter cycle.

    adiabatic: -(1/2)(n+1/2) oint (Zdot Y - Ydot Z)/(Z sqrt(XZ - Y^2)) dt
    exact (if a Pinney amplitude for the equivalent frequency is given):
               -(1/2)(n+1/2) int (rho rhoddot - rhodot^2) dt,
    valid without any slowness assumption; rhoddot comes from the governing
    Pinney equation, not from differencing.
    """
    val, _ = quad(lambda t: _berry_adiabatic_integrand(params, t),
                  0.0, params.period, **_QUAD_OPTS)
    adiabatic = -0.5 * (n + 0.5) * val
    exact = None
    if rho is not None:
        def integrand(t):
            return rho.rho(t) * rho.second_deriv(t) - rho.rho_dot(t) ** 2

        lo, hi = rho.window
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            raw, _ = quad(integrand, lo, hi, **_QUAD_OPTS)
        exact = -0.5 * (n + 0.5) * raw
    return BerryPhaseResult(adiabatic, exact)


def hannay_xyz(params: XYZParams) -> float:
    """Classical angle shift +1/2 oint (Zdot Y - Ydot Z)/(Z sqrt(XZ-Y^2)) dt,
    i.e. -d(berry)/dn of the linear-in-n Berry phase."""
    val, _ = quad(lambda t: _berry_adiabatic_integrand(params, t),
                  0.0, params.period, **_QUAD_OPTS)
    return 0.5 * val


def adiabatic_rho0(omega2: Callable[[float], float], t: float) -> float:
    """Leading adiabatic amplitude omega2(t)^{-1/4}."""
    w2 = omega2(t)
    if w2 <= 0.0:
        raise ValueError(f"omega2(t) = {w2} <= 0: outside the adiabatic regime")
    return w2 ** -0.25
