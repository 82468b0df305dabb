"""Constructions of Pinney-equation solutions and conversions between the
linear-oscillator and Pinney representations.

Every route produces a PinneySolution whose governing equation is

    rho'' + D(t) rho' + (omega2(t)/eps^2) rho
        = (h^2/eps^2) exp(-2 int_ref^t D) / rho^3

with D the total damping of the attached CoefficientSet (zero if absent).
All square roots take the positive branch: rho is the amplitude of the
auxiliary planar motion and the 1/rho^3 term requires rho > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .ode import (CoefficientSet, FunctionTrajectory, Trajectory, integrate,
                  wronskian)

__all__ = [
    "PinneySolution",
    "solve_direct",
    "pinney_from_linear",
    "pinney_from_pair",
    "pinney_from_pair_damped",
    "pinney_from_invariants",
    "pinney_from_particular",
    "linear_from_pinney",
    "initial_condition_pair",
    "pinney_residual",
]

_CONSTRAINT_TOL = 1e-12


@dataclass
class PinneySolution:
    """Amplitude rho(t) > 0 of an auxiliary planar motion.

    h_squared is the signed coefficient of the 1/rho^3 term (the squared
    auxiliary angular momentum when nonnegative).  `coeffs` records the
    governing oscillator so residuals and rho'' can be formed without
    numerical differentiation; `rho_ddot` is an analytic second derivative
    when the construction provides one.
    """

    rho: Callable[[float], float]
    rho_dot: Callable[[float], float]
    h_squared: float
    provenance: str
    window: tuple
    coeffs: Optional[CoefficientSet] = None
    rho_ddot: Optional[Callable[[float], float]] = None
    damp_ref: Optional[float] = None

    @property
    def h(self) -> float:
        if self.h_squared < 0.0:
            raise ValueError("nonlinear coefficient is negative; no real h")
        return math.sqrt(self.h_squared)

    def __call__(self, t: float) -> float:
        return float(self.rho(t))

    def damping_exponent(self, t: float) -> float:
        """int_ref^t D dt' for the governing damping (0 when undamped)."""
        if self.coeffs is None or not self.coeffs.has_damping:
            return 0.0
        ref = self.damp_ref if self.damp_ref is not None else self.window[0]
        if self.coeffs.damp_log is not None:
            return self.coeffs.damp_log(t) - self.coeffs.damp_log(ref)
        from scipy.integrate import quad
        return quad(self.coeffs.total_damping, ref, t,
                    epsabs=1e-13, epsrel=1e-13)[0]

    def rho_ddot_from_ode(self, t: float) -> float:
        """rho'' by substituting into the governing Pinney equation."""
        if self.coeffs is None:
            raise ValueError("no governing coefficients attached")
        r = self.rho(t)
        v = self.rho_dot(t)
        eps2 = self.coeffs.epsilon ** 2
        acc = -self.coeffs.total_damping(t) * v - (self.coeffs.omega2(t) / eps2) * r
        if self.h_squared != 0.0:
            acc += (self.h_squared / eps2) * math.exp(
                -2.0 * self.damping_exponent(t)) / r ** 3
        return acc

    def second_deriv(self, t: float) -> float:
        if self.rho_ddot is not None:
            return float(self.rho_ddot(t))
        return self.rho_ddot_from_ode(t)


def _quadratic_form_solution(y1, y2, A, B, C, h_squared, provenance,
                             coeffs: Optional[CoefficientSet],
                             damp_ref=None) -> PinneySolution:
    lo = max(y1.window[0], y2.window[0])
    hi = min(y1.window[1], y2.window[1])

    def form(t):
        u1, u2 = y1.value(t), y2.value(t)
        return A * u1 * u1 + B * u2 * u2 + 2.0 * C * u1 * u2

    def rho(t):
        u = form(t)
        if u <= 0.0:
            raise ValueError(f"quadratic form non-positive at t={t}")
        return math.sqrt(u)

    def rho_dot(t):
        u1, u2 = y1.value(t), y2.value(t)
        v1, v2 = y1.deriv(t), y2.deriv(t)
        du = 2.0 * (A * u1 * v1 + B * u2 * v2 + C * (v1 * u2 + u1 * v2))
        return 0.5 * du / rho(t)

    rho_ddot = None
    if coeffs is not None:
        eps2 = coeffs.epsilon ** 2

        def ydd(t, u, v):
            return -coeffs.total_damping(t) * v - (coeffs.omega2(t) / eps2) * u

        def rho_ddot(t):
            u1, u2 = y1.value(t), y2.value(t)
            v1, v2 = y1.deriv(t), y2.deriv(t)
            a1, a2 = ydd(t, u1, v1), ydd(t, u2, v2)
            u = A * u1 * u1 + B * u2 * u2 + 2 * C * u1 * u2
            du = 2 * (A * u1 * v1 + B * u2 * v2 + C * (v1 * u2 + u1 * v2))
            ddu = 2 * (A * (v1 * v1 + u1 * a1) + B * (v2 * v2 + u2 * a2)
                       + C * (a1 * u2 + 2 * v1 * v2 + u1 * a2))
            r = math.sqrt(u)
            return 0.5 * ddu / r - 0.25 * du * du / (u * r)

    return PinneySolution(rho, rho_dot, h_squared, provenance, (lo, hi),
                          coeffs=coeffs, rho_ddot=rho_ddot, damp_ref=damp_ref)


def solve_direct(coeffs: CoefficientSet, rho0: float, rho_dot0: float,
                 h: float, window, tol: float = 1e-10,
                 damp_ref: Optional[float] = None,
                 t_start: Optional[float] = None) -> PinneySolution:
    """Integrate the Pinney equation directly from (rho0, rho_dot0)."""
    if rho0 <= 0.0:
        raise ValueError("rho0 must be positive")
    if damp_ref is not None:
        coeffs = CoefficientSet(coeffs.omega2, coeffs.damping,
                                coeffs.mass_log_rate, coeffs.epsilon,
                                damp_ref, coeffs.damp_log)
    traj = integrate(coeffs, "pinney", (rho0, rho_dot0), window, tol,
                     h_aux=h, t_start=t_start)
    sol = PinneySolution(traj.value, traj.deriv, h * h, "direct",
                         traj.window, coeffs=coeffs,
                         damp_ref=coeffs.damp_ref if coeffs.damp_ref is not None
                         else min(window))
    sol.trajectory = traj
    return sol


def pinney_from_linear(U, V, W: float, C: float,
                       coeffs: Optional[CoefficientSet] = None) -> PinneySolution:
    """rho = [U^2 - C W^{-2} V^2]^{1/2} from two linear solutions.

    U carries rho's initial data, V vanishes at the matching point, W is
    their (constant) Wronskian.  The nonlinear coefficient is h^2 = -C,
    i.e. the convention y'' + p y + C/y^3 = 0.
    """
    if W == 0.0:
        raise ValueError("Wronskian must be nonzero")
    return _quadratic_form_solution(U, V, 1.0, -C / (W * W), 0.0, -C,
                                    "pinney_closed", coeffs)


def pinney_from_pair(y1, y2, A: float, B: float, C: float, lam: float,
                     coeffs: Optional[CoefficientSet] = None,
                     t_ref: Optional[float] = None) -> PinneySolution:
    """General undamped solution (A y1^2 + B y2^2 + 2C y1 y2)^{1/2}.

    Requires AB - C^2 = lam / W^2 (checked, not silently fixed); the
    result solves rho'' + omega2 rho = lam / rho^3.
    """
    if t_ref is None:
        t_ref = max(y1.window[0], y2.window[0])
    W = wronskian(y1, y2, t_ref)
    target = lam / (W * W)
    lhs = A * B - C * C
    if abs(lhs - target) > _CONSTRAINT_TOL * max(1.0, abs(target)):
        raise ValueError(
            f"constraint AB - C^2 = lambda/W^2 violated: {lhs} vs {target}")
    return _quadratic_form_solution(y1, y2, A, B, C, lam, "eliezer_gray", coeffs)


def pinney_from_pair_damped(y1, y2, A: float, B: float, C: float, lam: float,
                            coeffs: CoefficientSet,
                            t_ref: Optional[float] = None) -> PinneySolution:
    """Damped variant: same quadratic form over solutions of the damped
    linear equation.

    The damping integral of the governing Pinney equation is anchored at
    t_ref, where the constraint AB - C^2 = lam / W(t_ref)^2 is checked
    (there the exponential factor is 1); the result then solves the damped
    Pinney equation with right side lam * exp(-2 int_ref^t D)/rho^3 at all t.
    """
    if t_ref is None:
        t_ref = max(y1.window[0], y2.window[0])
    W0 = wronskian(y1, y2, t_ref)
    target = lam / (W0 * W0)
    lhs = A * B - C * C
    if abs(lhs - target) > _CONSTRAINT_TOL * max(1.0, abs(target)):
        raise ValueError(
            f"constraint AB - C^2 = lambda/W(t0)^2 violated: {lhs} vs {target}")
    return _quadratic_form_solution(y1, y2, A, B, C, lam, "eliezer_gray",
                                    coeffs, damp_ref=t_ref)


def pinney_from_invariants(x1, x2, I1: float, I2: float,
                           coeffs: Optional[CoefficientSet] = None,
                           t_ref: Optional[float] = None) -> PinneySolution:
    """rho = (1/W) sqrt(I1 x2^2 + I2 x1^2 + 2 x1 x2 [I1 I2 - W^2]^{1/2}).

    I1, I2 are the (unhalved) invariant values of x1, x2 against the same
    rho; the output always carries unit auxiliary momentum.  With I1 = 1,
    I2 = W^2 this is Pinney's closed form sqrt(x1^2 + x2^2/W^2).
    """
    if t_ref is None:
        t_ref = max(x1.window[0], x2.window[0])
    W = wronskian(x1, x2, t_ref)
    w2 = W * W
    disc = I1 * I2 - w2
    if disc < -_CONSTRAINT_TOL * max(1.0, w2):
        raise ValueError(f"need I1*I2 >= W^2, got {I1 * I2} < {w2}")
    if disc < _CONSTRAINT_TOL * max(1.0, w2):
        disc = 0.0  # boundary case I1*I2 = W^2 up to rounding
    cross = math.sqrt(disc)
    return _quadratic_form_solution(x1, x2, I2 / w2, I1 / w2, cross / w2,
                                    1.0, "lutzky_two_invariant", coeffs)


def _phase_trajectory(rho_sol: PinneySolution, rate: float, tol: float,
                      t_start: Optional[float] = None) -> Trajectory:
    # d(phi)/dt = rate / rho^2, phi(t_start) = 0
    cs = CoefficientSet(omega2=lambda t: 0.0)

    def rhs(t, y):
        r = rho_sol.rho(t)
        return np.array([rate / (r * r)])

    return integrate(cs, "custom", (0.0,), rho_sol.window, tol, rhs=rhs,
                     t_start=t_start)


def pinney_from_particular(rho_tilde: PinneySolution, I1: float, I2: float,
                           tol: float = 1e-11,
                           t_start: Optional[float] = None) -> PinneySolution:
    """General solution from one particular unit-h solution:

    rho = rho~ sqrt(I1 sin^2 phi + I2 cos^2 phi + [I1 I2 - 1]^{1/2} sin 2 phi),
    phi' = 1/rho~^2, phi = 0 at t_start (default: the window start).
    """
    disc = I1 * I2 - 1.0
    if disc < -_CONSTRAINT_TOL:
        raise ValueError("need I1*I2 >= 1")
    if abs(rho_tilde.h_squared - 1.0) > 1e-9:
        raise ValueError("particular solution must carry unit auxiliary momentum")
    cross = math.sqrt(max(disc, 0.0))
    phi = _phase_trajectory(rho_tilde, 1.0, tol, t_start=t_start)

    def pieces(t):
        p = phi.value(t)
        s2, c2 = math.sin(2.0 * p), math.cos(2.0 * p)
        g = 0.5 * (I1 + I2) - 0.5 * (I1 - I2) * c2 + cross * s2
        dg = (I1 - I2) * s2 + 2.0 * cross * c2      # dG/dphi
        ddg = 2.0 * (I1 - I2) * c2 - 4.0 * cross * s2
        return g, dg, ddg

    def rho(t):
        g, _, _ = pieces(t)
        if g <= 0.0:
            raise ValueError(f"radicand non-positive at t={t}")
        return rho_tilde.rho(t) * math.sqrt(g)

    def rho_dot(t):
        g, dg, _ = pieces(t)
        rt = rho_tilde.rho(t)
        phidot = 1.0 / (rt * rt)
        return rho_tilde.rho_dot(t) * math.sqrt(g) + rt * 0.5 * dg * phidot / math.sqrt(g)

    def rho_ddot(t):
        g, dg, ddg = pieces(t)
        rt = rho_tilde.rho(t)
        vt = rho_tilde.rho_dot(t)
        at = rho_tilde.second_deriv(t)
        phidot = 1.0 / (rt * rt)
        phiddot = -2.0 * vt / rt ** 3
        sg = math.sqrt(g)
        gdot = dg * phidot
        gddot = ddg * phidot * phidot + dg * phiddot
        return (at * sg + vt * gdot / sg
                + rt * (0.5 * gddot / sg - 0.25 * gdot * gdot / g ** 1.5))

    sol = PinneySolution(rho, rho_dot, 1.0, "lutzky_particular",
                         rho_tilde.window, coeffs=rho_tilde.coeffs,
                         rho_ddot=rho_ddot, damp_ref=rho_tilde.damp_ref)
    sol.phase = phi
    return sol


def linear_from_pinney(rho_sol: PinneySolution, tol: float = 1e-11,
                       t_start: Optional[float] = None):
    """Rebuild a linear fundamental pair x1 = rho cos phi, x2 = rho sin phi
    with phi' = h/rho^2 (phi = 0 at t_start, default the window start);
    their Wronskian is h."""
    h = rho_sol.h
    if h == 0.0:
        raise ValueError("h = 0 carries no phase; rho itself is linear")
    phi = _phase_trajectory(rho_sol, h, tol, t_start=t_start)
    lo, hi = rho_sol.window

    def mk(trig, dtrig):
        def val(t):
            return rho_sol.rho(t) * trig(phi.value(t))

        def der(t):
            p = phi.value(t)
            r = rho_sol.rho(t)
            return rho_sol.rho_dot(t) * trig(p) + (h / r) * dtrig(p)

        return FunctionTrajectory(val, der, (lo, hi))

    x1 = mk(math.cos, lambda p: -math.sin(p))
    x2 = mk(math.sin, math.cos)
    return x1, x2


def initial_condition_pair(psi1, psi2, t0: float):
    """Combinations x1, x2 of an arbitrary independent pair satisfying
    x1(t0)=1, x1'(t0)=0, x2(t0)=0, x2'(t0)=1."""
    w0 = wronskian(psi1, psi2, t0)
    if abs(w0) < 1e-12:
        raise ValueError("pair is (numerically) degenerate at t0")
    p1, p2 = psi1.value(t0), psi2.value(t0)
    d1, d2 = psi1.deriv(t0), psi2.deriv(t0)
    lo = max(psi1.window[0], psi2.window[0])
    hi = min(psi1.window[1], psi2.window[1])

    def combo(a, b):
        return FunctionTrajectory(
            lambda t: (a * psi1.value(t) + b * psi2.value(t)) / w0,
            lambda t: (a * psi1.deriv(t) + b * psi2.deriv(t)) / w0,
            (lo, hi))

    x1 = combo(d2, -d1)
    x2 = combo(-p2, p1)
    return x1, x2


def pinney_residual(sol: PinneySolution, n_grid: int = 200,
                    use_fd: bool = False, pad: float = 1e-3,
                    relative: bool = False) -> float:
    """Max |rho'' + D rho' + (omega2/eps^2) rho - (h^2/eps^2) e^{-2 int D}/rho^3|
    over an interior grid.  use_fd replaces the analytic rho'' by a central
    difference of rho_dot (the cross-check route); `relative` normalizes by
    the largest term so stiff windows compare fairly."""
    if sol.coeffs is None:
        raise ValueError("solution has no governing coefficients attached")
    lo, hi = sol.window
    span = hi - lo
    ts = np.linspace(lo + pad * span, hi - pad * span, n_grid)
    eps2 = sol.coeffs.epsilon ** 2
    worst = 0.0
    hfd = 5e-5 * span
    for t in ts:
        r = sol.rho(t)
        v = sol.rho_dot(t)
        if use_fd or sol.rho_ddot is None:
            # fourth-order stencil: truncation stays below the dense-output noise
            vm2, vm1, vp1, vp2 = (sol.rho_dot(t - 2 * hfd), sol.rho_dot(t - hfd),
                                  sol.rho_dot(t + hfd), sol.rho_dot(t + 2 * hfd))
            acc = (vm2 - 8.0 * vm1 + 8.0 * vp1 - vp2) / (12.0 * hfd)
        else:
            acc = sol.rho_ddot(t)
        stiff = (sol.coeffs.omega2(t) / eps2) * r
        res = acc + sol.coeffs.total_damping(t) * v + stiff
        barrier = 0.0
        if sol.h_squared != 0.0:
            barrier = (sol.h_squared / eps2) * math.exp(
                -2.0 * sol.damping_exponent(t)) / r ** 3
            res -= barrier
        if relative:
            res /= max(1.0, abs(acc), abs(stiff), abs(barrier))
        worst = max(worst, abs(res))
    return worst
