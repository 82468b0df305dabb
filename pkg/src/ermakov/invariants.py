"""Exact invariants of the parametric oscillator: the Ermakov-Lewis
quadratic form and its damped, Ray-Reid, and Noether-form generalizations,
plus drift diagnostics and the fixed-time ring-integral oracle.

Conventions.  The auxiliary amplitude enters through its governing
nonlinear coefficient h^2 (taken from the PinneySolution); the invariant
is the Eliezer-Gray form

    I = 1/2 [ h^2 q^2/rho^2 + (rho p - eps e^{Q t} rhodot q)^2 ]

which reduces to the familiar expressions at h = 1 and equals h^2/2 on
matched trajectories for every h.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from .pinney import PinneySolution

__all__ = [
    "PhasePoint",
    "InvariantSeries",
    "ermakov_lewis",
    "ermakov_lewis_series",
    "ermakov_lewis_damped",
    "ray_reid",
    "noether_phi",
    "xi_first_integral",
    "ermakov_general_integral",
    "drift_report",
    "action_integral_oracle",
]


@dataclass(frozen=True)
class PhasePoint:
    """One phase-space sample (q, p) at time t."""

    q: float
    p: float
    t: float = 0.0


@dataclass
class InvariantSeries:
    """Invariant sampled along a trajectory; reference is the first sample."""

    times: np.ndarray
    values: np.ndarray
    reference: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.size == 0:
            raise ValueError("series must be nonempty")
        if self.reference is None:
            self.reference = float(self.values[0])


def ermakov_lewis(pt: PhasePoint, rho: PinneySolution,
                  eps: float = 1.0, Q: float = 0.0) -> float:
    """Ermakov-Lewis invariant at a phase point.

    Q is the constant mass-log rate (momentum p = e^{Q t} qdot); eps the
    slowness scale multiplying rhodot.
    """
    r = rho.rho(pt.t)
    rd = rho.rho_dot(pt.t)
    mass = math.exp(Q * pt.t)
    u = r * pt.p - eps * mass * rd * pt.q
    return 0.5 * (rho.h_squared * (pt.q / r) ** 2 + u * u)


def ermakov_lewis_series(q_traj, rho: PinneySolution, times,
                         eps: float = 1.0, Q: float = 0.0,
                         momentum: Optional[Callable[[float], float]] = None
                         ) -> InvariantSeries:
    """Sample the invariant along a coordinate trajectory.

    By default the momentum is e^{Q t} times the trajectory derivative;
    pass `momentum` to override.
    """
    times = np.asarray(times, dtype=float)
    vals = np.empty_like(times)
    for i, t in enumerate(times):
        q = q_traj.value(t)
        p = momentum(t) if momentum is not None else math.exp(Q * t) * q_traj.deriv(t)
        vals[i] = ermakov_lewis(PhasePoint(q, p, t), rho, eps=eps, Q=Q)
    return InvariantSeries(times, vals)


def ermakov_lewis_damped(pt: PhasePoint, rho: PinneySolution,
                         P: Callable[[float], float], h: float,
                         damp_ref: float = 0.0,
                         normalized: bool = False) -> float:
    """Damped-oscillator invariant, as printed (no 1/2 prefactor):

    I = h^2 x^2/rho^2 + (rhodot x - rho xdot)^2 exp(2 int_ref^t P).

    Here pt.p is the velocity xdot.  `normalized` divides by 2 to match
    the undamped normalization.
    """
    r = rho.rho(pt.t)
    rd = rho.rho_dot(pt.t)
    expo, err = quad(P, damp_ref, pt.t, epsabs=1e-13, epsrel=1e-13)
    del err
    val = (h * h * (pt.q / r) ** 2
           + (rd * pt.q - r * pt.p) ** 2 * math.exp(2.0 * expo))
    return 0.5 * val if normalized else val


def _potential(fn: Optional[Callable[[float], float]], u: float,
               anchor: float) -> float:
    if fn is None:
        return 0.0
    val, _ = quad(fn, anchor, u, epsabs=1e-12, epsrel=1e-12, limit=200)
    return 2.0 * val


def ray_reid(ptx: PhasePoint, ptrho: PhasePoint,
             f: Optional[Callable[[float], float]] = None,
             g: Optional[Callable[[float], float]] = None,
             anchor: float = 1.0) -> float:
    """Coupled-pair invariant I = 1/2 [phi(x/rho) + theta(rho/x) + (x rhodot - rho xdot)^2]
    with phi(u) = 2 int_anchor^u f, theta(v) = 2 int_anchor^v g.

    The anchor shifts I by a constant only; use anchor=0 for couplings
    integrable at the origin (then f(u)=u, g=0 reproduces the Ermakov-Lewis
    value exactly).
    """
    x, xdot = ptx.q, ptx.p
    r, rdot = ptrho.q, ptrho.p
    if g is not None and x == 0.0:
        raise ZeroDivisionError("x = 0 with nonzero g-coupling")
    if f is not None and r == 0.0:
        raise ZeroDivisionError("rho = 0 with nonzero f-coupling")
    total = (x * rdot - r * xdot) ** 2
    total += _potential(f, x / r, anchor)
    total += _potential(g, r / x, anchor) if g is not None else 0.0
    return 0.5 * total


def noether_phi(x: float, xdot: float, xi: float, xidot: float,
                xiddot: float, omega2: float) -> float:
    """Symmetry-generated conserved quantity
    Phi = 1/2 (xi xdot^2 + [xi omega^2 + xiddot/2] x^2 - xidot x xdot);
    with xi = rho^2 it is the Ermakov-Lewis invariant."""
    return 0.5 * (xi * xdot * xdot
                  + (xi * omega2 + 0.5 * xiddot) * x * x
                  - xidot * x * xdot)


def xi_first_integral(xi: float, xidot: float, xiddot: float,
                      omega2: float) -> float:
    """First integral xi xi'' - xi'^2/2 + 2 xi^2 omega^2 of the third-order
    symmetry equation; evaluates to 2 h^2 along xi = rho^2."""
    return xi * xiddot - 0.5 * xidot * xidot + 2.0 * xi * xi * omega2


def ermakov_general_integral(y: float, ydot: float, p: float, pdot: float,
                             phi_of: Callable[[float], float]) -> float:
    """C = (p y' - y p')^2 - phi(y/p), the quadrature first integral of the
    two-function generalized Ermakov equation p y'' - y p'' = f(y/p)/p^2
    (phi is 2 int f)."""
    if p == 0.0:
        raise ZeroDivisionError("p = 0 in the coupling argument")
    w = p * ydot - y * pdot
    return w * w - phi_of(y / p)


def drift_report(series: InvariantSeries):
    """(max absolute drift, max relative drift) against the first sample."""
    dev = np.abs(series.values - series.reference)
    max_abs = float(dev.max())
    if series.reference == 0.0:
        return max_abs, max_abs
    return max_abs, max_abs / abs(series.reference)


def action_integral_oracle(rho: PinneySolution, I_claim: float, t: float,
                           eps: float = 1.0, n_theta: int = 512) -> float:
    """Fixed-time ring integral (1/2pi) oint p dq around the invariant ring.

    The ring is parameterized by q = rho sqrt(2I) sin(theta),
    p = (sqrt(2I)/rho)(cos(theta) + eps rhodot rho sin(theta)); the
    periodic trapezoid rule over n_theta nodes must return I_claim.
    """
    if I_claim <= 0.0:
        raise ValueError("ring oracle needs a positive invariant")
    r = rho.rho(t)
    rd = rho.rho_dot(t)
    theta = np.linspace(0.0, 2.0 * math.pi, n_theta, endpoint=False)
    amp = math.sqrt(2.0 * I_claim)
    p = (amp / r) * (np.cos(theta) + eps * rd * r * np.sin(theta))
    dq_dtheta = r * amp * np.cos(theta)
    return float(np.mean(p * dq_dtheta))
