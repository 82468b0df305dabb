"""Adaptive integration of the parametric-oscillator and Pinney equations.

The integrator is an explicit Dormand-Prince 5(4) embedded pair with
per-step error control.  Dense output is a per-step quintic Hermite
interpolant through (y, y') at the step ends and at the midpoint; the
midpoint state comes from one uncontrolled half-step of the same method,
so the interpolation error tracks the integration error instead of
degrading to the cubic-Hermite floor.

Equations are kept in the first-order form

    q' = v,   v' = -D(t) v - (omega2(t)/eps^2) q  [+ Pinney term]

with D the total damping (friction plus mass-log rate).  For the Pinney
kind the damping integral is co-integrated as an extra state so the
exp(-2 int D) factor on the 1/rho^3 term is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "CoefficientSet",
    "Trajectory",
    "FunctionTrajectory",
    "IntegrationError",
    "StepSizeUnderflow",
    "integrate",
    "fundamental_pair",
    "wronskian",
]


class IntegrationError(RuntimeError):
    """Numerical failure inside the integrator."""


class StepSizeUnderflow(IntegrationError):
    """Step size collapsed; signals stiffness or a singularity (e.g. rho -> 0)."""

    def __init__(self, t: float, message: str = ""):
        self.t = t
        super().__init__(message or f"step size underflow at t={t!r}")


@dataclass
class CoefficientSet:
    """Coefficient functions defining one parametric oscillator.

    omega2        stiffness omega^2(t) (may be negative, e.g. -kappa e^{-4 Omega})
    damping       friction P(t) of the damped oscillator form, or None
    mass_log_rate d/dt ln M(t) for a time-dependent mass, or None  (enters the
                  equation of motion exactly like damping; kept separate because
                  it also defines the momentum p = M qdot)
    epsilon       slowness scale: the equation integrated is
                  eps^2 (q'' + D q') + omega2 q = 0
    damp_ref      anchor of the damping integral int_ref^t D; None = window start
    damp_log      optional exact antiderivative of D measured from damp_ref
    """

    omega2: Callable[[float], float]
    damping: Optional[Callable[[float], float]] = None
    mass_log_rate: Optional[Callable[[float], float]] = None
    epsilon: float = 1.0
    damp_ref: Optional[float] = None
    damp_log: Optional[Callable[[float], float]] = None

    def total_damping(self, t: float) -> float:
        d = 0.0
        if self.damping is not None:
            d += self.damping(t)
        if self.mass_log_rate is not None:
            d += self.mass_log_rate(t)
        return d

    @property
    def has_damping(self) -> bool:
        return self.damping is not None or self.mass_log_rate is not None


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920,
               -17253 / 339200, 22 / 525, -1 / 40])

# quintic Hermite basis on s in [0,1]: rows are value/derivative constraints
# at s = 0, 1/2, 1; columns are monomial coefficients 1..s^5
_H6 = np.array([
    [1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0],
    [1, 0.5, 0.25, 0.125, 0.0625, 0.03125],
    [0, 1, 1.0, 0.75, 0.5, 0.3125],
    [1, 1, 1, 1, 1, 1],
    [0, 1, 2, 3, 4, 5],
])
_H6_INV = np.linalg.inv(_H6)


def _dp_step(f, t: float, y: np.ndarray, h: float, k1: np.ndarray):
    """One DP54 step; returns (y_new, err_vec, k_stack, f_new)."""
    k = [k1]
    for i in range(1, 7):
        yi = y + h * (np.stack(k[: i], axis=0).T @ _A[i])
        ki = f(t + _C[i] * h, yi)
        k.append(ki)
    ks = np.stack(k, axis=0)
    y_new = y + h * (ks.T @ _B)
    err = h * (ks.T @ _E)
    return y_new, err, ks, k[6]


class Trajectory:
    """Densely interpolable solution of a second-order (or custom) system.

    `times`/`states` hold the accepted step nodes; evaluation anywhere in the
    window goes through the per-step quintic interpolant.  For (q, v) systems
    `value` is the coordinate and `deriv` its time derivative (the second
    state component, not a differentiated interpolant).
    """

    def __init__(self, times, states, starts, hs, coeffs, tol):
        self.times = np.asarray(times)
        self.states = np.asarray(states)
        self._starts = np.asarray(starts)
        self._hs = np.asarray(hs)
        self._coeffs = coeffs  # list of (6, dim) arrays
        self.tol = tol
        self._lefts = np.minimum(self._starts, self._starts + self._hs)

    @property
    def window(self):
        return (float(self.times[0]), float(self.times[-1]))

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def _locate(self, t: float) -> int:
        t0, t1 = self.window
        span = t1 - t0
        if t < t0 - 1e-9 * max(1.0, abs(span)) or t > t1 + 1e-9 * max(1.0, abs(span)):
            raise ValueError(f"t={t} outside trajectory window [{t0}, {t1}]")
        i = int(np.searchsorted(self._lefts, t, side="right") - 1)
        return min(max(i, 0), len(self._coeffs) - 1)

    def eval(self, t: float) -> np.ndarray:
        i = self._locate(t)
        s = (t - self._starts[i]) / self._hs[i]
        powers = np.array([1.0, s, s * s, s ** 3, s ** 4, s ** 5])
        return powers @ self._coeffs[i]

    def value(self, t: float) -> float:
        return float(self.eval(t)[0])

    def deriv(self, t: float) -> float:
        return float(self.eval(t)[1])

    def values(self, ts: Sequence[float]) -> np.ndarray:
        return np.array([self.eval(t) for t in np.asarray(ts, dtype=float)])


class FunctionTrajectory:
    """Trajectory-like wrapper for closed-form solutions.

    Presents the same value/deriv/window surface as an integrated
    Trajectory, so the Pinney constructions accept either kind.
    """

    def __init__(self, value_fn: Callable[[float], float],
                 deriv_fn: Callable[[float], float], window):
        self._value = value_fn
        self._deriv = deriv_fn
        self.window = (float(window[0]), float(window[1]))

    def value(self, t: float) -> float:
        return float(self._value(t))

    def deriv(self, t: float) -> float:
        return float(self._deriv(t))


def _initial_step(f, t0, y0, direction, tol, span):
    f0 = f(t0, y0)
    d0 = float(np.sqrt(np.mean(y0 ** 2)))
    d1 = float(np.sqrt(np.mean(f0 ** 2)))
    h = 0.01 * d0 / d1 if (d0 > 1e-8 and d1 > 1e-8) else 1e-3 * span
    # rejections recover from an optimistic guess; a span-fraction cap keeps
    # the first trial from probing far outside the solution scale
    return direction * min(h, 0.02 * span), f0


def _sweep(f, y0, t0, t1, tol, max_step, fixed_step):
    """Integrate t0 -> t1; returns node lists and per-step interpolants."""
    span = abs(t1 - t0)
    if span == 0.0:
        raise ValueError("empty integration window")
    direction = 1.0 if t1 > t0 else -1.0
    y = np.asarray(y0, dtype=float).copy()
    t = t0
    if fixed_step is not None:
        h = direction * abs(fixed_step)
        f_now = f(t, y)
    else:
        h, f_now = _initial_step(f, t0, y, direction, tol, span)
    if max_step is not None:
        h = direction * min(abs(h), max_step)

    times = [t]
    states = [y.copy()]
    starts, hs, coeffs = [], [], []
    hmin = 1e-14 * max(span, abs(t0), abs(t1), 1.0)
    nsteps = 0
    while direction * (t1 - t) > 0:
        if abs(h) < hmin:
            raise StepSizeUnderflow(t)
        if direction * (t + h - t1) > 0:
            h = t1 - t
        y_new, err, _, f_new = _dp_step(f, t, y, h, f_now)
        if not np.all(np.isfinite(y_new)):
            # a trial stage left the solution's domain (e.g. probed rho <= 0);
            # treat as a rejected step so the controller can back off
            if fixed_step is not None:
                raise IntegrationError(f"non-finite state at t={t + h}")
            h *= 0.2
            continue
        sc = tol * (1.0 + np.maximum(np.abs(y), np.abs(y_new)))
        enorm = float(np.sqrt(np.mean((err / sc) ** 2)))
        if fixed_step is None and enorm > 1.0:
            h *= max(0.2, 0.9 * enorm ** -0.2)
            continue
        # accepted: uncontrolled half-step for the quintic midpoint
        hm = 0.5 * h
        y_mid, _, _, f_mid = _dp_step(f, t, y, hm, f_now)
        data = np.stack([y, h * f_now, y_mid, h * f_mid, y_new, h * f_new], axis=0)
        coeffs.append(_H6_INV @ data)
        starts.append(t)
        hs.append(h)
        t = t + h
        y = y_new
        f_now = f_new
        times.append(t)
        states.append(y.copy())
        nsteps += 1
        if nsteps > 2_000_000:
            raise IntegrationError("step budget exhausted")
        if fixed_step is None:
            fac = min(5.0, max(0.2, 0.9 * (enorm + 1e-16) ** -0.2))
            h *= fac
            if max_step is not None and abs(h) > max_step:
                h = direction * max_step
    return times, states, starts, hs, coeffs


def _make_rhs(coeffs: CoefficientSet, rhs_kind: str, h_aux: float,
              custom_rhs=None, damp_offset: float = 0.0):
    eps2 = coeffs.epsilon ** 2
    w2 = coeffs.omega2
    if rhs_kind == "custom":
        if custom_rhs is None:
            raise ValueError("rhs_kind='custom' requires rhs callable")
        return custom_rhs, None

    if rhs_kind == "linear":
        if coeffs.has_damping:
            def rhs(t, y):
                q, v = y
                w = w2(t)
                if not math.isfinite(w):
                    raise IntegrationError(f"non-finite omega2 at t={t}")
                return np.array([v, -coeffs.total_damping(t) * v - (w / eps2) * q])
        else:
            def rhs(t, y):
                q, v = y
                w = w2(t)
                if not math.isfinite(w):
                    raise IntegrationError(f"non-finite omega2 at t={t}")
                return np.array([v, -(w / eps2) * q])
        return rhs, None

    if rhs_kind == "pinney":
        h2 = h_aux * h_aux
        singular = h2 > 0.0  # with h=0 the 1/rho^3 term is absent

        def check_w(t):
            w = w2(t)
            if not math.isfinite(w):
                raise IntegrationError(f"non-finite omega2 at t={t}")
            return w

        if coeffs.has_damping:
            # state (rho, rho', w) with w = int_ref^t D dt'
            def rhs(t, y):
                rho, v, w = y
                if singular and rho < 1e-12:
                    return np.array([math.nan, math.nan, math.nan])
                d = coeffs.total_damping(t)
                acc = -d * v - (check_w(t) / eps2) * rho
                if singular:
                    acc += (h2 / eps2) * math.exp(-2.0 * (w + damp_offset)) / rho ** 3
                return np.array([v, acc, d])
            return rhs, 3
        def rhs(t, y):
            rho, v = y
            if singular and rho < 1e-12:
                return np.array([math.nan, math.nan])
            acc = -(check_w(t) / eps2) * rho
            if singular:
                acc += (h2 / eps2) / rho ** 3
            return np.array([v, acc])
        return rhs, 2

    raise ValueError(f"unknown rhs_kind {rhs_kind!r}")


def integrate(coeffs: CoefficientSet, rhs_kind: str, y0, window, tol: float,
              *, h_aux: float = 1.0, t_start: Optional[float] = None,
              max_step: Optional[float] = None, fixed_step: Optional[float] = None,
              rhs=None) -> Trajectory:
    """Integrate over `window`, optionally starting from an interior t_start.

    rhs_kind is 'linear', 'pinney' or 'custom'.  tol is the per-step local
    error tolerance (mixed absolute/relative).  For 'pinney', y0 = (rho0,
    rho_dot0) with rho0 > 0 and `h_aux` the auxiliary angular momentum.
    """
    if not (1e-14 <= tol <= 1e-3):
        raise ValueError(f"tol must be in [1e-14, 1e-3], got {tol}")
    a, b = float(window[0]), float(window[1])
    if a == b:
        raise ValueError("window must be nondegenerate")
    if t_start is None:
        t_start = a  # a reversed window means: start at window[0], run backward
    if a > b:
        a, b = b, a
    if not (a <= t_start <= b):
        raise ValueError("t_start outside window")

    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    damp_offset = 0.0
    if rhs_kind == "pinney":
        if y0[0] <= 0.0:
            raise ValueError("pinney initial condition requires rho0 > 0")
        ref = coeffs.damp_ref if coeffs.damp_ref is not None else a
        if coeffs.has_damping:
            if coeffs.damp_log is not None:
                damp_offset = coeffs.damp_log(t_start) - coeffs.damp_log(ref)
            elif t_start != ref:
                from scipy.integrate import quad
                damp_offset = quad(coeffs.total_damping, ref, t_start,
                                   epsabs=1e-13, epsrel=1e-13)[0]
            y0 = np.append(y0, 0.0)
    f, _ = _make_rhs(coeffs, rhs_kind, h_aux, custom_rhs=rhs,
                     damp_offset=damp_offset)

    pieces = []
    if t_start > a:
        pieces.append(_sweep(f, y0, t_start, a, tol, max_step, fixed_step))
    if t_start < b:
        pieces.append(_sweep(f, y0, t_start, b, tol, max_step, fixed_step))
    if not pieces:
        raise ValueError("window must be nondegenerate")

    times, states, starts, hs, coeffs_list = [], [], [], [], []
    for piece in pieces:
        pt, ps, pst, ph, pc = piece
        if pt[-1] < pt[0]:  # backward sweep: flip ascending
            pt, ps = pt[::-1], ps[::-1]
            pst, ph, pc = pst[::-1], ph[::-1], pc[::-1]
        if times and abs(times[-1] - pt[0]) < 1e-30 + 1e-15 * abs(pt[0]):
            pt, ps = pt[1:], ps[1:]
        order = 0 if not times or pt[0] >= times[-1] else None
        if order is None:  # backward piece comes first
            times = list(pt) + times
            states = list(ps) + states
            starts = list(pst) + starts
            hs = list(ph) + hs
            coeffs_list = list(pc) + coeffs_list
        else:
            times += list(pt)
            states += list(ps)
            starts += list(pst)
            hs += list(ph)
            coeffs_list += list(pc)
    return Trajectory(times, states, starts, hs, coeffs_list, tol)


def fundamental_pair(coeffs: CoefficientSet, t0: float, window, tol: float = 1e-10):
    """Solutions x1, x2 of the linear equation with x1(t0)=1, x1'(t0)=0,
    x2(t0)=0, x2'(t0)=1."""
    x1 = integrate(coeffs, "linear", (1.0, 0.0), window, tol, t_start=t0)
    x2 = integrate(coeffs, "linear", (0.0, 1.0), window, tol, t_start=t0)
    return x1, x2


def wronskian(x1, x2, t: float) -> float:
    """W(t) = x1 x2' - x2 x1' for two trajectory-like objects."""
    return x1.value(t) * x2.deriv(t) - x2.value(t) * x1.deriv(t)
