"""Self-contained special functions: Bessel J/Y/I/K for real order,
Hermite polynomials, and Gauss-Hermite quadrature.

The Bessel evaluators are built from three classical representations,
chosen per regime so that double precision keeps ~1e-13 relative accuracy
over nu in [0, 6], x in (0, ~700):

* ascending power series (J for x < 8, I for x < 18) -- no cancellation
  in that range;
* Bessel/Schlaefli integral representations evaluated with fixed
  Gauss-Legendre panels (J and Y for moderate x, K everywhere) -- the
  integrands are entire, so the panels converge geometrically;
* Hankel asymptotic expansions for large x, where the smallest term of
  the divergent series is below 1e-15.

Derivatives are always formed from the order-recurrence identities, never
by differencing.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "BesselKind",
    "QuadratureRule",
    "bessel",
    "bessel_deriv",
    "bessel_j",
    "bessel_y",
    "bessel_i",
    "bessel_k",
    "hermite",
    "gauss_hermite",
]

_SERIES_EPS = 1e-18
_J_SERIES_MAX_X = 8.0
_JY_ASYMPTOTIC_MIN_X = 17.0
_I_SERIES_MAX_X = 18.0


class BesselKind(enum.Enum):
    J = "J"
    Y = "Y"
    I = "I"  # noqa: E741 - standard function letter
    K = "K"


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights of a quadrature rule on the real line."""

    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, f) -> float:
        """Apply the rule to a callable (weight function included)."""
        return float(np.dot(self.weights, np.asarray([f(x) for x in self.nodes])))


# ---------------------------------------------------------------------------
# Gauss-Legendre panels (plumbing for the integral representations)

@lru_cache(maxsize=8)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def _gl_panel_sum(f, a: float, b: float, n: int = 48) -> float:
    x, w = _leggauss(n)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    return half * float(np.dot(w, f(mid + half * x)))


def _gl_panels(f, edges, n: int = 48) -> float:
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b > a:
            total += _gl_panel_sum(f, a, b, n)
    return total


# ---------------------------------------------------------------------------
# Ascending series

def _bessel_j_series(nu: float, x: float) -> float:
    # J_nu(x) = (x/2)^nu sum_k (-1)^k (x^2/4)^k / (k! Gamma(nu+k+1))
    q = 0.25 * x * x
    term = math.exp(nu * math.log(0.5 * x) - math.lgamma(nu + 1.0)) if x > 0 else (
        1.0 if nu == 0.0 else 0.0)
    if x == 0.0:
        return term
    total = term
    k = 0
    while True:
        k += 1
        term *= -q / (k * (nu + k))
        total += term
        if abs(term) < _SERIES_EPS * (abs(total) + 1e-300) or k > 400:
            return total


def _bessel_i_series(nu: float, x: float) -> float:
    q = 0.25 * x * x
    term = math.exp(nu * math.log(0.5 * x) - math.lgamma(nu + 1.0)) if x > 0 else (
        1.0 if nu == 0.0 else 0.0)
    if x == 0.0:
        return term
    total = term
    k = 0
    while True:
        k += 1
        term *= q / (k * (nu + k))
        total += term
        if term < _SERIES_EPS * total or k > 400:
            return total


# ---------------------------------------------------------------------------
# Hankel asymptotic expansions (A&S 9.2 and 9.7), x large

def _hankel_pq(nu: float, x: float):
    mu = 4.0 * nu * nu
    p = 1.0
    q = 0.0
    term = 1.0
    k = 0
    while True:
        # term_k -> term_{k+1} with factor (mu - (2k+1)^2) / ((k+1) 8x)
        odd = 2 * k + 1
        nxt = term * (mu - odd * odd) / ((k + 1) * 8.0 * x)
        if abs(nxt) >= abs(term) or abs(nxt) < 1e-18:
            if k % 2 == 0:
                q += (1.0 if k % 4 == 0 else -1.0) * nxt
            break
        if k % 2 == 0:
            q += (1.0 if k % 4 == 0 else -1.0) * nxt
        else:
            p += (1.0 if (k + 1) % 4 == 0 else -1.0) * nxt
        term = nxt
        k += 1
        if k > 60:
            break
    return p, q


def _bessel_jy_asymptotic(nu: float, x: float):
    p, q = _hankel_pq(nu, x)
    chi = x - (0.5 * nu + 0.25) * math.pi
    amp = math.sqrt(2.0 / (math.pi * x))
    c, s = math.cos(chi), math.sin(chi)
    return amp * (p * c - q * s), amp * (p * s + q * c)


def _bessel_i_asymptotic(nu: float, x: float) -> float:
    mu = 4.0 * nu * nu
    total = 1.0
    term = 1.0
    k = 0
    while True:
        odd = 2 * k + 1
        nxt = -term * (mu - odd * odd) / ((k + 1) * 8.0 * x)
        if abs(nxt) >= abs(term) or abs(nxt) < 1e-18:
            total += nxt
            break
        total += nxt
        term = nxt
        k += 1
        if k > 60:
            break
    log_val = x - 0.5 * math.log(2.0 * math.pi * x)
    if log_val > 709.0:
        raise OverflowError(f"I_nu overflow at x={x}")
    return math.exp(log_val) * total


# ---------------------------------------------------------------------------
# Integral representations (A&S 9.1.21, 9.1.22, 9.6.24)

def _theta_integral(nu: float, x: float, want_sin: bool) -> float:
    # (1/pi) int_0^pi cos(x sin t - nu t) dt   (or sin(...) for Y)
    fn = np.sin if want_sin else np.cos
    n = 96 if x < 10.0 else 160

    def f(t):
        return fn(x * np.sin(t) - nu * t)

    return _gl_panel_sum(f, 0.0, math.pi, n) / math.pi


def _tail_cutoff(x: float, growth: float, target: float = 50.0,
                 shifted_cosh: bool = False) -> float:
    # smallest t where the decaying exponent beats `target`, bisection on [0, 60];
    # exponent is x*sinh(t) for the J/Y tails, x*(cosh(t)-1) for the K kernel
    lo, hi = 1e-3, 60.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        decay = x * (math.cosh(mid) - 1.0) if shifted_cosh else x * math.sinh(mid)
        if decay - growth * mid > target:
            hi = mid
        else:
            lo = mid
    return hi


def _exp_tail_integral(x: float, weight) -> float:
    """int_0^tmax exp(-x sinh t) * weight(t) dt by composite Gauss-Legendre.

    weight may grow like exp(nu t); panels are split around the integrand's
    peak so each panel sees a smooth profile.
    """
    tmax = _tail_cutoff(x, growth=8.0)
    edges = sorted({0.0, 0.25 * tmax, 0.5 * tmax, 0.75 * tmax, tmax})

    def f(t):
        return np.exp(-x * np.sinh(t)) * weight(t)

    return _gl_panels(f, list(edges), n=64)


def _bessel_j_integral(nu: float, x: float) -> float:
    val = _theta_integral(nu, x, want_sin=False)
    s = math.sin(nu * math.pi)
    if s != 0.0:
        val -= (s / math.pi) * _exp_tail_integral(
            x, lambda t: np.exp(-nu * t))
    return val


def _bessel_y_integral(nu: float, x: float) -> float:
    val = _theta_integral(nu, x, want_sin=True)
    c = math.cos(nu * math.pi)

    def weight(t):
        return np.exp(nu * t) + c * np.exp(-nu * t)

    return val - _exp_tail_integral(x, weight) / math.pi


def _bessel_k_integral(nu: float, x: float) -> float:
    # K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt, scaled by e^x
    tmax = _tail_cutoff(x, growth=max(nu, 1.0) + 1.0, shifted_cosh=True)
    # peak of exp(nu t - x cosh t) sits at sinh t = nu/x
    tpk = math.asinh(nu / x) if nu > 0 else 0.0
    edges = sorted({0.0, max(tpk - 1.0, 0.0), tpk + 1.0, 0.5 * (tpk + 1.0 + tmax), tmax})

    def f(t):
        return np.exp(-x * (np.cosh(t) - 1.0)) * np.cosh(nu * t)

    scaled = _gl_panels(f, list(edges), n=64)
    if x > 700.0:
        # representable result despite the e^{-x} factor only if scaled is huge
        log_val = math.log(scaled) - x
        if log_val < -745.0:
            return 0.0
        return math.exp(log_val)
    return math.exp(-x) * scaled


# ---------------------------------------------------------------------------
# Public kind-wise evaluators

def _check_args(kind: BesselKind, nu: float, x: float) -> None:
    if not (math.isfinite(nu) and math.isfinite(x)):
        raise ValueError("bessel: nu and x must be finite")
    if nu < 0.0:
        raise ValueError(f"bessel: order must be >= 0, got nu={nu}")
    if kind in (BesselKind.Y, BesselKind.K):
        if x <= 0.0:
            raise ValueError(f"bessel: {kind.value}_nu requires x > 0, got x={x}")
    elif x < 0.0:
        raise ValueError(f"bessel: {kind.value}_nu requires x >= 0, got x={x}")


def bessel_j(nu: float, x: float) -> float:
    _check_args(BesselKind.J, nu, x)
    if x <= _J_SERIES_MAX_X:
        return _bessel_j_series(nu, x)
    if x < _JY_ASYMPTOTIC_MIN_X:
        return _bessel_j_integral(nu, x)
    return _bessel_jy_asymptotic(nu, x)[0]


def bessel_y(nu: float, x: float) -> float:
    _check_args(BesselKind.Y, nu, x)
    if x < _JY_ASYMPTOTIC_MIN_X:
        val = _bessel_y_integral(nu, x)
        if not math.isfinite(val):
            raise OverflowError(f"Y_nu overflow at nu={nu}, x={x}")
        return val
    return _bessel_jy_asymptotic(nu, x)[1]


def bessel_i(nu: float, x: float) -> float:
    _check_args(BesselKind.I, nu, x)
    if x <= _I_SERIES_MAX_X:
        return _bessel_i_series(nu, x)
    return _bessel_i_asymptotic(nu, x)


def bessel_k(nu: float, x: float) -> float:
    _check_args(BesselKind.K, nu, x)
    val = _bessel_k_integral(nu, x)
    if not math.isfinite(val):
        raise OverflowError(f"K_nu overflow at nu={nu}, x={x}")
    return val


_DISPATCH = {
    BesselKind.J: bessel_j,
    BesselKind.Y: bessel_y,
    BesselKind.I: bessel_i,
    BesselKind.K: bessel_k,
}


def _as_kind(kind) -> BesselKind:
    if isinstance(kind, BesselKind):
        return kind
    return BesselKind(str(kind).upper())


def bessel(kind, nu: float, x: float) -> float:
    """Evaluate J/Y/I/K of real order nu >= 0 at x."""
    return _DISPATCH[_as_kind(kind)](float(nu), float(x))


def bessel_deriv(kind, nu: float, x: float) -> float:
    """d/dx of the chosen Bessel function, via order recurrences.

    J'_nu = (nu/x) J_nu - J_{nu+1}   (same form for Y)
    I'_nu = (nu/x) I_nu + I_{nu+1}
    K'_nu = (nu/x) K_nu - K_{nu+1}
    """
    k = _as_kind(kind)
    nu = float(nu)
    x = float(x)
    _check_args(k, nu, x)
    if x == 0.0:
        # J, I only; limits of the recurrence forms
        if nu == 1.0:
            return 0.5
        if nu == 0.0:
            return 0.0 if k is BesselKind.I else -0.0
        if nu > 1.0:
            return 0.0
        raise ValueError("bessel_deriv: x=0 with 0 < nu < 1 is singular")
    f = _DISPATCH[k]
    base = f(nu, x)
    up = f(nu + 1.0, x)
    if k is BesselKind.I:
        return (nu / x) * base + up
    return (nu / x) * base - up


# ---------------------------------------------------------------------------
# Hermite polynomials and Gauss-Hermite rules

def hermite(n: int, x: float) -> float:
    """Physicists' Hermite polynomial H_n(x) by the three-term recurrence."""
    if n < 0 or int(n) != n:
        raise ValueError(f"hermite: n must be a nonnegative integer, got {n}")
    h0, h1 = 1.0, 2.0 * x
    if n == 0:
        return h0
    if n == 1:
        return h1
    for k in range(1, int(n)):
        h0, h1 = h1, 2.0 * x * h1 - 2.0 * k * h0
    return h1


@lru_cache(maxsize=None)
def gauss_hermite(n: int) -> QuadratureRule:
    """Gauss-Hermite rule: integrates e^{-x^2} p(x) exactly for deg p <= 2n-1.

    Golub-Welsch on the Jacobi matrix of the Hermite weight; weights from the
    squared first components of the eigenvectors. Nodes are symmetrized so the
    rule is exactly even.
    """
    if n < 1 or n > 128:
        raise ValueError(f"gauss_hermite: need 1 <= n <= 128, got {n}")
    if n == 1:
        return QuadratureRule(np.array([0.0]), np.array([math.sqrt(math.pi)]))
    off = np.sqrt(np.arange(1, n) / 2.0)
    jac = np.diag(off, 1) + np.diag(off, -1)
    vals, vecs = np.linalg.eigh(jac)
    weights = math.sqrt(math.pi) * vecs[0, :] ** 2
    # enforce the exact +-x symmetry of the rule
    nodes = 0.5 * (vals - vals[::-1])
    weights = 0.5 * (weights + weights[::-1])
    if n % 2 == 1:
        nodes[n // 2] = 0.0
    nodes = nodes.copy()
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return QuadratureRule(nodes, weights)
