"""Named scenario packs binding coefficients, exact solutions and initial
data: EFRW quantum cosmology (zero and nonzero factor-ordering), the
generalized XYZ oscillator, Helmholtz waveguide profiles with power-law
index, Lewis's closed-form adiabatic amplitudes, and Milne reconstruction.

Each pack returns a ScenarioBundle holding the coordinate trajectory, the
matched auxiliary amplitude, the sampled invariant, running and endpoint
angle data, and a table of named property checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from . import specfun
from .angles import (AngleBundle, XYZParams, adiabatic_rho0, angle_bundle,
                     berry_phase_xyz, hannay_xyz, omega2_from_xyz)
from .invariants import InvariantSeries, action_integral_oracle, drift_report, \
    ermakov_lewis_series
from .ode import CoefficientSet, FunctionTrajectory, integrate, wronskian
from .pinney import (PinneySolution, initial_condition_pair,
                     pinney_from_pair, pinney_from_pair_damped,
                     pinney_residual, solve_direct)
from .quantum import squeeze_coeffs

__all__ = [
    "ScenarioConfig",
    "ScenarioBundle",
    "CheckResult",
    "SCENARIO_NAMES",
    "scenario_defaults",
    "build_scenario",
    "efrw_q0",
    "efrw_q",
    "xyz_scenario",
    "helmholtz_power",
    "lewis_rho_m",
    "lewis_rho_n",
    "lewis_m_solution",
    "lewis_n_solution",
    "milne_reconstruct",
]

SCENARIO_NAMES = ("efrw_q", "efrw_q0", "helmholtz_power", "lewis_m",
                  "lewis_n", "xyz")

_FIGURES = {
    "efrw_q0": "figs 1-4 (constant invariant h^2/2; angle advances vs Omega)",
    "efrw_q": "figs 5-12 (nonzero ordering parameter; damped invariant)",
    "xyz": "Berry phase / Hannay angle adiabatic convergence",
    "helmholtz_power": "power-law waveguide: adiabatic amplitude and angles",
    "lewis_m": "closed-form Hankel-product amplitude",
    "lewis_n": "polynomial amplitude family",
}


@dataclass
class ScenarioConfig:
    """Parameters of one scenario run; unused fields are ignored."""

    name: str
    kappa: int = 1
    Q: float = 0.0
    h: float = 1.0
    m: float = 2.0
    b: float = 1.0
    lam: float = 100.0
    n_index: int = 1
    window: Optional[tuple] = None
    tol: float = 1e-10
    n_samples: int = 301
    omega0: float = 1.0

    def __post_init__(self):
        if self.window is None:
            self.window = scenario_defaults(self.name)["window"]
        self.window = (float(self.window[0]), float(self.window[1]))

    def validate(self) -> None:
        if self.name not in SCENARIO_NAMES:
            raise ValueError(f"scenario: unknown name {self.name!r}")
        if self.window[0] >= self.window[1]:
            raise ValueError("window: empty or reversed (t0 must be < t1)")
        if not (1e-14 <= self.tol <= 1e-3):
            raise ValueError("tol: must lie in [1e-14, 1e-3]")
        if self.name.startswith("efrw"):
            if self.kappa not in (-1, 1):
                raise ValueError("kappa: must be +1 or -1 (flat case is not "
                                 "a parametric oscillator)")
            if self.h <= 0:
                raise ValueError("h: auxiliary angular momentum must be > 0")
        if self.name in ("helmholtz_power", "lewis_m", "lewis_n"):
            if self.lam <= 0:
                raise ValueError("lambda: must be > 0")
            if self.b <= 0:
                raise ValueError("b: must be > 0")
            if self.window[0] <= 0:
                raise ValueError("window: optics scenarios need t0 > 0")
        if self.name in ("helmholtz_power", "lewis_m") and self.m == -2:
            raise ValueError("m: power-law exponent -2 is excluded")
        if self.name == "lewis_n" and (self.n_index == 0
                                       or int(self.n_index) != self.n_index):
            raise ValueError("n-index: must be a nonzero integer")
        if self.n_samples < 8:
            raise ValueError("n_samples: need at least 8")


def scenario_defaults(name: str) -> dict:
    if name.startswith("efrw"):
        return {"window": (-1.0, 2.0)}
    if name in ("helmholtz_power", "lewis_m", "lewis_n"):
        return {"window": (1.0, 4.0)}
    if name == "xyz":
        return {"window": (0.0, 2.0 * math.pi)}
    return {"window": (0.0, 1.0)}


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""


@dataclass
class ScenarioBundle:
    config: ScenarioConfig
    coeffs: CoefficientSet
    q_traj: object
    pinney: PinneySolution
    times: np.ndarray
    invariant: InvariantSeries
    invariant_target: float
    angles: AngleBundle
    columns: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# EFRW closed-form wave functions

class _EfrwModes:
    """Q-ordered EFRW wave-function pair in Misner time:
    psi_i = (2z)^{Q/4} F_i(z), z = e^{-2 Omega}/2, with F = (I, K) for the
    closed universe and (J, Y) for the open one."""

    def __init__(self, kappa: int, Q: float):
        self.kappa = kappa
        self.Q = Q
        self.alpha = Q / 4.0
        if kappa == 1:
            self.kinds = ("I", "K")
        elif kappa == -1:
            self.kinds = ("J", "Y")
        else:
            raise ValueError("kappa must be +-1")
        self._eval = lru_cache(maxsize=100_000)(self._eval_uncached)

    def _eval_uncached(self, om: float):
        z = 0.5 * math.exp(-2.0 * om)
        a = self.alpha
        pref = (2.0 * z) ** a
        out = []
        for kind in self.kinds:
            f = specfun.bessel(kind, a, z)
            fp = specfun.bessel_deriv(kind, a, z)
            val = pref * f
            # d/dOmega [(2z)^a F(z)] = -(2z)^a [2 a F + 2 z F']
            der = -pref * (2.0 * a * f + 2.0 * z * fp)
            out.extend((val, der))
        return tuple(out)

    def pair(self, window):
        lo = min(window[0], 0.0) - 0.5
        hi = max(window[1], 0.0) + 0.5
        ev = self._eval
        psi1 = FunctionTrajectory(lambda t: ev(t)[0], lambda t: ev(t)[1], (lo, hi))
        psi2 = FunctionTrajectory(lambda t: ev(t)[2], lambda t: ev(t)[3], (lo, hi))
        return psi1, psi2

    def second_deriv(self, traj_index: int, om: float) -> float:
        # via the defining cylinder equation of F, mapped to Misner time:
        # psi'' = -Q psi' + kappa e^{-4 Omega} psi  (exact identity)
        vals = self._eval(om)
        val, der = vals[2 * traj_index], vals[2 * traj_index + 1]
        return -self.Q * der + self.kappa * math.exp(-4.0 * om) * val


def _running_angles(rho: PinneySolution, window, Q: float, tol: float,
                    times: np.ndarray):
    """Co-integrate the total-angle and kinetic integrands once, then sample
    the running dynamical/geometrical/total advances at `times`."""
    cs = CoefficientSet(omega2=lambda t: 0.0)

    def rhs(t, y):
        r = rho.rho(t)
        rd = rho.rho_dot(t)
        return np.array([math.exp(-Q * t) / (r * r),
                         math.exp(Q * t) * rd * rd])

    traj = integrate(cs, "custom", (0.0, 0.0), window, min(tol, 1e-11), rhs=rhs)
    t0 = window[0]
    b0 = 0.5 * math.exp(Q * t0) * rho.rho_dot(t0) * rho.rho(t0)
    total = np.empty_like(times)
    geom = np.empty_like(times)
    dyn = np.empty_like(times)
    for i, t in enumerate(times):
        at, ak = traj.eval(t)[:2]
        boundary = 0.5 * math.exp(Q * t) * rho.rho_dot(t) * rho.rho(t) - b0
        total[i] = at
        geom[i] = boundary - ak
        dyn[i] = at + ak - boundary
    return dyn, geom, total


def _linear_residual(q_traj, second_deriv, coeffs: CoefficientSet,
                     times) -> float:
    """Max |q'' + D q' + (omega2/eps^2) q| with the analytic q''."""
    eps2 = coeffs.epsilon ** 2
    worst = 0.0
    for t in times:
        res = (second_deriv(t) + coeffs.total_damping(t) * q_traj.deriv(t)
               + (coeffs.omega2(t) / eps2) * q_traj.value(t))
        worst = max(worst, abs(res))
    return worst


def _efrw_bundle(config: ScenarioConfig) -> ScenarioBundle:
    kappa, Q, h = config.kappa, config.Q, config.h
    window, tol = config.window, config.tol
    modes = _EfrwModes(kappa, Q)
    psi1, psi2 = modes.pair(window)

    damp_log = (lambda t, Q=Q: Q * t) if Q != 0.0 else None
    coeffs = CoefficientSet(
        omega2=lambda t: -kappa * math.exp(-4.0 * t),
        mass_log_rate=(lambda t: Q) if Q != 0.0 else None,
        damp_ref=0.0, damp_log=damp_log)

    # superposition C1 = C2 = 1 and the pair normalized at Omega = 0
    ev = modes._eval
    q_traj = FunctionTrajectory(lambda t: ev(t)[0] + ev(t)[2],
                                lambda t: ev(t)[1] + ev(t)[3],
                                psi1.window)
    x1, x2 = initial_condition_pair(psi1, psi2, 0.0)
    alpha = q_traj.value(0.0)
    beta = q_traj.deriv(0.0)
    A = alpha * alpha
    B = beta * beta + (h * h) / (alpha * alpha)
    C = alpha * beta
    if Q == 0.0:
        rho = pinney_from_pair(x1, x2, A, B, C, h * h, coeffs=coeffs, t_ref=0.0)
    else:
        rho = pinney_from_pair_damped(x1, x2, A, B, C, h * h, coeffs, t_ref=0.0)

    times = np.linspace(window[0], window[1], config.n_samples)
    inv = ermakov_lewis_series(q_traj, rho, times, Q=Q)
    bundle_angles = angle_bundle(rho, window, Q=Q)
    dyn, geom, total = _running_angles(rho, window, Q, tol, times)

    rho_vals = np.array([rho.rho(t) for t in times])
    rho_dots = np.array([rho.rho_dot(t) for t in times])
    qs = np.array([q_traj.value(t) for t in times])
    ps = np.array([math.exp(Q * t) * q_traj.deriv(t) for t in times])
    columns = {
        "Omega": times, "I": inv.values, "theta_d": dyn, "theta_g": geom,
        "theta_t": total, "rho": rho_vals, "rho_dot": rho_dots,
        "q": qs, "p": ps,
    }
    extras = {"modes": modes, "x_pair": (x1, x2), "alpha": alpha, "beta": beta}
    if Q != 0.0:
        mus, nus = [], []
        for t, r, rd in zip(times, rho_vals, rho_dots):
            sc = squeeze_coeffs(r, rd, config.omega0, Qc=Q, Omega=t)
            mus.append(sc.mu)
            nus.append(sc.nu)
        columns["squeeze_constraint"] = np.array(
            [abs(mu) ** 2 - abs(nu) ** 2 for mu, nu in zip(mus, nus)])
        extras["squeeze"] = (np.array(mus), np.array(nus))

    bundle = ScenarioBundle(config, coeffs, q_traj, rho, times, inv,
                            0.5 * h * h, bundle_angles, columns, [], extras)
    bundle.checks = _efrw_checks(bundle)
    return bundle


def _angle_checks(bundle: ScenarioBundle) -> list:
    ab = bundle.angles
    gap = abs(ab.dynamical + ab.geometrical - ab.total)
    checks = [CheckResult("angle_sum_identity", gap < 1e-8, gap, 1e-8)]
    run_total = bundle.columns["theta_t"]
    cons = abs(run_total[-1] - ab.total)
    checks.append(CheckResult("angle_quadrature_consistency",
                              cons < 1e-8, cons, 1e-8,
                              "running co-integration vs adaptive quadrature"))
    mono = float(np.min(np.diff(run_total)))
    checks.append(CheckResult("total_angle_monotonic", mono > -1e-12, mono,
                              0.0, "positive integrand"))
    return checks


def _invariant_checks(bundle: ScenarioBundle,
                      drift_threshold: float = 1e-6) -> list:
    max_abs, max_rel = drift_report(bundle.invariant)
    checks = [CheckResult("invariant_drift", max_rel < drift_threshold,
                          max_rel, drift_threshold)]
    bias = abs(bundle.invariant.reference - bundle.invariant_target)
    checks.append(CheckResult(
        "invariant_value", bias < 1e-8 * max(1.0, bundle.invariant_target),
        bias, 1e-8, f"target {bundle.invariant_target}"))
    worst = 0.0
    lo, hi = bundle.config.window
    for t in np.linspace(lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo), 5):
        val = action_integral_oracle(bundle.pinney, bundle.invariant_target, t,
                                     eps=bundle.extras.get("ring_eps_fn",
                                                           lambda s: 1.0)(t))
        worst = max(worst, abs(val - bundle.invariant_target))
    checks.append(CheckResult("ring_integral_oracle", worst < 1e-8, worst, 1e-8))
    return checks


def _efrw_checks(bundle: ScenarioBundle) -> list:
    cfg = bundle.config
    modes: _EfrwModes = bundle.extras["modes"]
    bundle.extras["ring_eps_fn"] = lambda t: math.exp(cfg.Q * t)
    checks = _invariant_checks(bundle)
    checks.extend(_angle_checks(bundle))

    # closed-form pair satisfies its equation of motion
    res = _linear_residual(bundle.q_traj,
                           lambda t: modes.second_deriv(0, t)
                           + modes.second_deriv(1, t),
                           bundle.coeffs, bundle.times)
    checks.append(CheckResult("exact_solution_residual", res < 1e-8, res, 1e-8))

    pres = pinney_residual(bundle.pinney, n_grid=120, relative=True)
    checks.append(CheckResult("pinney_residual", pres < 1e-6, pres, 1e-6))

    # construction equivalence: direct integration from the closed-form
    # initial data reproduces the quadratic-form amplitude
    rho_cf = bundle.pinney
    t0 = cfg.window[0]
    direct = solve_direct(bundle.coeffs, rho_cf.rho(t0), rho_cf.rho_dot(t0),
                          cfg.h, cfg.window, tol=cfg.tol, damp_ref=0.0)
    rel = max(abs(direct.rho(t) - rho_cf.rho(t)) / rho_cf.rho(t)
              for t in bundle.times)
    checks.append(CheckResult("construction_equivalence", rel < 1e-6, rel,
                              1e-6, "direct integration vs closed form"))

    x1, x2 = bundle.extras["x_pair"]
    if cfg.Q == 0.0:
        drift = max(abs(wronskian(x1, x2, t) - 1.0) for t in bundle.times)
        checks.append(CheckResult("wronskian_constant", drift < 1e-9,
                                  drift, 1e-9))
    else:
        drift = max(abs(wronskian(x1, x2, t) * math.exp(cfg.Q * t) - 1.0)
                    for t in bundle.times)
        checks.append(CheckResult("wronskian_damped_law", drift < 1e-8,
                                  drift, 1e-8, "W(t) exp(int P) constant"))
        sq = bundle.columns["squeeze_constraint"]
        dev = float(np.max(np.abs(sq - 1.0)))
        checks.append(CheckResult("squeeze_constraint", dev < 1e-10, dev,
                                  1e-10, "|mu|^2 - |nu|^2 = 1"))
    return checks


def efrw_q0(kappa: int = 1, h: float = 1.0, window=(-1.0, 2.0),
            tol: float = 1e-10, n_samples: int = 301) -> ScenarioBundle:
    """Empty FRW universe, zero ordering parameter: an (inverted for
    kappa=+1) parametric oscillator in Misner time with cylinder-function
    wave modes; the matched invariant is h^2/2."""
    cfg = ScenarioConfig("efrw_q0", kappa=kappa, h=h, window=window, tol=tol,
                         n_samples=n_samples)
    cfg.validate()
    return _efrw_bundle(cfg)


def efrw_q(kappa: int, Q: float, h: float = 1.0, window=(-1.0, 2.0),
           tol: float = 1e-10, n_samples: int = 301,
           omega0: float = 1.0) -> ScenarioBundle:
    """EFRW with nonzero factor ordering: damping Q dPsi/dOmega and mass
    e^{Q Omega}; same invariant value h^2/2 when matched."""
    cfg = ScenarioConfig("efrw_q", kappa=kappa, Q=Q, h=h, window=window,
                         tol=tol, n_samples=n_samples, omega0=omega0)
    cfg.validate()
    return _efrw_bundle(cfg)


# ---------------------------------------------------------------------------
# Helmholtz waveguide, power-law profile

def _power_law_modes(m: float, b: float, lam: float, window):
    """Exact oscillatory pair of q'' + lam b^2 t^m q = 0:
    sqrt(t) J_beta(y), sqrt(t) Y_beta(y), beta = 1/(m+2),
    y = 2 b sqrt(lam) t^{(m+2)/2} / (m+2)."""
    beta = 1.0 / (m + 2.0)
    sl = math.sqrt(lam)
    c = 2.0 * b * sl / (m + 2.0)

    @lru_cache(maxsize=100_000)
    def ev(t: float):
        y = c * t ** (0.5 * (m + 2.0))
        ydot = b * sl * t ** (0.5 * m)
        st = math.sqrt(t)
        out = []
        for kind in ("J", "Y"):
            f = specfun.bessel(kind, beta, y)
            fp = specfun.bessel_deriv(kind, beta, y)
            out.extend((st * f, 0.5 * f / st + st * fp * ydot))
        return tuple(out)

    lo, hi = window
    u = FunctionTrajectory(lambda t: ev(t)[0], lambda t: ev(t)[1], (lo, hi))
    v = FunctionTrajectory(lambda t: ev(t)[2], lambda t: ev(t)[3], (lo, hi))
    return u, v, ev


def _rho0_solution(m: float, b: float, window) -> PinneySolution:
    # leading adiabatic amplitude phi^{-1/4} = b^{-1/2} t^{-m/4}
    def rho(t):
        return b ** -0.5 * t ** (-0.25 * m)

    def rho_dot(t):
        return -0.25 * m * b ** -0.5 * t ** (-0.25 * m - 1.0)

    def rho_ddot(t):
        return 0.25 * m * (0.25 * m + 1.0) * b ** -0.5 * t ** (-0.25 * m - 2.0)

    return PinneySolution(rho, rho_dot, 1.0, "adiabatic_rho0", window,
                          coeffs=None, rho_ddot=rho_ddot)


def geometric_angle_power_law(m: float, b: float, t0: float, t1: float) -> float:
    """Closed-form geometric angle of the power-law profile with the leading
    adiabatic amplitude: -(m/(4b(m+2))) [t^{-(m/2+1)}]_{t0}^{t1}."""
    e = -(0.5 * m + 1.0)
    return -(m / (4.0 * b * (m + 2.0))) * (t1 ** e - t0 ** e)


def helmholtz_power(m: float = 2.0, b: float = 1.0, lam: float = 100.0,
                    window=(1.0, 4.0), tol: float = 1e-10,
                    n_samples: int = 301) -> ScenarioBundle:
    """Waveguide with power-law index profile: omega^2 = lam b^2 t^m with
    adiabatic parameter 1/sqrt(lam)."""
    cfg = ScenarioConfig("helmholtz_power", m=m, b=b, lam=lam, window=window,
                         tol=tol, n_samples=n_samples)
    cfg.validate()
    eps = lam ** -0.5
    coeffs = CoefficientSet(omega2=lambda t: (b * t ** (0.5 * m)) ** 2,
                            epsilon=eps)
    t0, t1 = window
    rho0 = _rho0_solution(m, b, window)
    rho = solve_direct(coeffs, rho0.rho(t0), rho0.rho_dot(t0), 1.0, window,
                       tol=tol)
    u, v, ev = _power_law_modes(m, b, lam, window)
    q_traj = FunctionTrajectory(lambda t: ev(t)[0] + ev(t)[2],
                                lambda t: ev(t)[1] + ev(t)[3], window)
    times = np.linspace(t0, t1, cfg.n_samples)
    inv = ermakov_lewis_series(q_traj, rho, times, eps=eps,
                               momentum=lambda t: eps * q_traj.deriv(t))
    bundle_angles = angle_bundle(rho, window, Q=0.0)
    dyn, geom, total = _running_angles(rho, window, 0.0, tol, times)
    rho_vals = np.array([rho.rho(t) for t in times])
    rho_dots = np.array([rho.rho_dot(t) for t in times])
    columns = {
        "t": times, "I": inv.values, "theta_d": dyn, "theta_g": geom,
        "theta_t": total, "rho": rho_vals, "rho_dot": rho_dots,
        "q": np.array([q_traj.value(t) for t in times]),
        "p": np.array([eps * q_traj.deriv(t) for t in times]),
        "rho0": np.array([rho0.rho(t) for t in times]),
    }
    extras = {"rho0": rho0, "eps": eps, "modes_eval": ev,
              "ring_eps_fn": lambda t: eps}
    bundle = ScenarioBundle(cfg, coeffs, q_traj, rho, times, inv,
                            float(inv.values[0]), bundle_angles, columns, [],
                            extras)
    bundle.invariant_target = float(inv.values[0])
    bundle.checks = _helmholtz_checks(bundle)
    return bundle


def _helmholtz_checks(bundle: ScenarioBundle) -> list:
    cfg = bundle.config
    checks = _invariant_checks(bundle)
    checks.extend(_angle_checks(bundle))

    rho0: PinneySolution = bundle.extras["rho0"]
    ab0 = angle_bundle(rho0, cfg.window)
    closed = geometric_angle_power_law(cfg.m, cfg.b, *cfg.window)
    gap = abs(ab0.geometrical - closed)
    checks.append(CheckResult("geometric_angle_closed_form", gap < 1e-8,
                              gap, 1e-8,
                              "leading-order quadrature vs closed form"))

    # exact pair residual, second derivative from the defining equation
    lamphi = lambda t: cfg.lam * (cfg.b * t ** (0.5 * cfg.m)) ** 2
    ev = bundle.extras["modes_eval"]
    res = _linear_residual(
        bundle.q_traj,
        lambda t: -lamphi(t) * (ev(t)[0] + ev(t)[2]),
        CoefficientSet(omega2=lamphi), bundle.times)
    del res  # identity by construction; use fd residual instead
    res_fd = _fd_linear_residual(bundle.q_traj, lamphi, bundle.times,
                                 rel_scale=True)
    checks.append(CheckResult("exact_solution_residual", res_fd < 1e-5,
                              res_fd, 1e-5, "finite-difference route"))

    pres = pinney_residual(bundle.pinney, n_grid=120)
    checks.append(CheckResult("pinney_residual", pres < 1e-6, pres, 1e-6))

    err1 = _adiabatic_gap(cfg.m, cfg.b, cfg.lam, cfg.window, cfg.tol)
    err4 = _adiabatic_gap(cfg.m, cfg.b, 4.0 * cfg.lam, cfg.window, cfg.tol)
    ratio = err1 / err4 if err4 > 0 else math.inf
    checks.append(CheckResult("adiabatic_error_scaling",
                              3.2 <= ratio <= 4.8, ratio, 4.0,
                              "|rho - rho0| ratio for lambda vs 4 lambda"))
    return checks


def _fd_linear_residual(q_traj, omega2, times, rel_scale=False) -> float:
    lo = times[0]
    hi = times[-1]
    wmax = math.sqrt(max(abs(omega2(t)) for t in times))
    hstep = min(2e-3 * (hi - lo), 0.05 / max(wmax, 1.0))
    worst = 0.0
    for t in times:
        if t - 2 * hstep < lo or t + 2 * hstep > hi:
            continue
        vals = [q_traj.value(t + k * hstep) for k in (-2, -1, 0, 1, 2)]
        qdd = (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3]
               - vals[4]) / (12 * hstep * hstep)
        res = qdd + omega2(t) * vals[2]
        if rel_scale:
            res /= max(abs(omega2(t) * vals[2]), 1.0)
        worst = max(worst, abs(res))
    return worst


def _adiabatic_gap(m, b, lam, window, tol) -> float:
    eps = lam ** -0.5
    coeffs = CoefficientSet(omega2=lambda t: (b * t ** (0.5 * m)) ** 2,
                            epsilon=eps)
    rho0 = _rho0_solution(m, b, window)
    rho = solve_direct(coeffs, rho0.rho(window[0]), rho0.rho_dot(window[0]),
                       1.0, window, tol=min(tol, 1e-11))
    ts = np.linspace(window[0], window[1], 241)
    return max(abs(rho.rho(t) - rho0.rho(t)) / rho0.rho(t) for t in ts)


# ---------------------------------------------------------------------------
# Lewis's closed-form amplitudes

def lewis_rho_m(m: float, b: float, lam: float, t: float) -> float:
    """Hankel-product amplitude for the power-law profile,

    rho_m = [pi sqrt(lam)/(m+2)]^{1/2} sqrt(t) [J_beta(y)^2 + Y_beta(y)^2]^{1/2},
    beta = 1/(m+2), y = 2 b sqrt(lam) t^{(m+2)/2}/(m+2)  (positive branches).
    """
    if m == -2.0:
        raise ValueError("m = -2 excluded")
    if t <= 0.0:
        raise ValueError("t must be positive")
    beta = 1.0 / (m + 2.0)
    y = 2.0 * b * math.sqrt(lam) / (m + 2.0) * t ** (0.5 * (m + 2.0))
    jj = specfun.bessel("J", abs(beta), y)
    yy = specfun.bessel("Y", abs(beta), y)
    if beta < 0.0:
        # J_{-b} = cos(pi b) J_b - sin(pi b) Y_b and likewise for Y
        c, s = math.cos(math.pi * beta), math.sin(math.pi * beta)
        jj, yy = c * jj - s * yy, s * jj + c * yy
    return math.sqrt(math.pi * math.sqrt(lam) / abs(m + 2.0)) \
        * math.sqrt(t) * math.sqrt(jj * jj + yy * yy)


def _lewis_n_sum_coeffs(n: int):
    if n >= 1:
        ks = range(0, n + 1)
        return [(k, math.factorial(n + k)
                 // (math.factorial(k) * math.factorial(n - k))) for k in ks]
    mm = -n
    ks = range(0, mm)
    return [(k, math.factorial(mm + k - 1)
             // (math.factorial(k) * math.factorial(mm - k - 1))) for k in ks]


def _lewis_n_eval(n: int, b: float, lam: float, t: float):
    """Returns (rho, drho/dt) of the polynomial amplitude family."""
    tn = 2 * n + 1
    eps = lam ** -0.5
    base = eps / (2j * b * tn)
    S = 0j
    dS = 0j
    for k, c in _lewis_n_sum_coeffs(n):
        term = ((-1) ** k) * c * base ** k * t ** (-k / tn)
        S += term
        dS += term * (-k / tn) / t
    mag = abs(S)
    dmag = (S.conjugate() * dS).real / mag
    powr = n / tn
    pref = b ** -0.5
    rho = pref * t ** powr * mag
    drho = pref * (powr * t ** (powr - 1.0) * mag + t ** powr * dmag)
    return rho, drho


def lewis_rho_n(n_index: int, b: float, lam: float, t: float) -> float:
    """Polynomial amplitude for m = -4n/(2n+1): a finite sum in the squared
    adiabatic parameter 1/lam, exact for every lam."""
    if n_index == 0:
        raise ValueError("n must be a nonzero integer")
    if t <= 0.0:
        raise ValueError("t must be positive")
    return _lewis_n_eval(n_index, b, lam, t)[0]


def _lewis_solution(rho_fn, drho_fn, m, b, lam, window, provenance):
    eps = lam ** -0.5
    coeffs = CoefficientSet(omega2=lambda t: (b * t ** (0.5 * m)) ** 2,
                            epsilon=eps)
    return PinneySolution(rho_fn, drho_fn, 1.0, provenance, window,
                          coeffs=coeffs)


def lewis_m_solution(m: float, b: float, lam: float, window) -> PinneySolution:
    """The Hankel-product amplitude as a quadratic form over the exact
    oscillatory pair: rho_m^2 = A (u^2 + v^2) with A = pi sqrt(lam)/(m+2),
    giving analytic derivatives and an exact governing equation."""
    from .pinney import _quadratic_form_solution

    eps = lam ** -0.5
    coeffs = CoefficientSet(omega2=lambda t: (b * t ** (0.5 * m)) ** 2,
                            epsilon=eps)
    u, v, _ = _power_law_modes(m, b, lam, window)
    A = math.pi * math.sqrt(lam) / (m + 2.0)
    sol = _quadratic_form_solution(u, v, A, A, 0.0, 1.0, "lewis_rho_m", coeffs)
    return sol


def lewis_n_solution(n_index: int, b: float, lam: float, window) -> PinneySolution:
    m = -4.0 * n_index / (2 * n_index + 1)
    return _lewis_solution(lambda t: _lewis_n_eval(n_index, b, lam, t)[0],
                           lambda t: _lewis_n_eval(n_index, b, lam, t)[1],
                           m, b, lam, window, "lewis_rho_n")


def _lewis_bundle(cfg: ScenarioConfig, sol: PinneySolution,
                  m: float) -> ScenarioBundle:
    t0, t1 = cfg.window
    eps = cfg.lam ** -0.5
    u, v, ev = _power_law_modes(m, cfg.b, cfg.lam, cfg.window)
    q_traj = FunctionTrajectory(lambda t: ev(t)[0] + ev(t)[2],
                                lambda t: ev(t)[1] + ev(t)[3], cfg.window)
    times = np.linspace(t0, t1, cfg.n_samples)
    inv = ermakov_lewis_series(q_traj, sol, times, eps=eps,
                               momentum=lambda t: eps * q_traj.deriv(t))
    ab = angle_bundle(sol, cfg.window)
    dyn, geom, total = _running_angles(sol, cfg.window, 0.0, cfg.tol, times)
    columns = {
        "t": times, "I": inv.values, "theta_d": dyn, "theta_g": geom,
        "theta_t": total,
        "rho": np.array([sol.rho(t) for t in times]),
        "rho_dot": np.array([sol.rho_dot(t) for t in times]),
        "q": np.array([q_traj.value(t) for t in times]),
        "p": np.array([eps * q_traj.deriv(t) for t in times]),
    }
    extras = {"eps": eps, "ring_eps_fn": lambda t: eps}
    bundle = ScenarioBundle(cfg, sol.coeffs, q_traj, sol, times, inv,
                            float(inv.values[0]), ab, columns, [], extras)
    checks = _invariant_checks(bundle)
    checks.extend(_angle_checks(bundle))
    pres = pinney_residual(sol, n_grid=120, use_fd=True)
    threshold = 1e-5 if cfg.name == "lewis_m" else 1e-6
    checks.append(CheckResult("pinney_residual", pres < threshold, pres,
                              threshold, "closed-form amplitude"))
    # both closed forms tend to the leading amplitude phi^{-1/4} at large
    # argument / large lam
    rho0 = _rho0_solution(m, cfg.b, cfg.window)
    rel = max(abs(sol.rho(t) - rho0.rho(t)) / rho0.rho(t) for t in times)
    checks.append(CheckResult("adiabatic_leading_term", rel < 0.5, rel, 0.5,
                              "amplitude tracks the adiabatic leading term"))
    bundle.checks = checks
    return bundle


def lewis_m_scenario(m: float = 2.0, b: float = 1.0, lam: float = 100.0,
                     window=(1.0, 4.0), tol: float = 1e-10,
                     n_samples: int = 301) -> ScenarioBundle:
    cfg = ScenarioConfig("lewis_m", m=m, b=b, lam=lam, window=window, tol=tol,
                         n_samples=n_samples)
    cfg.validate()
    sol = lewis_m_solution(m, b, lam, window)
    return _lewis_bundle(cfg, sol, m)


def lewis_n_scenario(n_index: int = 1, b: float = 1.0, lam: float = 100.0,
                     window=(1.0, 4.0), tol: float = 1e-10,
                     n_samples: int = 301) -> ScenarioBundle:
    cfg = ScenarioConfig("lewis_n", n_index=n_index, b=b, lam=lam,
                         window=window, tol=tol, n_samples=n_samples)
    cfg.validate()
    sol = lewis_n_solution(n_index, b, lam, window)
    m = -4.0 * n_index / (2 * n_index + 1)
    return _lewis_bundle(cfg, sol, m)


# ---------------------------------------------------------------------------
# Generalized (XYZ) oscillator sweep

def _default_xyz_base():
    # constant X, Z with sinusoidal coupling: the adiabatic geometric-phase
    # loop integral is an exact differential (zero), so the exact phase must
    # converge to it as the cycling slows
    return dict(
        X=lambda tau: 1.0,
        Y=lambda tau: 0.1 * math.sin(tau),
        Z=lambda tau: 1.0,
        dY=lambda tau: 0.1 * math.cos(tau),
        dZ=lambda tau: 0.0,
        d2Z=lambda tau: 0.0,
        period=2.0 * math.pi,
    )


def _loop_xyz_base():
    # varying Z: the loop encloses area, giving a nonzero Hannay angle
    return dict(
        X=lambda tau: 1.0,
        Y=lambda tau: 0.2 * math.sin(tau),
        Z=lambda tau: 1.0 + 0.3 * math.cos(tau),
        dY=lambda tau: 0.2 * math.cos(tau),
        dZ=lambda tau: -0.3 * math.sin(tau),
        d2Z=lambda tau: -0.3 * math.cos(tau),
        period=2.0 * math.pi,
    )


def _scaled_xyz(base: dict, eps: float) -> XYZParams:
    return XYZParams(
        X=lambda t: base["X"](eps * t),
        Y=lambda t: base["Y"](eps * t),
        Z=lambda t: base["Z"](eps * t),
        period=base["period"] / eps,
        dY=lambda t: eps * base["dY"](eps * t),
        dZ=lambda t: eps * base["dZ"](eps * t),
        d2Z=lambda t: eps * eps * base["d2Z"](eps * t),
    )


def xyz_scenario(eps_sweep=(0.2, 0.1, 0.05), n: int = 0,
                 base: Optional[dict] = None, tol: float = 1e-11
                 ) -> ScenarioBundle:
    """Slowly cycled quadratic Hamiltonian: compares the exact geometric
    phase against its adiabatic limit across a slowness sweep and checks
    the Hannay angle against the n-derivative of the phase."""
    cfg = ScenarioConfig("xyz", tol=tol, window=(0.0, 1.0))
    base = dict(base or _default_xyz_base())
    rows = []
    last_bundle_data = None
    for eps in eps_sweep:
        params = _scaled_xyz(base, eps)
        w2 = lambda t, p=params: omega2_from_xyz(p, t)
        coeffs = CoefficientSet(omega2=w2)
        window = (0.0, params.period)
        r0 = adiabatic_rho0(w2, 0.0)
        hstep = 1e-6 * params.period
        r0dot = (adiabatic_rho0(w2, hstep) - adiabatic_rho0(w2, -hstep)) / (2 * hstep)
        rho = solve_direct(coeffs, r0, r0dot, 1.0, window, tol=tol)
        bp = berry_phase_xyz(params, n, rho=rho)
        rows.append((eps, bp.adiabatic, bp.exact, abs(bp.exact - bp.adiabatic)))
        last_bundle_data = (params, coeffs, rho, window)

    params, coeffs, rho, window = last_bundle_data
    times = np.linspace(window[0], window[1], cfg.n_samples)
    tr = integrate(coeffs, "linear", (1.0, 0.0), window, tol)
    inv = ermakov_lewis_series(tr, rho, times)
    ab = angle_bundle(rho, window)
    dyn, geom, total = _running_angles(rho, window, 0.0, tol, times)
    columns = {
        "t": times, "I": inv.values, "theta_d": dyn, "theta_g": geom,
        "theta_t": total,
        "rho": np.array([rho.rho(t) for t in times]),
        "rho_dot": np.array([rho.rho_dot(t) for t in times]),
        "q": np.array([tr.value(t) for t in times]),
        "p": np.array([tr.deriv(t) for t in times]),
    }
    # Hannay consistency on a loop that encloses parameter-space area
    loop = _scaled_xyz(_loop_xyz_base(), eps_sweep[0])
    gamma_n = berry_phase_xyz(loop, n).adiabatic
    gamma_n1 = berry_phase_xyz(loop, n + 1).adiabatic
    hann = hannay_xyz(loop)
    extras = {"sweep": rows, "hannay": hann,
              "hannay_fd": -(gamma_n1 - gamma_n)}
    bundle = ScenarioBundle(cfg, coeffs, tr, rho, times, inv,
                            float(inv.values[0]), ab, columns, [], extras)
    checks = _invariant_checks(bundle)
    checks.extend(_angle_checks(bundle))
    ratios = [rows[i][3] / rows[i + 1][3] for i in range(len(rows) - 1)
              if rows[i + 1][3] > 0]
    worst_ratio = min(ratios) if ratios else math.inf
    checks.append(CheckResult("berry_adiabatic_convergence",
                              worst_ratio >= 1.8, worst_ratio, 1.8,
                              "error contraction per slowness halving"))
    gap = abs(hann - extras["hannay_fd"])
    checks.append(CheckResult("hannay_matches_phase_derivative", gap < 1e-10,
                              gap, 1e-10))
    bundle.checks = checks
    return bundle


# ---------------------------------------------------------------------------
# Milne reconstruction

def milne_reconstruct(rho: PinneySolution, gamma: float,
                      mu_mass: float = 1.0, tol: float = 1e-11):
    """Wave solution sqrt(2 mu / pi) beta(x) sin(phi(x) + gamma) with
    phi' = 1/beta^2; solves the wave equation the amplitude beta belongs to."""
    cs = CoefficientSet(omega2=lambda t: 0.0)

    def rhs(t, y):
        r = rho.rho(t)
        return np.array([1.0 / (r * r)])

    phi = integrate(cs, "custom", (0.0,), rho.window, tol, rhs=rhs)
    amp = math.sqrt(2.0 * mu_mass / math.pi)

    def val(t):
        return amp * rho.rho(t) * math.sin(phi.value(t) + gamma)

    def der(t):
        p = phi.value(t) + gamma
        r = rho.rho(t)
        return amp * (rho.rho_dot(t) * math.sin(p) + math.cos(p) / r)

    return FunctionTrajectory(val, der, rho.window)


# ---------------------------------------------------------------------------
# Registry for the CLI

def build_scenario(cfg: ScenarioConfig) -> ScenarioBundle:
    cfg.validate()
    if cfg.name == "efrw_q0":
        return efrw_q0(cfg.kappa, cfg.h, cfg.window, cfg.tol, cfg.n_samples)
    if cfg.name == "efrw_q":
        if cfg.Q == 0.0:
            return efrw_q0(cfg.kappa, cfg.h, cfg.window, cfg.tol,
                           cfg.n_samples)
        return efrw_q(cfg.kappa, cfg.Q, cfg.h, cfg.window, cfg.tol,
                      cfg.n_samples, cfg.omega0)
    if cfg.name == "helmholtz_power":
        return helmholtz_power(cfg.m, cfg.b, cfg.lam, cfg.window, cfg.tol,
                               cfg.n_samples)
    if cfg.name == "lewis_m":
        return lewis_m_scenario(cfg.m, cfg.b, cfg.lam, cfg.window, cfg.tol,
                                cfg.n_samples)
    if cfg.name == "lewis_n":
        return lewis_n_scenario(cfg.n_index, cfg.b, cfg.lam, cfg.window,
                                cfg.tol, cfg.n_samples)
    if cfg.name == "xyz":
        return xyz_scenario(tol=min(cfg.tol, 1e-11))
    raise ValueError(f"unknown scenario {cfg.name!r}")


def scenario_description(name: str) -> str:
    return _FIGURES[name]
