"""Exact invariants for time-dependent oscillators.

Numerical toolkit around the Ermakov-Lewis invariant: self-contained
special functions, an adaptive embedded Runge-Kutta kernel with dense
output, every classical construction of Pinney-equation solutions,
dynamical/geometrical/total angle splits and quantum phases, and scenario
packs for empty-FRW quantum cosmology and waveguide optics.
"""

from . import angles, invariants, ode, pinney, quantum, scenarios, specfun

__all__ = ["angles", "invariants", "ode", "pinney", "quantum", "scenarios",
           "specfun"]

__version__ = "0.1.0"
