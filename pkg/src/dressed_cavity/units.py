"""Physical constants, scenario inputs and derived dimensionless parameters.

All frequencies are angular (rad/s) and everything is kept in SI units.
Dimensionless combinations such as the thermal exponent are formed
explicitly instead of setting hbar = k_B = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy import constants as _codata

from .errors import InvalidScenarioError

__all__ = [
    "PhysicalConstants",
    "CODATA",
    "CavityScenario",
    "build_scenario",
    "thermal_exponent",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """SI constants used throughout. Defaults are the CODATA values shipped
    with scipy; pass explicit values to override."""

    c: float = _codata.c
    hbar: float = _codata.hbar
    k_B: float = _codata.k
    alpha: float = _codata.fine_structure

    def __post_init__(self):
        for name in ("c", "hbar", "k_B", "alpha"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise InvalidScenarioError(f"constant {name} must be positive, got {value!r}")


CODATA = PhysicalConstants()


@dataclass(frozen=True)
class CavityScenario:
    """An atom of renormalized frequency ``omega_bar`` inside a spherical
    cavity of radius ``R`` at temperature ``T``.

    Derived fields (``delta_omega``, ``delta``, ``eta``) are filled in at
    construction and are never passed by the caller.
    """

    omega_bar: float
    R: float
    T: float
    g: float
    n0_initial: float = 1.0
    constants: PhysicalConstants = CODATA

    delta_omega: float = field(init=False)
    delta: float = field(init=False)
    eta: float = field(init=False)

    def __post_init__(self):
        for name in ("omega_bar", "R", "g"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidScenarioError(f"{name} must be positive and finite, got {value!r}")
        if not (math.isfinite(self.T) and self.T >= 0):
            raise InvalidScenarioError(f"T must be non-negative and finite, got {self.T!r}")
        if not (math.isfinite(self.n0_initial) and self.n0_initial >= 0):
            raise InvalidScenarioError(f"n0_initial must be non-negative, got {self.n0_initial!r}")

        c = self.constants.c
        delta_omega = math.pi * c / self.R
        object.__setattr__(self, "delta_omega", delta_omega)
        object.__setattr__(self, "delta", self.g * self.R / (math.pi * c))
        object.__setattr__(self, "eta", math.sqrt(2.0 * self.g * delta_omega))

    @property
    def omega_bar_over_spacing(self) -> float:
        """omega_bar in units of the mode spacing, i.e. omega_bar R / (pi c)."""
        return self.omega_bar / self.delta_omega

    def with_changes(self, **changes) -> CavityScenario:
        """Copy with some primary fields replaced; derived fields are recomputed."""
        kwargs = dict(
            omega_bar=self.omega_bar,
            R=self.R,
            T=self.T,
            g=self.g,
            n0_initial=self.n0_initial,
            constants=self.constants,
        )
        kwargs.update(changes)
        return CavityScenario(**kwargs)


def build_scenario(
    omega_bar: float,
    R: float,
    T: float = 0.0,
    g: float | None = None,
    n0_initial: float = 1.0,
    constants: PhysicalConstants = CODATA,
) -> CavityScenario:
    """Build a scenario; ``g`` defaults to the weak-coupling value
    ``omega_bar * alpha``.

    >>> s = build_scenario(4.0e14, 1e-6, 300.0)
    >>> round(s.delta, 5)
    0.0031
    """
    if g is None:
        g = omega_bar * constants.alpha
    return CavityScenario(
        omega_bar=float(omega_bar),
        R=float(R),
        T=float(T),
        g=float(g),
        n0_initial=float(n0_initial),
        constants=constants,
    )


def thermal_exponent(omega: float, T: float, constants: PhysicalConstants = CODATA) -> float:
    """hbar * omega / (k_B * T); ``math.inf`` at T = 0."""
    if not omega > 0:
        raise InvalidScenarioError(f"omega must be positive, got {omega!r}")
    if not T >= 0:
        raise InvalidScenarioError(f"T must be non-negative, got {T!r}")
    if T == 0:
        return math.inf
    return constants.hbar * omega / (constants.k_B * T)
