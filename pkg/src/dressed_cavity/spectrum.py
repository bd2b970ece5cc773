"""Normal-mode spectrum of the atom coupled to the cavity field.

The eigenfrequencies solve

    cot(pi x) = x / (pi delta) + (1 - w**2 / delta) / (pi x),

with ``x = Omega / delta_omega`` and ``w = omega_bar / delta_omega``. One root
``x_0`` lies below the first asymptote; every other root sits just above a
field-mode frequency, ``x_k = k + eps_k`` with ``0 < eps_k < 1``.

Everything is solved in these dimensionless variables and converted back
to rad/s on output.  The shift ``eps_k`` is solved for directly rather than
as ``Omega_k - omega_k`` so small shifts keep full relative precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import (
    EmptySpectrumError,
    PoleError,
    RegimeViolationError,
    ResonanceError,
)
from .rootfind import bisect
from .units import CavityScenario

__all__ = [
    "ModeSpectrum",
    "RegimeReport",
    "field_mode_frequencies",
    "validate_regime",
    "solve_spectrum",
    "solve_spectrum_exact",
    "epsilon_k_linearized",
    "solve_epsilon_exact",
    "omega0_small_cavity",
    "spectrum_residuals",
    "series_identity_check",
    "series_closed_form",
    "require_regime",
    "METHODS",
]

METHODS = ("exact", "linearized", "hybrid")

DEFAULT_K = 10_000
BRACKET_MARGIN = 1e-9
RTOL = 1e-12
MAX_ITER = 200
RESONANCE_THRESHOLD = 0.1
# lower end of the Omega_0 bracket, as a fraction of omega_bar
OMEGA0_LOWER_FRACTION = 1e-6


@dataclass(frozen=True)
class RegimeReport:
    delta: float
    delta_threshold: float
    condition_c1: bool
    r_upper_bound: float
    condition_c2: bool
    margin: float
    below_first_mode: bool
    small_cavity_ok: bool

    def lines(self) -> list[str]:
        yn = {True: "yes", False: "no"}
        return [
            f"delta               = {self.delta:.6e}",
            f"delta_threshold     = {self.delta_threshold:.6e}",
            f"condition_c1        = {yn[self.condition_c1]}  (delta * omega_bar^2 / g^2 > 1)",
            f"r_upper_bound_m     = {self.r_upper_bound:.6e}",
            f"condition_c2        = {yn[self.condition_c2]}  (R * {self.margin:g} <= r_upper_bound; advisory)",
            f"below_first_mode    = {yn[self.below_first_mode]}  (omega_bar < pi c / R)",
            f"small_cavity_ok     = {yn[self.small_cavity_ok]}",
        ]


@dataclass(frozen=True)
class ModeSpectrum:
    """Lowest eigenfrequency plus the tower ``Omega_k = delta_omega (k + eps_k)``.

    Arrays are read-only and indexed by ``k - 1``.
    """

    omega0_mode: float
    k: np.ndarray
    omega_k: np.ndarray
    Omega_k: np.ndarray
    epsilon_k: np.ndarray
    delta_omega: float
    method: str

    def __post_init__(self):
        for name in ("k", "omega_k", "Omega_k", "epsilon_k"):
            getattr(self, name).setflags(write=False)

    @property
    def K(self) -> int:
        return int(self.k.size)

    @property
    def x0(self) -> float:
        """Omega_0 in units of the mode spacing."""
        return self.omega0_mode / self.delta_omega

    def positions(self, n: int | None = None) -> np.ndarray:
        """Dimensionless ``[x_0, 1 + eps_1, ..., n + eps_n]`` (``n`` defaults to K)."""
        n = self.K if n is None else n
        if n > self.K:
            raise EmptySpectrumError(f"requested {n} modes, spectrum holds {self.K}")
        return np.concatenate(([self.x0], self.k[:n] + self.epsilon_k[:n]))

    def frequencies(self, n: int | None = None) -> np.ndarray:
        """``[Omega_0, Omega_1, ..., Omega_n]`` in rad/s."""
        n = self.K if n is None else n
        return np.concatenate(([self.omega0_mode], self.Omega_k[:n]))

    def is_interlaced(self) -> bool:
        return bool(
            0 < self.x0 < 1
            and np.all(self.epsilon_k > 0)
            and np.all(self.epsilon_k < 1)
        )


def field_mode_frequencies(scenario: CavityScenario, K: int) -> np.ndarray:
    """Bare cavity mode frequencies ``k pi c / R`` for ``k = 1..K``."""
    if K < 1:
        raise EmptySpectrumError(f"need at least one field mode, got K={K}")
    return np.arange(1, K + 1) * scenario.delta_omega


def validate_regime(scenario: CavityScenario, margin: float = 10.0) -> RegimeReport:
    """Evaluate the small-cavity conditions.

    ``condition_c2`` (``Omega_0 R / c << 1`` expressed as a bound on R) is
    reported but does not gate ``small_cavity_ok``: it requires
    ``R < (pi/2) c g / omega_bar**2`` while ``condition_c1`` requires
    ``R > pi c g / omega_bar**2``, so the two can never hold together.
    The gate is ``condition_c1`` plus ``omega_bar`` lying below the first
    field mode, which is what the mode labelling actually needs.
    """
    s = scenario
    c = s.constants.c
    delta_threshold = (s.g / s.omega_bar) ** 2
    c1 = s.delta * s.omega_bar**2 / s.g**2 > 1.0
    lam = 0.5 * math.pi * (s.g / s.omega_bar) ** 2
    r_upper = (c / s.g) * lam
    c2 = s.R * margin <= r_upper
    below = s.omega_bar < s.delta_omega
    return RegimeReport(
        delta=s.delta,
        delta_threshold=delta_threshold,
        condition_c1=bool(c1),
        r_upper_bound=r_upper,
        condition_c2=bool(c2),
        margin=margin,
        below_first_mode=bool(below),
        small_cavity_ok=bool(c1 and below),
    )


def require_regime(scenario: CavityScenario) -> RegimeReport:
    report = validate_regime(scenario)
    if not report.small_cavity_ok:
        why = []
        if not report.condition_c1:
            why.append(f"delta={report.delta:.3e} <= threshold {report.delta_threshold:.3e}")
        if not report.below_first_mode:
            why.append("omega_bar is not below the first cavity mode")
        raise RegimeViolationError("small-cavity regime violated: " + "; ".join(why))
    return report


# -- spectral equation -------------------------------------------------------

def _lhs_rhs(x, delta: float, w: float):
    x = np.asarray(x, dtype=float)
    lhs = 1.0 / np.tan(np.pi * x)
    rhs = x / (np.pi * delta) + (1.0 - w * w / delta) / (np.pi * x)
    return lhs, rhs


def _lhs_rhs_eps(eps, k, delta: float, w: float):
    # same equation with x = k + eps; cot(pi (k + eps)) = cot(pi eps)
    eps = np.asarray(eps, dtype=float)
    x = k + eps
    lhs = 1.0 / np.tan(np.pi * eps)
    rhs = x / (np.pi * delta) + (1.0 - w * w / delta) / (np.pi * x)
    return lhs, rhs


def _relative_residual(lhs, rhs):
    scale = np.maximum(np.abs(lhs), np.abs(rhs))
    return np.abs(lhs - rhs) / np.where(scale > 0, scale, 1.0)


def spectrum_residuals(scenario: CavityScenario, spectrum: ModeSpectrum) -> np.ndarray:
    """Relative residual of the spectral equation at ``[Omega_0, Omega_1, ...]``."""
    d, w = scenario.delta, scenario.omega_bar_over_spacing
    r0 = _relative_residual(*_lhs_rhs(spectrum.x0, d, w))
    rk = _relative_residual(*_lhs_rhs_eps(spectrum.epsilon_k, spectrum.k, d, w))
    return np.concatenate((np.atleast_1d(r0), rk))


def _solve_x0(scenario: CavityScenario, margin: float, rtol: float, max_iter: int) -> float:
    d, w = scenario.delta, scenario.omega_bar_over_spacing

    def h(x):
        lhs, rhs = _lhs_rhs(x, d, w)
        return lhs - rhs

    lo = OMEGA0_LOWER_FRACTION * w
    return float(bisect(h, [lo], [1.0 - margin], rtol=rtol, max_iter=max_iter)[0])


def _solve_eps(scenario: CavityScenario, ks, margin: float, rtol: float, max_iter: int) -> np.ndarray:
    d, w = scenario.delta, scenario.omega_bar_over_spacing
    ks = np.asarray(ks, dtype=float)

    def h(eps, kk):
        lhs, rhs = _lhs_rhs_eps(eps, kk, d, w)
        return lhs - rhs

    lo = np.full(ks.shape, margin)
    hi = np.full(ks.shape, 1.0 - margin)
    return bisect(h, lo, hi, params=ks, rtol=rtol, max_iter=max_iter)


def solve_epsilon_exact(
    scenario: CavityScenario,
    k: int,
    margin: float = BRACKET_MARGIN,
    rtol: float = RTOL,
    max_iter: int = MAX_ITER,
) -> float:
    """Shift ``eps_k`` of the k-th mode by bisection on ``(margin, 1 - margin)``."""
    if k < 1:
        raise EmptySpectrumError(f"mode index must be >= 1, got {k}")
    return float(_solve_eps(scenario, [k], margin, rtol, max_iter)[0])


def _linearized(scenario: CavityScenario, ks: np.ndarray, threshold: float):
    w2 = scenario.omega_bar_over_spacing**2
    denom = ks.astype(float) ** 2 - w2
    resonant = np.abs(denom) < threshold * w2
    with np.errstate(divide="ignore", invalid="ignore"):
        eps = scenario.delta * ks / denom
    return eps, resonant


def epsilon_k_linearized(
    scenario: CavityScenario, k: int, resonance_threshold: float = RESONANCE_THRESHOLD
) -> float:
    """First-order shift ``pi g c R k / (pi^2 c^2 k^2 - omega_bar^2 R^2)``.

    Raises :class:`ResonanceError` when
    ``|pi^2 c^2 k^2 - omega_bar^2 R^2| < resonance_threshold * omega_bar^2 R^2``.
    The result is not range-checked and may be negative below resonance.
    """
    if k < 1:
        raise EmptySpectrumError(f"mode index must be >= 1, got {k}")
    eps, resonant = _linearized(scenario, np.array([k]), resonance_threshold)
    if resonant[0]:
        raise ResonanceError(f"mode k={k} is within the resonance threshold of omega_bar")
    return float(eps[0])


def omega0_small_cavity(scenario: CavityScenario) -> float:
    """Closed-form lowest eigenfrequency ``omega_bar (1 - pi delta / 2)``."""
    require_regime(scenario)
    return scenario.omega_bar * (1.0 - 0.5 * math.pi * scenario.delta)


def solve_spectrum(
    scenario: CavityScenario,
    K: int = DEFAULT_K,
    method: str = "hybrid",
    margin: float = BRACKET_MARGIN,
    rtol: float = RTOL,
    max_iter: int = MAX_ITER,
    resonance_threshold: float = RESONANCE_THRESHOLD,
) -> ModeSpectrum:
    """Lowest eigenfrequency and the first ``K`` field-like modes.

    ``method`` selects how each piece is obtained:

    ==========  =====================  ==========================================
    method      Omega_0                eps_k
    ==========  =====================  ==========================================
    exact       bisection              bisection
    hybrid      bisection              linearized, bisection near resonance
    linearized  omega_bar(1 - pi d/2)  linearized, bisection near resonance
    ==========  =====================  ==========================================
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    omega_k = field_mode_frequencies(scenario, K)
    require_regime(scenario)
    ks = np.arange(1, K + 1)
    dw = scenario.delta_omega

    if method == "linearized":
        omega0 = omega0_small_cavity(scenario)
    else:
        omega0 = _solve_x0(scenario, margin, rtol, max_iter) * dw

    if method == "exact":
        eps = _solve_eps(scenario, ks, margin, rtol, max_iter)
    else:
        eps, resonant = _linearized(scenario, ks, resonance_threshold)
        if resonant.any():
            eps[resonant] = _solve_eps(scenario, ks[resonant], margin, rtol, max_iter)

    spectrum = ModeSpectrum(
        omega0_mode=float(omega0),
        k=ks,
        omega_k=omega_k,
        Omega_k=dw * (ks + eps),
        epsilon_k=eps,
        delta_omega=dw,
        method=method,
    )
    if not spectrum.is_interlaced():
        raise RegimeViolationError(
            "solved spectrum does not interlace with the field modes; "
            "the small-cavity ordering does not hold for this scenario"
        )
    return spectrum


def solve_spectrum_exact(scenario: CavityScenario, K: int = DEFAULT_K, **kwargs) -> ModeSpectrum:
    """Every root by bracketed bisection between consecutive asymptotes."""
    return solve_spectrum(scenario, K, method="exact", **kwargs)


# -- series identity ---------------------------------------------------------

_SMALL_U = 0.25


def series_closed_form(u: float) -> float:
    """``sum_{k>=1} 1/(k^2 - u^2) = 1/(2u^2) - (pi/(2u)) cot(pi u)``.

    For ``|u| <= 0.25`` the two terms cancel badly, so the equivalent
    expansion ``sum_n zeta(2n) u^(2n-2)`` is summed instead.
    """
    u = float(u)
    if u == round(u) and u != 0.0:
        raise PoleError(f"u={u} is a pole of the series")
    if abs(u) <= _SMALL_U:
        u2 = u * u
        total, power, n = 0.0, 1.0, 1
        while True:
            term = float(special.zeta(2 * n)) * power
            total += term
            if term < 1e-18 * total or n > 200:
                return total
            power *= u2
            n += 1
    return 1.0 / (2.0 * u * u) - (math.pi / (2.0 * u)) / math.tan(math.pi * u)


def series_identity_check(u: float, K: int) -> tuple[float, float, float]:
    """Compare the truncated series ``sum_{k=1..K} 1/(k^2 - u^2)`` with its
    closed form. Returns ``(truncated_sum, closed_form, abs_error)``."""
    if K < 1:
        raise EmptySpectrumError(f"K must be >= 1, got {K}")
    u = float(u)
    if u == round(u) and u != 0.0:
        raise PoleError(f"u={u} is a non-zero integer; the series has a pole there")
    k = np.arange(1, K + 1, dtype=float)
    truncated = math.fsum(1.0 / (k * k - u * u))
    closed = series_closed_form(u)
    return truncated, closed, abs(truncated - closed)
