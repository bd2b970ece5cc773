"""Time evolution of the dressed atom occupation number.

The kernel is ``f_{mu nu}(tau) = sum_r t_mu^r t_nu^r exp(-i Omega_r tau)``.
The atom occupation at temperature T is

    n0(tau) = n0_initial |f_00(tau)|^2 + sum_k nB_k |f_0k(tau)|^2,

where ``nB_k`` is the Bose factor of the k-th cavity mode. Expanding
``|f_0k|^2`` gives the cosine triple sum; evaluating it as a squared
modulus costs O(K L) per time point instead of O(K L^2).

Phases are always formed from frequency differences ``Omega_r - Omega_0``
before multiplying by ``tau`` (a global phase drops out of every modulus).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .coupling import CouplingMatrix
from .errors import EmptySpectrumError, RegimeViolationError, TruncationError
from .spectrum import ModeSpectrum, require_regime
from .units import CavityScenario, thermal_exponent

__all__ = [
    "EvolutionSeries",
    "StabilityReport",
    "f_munu",
    "f0_row",
    "f00_sq_small_cavity",
    "stability_bound",
    "bose_occupation",
    "bose_factors",
    "occupation_evolution",
    "occupation_lower_bound",
    "thermal_bound_brackets",
    "free_space_asymptote",
    "stability_report",
    "time_average",
    "default_time_grid",
    "DEFAULT_K",
    "DEFAULT_L",
]

DEFAULT_K = 2000
DEFAULT_L = 200
DEFAULT_N_POINTS = 2000
DEFAULT_T_MAX_FACTOR = 20.0
OVERFLOW_EXPONENT = 700.0
# fixed so that results do not depend on the worker count
CHUNK = 64


@dataclass(frozen=True)
class EvolutionSeries:
    times: np.ndarray
    n0_values: np.ndarray
    f00_sq: np.ndarray
    thermal_part: np.ndarray
    T: float
    K: int
    L: int


@dataclass(frozen=True)
class StabilityReport:
    F_delta: float
    n0_bound_beta: float
    free_space_asymptote: float


# -- kernel ------------------------------------------------------------------

def _row(matrix: CouplingMatrix, mu: int) -> np.ndarray:
    if mu == 0:
        return matrix.row0()
    if not 1 <= mu <= matrix.K:
        raise TruncationError(f"index mu={mu} outside 0..{matrix.K}")
    if matrix.L != matrix.K:
        raise TruncationError("field rows of the kernel need a matrix with L == K")
    return matrix.field_row(mu)


def _check_shared(spectrum: ModeSpectrum, matrix: CouplingMatrix):
    if spectrum.K != matrix.K:
        raise TruncationError(
            f"spectrum (K={spectrum.K}) and matrix (K={matrix.K}) truncations differ"
        )


def f_munu(spectrum: ModeSpectrum, matrix: CouplingMatrix, mu: int, nu: int, tau: float) -> complex:
    """``sum_{r=0..K} t_mu^r t_nu^r exp(-i Omega_r tau)``."""
    _check_shared(spectrum, matrix)
    if tau < 0:
        raise ValueError("tau must be non-negative")
    a, b = _row(matrix, mu), _row(matrix, nu)
    Omega = spectrum.frequencies()
    phase = np.exp(-1j * (Omega - Omega[0]) * tau)
    return complex(np.sum(a * b * phase) * np.exp(-1j * Omega[0] * tau))


def f0_row(spectrum: ModeSpectrum, T: np.ndarray, tau: float) -> np.ndarray:
    """All ``f_{0 nu}(tau)``, ``nu = 0..K``, from a dense matrix ``T[mu, r]``.

    Returned up to a common phase, which cancels in every modulus.
    """
    Omega = spectrum.frequencies(T.shape[1] - 1)
    phase = np.exp(-1j * (Omega - Omega[0]) * tau)
    return T @ (T[0] * phase)


def f00_sq_small_cavity(
    scenario: CavityScenario, spectrum: ModeSpectrum, tau, K: int, L: int
):
    """Three-term small-cavity form of ``|f_00(tau)|^2``::

        (1 - a)^2 + 4 d (1 - a) sum_{k<=K} cos((Omega_k - Omega_0) tau) / k^2
                  + 4 d^2 sum_{k,l<=L} cos((Omega_k - Omega_l) tau) / (k^2 l^2)

    with ``a = pi^2 d / 3``. ``tau`` may be a scalar or an array.
    """
    require_regime(scenario)
    if max(K, L) > spectrum.K:
        raise TruncationError(f"K={K}, L={L} exceed spectrum size {spectrum.K}")
    d = scenario.delta
    a = math.pi**2 * d / 3.0
    tau = np.asarray(tau, dtype=float)
    scalar = tau.ndim == 0
    tau = np.atleast_1d(tau)

    dOm = spectrum.Omega_k - spectrum.omega0_mode
    ks = spectrum.k.astype(float)
    wk = 1.0 / ks[:K] ** 2
    wl = 1.0 / ks[:L] ** 2
    out = np.empty(tau.shape)
    for start in range(0, tau.size, CHUNK):
        t = tau[start : start + CHUNK]
        single = wk @ np.cos(np.outer(dOm[:K], t))
        # sum_{k,l} cos((O_k - O_l) t)/(k^2 l^2) = |sum_l exp(-i (O_l - O_0) t)/l^2|^2
        z = wl @ np.exp(-1j * np.outer(dOm[:L], t))
        double = z.real**2 + z.imag**2
        out[start : start + CHUNK] = (1 - a) ** 2 + 4 * d * (1 - a) * single + 4 * d * d * double
    return float(out[0]) if scalar else out


# -- closed forms ------------------------------------------------------------

def stability_bound(scenario: CavityScenario) -> float:
    """``F(delta) = 1 - (2 pi^2 / 3 - 2) delta``."""
    d = scenario.delta
    if d >= 3.0 / math.pi**2:
        raise RegimeViolationError(f"delta={d:.4g} >= 3/pi^2")
    return 1.0 - (2.0 * math.pi**2 / 3.0 - 2.0) * d


def _bose_from_exponent(x: float) -> float:
    if x > OVERFLOW_EXPONENT:
        return 0.0
    return 1.0 / math.expm1(x)


def bose_occupation(scenario: CavityScenario, k: int) -> float:
    """Bose-Einstein occupation of the k-th cavity mode at the scenario temperature."""
    if k < 1:
        raise EmptySpectrumError(f"mode index must be >= 1, got {k}")
    x = thermal_exponent(k * scenario.delta_omega, scenario.T, scenario.constants)
    return _bose_from_exponent(x)


def bose_factors(scenario: CavityScenario, K: int, T: float | None = None) -> np.ndarray:
    """Vector of Bose factors for ``k = 1..K``; ``T`` overrides the scenario's."""
    T = scenario.T if T is None else T
    if T == 0:
        return np.zeros(K)
    x0 = thermal_exponent(scenario.delta_omega, T, scenario.constants)
    x = x0 * np.arange(1, K + 1)
    out = np.zeros(K)
    live = x <= OVERFLOW_EXPONENT
    out[live] = 1.0 / np.expm1(x[live])
    return out


def free_space_asymptote(scenario: CavityScenario) -> float:
    """Long-time occupation in an unbounded cavity: the Bose factor at omega_bar."""
    x = thermal_exponent(scenario.omega_bar, scenario.T, scenario.constants)
    return _bose_from_exponent(x)


# -- evolution ---------------------------------------------------------------

def default_time_grid(
    scenario: CavityScenario,
    n_points: int = DEFAULT_N_POINTS,
    t_max_factor: float = DEFAULT_T_MAX_FACTOR,
) -> np.ndarray:
    """``n_points`` uniform times on ``[0, t_max_factor * R / c]``."""
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    return np.linspace(0.0, t_max_factor * scenario.R / scenario.constants.c, n_points)


def _check_truncation(spectrum: ModeSpectrum, matrix: CouplingMatrix, K: int, L: int):
    if K < 1 or L < 1:
        raise EmptySpectrumError(f"truncations must be positive, got K={K}, L={L}")
    if K > spectrum.K or K > matrix.K:
        raise TruncationError(f"K={K} exceeds spectrum ({spectrum.K}) or matrix ({matrix.K})")
    if L > matrix.L or L > K:
        raise TruncationError(f"L={L} exceeds matrix L={matrix.L} or K={K}")


def _evaluate_chunk(t, dOm_K, row0_sq, a0, A, dOm_L, bose, n0_initial):
    # |f_00|^2 over r = 0..K
    ph = np.exp(-1j * np.outer(dOm_K, t))
    f00 = row0_sq[0] + row0_sq[1:] @ ph
    f00_sq = f00.real**2 + f00.imag**2
    if A is None:
        thermal = np.zeros(t.size)
    else:
        # f_0k e^{i Omega_0 tau} = t00 tk0 + sum_l t0l tkl e^{-i (Omega_l - Omega_0) tau}
        F = a0[:, None] + A @ np.exp(-1j * np.outer(dOm_L, t))
        thermal = bose @ (F.real**2 + F.imag**2)
    return n0_initial * f00_sq + thermal, f00_sq, thermal


def occupation_evolution(
    scenario: CavityScenario,
    spectrum: ModeSpectrum,
    matrix: CouplingMatrix,
    time_grid,
    K: int = DEFAULT_K,
    L: int = DEFAULT_L,
    workers: int = 1,
) -> EvolutionSeries:
    """Occupation ``n0(tau)`` on ``time_grid``.

    ``|f_00|^2`` sums normal modes ``r = 0..K``; the thermal term sums field
    modes ``k = 1..K`` and, inside ``f_0k``, normal modes ``l = 1..L``.
    Work is split into fixed-size chunks of time points, so ``workers`` only
    changes wall time, never the numbers.
    """
    require_regime(scenario)
    _check_truncation(spectrum, matrix, K, L)
    t = np.asarray(time_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("time_grid must be a non-empty 1-D sequence")
    if np.any(t < 0):
        raise ValueError("time_grid must be non-negative")

    Omega = spectrum.frequencies(K)
    dOm_K = Omega[1:] - Omega[0]
    dOm_L = dOm_K[:L]
    row0 = matrix.row0(K)
    row0_sq = row0 * row0

    bose = bose_factors(scenario, K)
    live = np.flatnonzero(bose)
    if live.size:
        bose = bose[: live[-1] + 1]
        nk = bose.size
        a0 = matrix.t00 * matrix.tk0[:nk]
        A = matrix.tkl_block(nk, L) * row0[1 : L + 1][None, :]
    else:
        a0 = A = None

    starts = range(0, t.size, CHUNK)
    job = lambda s: _evaluate_chunk(  # noqa: E731
        t[s : s + CHUNK], dOm_K, row0_sq, a0, A, dOm_L, bose, scenario.n0_initial
    )
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, starts))
    else:
        parts = [job(s) for s in starts]

    n0 = np.concatenate([p[0] for p in parts])
    f00_sq = np.concatenate([p[1] for p in parts])
    thermal = np.concatenate([p[2] for p in parts])
    return EvolutionSeries(
        times=t, n0_values=n0, f00_sq=f00_sq, thermal_part=thermal, T=scenario.T, K=K, L=L
    )


def thermal_bound_brackets(matrix: CouplingMatrix, K: int, L: int) -> np.ndarray:
    """Per-mode bracket of the lower bound with every cosine set to -1::

        (t00 tk0)^2 - 2 t00 tk0 S_k - S_k^2,   S_k = sum_{l<=L} t0l tkl
    """
    if K > matrix.K or L > matrix.L:
        raise TruncationError(f"K={K}, L={L} exceed matrix truncation ({matrix.K}, {matrix.L})")
    a = matrix.t00 * matrix.tk0[:K]
    S = matrix.tkl_block(K, L) @ matrix.t0k[:L]
    return a * a - 2.0 * a * S - S * S


def occupation_lower_bound(
    scenario: CavityScenario,
    spectrum: ModeSpectrum,
    matrix: CouplingMatrix,
    K: int = DEFAULT_K,
    L: int = DEFAULT_L,
) -> float:
    """``F(delta) n0_initial + sum_k nB_k [bracket_k]`` (see :func:`thermal_bound_brackets`)."""
    require_regime(scenario)
    _check_truncation(spectrum, matrix, K, L)
    F = stability_bound(scenario)
    bose = bose_factors(scenario, K)
    if not bose.any():
        return F * scenario.n0_initial
    return F * scenario.n0_initial + float(bose @ thermal_bound_brackets(matrix, K, L))


def stability_report(
    scenario: CavityScenario,
    spectrum: ModeSpectrum,
    matrix: CouplingMatrix,
    K: int = DEFAULT_K,
    L: int = DEFAULT_L,
) -> StabilityReport:
    return StabilityReport(
        F_delta=stability_bound(scenario),
        n0_bound_beta=occupation_lower_bound(scenario, spectrum, matrix, K, L),
        free_space_asymptote=free_space_asymptote(scenario),
    )


def time_average(series: EvolutionSeries, window: tuple[float, float] | None = None) -> float:
    """Mean of ``n0_values`` over grid points with ``window[0] <= tau <= window[1]``."""
    t = series.times
    if window is None:
        window = (float(t[0]), float(t[-1]))
    lo, hi = window
    inside = (t >= lo) & (t <= hi)
    if not inside.any():
        raise ValueError(f"no grid points in window [{lo}, {hi}]")
    return float(np.mean(series.n0_values[inside]))
