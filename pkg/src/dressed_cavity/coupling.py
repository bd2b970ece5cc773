"""Elements ``t_mu^r`` of the orthogonal matrix taking bare coordinates
(atom ``mu = 0``, field modes ``mu = k``) to normal modes ``r``.

Two constructions share the :class:`CouplingMatrix` container:

* ``exact`` evaluates the closed forms at the solved eigenfrequencies;
* ``approximate`` uses the small-cavity expressions
  ``(t_0^0)^2 = 1 - pi^2 delta / 3``, ``(t_0^k)^2 = 2 delta / k^2``,
  ``t_k^0 = k g^2 sqrt(2 delta) / (k^2 g^2 - Omega_0^2 delta^2)`` and
  ``t_k^l = 2 k delta / ((k^2 - (l + eps_l)^2) l)``.

The sign gauge is ``t_0^r > 0`` for every r.

:func:`finite_n_oracle` diagonalizes the bare N-mode problem directly and is
meant for tests only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    NumericalDomainError,
    OracleFailureError,
    RegimeViolationError,
    SingularityError,
    TruncationError,
)
from .spectrum import ModeSpectrum, require_regime
from .units import CavityScenario

__all__ = [
    "CouplingMatrix",
    "t0r_exact",
    "tkr_exact",
    "exact_elements",
    "approx_elements",
    "finite_n_oracle",
    "MAX_ORACLE_N",
]

MAX_ORACLE_N = 64


@dataclass(frozen=True)
class CouplingMatrix:
    """Matrix elements needed by the dynamics, truncated at K field rows and
    L normal-mode columns.

    ``t0k[k-1]`` is ``t_0^k`` and ``tk0[k-1]`` is ``t_k^0``.  ``t_k^l`` is
    produced on demand by :meth:`tkl` / :meth:`tkl_block` and memoized.
    """

    t00: float
    t0k: np.ndarray
    tk0: np.ndarray
    K: int
    L: int
    method: str
    _element: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False, compare=False)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.t0k.setflags(write=False)
        self.tk0.setflags(write=False)

    def _check(self, k: int, l: int):
        if not (1 <= k <= self.K and 1 <= l <= self.L):
            raise TruncationError(f"(k, l)=({k}, {l}) outside 1..{self.K} x 1..{self.L}")

    def tkl(self, k: int, l: int) -> float:
        """Single element ``t_k^l``."""
        self._check(k, l)
        key = (k, l)
        try:
            return self._cache[key]
        except KeyError:
            value = float(self._element(np.array([k]), np.array([l]))[0, 0])
            # plain dict insert is atomic; a racing duplicate computes the same value
            self._cache[key] = value
            return value

    def tkl_block(self, kmax: int | None = None, lmax: int | None = None) -> np.ndarray:
        """Array of ``t_k^l`` for ``k = 1..kmax`` (rows), ``l = 1..lmax`` (columns)."""
        kmax = self.K if kmax is None else kmax
        lmax = self.L if lmax is None else lmax
        self._check(max(kmax, 1), max(lmax, 1))
        key = ("block", kmax, lmax)
        block = self._cache.get(key)
        if block is None:
            block = self._element(np.arange(1, kmax + 1), np.arange(1, lmax + 1))
            block.setflags(write=False)
            self._cache[key] = block
        return block

    def field_row(self, k: int) -> np.ndarray:
        """``[t_k^0, t_k^1, ..., t_k^L]`` (not memoized)."""
        self._check(k, 1)
        rest = self._element(np.array([k]), np.arange(1, self.L + 1))[0]
        return np.concatenate(([self.tk0[k - 1]], rest))

    def row0(self, n: int | None = None) -> np.ndarray:
        """``[t_0^0, t_0^1, ..., t_0^n]``."""
        n = self.K if n is None else n
        if n > self.K:
            raise TruncationError(f"row 0 holds {self.K} field columns, asked for {n}")
        return np.concatenate(([self.t00], self.t0k[:n]))

    def full(self) -> np.ndarray:
        """Dense ``(K+1) x (K+1)`` array ``T[mu, r]``; needs ``L == K``."""
        if self.L != self.K:
            raise TruncationError(f"full matrix needs L == K, have K={self.K}, L={self.L}")
        T = np.empty((self.K + 1, self.K + 1))
        T[0] = self.row0()
        T[1:, 0] = self.tk0
        T[1:, 1:] = self.tkl_block()
        return T


def _dimensionless(scenario: CavityScenario, omega):
    return np.asarray(omega, dtype=float) / scenario.delta_omega


def _t0_from_positions(x, delta: float, w: float):
    x = np.asarray(x, dtype=float)
    radicand = (x * x - w * w) ** 2 + delta * (3.0 * x * x - w * w) + (math.pi * delta * x) ** 2
    if np.any(radicand <= 0):
        raise NumericalDomainError("non-positive radicand in t_0^r; inconsistent inputs")
    return math.sqrt(2.0 * delta) * x / np.sqrt(radicand)


def t0r_exact(scenario: CavityScenario, Omega_r):
    """``eta Omega / sqrt((Omega^2 - wb^2)^2 + (eta^2/2)(3 Omega^2 - wb^2) + pi^2 g^2 Omega^2)``.

    Accepts a scalar or an array of eigenfrequencies in rad/s.
    """
    x = _dimensionless(scenario, Omega_r)
    if np.any(x <= 0):
        raise NumericalDomainError("eigenfrequencies must be positive")
    out = _t0_from_positions(x, scenario.delta, scenario.omega_bar_over_spacing)
    return float(out) if np.ndim(out) == 0 else out


def tkr_exact(scenario: CavityScenario, k: int, Omega_r: float, t0r: float) -> float:
    """``eta omega_k / (omega_k^2 - Omega_r^2) * t0r``."""
    x = float(_dimensionless(scenario, Omega_r))
    denom = (k - x) * (k + x)
    if denom == 0:
        raise SingularityError(f"Omega_r coincides with field mode k={k}")
    return math.sqrt(2.0 * scenario.delta) * k / denom * t0r


def exact_elements(
    scenario: CavityScenario, spectrum: ModeSpectrum, L: int | None = None
) -> CouplingMatrix:
    """Closed-form elements evaluated at the solved spectrum."""
    K = spectrum.K
    L = K if L is None else L
    if L > K:
        raise TruncationError(f"L={L} exceeds spectrum size {K}")
    d = scenario.delta
    w = scenario.omega_bar_over_spacing
    x = spectrum.positions()
    t0 = _t0_from_positions(x, d, w)
    x0, t00 = float(x[0]), float(t0[0])
    ks = spectrum.k.astype(float)
    eps = spectrum.epsilon_k
    root2d = math.sqrt(2.0 * d)
    tk0 = root2d * ks / ((ks - x0) * (ks + x0)) * t00

    def element(kk, ll):
        kk = kk.astype(float)[:, None]
        li = ll - 1
        l_eps = eps[li][None, :]
        lf = ll.astype(float)[None, :]
        # omega_k^2 - Omega_l^2 in units of delta_omega^2, differences taken in index space
        denom = ((kk - lf) - l_eps) * (kk + lf + l_eps)
        return root2d * kk / denom * t0[ll][None, :]

    return CouplingMatrix(
        t00=t00,
        t0k=np.array(t0[1:]),
        tk0=tk0,
        K=K,
        L=L,
        method="exact",
        _element=element,
    )


def approx_elements(
    scenario: CavityScenario, spectrum: ModeSpectrum, L: int | None = None
) -> CouplingMatrix:
    """Small-cavity approximations for the elements."""
    require_regime(scenario)
    d = scenario.delta
    t00_sq = 1.0 - math.pi**2 * d / 3.0
    if t00_sq <= 0:
        raise RegimeViolationError(
            f"delta={d:.4g} >= 3/pi^2: the approximate (t_0^0)^2 is not positive"
        )
    K = spectrum.K
    L = K if L is None else L
    if L > K:
        raise TruncationError(f"L={L} exceeds spectrum size {K}")
    ks = spectrum.k.astype(float)
    root2d = math.sqrt(2.0 * d)
    # k g^2 sqrt(2d) / (k^2 g^2 - Omega_0^2 d^2), divided through by g^2
    y0 = spectrum.omega0_mode * d / scenario.g
    tk0 = ks * root2d / ((ks - y0) * (ks + y0))
    eps = spectrum.epsilon_k

    def element(kk, ll):
        kk = kk.astype(float)[:, None]
        lf = ll.astype(float)[None, :]
        l_eps = eps[ll - 1][None, :]
        denom = ((kk - lf) - l_eps) * (kk + lf + l_eps) * lf
        return 2.0 * kk * d / denom

    return CouplingMatrix(
        t00=math.sqrt(t00_sq),
        t0k=root2d / ks,
        tk0=tk0,
        K=K,
        L=L,
        method="approximate",
        _element=element,
    )


def finite_n_oracle(scenario: CavityScenario, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Diagonalize the atom coupled to ``N`` field modes.

    The bare atom frequency is set to ``omega_0^2 = omega_bar^2 + N eta^2`` and
    the couplings to ``c_k = eta omega_k``.

    Returns
    -------
    Omega : numpy.ndarray
        Sorted eigenfrequencies, shape ``(N+1,)``, rad/s.
    T : numpy.ndarray
        Orthogonal matrix ``T[mu, r]`` with columns as normal modes and the
        gauge ``T[0, r] > 0``.
    """
    if not 1 <= N <= MAX_ORACLE_N:
        raise TruncationError(f"oracle supports 1 <= N <= {MAX_ORACLE_N}, got {N}")
    d = scenario.delta
    w = scenario.omega_bar_over_spacing
    ks = np.arange(1, N + 1, dtype=float)
    # potential matrix in units of delta_omega^2; eta^2 / delta_omega^2 = 2 delta
    V = np.diag(np.concatenate(([w * w + N * 2.0 * d], ks * ks)))
    V[0, 1:] = V[1:, 0] = -math.sqrt(2.0 * d) * ks
    lam, vecs = np.linalg.eigh(V)
    if lam[0] <= 0:
        raise OracleFailureError(f"potential matrix not positive definite (min eigenvalue {lam[0]:.3e})")
    signs = np.where(vecs[0] < 0, -1.0, 1.0)
    vecs = vecs * signs[None, :]
    return scenario.delta_omega * np.sqrt(lam), vecs
