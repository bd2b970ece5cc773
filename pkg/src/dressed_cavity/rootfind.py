"""Bracketed bisection, vectorized over independent brackets.

Each bracket is refined independently, so a root does not depend on how
many brackets are solved together.
"""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError, RootNotBracketedError

__all__ = ["bisect", "bisect_scalar"]


def bisect(func, lo, hi, params=None, rtol: float = 1e-12, max_iter: int = 200) -> np.ndarray:
    """Find a root of ``func`` on each interval ``[lo[i], hi[i]]``.

    Parameters
    ----------
    func : callable
        ``func(x)`` or, when ``params`` is given, ``func(x, p)``; both
        arguments are arrays of the active brackets only.
    lo, hi : array_like
        Bracket ends. ``func`` must change sign across every bracket.
    params : array_like, optional
        One parameter per bracket, passed alongside ``x``.
    rtol : float
        Stop once ``hi - lo <= rtol * |mid|``.
    max_iter : int
        Iteration cap; exceeding it raises :class:`ConvergenceError`.

    Returns
    -------
    numpy.ndarray
        Bracket midpoints at convergence.
    """
    lo = np.array(lo, dtype=float, ndmin=1)
    hi = np.array(hi, dtype=float, ndmin=1)
    if lo.shape != hi.shape:
        raise ValueError("lo and hi must have the same shape")
    if params is None:
        call = lambda x, idx: func(x)  # noqa: E731
    else:
        params = np.broadcast_to(np.asarray(params), lo.shape)
        call = lambda x, idx: func(x, params[idx])  # noqa: E731

    everything = np.arange(lo.size)
    f_lo = call(lo, everything)
    f_hi = call(hi, everything)
    bad = ~(np.sign(f_lo) * np.sign(f_hi) < 0)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise RootNotBracketedError(
            f"no sign change on {int(bad.sum())} bracket(s), first at index {i}: "
            f"f({lo[i]!r}) = {f_lo[i]!r}, f({hi[i]!r}) = {f_hi[i]!r}"
        )

    root = 0.5 * (lo + hi)
    active = np.ones(lo.shape, dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        a, b, fa = lo[idx], hi[idx], f_lo[idx]
        mid = 0.5 * (a + b)
        fm = call(mid, idx)
        same = np.sign(fm) == np.sign(fa)
        a = np.where(same, mid, a)
        fa = np.where(same, fm, fa)
        b = np.where(same, b, mid)
        lo[idx], hi[idx], f_lo[idx] = a, b, fa

        new_mid = 0.5 * (a + b)
        root[idx] = np.where(fm == 0, mid, new_mid)
        done = (
            (fm == 0)
            | (b - a <= rtol * np.abs(new_mid))
            | (new_mid == a)
            | (new_mid == b)
        )
        active[idx[done]] = False

    if active.any():
        raise ConvergenceError(
            f"bisection did not converge in {max_iter} iterations "
            f"for {int(active.sum())} bracket(s)"
        )
    return root


def bisect_scalar(func, lo: float, hi: float, rtol: float = 1e-12, max_iter: int = 200) -> float:
    """Scalar convenience wrapper around :func:`bisect`; ``func`` takes a float."""
    f = lambda x: np.array([float(func(float(v))) for v in x])  # noqa: E731
    return float(bisect(f, [lo], [hi], rtol=rtol, max_iter=max_iter)[0])
