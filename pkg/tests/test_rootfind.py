import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from dressed_cavity.errors import ConvergenceError, RootNotBracketedError
from dressed_cavity.rootfind import bisect, bisect_scalar


@given(st.floats(0.05, 0.95))
def test_scalar_matches_brentq(c):
    f = lambda x: math.tan(x) - c * x - 0.3  # noqa: E731
    ours = bisect_scalar(f, 0.0, 1.5)
    ref = brentq(f, 0.0, 1.5, xtol=1e-15, rtol=1e-15)
    assert ours == pytest.approx(ref, rel=1e-11)


def test_vectorized_with_params():
    targets = np.array([0.1, 0.5, 2.0, 7.0])
    roots = bisect(lambda x, p: x * x - p, np.zeros(4), np.full(4, 3.0), params=targets)
    np.testing.assert_allclose(roots, np.sqrt(targets), rtol=1e-11)


def test_exact_root_at_endpoint_not_required():
    assert bisect_scalar(lambda x: x - 1.0, 0.0, 2.0) == pytest.approx(1.0, rel=1e-12)


def test_not_bracketed():
    with pytest.raises(RootNotBracketedError):
        bisect_scalar(lambda x: x * x + 1.0, -1.0, 1.0)


def test_iteration_cap():
    with pytest.raises(ConvergenceError):
        bisect_scalar(lambda x: x - 1.0 / 3.0, 0.0, 1.0, rtol=1e-15, max_iter=5)
