from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wresforms.moments import double_factorial, integrate_poly, moment, sphere_area_factor


def test_low_moments():
    assert moment((0, 0, 0)) == 1
    assert moment((2, 0, 0)) == Fraction(1, 3)
    assert moment((4, 0)) == Fraction(3, 8)
    assert moment((2, 2), 4) == Fraction(1, 24)
    assert moment((1, 1, 0)) == 0


@given(st.lists(st.integers(0, 4), min_size=2, max_size=5))
def test_permutation_invariance(alpha):
    assert moment(alpha) == moment(list(reversed(alpha))) == moment(sorted(alpha))


@given(st.lists(st.integers(0, 3), min_size=1, max_size=4))
def test_moment_recursion_via_norm(alpha):
    # mean of xi^alpha |xi|^2 equals mean of xi^alpha on the unit sphere
    n = len(alpha)
    lifted = {tuple(a + 2 * (i == j) for j, a in enumerate(alpha)): Fraction(1) for i in range(n)}
    assert integrate_poly(lifted, n) == moment(alpha)


def test_monte_carlo_agreement():
    rng = np.random.default_rng(7)
    x = rng.standard_normal((400_000, 4))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    for alpha in [(2, 0, 0, 0), (2, 2, 0, 0), (4, 0, 0, 0), (2, 2, 2, 0), (6, 0, 0, 0)]:
        est = np.mean(np.prod(x ** np.array(alpha), axis=1))
        assert abs(est - float(moment(alpha))) < 3e-3


def test_area_factor_values():
    assert sphere_area_factor(2) == (2, 1)
    assert sphere_area_factor(4) == (2, 2)
    assert sphere_area_factor(6) == (1, 3)
    assert sphere_area_factor(3) == (4, 1)
    assert double_factorial(7) == 105 and double_factorial(-1) == 1


def test_bad_dimension():
    with pytest.raises(ValueError):
        moment((2, 2, 2), 2)
