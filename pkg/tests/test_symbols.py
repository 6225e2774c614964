from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wresforms.symbols import RationalSymbol, divide_by_norm_squared, norm_squared_poly, poly_mul

monomials = st.lists(st.integers(0, 3), min_size=3, max_size=3).map(tuple)


def inv_norm(dim, k):
    return RationalSymbol(dim, {((0,) * dim, k): Fraction(1)})


def test_inhomogeneous_terms_are_rejected():
    with pytest.raises(ValueError):
        RationalSymbol(2, {((1, 0), 0): 1, ((2, 0), 0): 1})


@given(monomials, st.integers(0, 2))
def test_division_by_norm_squared_round_trip(m, k):
    p = poly_mul({m: Fraction(1)}, {(2, 1, 0): Fraction(3), (0, 0, 3): Fraction(-1)})
    q, r = divide_by_norm_squared(poly_mul(p, norm_squared_poly(3)), 3)
    assert not r and q == p


@given(monomials, st.integers(0, 2), st.integers(0, 2))
def test_derivative_is_a_derivation(m, k, i):
    a = RationalSymbol.monomial(m, k)
    b = RationalSymbol.monomial((1, 0, 2), 1, 3)
    lhs = (a * b).xi_derivative(i)
    rhs = a.xi_derivative(i) * b + a * b.xi_derivative(i)
    assert (lhs - rhs).is_zero()


def test_norm_cancels_in_normal_form():
    s = RationalSymbol.from_polynomial(norm_squared_poly(3), pole=1)
    assert s.normal_form() == ({(0, 0, 0): Fraction(1)}, 0)


def test_derivative_of_inverse_norm():
    # d/dxi_0 |xi|^-2 = -2 xi_0 |xi|^-4
    d = inv_norm(2, 1).xi_derivative(0)
    assert (d - RationalSymbol.monomial((1, 0), 2, -2)).is_zero()
    assert d.homogeneity == -3
