from __future__ import annotations

import math

import pytest

from wresforms.exterior import (binomial_trace_constants, epsilon_matrix, form_basis, iota_matrix,
                                leading_symbol_F, trace_pair)
from wresforms.symbols import RationalSymbol, norm_squared_poly


@pytest.mark.parametrize("n,k", [(2, 0), (2, 1), (4, 1), (4, 2)])
def test_anticommutator_is_the_norm(n, k):
    total = iota_matrix(n, k + 1) @ epsilon_matrix(n, k)
    if k:
        total = total + epsilon_matrix(n, k - 1) @ iota_matrix(n, k)
    norm = RationalSymbol.from_polynomial(norm_squared_poly(n))
    size = math.comb(n, k)
    for r in range(size):
        for c in range(size):
            got = total.entries.get((r, c), RationalSymbol.zero(n))
            assert (got - norm).is_zero() if r == c else got.is_zero()


@pytest.mark.parametrize("n", [2, 4])
def test_wedge_squares_to_zero(n):
    assert (epsilon_matrix(n, 1) @ epsilon_matrix(n, 0)).is_zero()
    assert (iota_matrix(n, 1) @ iota_matrix(n, 2)).is_zero()


@pytest.mark.parametrize("n", [2, 4])
def test_leading_symbol_squares_to_identity(n):
    s = leading_symbol_F(n)
    sq = s @ s
    size = math.comb(n, n // 2)
    num, K = sq.trace().normal_form()
    assert K == 0 and num == {(0,) * n: size}


@pytest.mark.parametrize("n,expected", [(2, (4, -2)), (4, (8, -2)), (6, (24, -4))])
def test_trace_constants(n, expected):
    assert trace_pair(n) == expected == binomial_trace_constants(n)


def test_form_basis_size():
    assert len(form_basis(6, 3)) == 20
