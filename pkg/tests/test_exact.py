from __future__ import annotations

from fractions import Fraction
from itertools import chain

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wresforms.exact import (InconsistentSystem, as_rational, count_multi_indices, enumerate_splits,
                             format_rational, mi_binomial, multi_indices, nullspace, parse_rational, rref,
                             solve_linear, sub_indices)

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=20)
matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(lambda c: st.lists(st.lists(fractions, min_size=c, max_size=c),
                                                            min_size=r, max_size=r)))


@given(fractions)
def test_rational_text_round_trip(q):
    assert parse_rational(format_rational(q)) == q


@pytest.mark.parametrize("bad", ["", "1/0", "x", "1.5", "3/"])
def test_malformed_rationals_are_rejected(bad):
    with pytest.raises(ValueError):
        parse_rational(bad)


def test_as_rational_refuses_floats():
    assert as_rational("-3/6") == Fraction(-1, 2)
    with pytest.raises(TypeError):
        as_rational(0.5)


@given(st.integers(1, 4), st.integers(0, 5))
def test_multi_index_count(dim, order):
    got = list(multi_indices(dim, order))
    assert len(got) == len(set(got)) == count_multi_indices(dim, order)
    assert all(sum(a) == order and len(a) == dim for a in got)


@given(st.lists(st.integers(0, 3), min_size=1, max_size=3))
def test_sub_index_binomials_sum_to_power_of_two(alpha):
    assert sum(mi_binomial(alpha, b) for b in sub_indices(alpha)) == 2 ** sum(alpha)


@given(st.integers(0, 4), st.integers(1, 3), st.lists(st.integers(0, 2), min_size=1, max_size=3))
def test_splits_are_exhaustive_unique_and_ordered(n, dim, mins):
    got = list(enumerate_splits(n, dim, mins))
    assert len(got) == len(set(got))
    for combo in got:
        assert sum(map(sum, combo)) == n
        assert all(sum(a) >= m for a, m in zip(combo, mins))
    keys = [tuple(chain.from_iterable(c)) for c in got]
    assert keys == sorted(keys, reverse=True)
    expected = sum(1 for ords in _orders(n, len(mins)) if all(o >= m for o, m in zip(ords, mins))
                   for _ in _product_count(ords, dim))
    assert len(got) == expected


def _orders(n, k):
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _orders(n - first, k - 1):
            yield (first,) + rest


def _product_count(ords, dim):
    total = 1
    for o in ords:
        total *= count_multi_indices(dim, o)
    return range(total)


@given(matrices)
def test_nullspace_vectors_are_annihilated(rows):
    ncols = len(rows[0])
    basis = nullspace(rows, ncols)
    _, pivots = rref(rows, ncols)
    assert len(basis) == ncols - len(pivots)
    for v in basis:
        assert all(sum(a * x for a, x in zip(row, v)) == 0 for row in rows)


@given(matrices, st.data())
def test_solve_linear_recovers_a_consistent_right_hand_side(rows, data):
    ncols = len(rows[0])
    x0 = data.draw(st.lists(fractions, min_size=ncols, max_size=ncols))
    rhs = [sum(a * x for a, x in zip(row, x0)) for row in rows]
    x, pivots, free, _ = solve_linear(rows, rhs, ncols)
    assert [sum(a * v for a, v in zip(row, x)) for row in rows] == rhs
    assert sorted(pivots + free) == list(range(ncols))


def test_inconsistent_system_carries_a_certificate():
    rows = [[1, 1], [2, 2]]
    with pytest.raises(InconsistentSystem) as err:
        solve_linear(rows, [1, 3], 2)
    comb = err.value.combination
    lhs = [sum(c * r[j] for c, r in zip(comb, rows)) for j in range(2)]
    assert lhs == [0, 0]
    assert sum(c * b for c, b in zip(comb, [1, 3])) != 0
