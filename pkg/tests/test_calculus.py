from __future__ import annotations

import pytest

from wresforms.calculus import (commutator_sigma, integrate_jet_symbol, integrated_pair_trace,
                                sigma_minus_n_product, trace_density)
from wresforms.flat import omega_flat_direct


@pytest.mark.parametrize("k", [1, 2, 3])
def test_commutator_symbol_homogeneity(k):
    s = commutator_sigma(k, 2)
    assert s.homogeneities() == {-k}
    assert s.jet_bidegrees() == {(k, 0)}


def test_commutator_order_must_be_negative():
    with pytest.raises(ValueError):
        commutator_sigma(0, 2)


@pytest.mark.parametrize("n", [2, 4])
def test_product_symbol_has_order_minus_n(n):
    s = sigma_minus_n_product(n)
    assert s.homogeneities() == {-n}
    assert all(a >= 1 and b >= 1 and a + b <= n for a, b in s.jet_bidegrees())


def test_odd_dimension_rejected():
    with pytest.raises(ValueError):
        sigma_minus_n_product(3)


@pytest.mark.parametrize("gamma,delta", [((1, 0), (1, 0)), ((2, 0), (0, 0)), ((1, 1), (1, 1)), ((3, 0), (1, 0))])
def test_pair_trace_symmetry_shortcut(gamma, delta):
    assert integrated_pair_trace(2, gamma, delta) == integrated_pair_trace(2, gamma, delta, exploit_symmetry=False)


def test_pipeline_matches_flat_table_n2():
    dens = integrate_jet_symbol(trace_density(sigma_minus_n_product(2)))
    table = omega_flat_direct(2)
    got = {}
    for jets, c in dens.items():
        a = next(j.a for j in jets if j.tag == "f")
        b = next(j.a for j in jets if j.tag == "h")
        got[(a, b)] = got.get((a, b), 0) + c
    assert table.converted("D").entries == {k: v for k, v in got.items() if v}
