from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wresforms.conventions import display_table
from wresforms.flat import (CoefficientTable, InvariantExpression, expand_invariant, ibp_extract,
                            invariant_to_table, laplacian_power, omega_flat_direct, omega_flat_taylor,
                            table_to_invariant)


@pytest.mark.parametrize("n", [2, 4])
def test_symmetry_shortcuts_do_not_change_tables(n):
    assert omega_flat_direct(n) == omega_flat_direct(n, exploit_symmetry=False)
    assert omega_flat_taylor(n) == omega_flat_taylor(n, exploit_symmetry=False)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_tables_are_symmetric_in_f_and_h(n):
    assert omega_flat_taylor(n).is_symmetric()


def test_json_round_trip_and_conventions():
    t = omega_flat_taylor(4)
    assert CoefficientTable.from_json(t.to_json()) == t
    assert t.converted("D").converted("partial") == t
    assert t.converted("D") == t  # equality compares in one convention


def test_odd_order_rejected():
    with pytest.raises(ValueError):
        omega_flat_direct(3)


invariant_polys = st.dictionaries(
    st.sampled_from([(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]),
    st.fractions(min_value=-9, max_value=9, max_denominator=4).filter(bool), min_size=1)


@given(invariant_polys)
def test_invariant_table_round_trip(poly):
    poly = {k: v for k, v in poly.items() if 2 * k[0] + k[1] >= 1 and 2 * k[2] + k[1] >= 1}
    if not poly:
        return
    assert table_to_invariant(invariant_to_table(poly, 4, 3)) == poly


def test_named_patterns_match_index_strings():
    a = expand_invariant(InvariantExpression().add(1, "<hess f,hess h>"), 4)
    b = expand_invariant(InvariantExpression().add(1, "f_{;ij} h^{;ij}"), 4)
    assert a == b
    lap_fh = expand_invariant(InvariantExpression().add(1, "lap(<df,dh>)"), 4)
    manual = expand_invariant(InvariantExpression().add(-1, "f_{;ij}{}^j h^i").add(-2, "f_{;ij} h^{;ij}")
                              .add(-1, "f_i h^{;i}{}_j{}^j"), 4)
    assert lap_fh == manual


def test_ibp_on_either_side_agrees_up_to_parity():
    t = omega_flat_taylor(4)
    assert ibp_extract(t, "h").coeffs == ibp_extract(t, "f").coeffs


@pytest.mark.parametrize("n,ratio", [(2, -4), (4, 4)])
def test_ibp_gives_laplacian_powers(n, ratio):
    assert ibp_extract(omega_flat_taylor(n)).proportionality(laplacian_power(n // 2, n)) == ratio


def test_display_sign_flips_n2():
    d = display_table(omega_flat_taylor(2))
    assert table_to_invariant(d) == {(0, 1, 0): Fraction(4)}
