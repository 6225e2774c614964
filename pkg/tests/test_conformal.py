from __future__ import annotations

from fractions import Fraction

import pytest

from wresforms import catalogue, conformal
from wresforms.conventions import display_table
from wresforms.flat import omega_flat_taylor
from wresforms.tensor import JetSample, normal_form, parse_expr, verify_identity
from wresforms.tensor.jets import evaluate_mod

VARIATION_PROBES = [
    "f_i h^i",
    "f_{;ij} h^{;ij} J",
    "f_i h_j W^{ikjl}{}_{;kl}",
    "f_{;ijk} h^{;i} V^{jk}",
    "f_{ij} h_{kl} W^{ikjl}",
    "f_i h^i W_{jklm} W^{jklm}",
]


@pytest.mark.parametrize("text", VARIATION_PROBES)
def test_variation_matches_dual_number_oracle(text):
    e = parse_expr(text)
    v = conformal.conformal_variation(e)
    for seed in range(5):
        sample = JetSample(seed=seed, vary="eta")
        assert evaluate_mod(e, sample)[1] == evaluate_mod(v, sample)[0]


def test_dirichlet_form_is_invariant_only_in_dimension_two():
    e = parse_expr("f_i h^i")
    assert not conformal.conformal_variation(e, dim=2)
    assert conformal.conformal_variation(e, dim=6)


def test_weyl_term_variation_matches_oracle_on_conformally_flat_jets():
    e = catalogue.omega6_confflat()
    v = conformal.conformal_variation(e, "cf")
    for seed in range(3):
        sample = JetSample(seed=seed, kind="cf", vary="eta")
        assert evaluate_mod(e, sample)[1] == evaluate_mod(v, sample)[0]


def test_grow_order_two_and_four():
    assert not normal_form(conformal.grow_flat(omega_flat_taylor(2)) - parse_expr("-4 f_i h^i"))
    grown = conformal.grow_flat(display_table(omega_flat_taylor(4)))
    assert not conformal.conformal_variation(grown, "general", dim=4)
    flat_part = normal_form(grown, "flat", 4)
    want = parse_expr("-8 f_i h^{;i}{}_j{}^j - 4 f_{;i}{}^i h_{;j}{}^j - 8 f_{;ij} h^{;ij} - 8 f_{;ij}{}^j h^{;i}")
    assert not normal_form(flat_part - want, "flat", 4)


def test_grown_order_six_is_conformally_invariant_on_cf_metrics():
    grown = conformal.grow_flat(display_table(omega_flat_taylor(6)))
    assert not conformal.conformal_variation(grown, "cf")


@pytest.mark.parametrize("text,zero", [("f_i h^i", True), ("f h", True), ("f_{;ij} h^{;ij}", False)])
def test_coboundary(text, zero):
    cob = conformal.hochschild_coboundary(parse_expr(text))
    assert (not cob) == zero


def test_coboundary_matches_numeric_products():
    omega = parse_expr("f_{;ij} h^{;ij} + f_i h_j V^{ij}")
    cob = conformal.hochschild_coboundary(omega)
    sample = JetSample(seed=4)
    pieces = [("f1", ("f2",), "f3", 1), (None, ("f1", "f2"), "f3", -1), (None, ("f1",), ("f2", "f3"), 1),
              ("f3", ("f1",), "f2", -1)]
    total = 0
    for pre, a, b, sign in pieces:
        a_tag, b_tag = ("f0" if len(a) > 1 else a[0]), ("eta" if isinstance(b, tuple) else b)
        products = {}
        if len(a) > 1:
            products["f0"] = a
        if isinstance(b, tuple):
            products["eta"] = b
        e = conformal.rename_heads(omega, {"f": a_tag, "h": b_tag})
        if pre:
            e = e * parse_expr(pre)
        total += sign * evaluate_mod(e, sample, products=products)
    assert total % 16777213 == evaluate_mod(cob, sample)


def test_solver_edge_cases():
    system = conformal.ConstraintSystem(("A", "B"))
    sol = conformal.solve_constants(system)
    assert sol.values == {} and sol.free == ("A", "B")
    system.add({"B": 1}, 1, "first")
    system.add({"B": 1}, 2, "second")
    with pytest.raises(conformal.InconsistentConstraints) as err:
        conformal.solve_constants(system)
    comb = err.value.combination
    assert sum(m * c.rhs for c, m in comb) != 0
    assert sum(m * dict(c.coeffs).get("B", 0) for c, m in comb) == 0


def test_solver_reports_partially_determined_systems():
    system = conformal.ConstraintSystem(("A", "B", "C"))
    system.add({"A": 1, "B": 1}, 3, "sum")
    system.add({"C": 2}, 1, "single")
    sol = conformal.solve_constants(system)
    assert sol.values == {"C": Fraction(1, 2)}
    assert sol.free == ("B",)


def test_derived_constants_and_provenance():
    system = conformal.constraint_system()
    assert all(c.source for c in system.constraints)
    sol = conformal.solve_constants(system)
    assert sol.values == {"A": 64, "B": 32, "C": 0, "D": 0}
    assert set(sol.free) == {"E", "G"}


def test_ansatz_substitution():
    a = conformal.ansatz()
    assert set(a.unknowns) == set("ABCDEG")
    values = dict.fromkeys(a.unknowns, 0)
    assert not normal_form(a.substitute(values) - catalogue.omega6_confflat())


def test_family_with_printed_constants_fails_variation():
    rep = conformal.check_family(1, 2, coefficients=catalogue.PUBLISHED_CONSTANTS)
    assert not rep.variation.ok and rep.cocycle.ok and not rep.ok


def test_homogeneity_check():
    assert conformal.homogeneity_ok(parse_expr("f_i h^i J J + f_{;ijk} h^{;ijk}"))
    assert not conformal.homogeneity_ok(parse_expr("f_i h^i J"))


def test_candidate_uniqueness():
    rep = conformal.candidate_terms()
    assert rep.rank == 1 and rep.spanned_by is not None
    assert len(rep.monomials) == 315


def test_filtration_example_and_printed_variant():
    lhs, rhs = catalogue.FILTRATION_EXAMPLE
    assert verify_identity(parse_expr(lhs), parse_expr(rhs)).ok
    lhs, rhs = catalogue.FILTRATION_EXAMPLE_AS_PRINTED
    assert not verify_identity(parse_expr(lhs), parse_expr(rhs)).ok
