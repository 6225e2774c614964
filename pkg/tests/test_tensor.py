from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wresforms.tensor import (JetSample, ParseError, canonicalize, commute_derivatives, evaluate_components,
                              filtration_degrees, leibniz_substitute, normal_form, parse_expr,
                              riemann_decompose, to_latex, to_text, verify_identity)
from wresforms.tensor.jets import PRIMES, evaluate_mod

# scalar monomials exercising derivative reordering, traces and curvature symmetries
CORPUS = [
    "f_{;ijk} h^{;jik}",
    "f_{;ij}{}^{ji} h",
    "f_{;ijk}{}^{kji} h",
    "f_i h_j W^{ikjl}{}_{;lk}",
    "f_i h_j R^{ikjl} V_{kl}",
    "f_i h^i Rc_{jk} Rc^{kj}",
    "f_{;ijk} h^{;i} V^{kj}",
    "f_i h_j J^{;ji}",
    "f_i h_j V^{ij;k}{}_k",
    "f_{;ij} h_{;kl} W^{kilj}",
]


def _eval(expr, seed, dim, kind="general"):
    return evaluate_mod(expr, JetSample(seed=seed, dim=dim, kind=kind), PRIMES[seed % len(PRIMES)])


def test_parse_and_print_simple():
    e = parse_expr("3/2 f_{;ij} h^{;ij} - f_i h^i J")
    assert len(e) == 2
    assert "J" in to_text(e) and r"\tfrac{3}{2}" in to_latex(e)


@pytest.mark.parametrize("bad", ["f_{;ij", "f_i h^i + f_j h_k", "f_i h_i k^i", "2 +", "W^{ijk}"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_expr(bad)


@pytest.mark.parametrize("text", CORPUS)
def test_text_round_trip(text):
    e = parse_expr(text)
    assert not canonicalize(parse_expr(to_text(e)) - e)


def test_monoterm_symmetries_cancel():
    assert not canonicalize(parse_expr("f_i h_j V^{ij} - f_i h_j V^{ji}"))
    assert not canonicalize(parse_expr("f_i f_j W^{ijkl} h_{kl}"))
    assert not canonicalize(parse_expr("f_i h_j W^{ijk}{}_k"))


@pytest.mark.parametrize("text", CORPUS)
def test_normal_form_agrees_with_oracle(text):
    e = parse_expr(text)
    nf = normal_form(e)
    for seed in range(5):
        assert _eval(e, seed, 6) == _eval(nf, seed, 6)


def test_exact_evaluation_is_rational():
    e = parse_expr("1/3 f_i h^i J")
    v = evaluate_components(e, seed=2)
    assert isinstance(v, Fraction)
    assert v == evaluate_components(parse_expr("f_i h^i J"), seed=2) / 3


def test_commuting_derivatives_keeps_the_value():
    e = parse_expr("f_{;ijk} h^{;ijk}")
    swapped = commute_derivatives(e, 0, 1)
    assert swapped != e
    for seed in range(5):
        assert _eval(e, seed, 4) == _eval(swapped, seed, 4)
    with pytest.raises(IndexError):
        commute_derivatives(e, 0, 2)


def test_riemann_decomposition():
    e = parse_expr("f_i h_j R^{ikj}{}_k + f_i h^i R_{jk}{}^{jk}")
    d = riemann_decompose(e)
    assert all(f.head != "R" for k in d.terms for f in k)
    for seed in range(5):
        assert _eval(e, seed, 6) == _eval(d, seed, 6)


@pytest.mark.parametrize("text,degrees", [
    ("f_{;ij} h_{;kl} W^{ikjl}", (1, 4)),
    ("f_i h^i J J", (2, 2)),
    ("f_i h_j V_{kl} W^{ikjl}", (2, 2)),
    ("f_{;ijk} h^{;ijk}", (0, 6)),
    ("f_i h_j J^{;ij}", (1, 4)),
])
def test_filtration_degrees(text, degrees):
    assert filtration_degrees(parse_expr(text)) == degrees


def test_filtration_needs_a_monomial():
    with pytest.raises(ValueError):
        filtration_degrees(parse_expr("f_i h^i J + f_i h^i J J"))


def test_leibniz_substitution_of_a_product():
    e = leibniz_substitute(parse_expr("f_{;ij} h^{;ij}"), "f", ("f1", "f2"))
    want = parse_expr("f1_{;ij} f2 h^{;ij} + 2 f1_i f2_j h^{;ij} + f1 f2_{;ij} h^{;ij}")
    assert not normal_form(e - want)


def test_verify_identity_reports_residue_and_relations():
    ok = verify_identity(parse_expr("f_i h_j W^{ijkl}{}_{;kl}"), None, check="div div W antisymmetric pair")
    assert ok.ok
    bad = verify_identity(parse_expr("f_i h^i J"), None)
    assert bad.status == "residue" and bad.residue


terms = st.lists(st.tuples(st.sampled_from(CORPUS), st.integers(-5, 5).filter(bool)), min_size=1, max_size=3)


def _combine(pairs):
    return sum((parse_expr(t).scale(c) for t, c in pairs[1:]), parse_expr(pairs[0][0]).scale(pairs[0][1]))


@given(terms)
def test_normal_form_is_idempotent_and_linear(pairs):
    e = _combine(pairs)
    nf = normal_form(e, dim=4)
    assert not normal_form(nf - e, dim=4)
    parts = _combine([(to_text(normal_form(parse_expr(t), dim=4)), c) for t, c in pairs if normal_form(parse_expr(t), dim=4)])
    assert not normal_form(parts - nf, dim=4) if parts is not None else not nf


@given(terms, st.integers(0, 10 ** 6))
def test_normal_form_matches_oracle_on_random_jets(pairs, seed):
    e = _combine(pairs)
    assert _eval(e, seed, 4) == _eval(normal_form(e, dim=4), seed, 4)
