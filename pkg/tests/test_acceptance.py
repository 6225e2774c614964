"""Acceptance criteria, one test each, with a pass/fail summary line per criterion.

Three criteria assert published statements that the engine refutes; they are
strict xfails, so the suite flags them if they ever start passing.  Their
report lines show the measured discrepancy.
"""
from __future__ import annotations

import random
import time
from fractions import Fraction

import pytest

from wresforms import catalogue, conformal
from wresforms.conventions import area_factor, display_table
from wresforms.exterior import binomial_trace_constants, trace_pair
from wresforms.flat import (InvariantExpression, expand_invariant, ibp_extract, laplacian_power,
                            omega_flat_direct, omega_flat_taylor)
from wresforms.tensor import (JetSample, normal_form, parse_expr, riemann_decompose, to_text,
                              verify_identity)
from wresforms.tensor.jets import evaluate_exact

REPORT: dict = {}


def record(number: int, ok: bool, detail: str) -> None:
    REPORT[number] = (ok, detail)


@pytest.fixture(scope="module", autouse=True)
def summary(request):
    yield
    tr = request.config.pluginmanager.get_plugin("terminalreporter")
    write = tr.write_line if tr else print
    write("")
    write("acceptance summary")
    for n in sorted(REPORT):
        ok, detail = REPORT[n]
        write(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def _zero(expr, context="general"):
    return not normal_form(expr, context)


def test_01_trace_constants():
    start = time.perf_counter()
    got = {n: trace_pair(n) for n in (2, 4, 6)}
    elapsed = time.perf_counter() - start
    want = {6: (24, -4), 4: (8, -2), 2: (4, -2)}
    ok = all(got[n] == want[n] == binomial_trace_constants(n) for n in want) and elapsed < 1
    shown = ", ".join(f"n={n} ({a}, {b})" for n, (a, b) in got.items())
    record(1, ok, f"{shown}; matrices agree with the binomial formula; {elapsed:.2f}s")
    assert ok


def test_02_route_equivalence():
    times = {}
    ok = True
    for n in (2, 4, 6):
        start = time.perf_counter()
        ok &= omega_flat_direct(n) == omega_flat_taylor(n)
        times[n] = time.perf_counter() - start
    ok &= times[6] < 120
    record(2, ok, "direct = taylor for n = 2, 4, 6; " + ", ".join(f"n={n} {t:.1f}s" for n, t in times.items()))
    assert ok


def test_03_flat_order_six_displays():
    table = display_table(omega_flat_taylor(6))
    first = expand_invariant(InvariantExpression().add(1, catalogue.OMEGA6_FLAT), 6)
    second = expand_invariant(
        InvariantExpression().add(12, "lap^2(<df,dh>)").add(-6, "lap(lap f lap h)")
        .add(-12, "<grad lap f,grad lap h>").add(24, "lap(<hess f,hess h>)").add(16, "<grad hess f,grad hess h>"), 6)
    ok = table == first == second
    record(3, ok, f"{len(table.entries)} coordinate entries match both displays (display sign (-1)^(n/2))")
    assert ok


def test_04_order_two_normalization():
    table = omega_flat_taylor(2).converted("partial")
    ok = table.entries == {((1, 0), (1, 0)): -4, ((0, 1), (0, 1)): -4}
    # unnormalized residue density: -4 * |S^1| <df,dh> = -8 pi <df,dh>;
    # the action normalization gives -16 pi^2 / (2 pi) = -8 pi
    ok &= -4 * area_factor(2) == Fraction(-16, 2)
    record(4, ok, "-4 <df,dh> (partial convention), -8 pi <df,dh> on the unnormalized measure")
    assert ok


def test_05_growing():
    grown = conformal.grow_flat(display_table(omega_flat_taylor(6)))
    cert = verify_identity(grown, catalogue.omega6_confflat(), "cf")
    record(5, cert.ok, f"grown expression equals the conformally flat display ({cert.status})")
    assert cert.ok


@pytest.mark.xfail(strict=True, reason="the engine finds the opposite sign on the Hessian-Weyl pair; "
                                       "confirmed on the dual-number oracle")
def test_06_variation():
    var = conformal.conformal_variation(catalogue.omega6_confflat())
    cert = verify_identity(var, parse_expr(catalogue.VARIATION6))
    coeffs, _ = conformal_structure_coefficients(var)
    record(6, cert.ok, f"{cert.status}; engine coefficients on the two Weyl structures {coeffs}, printed (-32, -32)")
    assert cert.ok


def conformal_structure_coefficients(var):
    from wresforms.tensor import express_in_basis

    s = {k: parse_expr(v) for k, v in catalogue.VARIATION_STRUCTURES.items()}
    coeffs, resid = express_in_basis(var, [s["B+2C"], s["3B-2A"]])
    return tuple(map(str, coeffs)), resid


def test_07_cocycle():
    cob = conformal.hochschild_coboundary(catalogue.omega6_confflat())
    main = verify_identity(cob, parse_expr(catalogue.COCYCLE6))
    printed = verify_identity(cob, parse_expr(catalogue.COCYCLE6_AS_PRINTED))
    rng = random.Random(7)
    vanish = True
    for _ in range(3):
        values = {u: Fraction(rng.randint(-20, 20), rng.randint(1, 5)) for u in "CDEG"}
        tau = sum((catalogue.ansatz_term(u).scale(c) for u, c in values.items()), parse_expr("0 f h"))
        vanish &= _zero(conformal.hochschild_coboundary(tau))
    ok = main.ok and vanish
    record(7, ok, f"coboundary matches -96/128 with the divergence pair as a difference ({main.status}); "
                  f"printed sum: {printed.status}; tau' coboundary vanishes: {vanish}")
    assert ok


@pytest.mark.xfail(strict=True, reason="the variation constraints force C = D = 0, not C = -32, D = -96")
def test_08_constraint_solve():
    sol = conformal.solve_constants(conformal.constraint_system())
    free_ok = set(sol.free) == {"E", "G"}
    ok = free_ok and all(sol.values.get(u) == v for u, v in catalogue.PUBLISHED_CONSTANTS.items())
    found = ", ".join(f"{u}={v}" for u, v in sol.values.items())
    record(8, ok, f"solved {found}; E, G free: {free_ok}; printed A=64, B=32, C=-32, D=-96")
    assert free_ok
    assert ok


def test_09_family_properties():
    rng = random.Random(11)
    failures = []
    for _ in range(5):
        E, G = (Fraction(rng.randint(-30, 30), rng.randint(1, 7)) for _ in range(2))
        rep = conformal.check_family(E, G)
        if not rep.ok:
            failures.append((E, G))
    ok = not failures
    record(9, ok, "5 random (E, G): symmetric, invariant, cocycle, homogeneous"
           + ("" if ok else f"; failures {failures}") + " (with derived C = D = 0)")
    assert ok


@pytest.mark.xfail(strict=True, reason="the symmetric form is not conformally flat invariant as printed")
def test_10_difference_term():
    sym = catalogue.omega6_confflat_symmetric()
    diff = parse_expr(catalogue.DIFFERENCE_TERM)
    cert = verify_identity(sym - catalogue.omega6_confflat(), diff)
    cf_zero = verify_identity(diff, None, "cf").ok
    fitted = verify_identity(catalogue.omega6_confflat_symmetric(catalogue.SYMMETRIC_CF_FITTED)
                             - catalogue.omega6_confflat(), diff)
    record(10, cert.ok and cf_zero,
           f"difference term vanishes for W = 0: {cf_zero}; printed symmetric form residue: "
           f"{to_text(cert.residue)}; refitted coefficients residue: {to_text(fitted.residue)}")
    assert cert.ok and cf_zero


def _corpus():
    """(label, lhs, rhs, jet kind): each symbolic transformation as an identity."""
    P = parse_expr
    out = []
    for name in ("A", "B", "C", "D", "G"):
        e = catalogue.ansatz_term(name)
        out.append((f"normal form of {name}", e, normal_form(e), "general"))
    e = P("f_i h_j R^{ikjl} V_{kl} + f_i h^i R_{jk}{}^{jk}")
    out.append(("Riemann decomposition", e, riemann_decompose(e), "general"))
    out.append(("growing", conformal.grow_flat(display_table(omega_flat_taylor(6))), catalogue.omega6_confflat(), "cf"))
    lhs, rhs = catalogue.FILTRATION_EXAMPLE
    out.append(("filtration identity", P(lhs), P(rhs), "general"))
    out.append(("difference term under W = 0", P(catalogue.DIFFERENCE_TERM), P("0 f h"), "cf"))
    return out


def test_11_engine_soundness():
    seeds = range(5)
    bad = []
    checked = 0
    for label, lhs, rhs, kind in _corpus():
        for s in seeds:
            if evaluate_exact(lhs - rhs, JetSample(seed=100 + s, kind=kind)) != 0:
                bad.append((label, s))
            checked += 1
    # variations against the dual-number oracle
    for label, e in [("variation of the display", catalogue.omega6_confflat()),
                     ("variation of A", catalogue.ansatz_term("A")),
                     ("variation of D", catalogue.ansatz_term("D"))]:
        v = conformal.conformal_variation(e)
        for s in seeds:
            sample = JetSample(seed=200 + s, vary="eta")
            if evaluate_exact(e, sample)[1] != evaluate_exact(v, sample)[0]:
                bad.append((label, s))
            checked += 1
    # coboundary against products of jets
    omega = catalogue.omega6_confflat()
    cob = conformal.hochschild_coboundary(omega)
    for s in seeds:
        sample = JetSample(seed=300 + s)
        if _numeric_coboundary(omega, sample) != evaluate_exact(cob, sample):
            bad.append(("coboundary", s))
        checked += 1
    ok = not bad
    record(11, ok, f"{checked} exact comparisons on random dimension-6 jets" + ("" if ok else f"; failed {bad}"))
    assert ok


def _numeric_coboundary(omega, sample):
    one = parse_expr
    parts = [
        (one("f1"), {"f": "f2", "h": "f3"}, {}, 1),
        (None, {"f": "f0", "h": "f3"}, {"f0": ("f1", "f2")}, -1),
        (None, {"f": "f1", "h": "eta"}, {"eta": ("f2", "f3")}, 1),
        (one("f3"), {"f": "f1", "h": "f2"}, {}, -1),
    ]
    total = Fraction(0)
    for pre, heads, products, sign in parts:
        e = conformal.rename_heads(omega, heads)
        if pre is not None:
            e = e * pre
        total += sign * evaluate_exact(e, sample, products=products)
    return total


def test_12_ibp_extraction():
    lam = ibp_extract(omega_flat_taylor(4)).proportionality(laplacian_power(2, 4))
    ok = lam is not None
    record(12, ok, f"integrated-by-parts order-4 form = {lam} * Laplacian^2")
    assert ok
