"""Flat-space bilinear forms as coefficient tables, computed by two routes.

A table maps pairs of multi-indices ``(a, b)`` to rationals and stands for
``sum A[a,b] * (d^a f)(d^b h)``.  The generating polynomial
``P(u, v) = sum A[a,b] u^a v^b`` is O(n)-invariant, so it is a polynomial in
``x = |u|^2``, ``t = <u,v>``, ``y = |v|^2``; that bridge is what connects tables
to index notation.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .exact import (
    enumerate_splits,
    format_rational,
    mi_add,
    mi_binomial,
    mi_factorial,
    parse_rational,
    solve_linear,
    sub_indices,
)
from .calculus import integrated_pair_trace, sigma_minus_n_product
from .exterior import trace_pair
from .moments import moment

CONVENTIONS = ("partial", "D")


def d_to_partial_sign(order: int) -> int:
    """``D^a = (-i)^|a| d^a``; for a bilinear term of even total order the phase is ``(-1)^(order/2)``."""
    if order % 2:
        raise ValueError("odd total order has an imaginary conversion factor")
    return -1 if (order // 2) % 2 else 1


@dataclass
class CoefficientTable:
    n: int
    entries: dict = field(default_factory=dict)
    convention: str = "partial"
    dim: int | None = None

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise ValueError(f"unknown convention {self.convention!r}")
        if self.dim is None:
            self.dim = self.n
        self.entries = {(tuple(a), tuple(b)): Fraction(c) for (a, b), c in self.entries.items() if c}
        for a, b in self.entries:
            if sum(a) < 1 or sum(b) < 1 or sum(a) + sum(b) != self.n:
                raise ValueError(f"key {(a, b)} violates |a|,|b| >= 1, |a|+|b| = {self.n}")

    def converted(self, convention: str) -> CoefficientTable:
        if convention == self.convention:
            return self
        sign = d_to_partial_sign(self.n)
        return CoefficientTable(self.n, {k: sign * c for k, c in self.entries.items()}, convention, self.dim)

    def is_symmetric(self) -> bool:
        return all(self.entries.get((b, a), 0) == c for (a, b), c in self.entries.items())

    def swapped(self) -> CoefficientTable:
        return CoefficientTable(self.n, {(b, a): c for (a, b), c in self.entries.items()}, self.convention, self.dim)

    def diff(self, other: CoefficientTable) -> dict:
        """Nonzero entries of ``self - other`` (after matching conventions)."""
        other = other.converted(self.convention)
        keys = set(self.entries) | set(other.entries)
        out = {}
        for k in keys:
            d = self.entries.get(k, 0) - other.entries.get(k, 0)
            if d:
                out[k] = d
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoefficientTable):
            return NotImplemented
        return self.n == other.n and not self.diff(other)

    def sorted_items(self) -> list:
        return sorted(self.entries.items(), key=lambda kv: kv[0][0] + kv[0][1], reverse=True)

    def to_json(self) -> str:
        body = {
            "n": self.n,
            "convention": self.convention,
            "entries": [{"a": list(a), "b": list(b), "c": format_rational(c)} for (a, b), c in self.sorted_items()],
        }
        return json.dumps(body, indent=1)

    @classmethod
    def from_json(cls, text: str) -> CoefficientTable:
        data = json.loads(text)
        entries = {(tuple(e["a"]), tuple(e["b"])): parse_rational(e["c"]) for e in data["entries"]}
        dim = len(data["entries"][0]["a"]) if data["entries"] else data["n"]
        return cls(data["n"], entries, data["convention"], dim)

    def polynomial(self) -> dict:
        """``P(u, v)`` as ``{(a, b): c}``; identical to the entries."""
        return dict(self.entries)


# ---------------------------------------------------------------------------
# route 1: direct symbol sum

def omega_flat_direct(n: int, exploit_symmetry: bool = True) -> CoefficientTable:
    """Integrate the trace of the order ``-n`` symbol of ``[F,f][F,h]`` term by term.

    Returned in the ``partial`` convention; the ``D`` table is one conversion away.
    """
    _check_even(n)
    entries: dict = {}
    for term in sigma_minus_n_product(n).terms:
        v = integrated_pair_trace(n, term.symbol.gamma, term.symbol.delta, exploit_symmetry)
        if v:
            key = (term.jets[0].a, term.jets[1].a)
            entries[key] = entries.get(key, 0) + term.coeff * v
    return CoefficientTable(n, entries, "D").converted("partial")


# ---------------------------------------------------------------------------
# route 2: Taylor expansion of the pair trace

def _psi_terms(n: int) -> dict:
    """``psi = a t^2 |xi|^-2 |eta|^-2 + b`` as ``{(m_xi, m_eta, p, k, l): c}``
    meaning ``c xi^m_xi eta^m_eta <xi,eta>^p |xi|^-2k |eta|^-2l``."""
    a, b = trace_pair(n)
    z = (0,) * n
    return {(z, z, 2, 1, 1): a, (z, z, 0, 0, 0): b}


def _dpsi(terms: dict, i: int, wrt_eta: bool) -> dict:
    out: dict = {}

    def add(key, c):
        v = out.get(key, 0) + c
        if v:
            out[key] = v
        else:
            out.pop(key, None)

    for (mx, me, p, k, l), c in terms.items():
        own, other = (me, mx) if wrt_eta else (mx, me)
        power = l if wrt_eta else k
        if own[i]:
            lowered = own[:i] + (own[i] - 1,) + own[i + 1:]
            key = (mx, lowered, p, k, l) if wrt_eta else (lowered, me, p, k, l)
            add(key, c * own[i])
        if p:
            # d<xi,eta>/dxi_i = eta_i raises the other variable's exponent
            raised = other[:i] + (other[i] + 1,) + other[i + 1:]
            key = (raised, me, p - 1, k, l) if wrt_eta else (mx, raised, p - 1, k, l)
            add(key, c * p)
        if power:
            raised_own = own[:i] + (own[i] + 1,) + own[i + 1:]
            key = (mx, raised_own, p, k, l + 1) if wrt_eta else (raised_own, me, p, k + 1, l)
            add(key, c * (-2 * power))
    return out


@lru_cache(maxsize=None)
def _psi_derivative(n: int, beta: tuple, delta: tuple):
    if any(delta):
        last = max(i for i, d in enumerate(delta) if d)
        prev = delta[:last] + (delta[last] - 1,) + delta[last + 1:]
        return _dpsi(_psi_derivative(n, beta, prev), last, True)
    if any(beta):
        last = max(i for i, d in enumerate(beta) if d)
        prev = beta[:last] + (beta[last] - 1,) + beta[last + 1:]
        return _dpsi(_psi_derivative(n, prev, delta), last, False)
    return _psi_terms(n)


@lru_cache(maxsize=None)
def _diagonal_mean(n: int, beta: tuple, delta: tuple) -> Fraction:
    total = Fraction(0)
    for (mx, me, _p, _k, _l), c in _psi_derivative(n, beta, delta).items():
        total += c * moment(mi_add(mx, me), n)
    return total


def psi_diagonal_mean(n: int, beta: tuple, delta: tuple, exploit_symmetry: bool = True) -> Fraction:
    """Sphere mean of ``d^beta_xi d^delta_eta psi`` on the diagonal ``eta = xi``."""
    if exploit_symmetry:
        if any((g + d) % 2 for g, d in zip(beta, delta)):
            return Fraction(0)
        cols = sorted(zip(beta, delta), reverse=True)
        beta, delta = tuple(c[0] for c in cols), tuple(c[1] for c in cols)
    return _diagonal_mean(n, tuple(beta), tuple(delta))


def omega_flat_taylor(n: int, exploit_symmetry: bool = True) -> CoefficientTable:
    """Coefficients of ``T(u+v, v) - T(v, v)`` for the order-``n`` Taylor part ``T`` of
    the pair trace, integrated on the diagonal.  Returned in the ``partial`` convention."""
    _check_even(n)
    entries: dict = {}
    for beta, delta in enumerate_splits(n, n, (1, 1)):
        mean = psi_diagonal_mean(n, beta, delta, exploit_symmetry)
        if not mean:
            continue
        weight = mean / (mi_factorial(beta) * mi_factorial(delta))
        # (u+v)^beta = sum_a C(beta, a) u^a v^(beta-a); a = 0 is the subtracted part
        for a in sub_indices(beta):
            if not any(a):
                continue
            b = mi_add(tuple(x - y for x, y in zip(beta, a)), delta)
            key = (tuple(a), b)
            entries[key] = entries.get(key, 0) + mi_binomial(beta, a) * weight
    return CoefficientTable(n, entries, "D").converted("partial")


def _check_even(n: int) -> None:
    if n % 2 or n < 2:
        raise ValueError(f"n must be even and >= 2, got {n}")


# ---------------------------------------------------------------------------
# invariant polynomials in x = |u|^2, t = <u,v>, y = |v|^2

def _poly_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for k1, c1 in p.items():
        for k2, c2 in q.items():
            k = tuple(a + b for a, b in zip(k1, k2))
            out[k] = out.get(k, 0) + c1 * c2
    return {k: c for k, c in out.items() if c}


def _poly_add(p: dict, q: dict, s=1) -> dict:
    out = dict(p)
    for k, c in q.items():
        out[k] = out.get(k, 0) + s * c
    return {k: c for k, c in out.items() if c}


def _poly_pow(p: dict, e: int, one) -> dict:
    out = {one: Fraction(1)}
    for _ in range(e):
        out = _poly_mul(out, p)
    return out


# (x, t, y) exponent triples
X, T, Y = {(1, 0, 0): Fraction(1)}, {(0, 1, 0): Fraction(1)}, {(0, 0, 1): Fraction(1)}
ONE3 = (0, 0, 0)
# Laplacian (minus sum of second partials) of a product: -(u+v)^2
LAP_PRODUCT = {(1, 0, 0): Fraction(-1), (0, 1, 0): Fraction(-2), (0, 0, 1): Fraction(-1)}

FLAT_CATALOGUE = {
    "<df,dh>": T,
    "lap f lap h": _poly_mul(X, Y),
    "lap(lap f lap h)": _poly_mul(LAP_PRODUCT, _poly_mul(X, Y)),
    "<grad lap f,grad lap h>": _poly_mul(T, _poly_mul(X, Y)),
    "<hess f,hess h>": _poly_mul(T, T),
    "<grad hess f,grad hess h>": _poly_mul(T, _poly_mul(T, T)),
    "f h": {ONE3: Fraction(1)},
}
_LAP_POWER = re.compile(r"^lap(?:\^(\d+))?\((.*)\)$")


def catalogue_polynomial(name: str) -> dict:
    """Invariant polynomial of a named flat pattern.

    Names: the keys of ``FLAT_CATALOGUE`` and ``lap^p(<name>)`` for any of them
    (``lap`` is minus the sum of second partials).
    """
    name = " ".join(name.split())
    if name in FLAT_CATALOGUE:
        return dict(FLAT_CATALOGUE[name])
    m = _LAP_POWER.match(name)
    if m:
        power = int(m.group(1) or 1)
        inner = catalogue_polynomial(m.group(2))
        return _poly_mul(_poly_pow(LAP_PRODUCT, power, ONE3), inner)
    raise KeyError(f"unknown flat pattern {name!r}")


@dataclass
class InvariantExpression:
    """Formal sum of named flat patterns or index-notation strings."""

    terms: list = field(default_factory=list)

    def add(self, coeff, pattern: str) -> InvariantExpression:
        self.terms.append((Fraction(coeff), pattern))
        return self


def _index_string_polynomial(text: str) -> dict:
    from .tensor.parse import parse_expr
    from .tensor.flatpoly import invariant_polynomial

    return invariant_polynomial(parse_expr(text))


def invariant_to_table(poly: dict, n: int, dim: int | None = None) -> CoefficientTable:
    """Expand ``sum c x^p t^q y^r`` into monomials ``u^a v^b``."""
    dim = dim or n
    x = {(tuple(2 if k == i else 0 for k in range(dim)), (0,) * dim): Fraction(1) for i in range(dim)}
    y = {((0,) * dim, tuple(2 if k == i else 0 for k in range(dim))): Fraction(1) for i in range(dim)}
    t = {(tuple(1 if k == i else 0 for k in range(dim)),) * 2: Fraction(1) for i in range(dim)}
    one = ((0,) * dim, (0,) * dim)

    def mul(p, q):
        out: dict = {}
        for (a1, b1), c1 in p.items():
            for (a2, b2), c2 in q.items():
                k = (mi_add(a1, a2), mi_add(b1, b2))
                out[k] = out.get(k, 0) + c1 * c2
        return {k: c for k, c in out.items() if c}

    powers = {"x": [{one: Fraction(1)}], "t": [{one: Fraction(1)}], "y": [{one: Fraction(1)}]}
    base = {"x": x, "t": t, "y": y}

    def power(var, e):
        seq = powers[var]
        while len(seq) <= e:
            seq.append(mul(seq[-1], base[var]))
        return seq[e]

    entries: dict = {}
    for (p, q, r), c in poly.items():
        if 2 * (p + q + r) != n:
            raise ValueError(f"monomial x^{p} t^{q} y^{r} does not have order {n}")
        for key, v in mul(mul(power("x", p), power("t", q)), power("y", r)).items():
            entries[key] = entries.get(key, 0) + c * v
    return CoefficientTable(n, entries, "partial", dim)


def expand_invariant(expr: InvariantExpression, n: int, dim: int | None = None) -> CoefficientTable:
    """Coordinate table (``partial`` convention) of a flat invariant expression."""
    total: dict = {}
    for coeff, pattern in expr.terms:
        if ";" in pattern:
            poly = _index_string_polynomial(pattern)
        else:
            poly = catalogue_polynomial(pattern)
        total = _poly_add(total, {k: coeff * c for k, c in poly.items()})
    return invariant_to_table(total, n, dim)


def table_to_invariant(table: CoefficientTable) -> dict:
    """Inverse of :func:`invariant_to_table`: solve for ``c[p,q,r]`` exactly and
    confirm that every entry is reproduced."""
    table = table.converted("partial")
    n, dim = table.n, table.dim
    half = n // 2
    basis = [(p, q, half - p - q) for p in range(half + 1) for q in range(half + 1 - p)]
    basis = [b for b in basis if 2 * b[0] + b[1] >= 1 and 2 * b[2] + b[1] >= 1]
    expansions = [invariant_to_table({b: Fraction(1)}, n, dim).entries for b in basis]
    keys = sorted(set().union(table.entries, *expansions))
    rows = [[e.get(k, 0) for e in expansions] for k in keys]
    rhs = [table.entries.get(k, 0) for k in keys]
    sol, *_ = solve_linear(rows, rhs, len(basis))
    return {b: c for b, c in zip(basis, sol) if c}


# ---------------------------------------------------------------------------
# integration by parts

@dataclass
class DifferentialOperator:
    """``sum c[g] d^g`` acting on one function."""

    n: int
    coeffs: dict

    def proportionality(self, other: DifferentialOperator):
        """``lam`` with ``self = lam * other``, or None."""
        keys = set(self.coeffs) | set(other.coeffs)
        lam = None
        for k in keys:
            a, b = self.coeffs.get(k, 0), other.coeffs.get(k, 0)
            if not b:
                if a:
                    return None
                continue
            r = Fraction(a) / b
            if lam is None:
                lam = r
            elif r != lam:
                return None
        return lam


def ibp_extract(table: CoefficientTable, onto: str = "h") -> DifferentialOperator:
    """Move every derivative off one function by parts:
    ``int (d^a f)(d^b h) = int f (-1)^|a| d^(a+b) h``."""
    table = table.converted("partial")
    coeffs: dict = {}
    for (a, b), c in table.entries.items():
        moved = a if onto == "h" else b
        sign = -1 if sum(moved) % 2 else 1
        key = mi_add(a, b)
        coeffs[key] = coeffs.get(key, 0) + sign * c
    return DifferentialOperator(table.n, {k: v for k, v in coeffs.items() if v})


def laplacian_power(p: int, dim: int) -> DifferentialOperator:
    """``(-sum d_i^2)^p`` in coordinates."""
    sq = {tuple(2 if k == i else 0 for k in range(dim)): Fraction(-1) for i in range(dim)}
    out = {(0,) * dim: Fraction(1)}
    for _ in range(p):
        nxt: dict = {}
        for k1, c1 in out.items():
            for k2, c2 in sq.items():
                k = mi_add(k1, k2)
                nxt[k] = nxt.get(k, 0) + c1 * c2
        out = {k: c for k, c in nxt.items() if c}
    return DifferentialOperator(2 * p, out)
