"""Symbol calculus for commutators with the sign operator, flat case.

Jets of f and h stay formal: a :class:`JetMonomial` only records which function
is differentiated and by which multi-index (in the ``D = -i d`` convention).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .exact import enumerate_splits, mi_add, mi_factorial, multi_indices
from .exterior import MatrixSymbol, leading_symbol_F, pair_trace_table
from .moments import integrate_product, integrate_symbol
from .symbols import RationalSymbol


@dataclass(frozen=True, order=True)
class JetMonomial:
    """``D^a`` applied to the function ``tag``."""

    tag: str
    a: tuple

    @property
    def order(self) -> int:
        return sum(self.a)


@dataclass(frozen=True)
class SymbolPairProduct:
    """Lazy ``d^gamma(sigma_L) d^delta(sigma_L)``; materialized only on request."""

    n: int
    gamma: tuple
    delta: tuple

    @property
    def homogeneity(self) -> int:
        return -sum(self.gamma) - sum(self.delta)

    def materialize(self) -> MatrixSymbol:
        sigma = leading_symbol_F(self.n)
        return sigma.xi_derivative(self.gamma) @ sigma.xi_derivative(self.delta)


@dataclass(frozen=True)
class JetTerm:
    coeff: Fraction
    jets: tuple
    symbol: object

    @property
    def homogeneity(self) -> int:
        return self.symbol.homogeneity


@dataclass
class JetSymbol:
    """Sum of ``coeff * prod(jets) * symbol`` terms."""

    n: int
    terms: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.terms)

    def homogeneities(self) -> set:
        return {t.homogeneity for t in self.terms}

    def jet_bidegrees(self) -> set:
        out = set()
        for t in self.terms:
            orders = {j.tag: j.order for j in t.jets}
            out.add((orders.get("f", 0), orders.get("h", 0)))
        return out


def _sigma(n: int) -> MatrixSymbol:
    return leading_symbol_F(n)


def commutator_sigma(k: int, n: int, tower=None, tag: str = "f") -> JetSymbol:
    """Order ``-k`` part of the symbol of ``[S, f]``.

    ``tower(j)`` returns the order ``-j`` symbol of S; by default the flat sign
    operator, whose lower-order symbols vanish, so only ``|beta| = k`` survives.
    """
    if k < 1:
        raise ValueError("commutator symbols start at order -1")
    if tower is None:
        lead = _sigma(n)

        def tower(j):
            return lead if j == 0 else None
    out = JetSymbol(n)
    for order in range(1, k + 1):
        source = tower(k - order)
        if source is None:
            continue
        for beta in multi_indices(n, order):
            part = source.xi_derivative(beta)
            if part.is_zero():
                continue
            out.terms.append(JetTerm(Fraction(1, mi_factorial(beta)), (JetMonomial(tag, beta),), part))
    return out


def sigma_minus_n_product(n: int) -> JetSymbol:
    """Order ``-n`` symbol of ``[F,f][F,h]`` in the flat case.

    Sum over ``|alpha|+|beta|+|delta| = n``, ``|beta|, |delta| >= 1`` of
    ``D^beta(f) D^(alpha+delta)(h) d^(alpha+beta) sigma d^delta sigma / (alpha! beta! delta!)``.
    Symbol parts are lazy pair products.
    """
    if n % 2:
        raise ValueError("n must be even")
    out = JetSymbol(n)
    for alpha, beta, delta in enumerate_splits(n, n, (0, 1, 1)):
        c = Fraction(1, mi_factorial(alpha) * mi_factorial(beta) * mi_factorial(delta))
        jets = (JetMonomial("f", beta), JetMonomial("h", mi_add(alpha, delta)))
        out.terms.append(JetTerm(c, jets, SymbolPairProduct(n, mi_add(alpha, beta), delta)))
    return out


# ---------------------------------------------------------------------------
# traces and sphere integrals of pair products

@lru_cache(maxsize=None)
def _unit_symbol(n: int, p: tuple) -> RationalSymbol:
    i, j = p
    m = [0] * n
    m[i] += 1
    m[j] += 1
    return RationalSymbol(n, {(tuple(m), 1): Fraction(1)}, 0)


@lru_cache(maxsize=None)
def _unit_derivative(n: int, p: tuple, gamma: tuple) -> RationalSymbol:
    if not any(gamma):
        return _unit_symbol(n, p)
    last = max(i for i, g in enumerate(gamma) if g)
    prev = gamma[:last] + (gamma[last] - 1,) + gamma[last + 1:]
    return _unit_derivative(n, p, prev).xi_derivative(last)


@lru_cache(maxsize=None)
def _unit_derivative_on_sphere(n: int, p: tuple, gamma: tuple) -> dict:
    return _unit_derivative(n, p, gamma).sphere_polynomial()


def pair_trace_symbol(prod: SymbolPairProduct) -> RationalSymbol:
    """``tr(d^gamma sigma d^delta sigma)`` as a scalar symbol, via ``tr(K_p K_q)``."""
    n = prod.n
    total = RationalSymbol.zero(n, prod.homogeneity)
    for (p, q), t in pair_trace_table(n).items():
        total = total + (_unit_derivative(n, p, prod.gamma) * _unit_derivative(n, q, prod.delta)).scale(t)
    return total


def _canonical_pair(gamma: tuple, delta: tuple) -> tuple:
    cols = sorted(zip(gamma, delta), reverse=True)
    return tuple(c[0] for c in cols), tuple(c[1] for c in cols)


@lru_cache(maxsize=None)
def _integrated_pair_trace(n: int, gamma: tuple, delta: tuple) -> Fraction:
    total = Fraction(0)
    for (p, q), t in pair_trace_table(n).items():
        total += t * integrate_product(_unit_derivative_on_sphere(n, p, gamma),
                                       _unit_derivative_on_sphere(n, q, delta), n)
    return total


def integrated_pair_trace(n: int, gamma: tuple, delta: tuple, exploit_symmetry: bool = True) -> Fraction:
    """Sphere mean of ``tr(d^gamma sigma d^delta sigma)``.

    With ``exploit_symmetry`` the reflection parity zero and the coordinate
    permutation invariance are used; without it every pair is computed as is.
    """
    if exploit_symmetry:
        if any((g + d) % 2 for g, d in zip(gamma, delta)):
            return Fraction(0)
        gamma, delta = _canonical_pair(gamma, delta)
    return _integrated_pair_trace(n, tuple(gamma), tuple(delta))


def trace_density(js: JetSymbol) -> JetSymbol:
    """Matrix trace of every symbol part."""
    out = JetSymbol(js.n)
    for t in js.terms:
        sym = t.symbol
        if isinstance(sym, SymbolPairProduct):
            scalar = pair_trace_symbol(sym)
        elif isinstance(sym, MatrixSymbol):
            scalar = sym.trace()
        elif isinstance(sym, RationalSymbol):
            raise ValueError("trace of a scalar symbol part; expected a matrix")
        else:
            raise TypeError(f"unknown symbol part {type(sym).__name__}")
        out.terms.append(JetTerm(t.coeff, t.jets, scalar))
    return out


def integrate_jet_symbol(js: JetSymbol) -> dict:
    """Integrate scalar symbol parts over the sphere; returns ``{jets: coefficient}``."""
    out: dict = {}
    for t in js.terms:
        v = t.coeff * integrate_symbol(t.symbol, js.n)
        if v:
            out[t.jets] = out.get(t.jets, 0) + v
    return {k: v for k, v in out.items() if v}

