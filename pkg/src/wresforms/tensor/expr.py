"""Abstract-index tensor polynomials.

A monomial is a tuple of :class:`Factor`; an index label that occurs twice in a
monomial is summed (the metric raises and lowers silently, so variance is not
stored).  :class:`TensorExpr` maps monomials to rational coefficients.
"""
from __future__ import annotations

import itertools
from itertools import combinations
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

FUNCTION_HEADS = ("f0", "f1", "f2", "f3", "f", "h", "eta")
CURVATURE_HEADS = ("J", "V", "W", "R", "Rc", "Sc")
SLOT_COUNT = {"g": 2, "V": 2, "W": 4, "R": 4, "Rc": 2, "J": 0, "Sc": 0}
for _h in FUNCTION_HEADS:
    SLOT_COUNT[_h] = 0
HEAD_ORDER = ("f0", "f1", "f2", "f3", "f", "h", "eta", "J", "V", "W", "R", "Rc", "Sc", "g")
HEAD_RANK = {h: i for i, h in enumerate(HEAD_ORDER)}

_fresh = itertools.count()


def fresh_label() -> str:
    """Internal summation label; cannot collide with parsed labels."""
    return f"~{next(_fresh)}"


@dataclass(frozen=True, order=True)
class Factor:
    head: str
    slots: tuple = ()
    derivs: tuple = ()

    def __post_init__(self):
        if self.head not in SLOT_COUNT:
            raise ValueError(f"unknown head {self.head!r}")
        if len(self.slots) != SLOT_COUNT[self.head]:
            raise ValueError(f"{self.head} takes {SLOT_COUNT[self.head]} slot indices, got {len(self.slots)}")
        if self.head == "g" and self.derivs:
            pass  # allowed syntactically; the metric is parallel so normal forms drop it

    @property
    def indices(self) -> tuple:
        return self.slots + self.derivs

    def relabel(self, mapping: dict) -> Factor:
        return Factor(self.head,
                      tuple(mapping.get(x, x) for x in self.slots),
                      tuple(mapping.get(x, x) for x in self.derivs))

    def with_indices(self, labels) -> Factor:
        labels = tuple(labels)
        k = len(self.slots)
        return Factor(self.head, labels[:k], labels[k:])

    def differentiate(self, label: str) -> Factor:
        return Factor(self.head, self.slots, self.derivs + (label,))

    @property
    def shape(self) -> tuple:
        return (HEAD_RANK[self.head], len(self.slots), len(self.derivs))


def label_counts(factors: Iterable[Factor]) -> Counter:
    c: Counter = Counter()
    for fac in factors:
        c.update(fac.indices)
    return c


def free_labels(factors: Iterable[Factor]) -> tuple:
    c = label_counts(factors)
    bad = [x for x, k in c.items() if k > 2]
    if bad:
        raise ValueError(f"index {bad[0]!r} occurs more than twice")
    return tuple(sorted(x for x, k in c.items() if k == 1))


def dummy_labels(factors: Iterable[Factor]) -> set:
    return {x for x, k in label_counts(factors).items() if k == 2}


def rename_dummies(factors: tuple, avoid: set | None = None) -> tuple:
    """Give every summed label a fresh internal name."""
    mapping = {d: fresh_label() for d in dummy_labels(factors)}
    return tuple(f.relabel(mapping) for f in factors)


def filtration_degrees(factors: Iterable[Factor]) -> tuple:
    """``(k_R, k_nabla)``: curvature factors count once each toward ``k_R``;
    every derivative index (on functions and on curvature) counts toward ``k_nabla``."""
    k_r = k_d = 0
    for fac in factors:
        if fac.head in CURVATURE_HEADS:
            k_r += 1
        if fac.head != "g":
            k_d += len(fac.derivs)
    return k_r, k_d


def derivative_level(factors: Iterable[Factor]) -> int:
    return sum(len(f.derivs) for f in factors)


class TensorExpr:
    """Sum of monomials with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for factors, c in items:
                self.add_term(tuple(factors), c)

    # construction
    @classmethod
    def monomial(cls, factors, coeff=1) -> TensorExpr:
        return cls([(tuple(factors), Fraction(coeff))])

    @classmethod
    def zero(cls) -> TensorExpr:
        return cls()

    def add_term(self, factors: tuple, coeff) -> None:
        coeff = Fraction(coeff)
        if not coeff:
            return
        new = self.terms.get(factors, 0) + coeff
        if new:
            self.terms[factors] = new
        else:
            self.terms.pop(factors, None)

    def copy(self) -> TensorExpr:
        out = TensorExpr()
        out.terms = dict(self.terms)
        return out

    # arithmetic
    def __add__(self, other: TensorExpr) -> TensorExpr:
        out = self.copy()
        for k, c in other.terms.items():
            out.add_term(k, c)
        return out

    def __iadd__(self, other: TensorExpr) -> TensorExpr:
        for k, c in other.terms.items():
            self.add_term(k, c)
        return self

    def __neg__(self) -> TensorExpr:
        return self.scale(-1)

    def __sub__(self, other: TensorExpr) -> TensorExpr:
        return self + other.scale(-1)

    def scale(self, c) -> TensorExpr:
        c = Fraction(c)
        out = TensorExpr()
        if c:
            out.terms = {k: v * c for k, v in self.terms.items()}
        return out

    def __rmul__(self, c) -> TensorExpr:
        return self.scale(c)

    def __mul__(self, other) -> TensorExpr:
        if not isinstance(other, TensorExpr):
            return self.scale(other)
        return multiply(self, other)

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def items(self):
        return self.terms.items()

    # structure
    def free_indices(self) -> tuple:
        frees = {free_labels(k) for k in self.terms}
        if len(frees) > 1:
            raise ValueError(f"terms have different free indices: {sorted(frees)}")
        return next(iter(frees)) if frees else ()

    def heads(self) -> set:
        return {f.head for k in self.terms for f in k}

    def contains_head(self, head: str) -> bool:
        return any(f.head == head for k in self.terms for f in k)

    def map_factors(self, fn) -> TensorExpr:
        out = TensorExpr()
        for k, c in self.terms.items():
            out.add_term(tuple(fn(f) for f in k), c)
        return out

    def relabel(self, mapping: dict) -> TensorExpr:
        return self.map_factors(lambda f: f.relabel(mapping))

    def swap_tags(self, a: str, b: str) -> TensorExpr:
        swap = {a: b, b: a}
        return self.map_factors(lambda f: Factor(swap.get(f.head, f.head), f.slots, f.derivs))

    def __repr__(self) -> str:
        from .format import to_text

        return f"TensorExpr({to_text(self)})"


def multiply(a: TensorExpr, b: TensorExpr) -> TensorExpr:
    """Product; summed labels are renamed apart, shared free labels become summed."""
    out = TensorExpr()
    for ka, ca in a.terms.items():
        ka = rename_dummies(ka)
        for kb, cb in b.terms.items():
            kb = rename_dummies(kb)
            out.add_term(ka + kb, ca * cb)
    return out


def covariant_derivative(e: TensorExpr, label: str) -> TensorExpr:
    """``nabla_label`` by the Leibniz rule; the new index goes last on each factor."""
    out = TensorExpr()
    for k, c in e.terms.items():
        for pos, fac in enumerate(k):
            if fac.head == "g":
                continue
            out.add_term(k[:pos] + (fac.differentiate(label),) + k[pos + 1:], c)
    return out


def covariant_derivatives(e: TensorExpr, labels) -> TensorExpr:
    for lab in labels:
        e = covariant_derivative(e, lab)
    return e


def contract(e: TensorExpr, a: str, b: str) -> TensorExpr:
    """Identify two free labels."""
    return e.relabel({b: a})


def from_factors(*factors: Factor, coeff=1) -> TensorExpr:
    return TensorExpr.monomial(factors, coeff)


def fn(head: str, *derivs: str) -> Factor:
    return Factor(head, (), tuple(derivs))


def leibniz_substitute(expr: TensorExpr, head: str, product: tuple) -> TensorExpr:
    """Replace the function ``head`` by the product of the two heads in ``product``."""
    a, b = product
    out = TensorExpr()
    for k, c in expr.items():
        terms = [((), c)]
        for fac in k:
            if fac.head != head:
                terms = [(t + (fac,), cc) for t, cc in terms]
                continue
            n = len(fac.derivs)
            split = []
            for s in range(n + 1):
                for left in combinations(range(n), s):
                    da = tuple(fac.derivs[i] for i in left)
                    db = tuple(fac.derivs[i] for i in range(n) if i not in left)
                    split.append((Factor(a, (), da), Factor(b, (), db)))
            terms = [(t + pair, cc) for t, cc in terms for pair in split]
        for t, cc in terms:
            out.add_term(t, cc)
    return out
