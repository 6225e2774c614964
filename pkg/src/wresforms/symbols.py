"""Homogeneous rational symbols in the cotangent variable.

A symbol is stored as a finite sum ``sum c * xi^m * |xi|^(-2k)`` with
``|m| - 2k`` equal to a fixed homogeneity.  That family is closed under
``d/dxi_i``, which is all the symbol calculus needs; a reduced
``numerator / |xi|^(2K)`` form is available for display and equality tests.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .exact import unit


def _add_into(target: dict, key, value) -> None:
    if not value:
        return
    new = target.get(key, 0) + value
    if new:
        target[key] = new
    else:
        target.pop(key, None)


def poly_mul(p: Mapping[tuple, Fraction], q: Mapping[tuple, Fraction]) -> dict:
    out: dict = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            _add_into(out, tuple(a + b for a, b in zip(m1, m2)), c1 * c2)
    return out


def norm_squared_poly(dim: int) -> dict:
    """The polynomial ``|xi|^2``."""
    return {tuple(2 * e for e in unit(dim, i)): Fraction(1) for i in range(dim)}


def divide_by_norm_squared(p: Mapping[tuple, Fraction], dim: int):
    """Divide by ``|xi|^2``; returns ``(quotient, remainder)``.

    ``|xi|^2`` is monic of degree 2 in ``xi_1``, so long division in that
    variable terminates with a remainder of ``xi_1``-degree below 2.
    """
    rem = dict(p)
    quo: dict = {}
    while True:
        top = next((m for m in rem if m[0] >= 2), None)
        if top is None:
            return quo, rem
        c = rem[top]
        base = (top[0] - 2,) + top[1:]
        _add_into(quo, base, c)
        for i in range(dim):
            shifted = list(base)
            shifted[i] += 2
            _add_into(rem, tuple(shifted), -c)


class RationalSymbol:
    """``sum c * xi^m / |xi|^(2k)`` of constant homogeneity."""

    __slots__ = ("dim", "homogeneity", "terms")

    def __init__(self, dim: int, terms: Mapping[tuple, Fraction] | None = None,
                 homogeneity: int | None = None):
        self.dim = dim
        clean: dict = {}
        for (m, k), c in (terms or {}).items():
            if len(m) != dim:
                raise ValueError(f"exponent {m} has wrong length for dimension {dim}")
            _add_into(clean, (tuple(m), int(k)), Fraction(c))
        degrees = {sum(m) - 2 * k for (m, k) in clean}
        if len(degrees) > 1:
            raise ValueError(f"inhomogeneous symbol: degrees {sorted(degrees)}")
        if degrees:
            (deg,) = degrees
            if homogeneity is not None and homogeneity != deg:
                raise ValueError(f"declared homogeneity {homogeneity} but terms have {deg}")
            homogeneity = deg
        self.homogeneity = homogeneity
        self.terms = clean

    # -- constructors
    @classmethod
    def constant(cls, dim: int, c=1) -> RationalSymbol:
        return cls(dim, {((0,) * dim, 0): Fraction(c)}, 0)

    @classmethod
    def zero(cls, dim: int, homogeneity: int | None = None) -> RationalSymbol:
        return cls(dim, {}, homogeneity)

    @classmethod
    def monomial(cls, m: Iterable[int], k: int = 0, c=1) -> RationalSymbol:
        m = tuple(m)
        return cls(len(m), {(m, k): Fraction(c)})

    @classmethod
    def from_polynomial(cls, poly: Mapping[tuple, Fraction], pole: int = 0) -> RationalSymbol:
        poly = dict(poly)
        dim = len(next(iter(poly))) if poly else 0
        return cls(dim, {(m, pole): c for m, c in poly.items()})

    # -- arithmetic
    def is_zero(self) -> bool:
        return not self.expanded_numerator()[0]

    def __bool__(self) -> bool:
        return not self.is_zero()

    def _check(self, other: RationalSymbol) -> None:
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")

    def __add__(self, other: RationalSymbol) -> RationalSymbol:
        self._check(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            _add_into(out, key, c)
        hom = self.homogeneity if self.homogeneity is not None else other.homogeneity
        return RationalSymbol(self.dim, out, hom if not out else None)

    def __neg__(self) -> RationalSymbol:
        return RationalSymbol(self.dim, {k: -c for k, c in self.terms.items()}, self.homogeneity)

    def __sub__(self, other: RationalSymbol) -> RationalSymbol:
        return self + (-other)

    def scale(self, c) -> RationalSymbol:
        c = Fraction(c)
        if not c:
            return RationalSymbol.zero(self.dim, self.homogeneity)
        return RationalSymbol(self.dim, {k: c * v for k, v in self.terms.items()}, self.homogeneity)

    def __mul__(self, other) -> RationalSymbol:
        if not isinstance(other, RationalSymbol):
            return self.scale(other)
        self._check(other)
        out: dict = {}
        for (m1, k1), c1 in self.terms.items():
            for (m2, k2), c2 in other.terms.items():
                _add_into(out, (tuple(a + b for a, b in zip(m1, m2)), k1 + k2), c1 * c2)
        hom = None
        if self.homogeneity is not None and other.homogeneity is not None:
            hom = self.homogeneity + other.homogeneity
        return RationalSymbol(self.dim, out, hom if not out else None)

    __rmul__ = scale

    def xi_derivative(self, i: int) -> RationalSymbol:
        """``d/dxi_i``; uses ``d |xi|^(-2k) = -2k xi_i |xi|^(-2k-2)``."""
        out: dict = {}
        for (m, k), c in self.terms.items():
            if m[i]:
                lowered = m[:i] + (m[i] - 1,) + m[i + 1:]
                _add_into(out, (lowered, k), c * m[i])
            if k:
                raised = m[:i] + (m[i] + 1,) + m[i + 1:]
                _add_into(out, (raised, k + 1), c * (-2 * k))
        hom = None if self.homogeneity is None else self.homogeneity - 1
        return RationalSymbol(self.dim, out, hom if not out else None)

    def derivative(self, alpha) -> RationalSymbol:
        out = self
        for i, a in enumerate(alpha):
            for _ in range(a):
                out = out.xi_derivative(i)
        return out

    # -- views
    def pole_order(self) -> int:
        return max((k for (_, k) in self.terms), default=0)

    def expanded_numerator(self):
        """``(N, K)`` with the symbol equal to ``N / |xi|^(2K)`` (not reduced)."""
        K = self.pole_order()
        out: dict = {}
        r2 = norm_squared_poly(self.dim)
        powers = {0: {(0,) * self.dim: Fraction(1)}}
        for (m, k), c in self.terms.items():
            e = K - k
            while e not in powers:
                top = max(powers)
                powers[top + 1] = poly_mul(powers[top], r2)
            for mm, cc in powers[e].items():
                _add_into(out, tuple(a + b for a, b in zip(m, mm)), c * cc)
        return out, K

    def normal_form(self):
        """Reduced ``(N, K)``: common ``|xi|^2`` factors cancelled."""
        num, K = self.expanded_numerator()
        while K > 0 and num:
            quo, rem = divide_by_norm_squared(num, self.dim)
            if rem:
                break
            num, K = quo, K - 1
        if not num:
            K = 0
        return num, K

    def sphere_polynomial(self) -> dict:
        """Restriction to ``|xi| = 1`` as a (non-homogeneous) polynomial."""
        out: dict = {}
        for (m, _k), c in self.terms.items():
            _add_into(out, m, c)
        return out

    def evaluate(self, xi) -> Fraction:
        xi = [Fraction(x) for x in xi]
        r2 = sum(x * x for x in xi)
        total = Fraction(0)
        for (m, k), c in self.terms.items():
            v = c
            for x, e in zip(xi, m):
                if e:
                    v *= x ** e
            total += v / r2 ** k
        return total

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalSymbol):
            return NotImplemented
        return self.dim == other.dim and (self - other).is_zero()

    def __hash__(self):
        num, K = self.normal_form()
        return hash((self.dim, K, frozenset(num.items())))

    def __repr__(self) -> str:
        num, K = self.normal_form()
        parts = []
        for m, c in sorted(num.items(), reverse=True):
            mono = "*".join(f"x{i + 1}^{e}" if e > 1 else f"x{i + 1}" for i, e in enumerate(m) if e)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        body = " + ".join(parts) or "0"
        return f"RationalSymbol(({body}) / |xi|^{2 * K})"
