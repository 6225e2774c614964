"""Exact integrals of polynomials over the unit sphere, normalized to total mass 1."""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .symbols import RationalSymbol


def double_factorial(k: int) -> int:
    """k!! with (-1)!! = 0!! = 1."""
    if k <= 0:
        return 1
    return math.prod(range(k, 0, -2))


@lru_cache(maxsize=None)
def _moment_sorted(alpha: tuple, n: int) -> Fraction:
    num = 1
    for a in alpha:
        num *= double_factorial(a - 1)
    return Fraction(num * double_factorial(n - 2), double_factorial(n + sum(alpha) - 2))


def moment(alpha, n: int | None = None) -> Fraction:
    """Mean of ``xi^alpha`` over the unit sphere in R^n.

    Zero when any exponent is odd; otherwise
    ``prod (alpha_i - 1)!! * (n-2)!! / (n + |alpha| - 2)!!``.
    """
    alpha = tuple(int(a) for a in alpha)
    if n is None:
        n = len(alpha)
    if n < 1:
        raise ValueError("sphere dimension needs n >= 1")
    if len(alpha) > n:
        raise ValueError("exponent longer than the dimension")
    if any(a % 2 for a in alpha):
        return Fraction(0)
    # canonical key: moments are invariant under coordinate permutations
    return _moment_sorted(tuple(sorted(a for a in alpha if a)), n)


def integrate_poly(p: Mapping[tuple, Fraction], n: int | None = None) -> Fraction:
    total = Fraction(0)
    for m, c in p.items():
        if c:
            total += c * moment(m, n if n is not None else len(m))
    return total


def integrate_symbol(s: RationalSymbol, n: int | None = None) -> Fraction:
    """On the unit sphere every ``|xi|^(-2k)`` is 1, so only the numerators matter."""
    return integrate_poly(s.sphere_polynomial(), n if n is not None else s.dim)


def integrate_product(p: Mapping[tuple, Fraction], q: Mapping[tuple, Fraction], n: int) -> Fraction:
    """Sphere mean of ``p * q`` without building the product polynomial.

    Only exponent pairs with matching parity classes can give an even sum,
    so ``q`` is bucketed by parity first.
    """
    buckets: dict = {}
    for m, c in q.items():
        buckets.setdefault(tuple(e & 1 for e in m), []).append((m, c))
    total = Fraction(0)
    for m1, c1 in p.items():
        for m2, c2 in buckets.get(tuple(e & 1 for e in m1), ()):
            total += c1 * c2 * moment(tuple(a + b for a, b in zip(m1, m2)), n)
    return total


def sphere_area_factor(n: int):
    """Area of the unit sphere in R^n as ``(rational, power_of_pi)``.

    Multiply a normalized-measure result by ``rational * pi**power`` to get the
    unnormalized integral.
    """
    if n % 2 == 0:
        # 2 pi^(n/2) / (n/2 - 1)!
        return Fraction(2, math.factorial(n // 2 - 1)), n // 2
    # 2^((n+1)/2) pi^((n-1)/2) / (n-2)!!
    return Fraction(2 ** ((n + 1) // 2), double_factorial(n - 2)), (n - 1) // 2
