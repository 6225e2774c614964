"""Exact rational arithmetic, multi-index combinatorics and small exact linear algebra.

Every coefficient in the package is a :class:`fractions.Fraction`; nothing is
ever rounded.  Multi-indices are plain tuples of non-negative ints.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterator, Sequence

BigRational = Fraction

MultiIndex = tuple


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not text:
        raise ValueError("empty rational")
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed rational {text!r}; expected 'p' or 'p/q'") from exc


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# --------------------------------------------------------------------------
# multi-indices

def mi_factorial(alpha: Sequence[int]) -> int:
    out = 1
    for a in alpha:
        out *= math.factorial(a)
    return out


def mi_order(alpha: Sequence[int]) -> int:
    return sum(alpha)


def mi_add(*alphas: Sequence[int]) -> tuple:
    return tuple(sum(parts) for parts in zip(*alphas))


def mi_sub(alpha: Sequence[int], beta: Sequence[int]) -> tuple:
    out = tuple(a - b for a, b in zip(alpha, beta))
    if min(out, default=0) < 0:
        raise ValueError(f"{tuple(beta)} is not below {tuple(alpha)}")
    return out


def mi_leq(alpha: Sequence[int], beta: Sequence[int]) -> bool:
    return all(a <= b for a, b in zip(alpha, beta))


def unit(dim: int, i: int) -> tuple:
    return tuple(1 if k == i else 0 for k in range(dim))


def binomial(n: int, k: int) -> int:
    """C(n, k), zero outside 0 <= k <= n."""
    if n < 0:
        raise ValueError("binomial needs n >= 0")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def mi_binomial(alpha: Sequence[int], beta: Sequence[int]) -> int:
    out = 1
    for a, b in zip(alpha, beta):
        out *= binomial(a, b)
    return out


def multi_indices(dim: int, order: int) -> Iterator[tuple]:
    """All multi-indices of exactly ``order`` in ``dim`` variables, lexicographically descending
    in the first entry (so ``(order, 0, ...)`` comes first)."""
    if dim == 0:
        if order == 0:
            yield ()
        return
    if dim == 1:
        yield (order,)
        return
    for first in range(order, -1, -1):
        for rest in multi_indices(dim - 1, order - first):
            yield (first,) + rest


def multi_indices_upto(dim: int, order: int) -> Iterator[tuple]:
    for k in range(order + 1):
        yield from multi_indices(dim, k)


def sub_indices(alpha: Sequence[int]) -> Iterator[tuple]:
    """Every beta <= alpha componentwise."""
    yield from itertools.product(*(range(a + 1) for a in alpha))


def count_multi_indices(dim: int, order: int) -> int:
    return math.comb(order + dim - 1, dim - 1) if dim > 0 else int(order == 0)


def enumerate_splits(n: int, dim: int, min_orders: Sequence[int]) -> Iterator[tuple]:
    """Yield every tuple of ``len(min_orders)`` multi-indices whose orders add up to ``n``
    with slot ``s`` of order at least ``min_orders[s]``.

    Order: lexicographic on the concatenated multi-indices, descending, i.e. the
    tuple ``((n,0..),(0..),...)`` first when it is admissible.  Each tuple appears
    exactly once.
    """
    if n < 0:
        return
    slots = len(min_orders)

    def orders(total: int, k: int) -> Iterator[tuple]:
        if k == slots - 1:
            if total >= min_orders[k]:
                yield (total,)
            return
        tail_min = sum(min_orders[k + 1:])
        for first in range(total - tail_min, min_orders[k] - 1, -1):
            for rest in orders(total - first, k + 1):
                yield (first,) + rest

    if slots == 0:
        if n == 0:
            yield ()
        return
    found = []
    for ords in orders(n, 0):
        for combo in itertools.product(*(tuple(multi_indices(dim, o)) for o in ords)):
            found.append(combo)
    found.sort(key=lambda combo: tuple(itertools.chain.from_iterable(combo)), reverse=True)
    yield from found


# --------------------------------------------------------------------------
# exact linear algebra over Q

def rref(rows: Sequence[Sequence[Fraction]], ncols: int | None = None):
    """Reduced row echelon form.  Returns (matrix, pivot_columns)."""
    m = [[Fraction(x) for x in row] for row in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Basis of {x : rows @ x = 0}."""
    reduced, pivots = rref(rows, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for row, pc in zip(reduced, pivots):
            vec[pc] = -row[fc]
        basis.append(vec)
    return basis


class InconsistentSystem(ValueError):
    """Raised by :func:`solve_linear` with the offending row combination attached."""

    def __init__(self, message: str, combination):
        super().__init__(message)
        self.combination = combination


def solve_linear(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction], ncols: int):
    """Solve rows @ x = rhs exactly.

    Returns ``(particular, pivots, free_columns, reduced_rows)``; raises
    :class:`InconsistentSystem` carrying the multipliers of the original rows that
    produce ``0 = nonzero``.
    """
    nrows = len(rows)
    aug = [[Fraction(x) for x in row] + [Fraction(b)] + [Fraction(int(i == j)) for j in range(nrows)]
           for i, (row, b) in enumerate(zip(rows, rhs))]
    width = ncols + 1 + nrows
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if aug[i][c] != 0), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(nrows):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    for i in range(r, nrows):
        if aug[i][ncols] != 0:
            raise InconsistentSystem("inconsistent linear system", aug[i][ncols + 1:width])
    x = [Fraction(0)] * ncols
    for i, pc in enumerate(pivots):
        x[pc] = aug[i][ncols]
    free = [c for c in range(ncols) if c not in pivots]
    return x, pivots, free, [row[:ncols + 1] for row in aug[:r]]
