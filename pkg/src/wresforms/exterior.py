"""Exterior algebra of C^n as explicit matrices: wedge and contraction by a covector,
the leading symbol of the sign operator on middle-degree forms, and its pair trace."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .exact import binomial
from .symbols import RationalSymbol, _add_into


@lru_cache(maxsize=None)
def form_basis(n: int, k: int) -> tuple:
    """Increasing k-subsets of range(n), in lexicographic order."""
    return tuple(itertools.combinations(range(n), k))


def _basis_position(n: int, k: int) -> dict:
    return {s: p for p, s in enumerate(form_basis(n, k))}


@lru_cache(maxsize=None)
def wedge_units(n: int, k: int) -> tuple:
    """Integer matrices ``E_i`` for ``e^i ^ . : L^k -> L^(k+1)``.

    ``e^i ^ e^S = sign * e^(S+i)`` where sign is the parity of the number of
    elements of S below i (the shuffle putting i into place).
    """
    if not 0 <= k < n:
        raise ValueError(f"wedge needs 0 <= k < n, got k={k}, n={n}")
    src = form_basis(n, k)
    dst = _basis_position(n, k + 1)
    mats = []
    for i in range(n):
        E = np.zeros((len(dst), len(src)), dtype=np.int64)
        for col, s in enumerate(src):
            if i in s:
                continue
            below = sum(1 for t in s if t < i)
            E[dst[tuple(sorted(s + (i,)))], col] = -1 if below % 2 else 1
        mats.append(E)
    return tuple(mats)


@lru_cache(maxsize=None)
def contraction_units(n: int, k: int) -> tuple:
    """Integer matrices ``I_i`` for contraction with the i-th basis vector ``L^k -> L^(k-1)``.

    With the orthonormal basis the contraction is the transpose of the wedge.
    """
    if not 0 < k <= n:
        raise ValueError(f"contraction needs 0 < k <= n, got k={k}, n={n}")
    return tuple(E.T.copy() for E in wedge_units(n, k - 1))


@dataclass(frozen=True)
class MatrixSymbol:
    """A matrix of rational symbols, all entries of one homogeneity.

    Stored sparsely: ``entries`` maps (row, col) to a nonzero RationalSymbol.
    """

    dim: int
    shape: tuple
    entries: dict
    homogeneity: int | None = None
    degree: int | None = None

    def __post_init__(self):
        degs = {s.homogeneity for s in self.entries.values() if not s.is_zero()}
        if len(degs) > 1:
            raise ValueError(f"entries of mixed homogeneity {sorted(degs)}")
        if degs and self.homogeneity is None:
            object.__setattr__(self, "homogeneity", next(iter(degs)))
        elif degs and self.homogeneity != next(iter(degs)):
            raise ValueError("declared homogeneity disagrees with entries")

    @classmethod
    def from_linear(cls, dim: int, units, degree=None) -> MatrixSymbol:
        """``sum_i xi_i * units[i]`` for integer matrices ``units``."""
        entries: dict = {}
        for i, U in enumerate(units):
            for (r, c) in zip(*np.nonzero(U)):
                m = tuple(1 if t == i else 0 for t in range(dim))
                entries.setdefault((int(r), int(c)), {})
                _add_into(entries[(int(r), int(c))], (m, 0), Fraction(int(U[r, c])))
        sym = {rc: RationalSymbol(dim, t, 1) for rc, t in entries.items() if t}
        return cls(dim, tuple(units[0].shape), sym, 1, degree)

    @classmethod
    def identity(cls, dim: int, size: int, scale: RationalSymbol | None = None) -> MatrixSymbol:
        s = scale if scale is not None else RationalSymbol.constant(dim)
        return cls(dim, (size, size), {(i, i): s for i in range(size)}, s.homogeneity)

    def __matmul__(self, other: MatrixSymbol) -> MatrixSymbol:
        if self.shape[1] != other.shape[0]:
            raise ValueError("shape mismatch")
        by_row: dict = {}
        for (r, c), s in other.entries.items():
            by_row.setdefault(r, []).append((c, s))
        out: dict = {}
        for (r, k), s in self.entries.items():
            for c, t in by_row.get(k, ()):
                prod = s * t
                out[(r, c)] = out[(r, c)] + prod if (r, c) in out else prod
        out = {rc: s for rc, s in out.items() if not s.is_zero()}
        hom = None
        if self.homogeneity is not None and other.homogeneity is not None:
            hom = self.homogeneity + other.homogeneity
        return MatrixSymbol(self.dim, (self.shape[0], other.shape[1]), out, hom)

    def __add__(self, other: MatrixSymbol) -> MatrixSymbol:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        out = dict(self.entries)
        for rc, s in other.entries.items():
            out[rc] = out[rc] + s if rc in out else s
        out = {rc: s for rc, s in out.items() if not s.is_zero()}
        return MatrixSymbol(self.dim, self.shape, out,
                            self.homogeneity if self.homogeneity is not None else other.homogeneity)

    def __neg__(self) -> MatrixSymbol:
        return MatrixSymbol(self.dim, self.shape, {rc: -s for rc, s in self.entries.items()},
                            self.homogeneity)

    def __sub__(self, other: MatrixSymbol) -> MatrixSymbol:
        return self + (-other)

    def scale(self, s: RationalSymbol) -> MatrixSymbol:
        out = {rc: e * s for rc, e in self.entries.items()}
        out = {rc: e for rc, e in out.items() if not e.is_zero()}
        hom = None if self.homogeneity is None or s.homogeneity is None else self.homogeneity + s.homogeneity
        return MatrixSymbol(self.dim, self.shape, out, hom)

    def map_entries(self, fn) -> MatrixSymbol:
        out = {rc: fn(s) for rc, s in self.entries.items()}
        return MatrixSymbol(self.dim, self.shape, {rc: s for rc, s in out.items() if not s.is_zero()})

    def xi_derivative(self, alpha) -> MatrixSymbol:
        return self.map_entries(lambda s: s.derivative(alpha))

    def is_zero(self) -> bool:
        return all(s.is_zero() for s in self.entries.values())

    def equals(self, other: MatrixSymbol) -> bool:
        return self.shape == other.shape and (self - other).is_zero()

    def trace(self) -> RationalSymbol:
        if self.shape[0] != self.shape[1]:
            raise ValueError(f"trace of a non-square {self.shape} matrix")
        total = RationalSymbol.zero(self.dim, self.homogeneity)
        for (r, c), s in self.entries.items():
            if r == c:
                total = total + s
        return total

    def column_support(self, col: int) -> list:
        return sorted(r for (r, c), s in self.entries.items() if c == col and not s.is_zero())


def epsilon_matrix(n: int, k: int) -> MatrixSymbol:
    """Wedge with xi, ``L^k -> L^(k+1)``, entries ``+-xi_i``."""
    return MatrixSymbol.from_linear(n, wedge_units(n, k), k)


def iota_matrix(n: int, k: int) -> MatrixSymbol:
    """Contraction with xi, ``L^k -> L^(k-1)``."""
    return MatrixSymbol.from_linear(n, contraction_units(n, k), k)


def _middle(n: int) -> int:
    if n % 2:
        raise ValueError(f"the sign operator acts on middle-degree forms; n={n} is odd")
    if n < 2:
        raise ValueError("need n >= 2")
    return n // 2


def leading_symbol_F(n: int) -> MatrixSymbol:
    """``|xi|^-2 (eps iota - iota eps)`` on ``L^(n/2)``."""
    k = _middle(n)
    eps_k, iota_k = epsilon_matrix(n, k), iota_matrix(n, k)
    eps_km1, iota_kp1 = epsilon_matrix(n, k - 1), iota_matrix(n, k + 1)
    inner = eps_km1 @ iota_k - iota_kp1 @ eps_k
    inv_r2 = RationalSymbol(n, {((0,) * n, 1): Fraction(1)}, -2)
    return inner.scale(inv_r2)


@lru_cache(maxsize=None)
def symbol_units(n: int) -> dict:
    """Integer matrices ``K_ij`` (i <= j) with ``sigma_L = sum_(i<=j) q_ij K_ij``,
    ``q_ij = xi_i xi_j / |xi|^2``.  Off-diagonal entries fold ``K_ij + K_ji``."""
    k = _middle(n)
    E_lo, I_mid = wedge_units(n, k - 1), contraction_units(n, k)
    E_mid, I_hi = wedge_units(n, k), contraction_units(n, k + 1)
    raw = {}
    for i in range(n):
        for j in range(n):
            raw[(i, j)] = E_lo[i] @ I_mid[j] - I_hi[j] @ E_mid[i]
    units = {}
    for i in range(n):
        for j in range(i, n):
            M = raw[(i, j)] if i == j else raw[(i, j)] + raw[(j, i)]
            if M.any():
                units[(i, j)] = M
    return units


@lru_cache(maxsize=None)
def pair_trace_table(n: int) -> dict:
    """``tr(K_p K_q)`` for the folded units, nonzero entries only."""
    units = symbol_units(n)
    out = {}
    for p, A in units.items():
        for q, B in units.items():
            t = int(np.einsum("ij,ji->", A, B))
            if t:
                out[(p, q)] = t
    return out


def binomial_trace_constants(n: int) -> tuple:
    """Closed form ``(a, b)``: ``b = C(n-2,m-2) + C(n-2,m) - 2 C(n-2,m-1)``, ``a = C(n,m) - b``."""
    m = _middle(n)
    b = binomial(n - 2, m - 2) + binomial(n - 2, m) - 2 * binomial(n - 2, m - 1)
    return Fraction(binomial(n, m) - b), Fraction(b)


class TraceMismatch(RuntimeError):
    pass


@lru_cache(maxsize=None)
def trace_pair(n: int) -> tuple:
    """``(a, b)`` with ``tr(sigma(xi) sigma(eta)) = a <xi,eta>^2/(|xi|^2|eta|^2) + b``.

    The left side is built from the explicit matrices as a polynomial
    ``sum T[p,q] xi_p xi'_q eta_r eta'_s`` over ``|xi|^2 |eta|^2``; it is matched
    exactly against ``a <xi,eta>^2 + b |xi|^2 |eta|^2``.
    """
    table = pair_trace_table(n)
    lhs: dict = {}
    for ((i, j), (k, l)), t in table.items():
        key = (tuple(sorted((i, j))), tuple(sorted((k, l))))
        lhs[key] = lhs.get(key, 0) + t
    dot2: dict = {}
    norms: dict = {}
    for i in range(n):
        for j in range(n):
            key = (tuple(sorted((i, j))), tuple(sorted((i, j))))
            dot2[key] = dot2.get(key, 0) + 1
            nkey = ((i, i), (j, j))
            norms[nkey] = norms.get(nkey, 0) + 1
    # solve from two monomials, then confirm on every monomial
    probe_dot = ((0, 1), (0, 1))
    probe_norm = ((0, 0), (1, 1))
    a = Fraction(lhs.get(probe_dot, 0), dot2[probe_dot])
    b = Fraction(lhs.get(probe_norm, 0) - a * dot2.get(probe_norm, 0), norms[probe_norm])
    keys = set(lhs) | set(dot2) | set(norms)
    for key in keys:
        expect = a * dot2.get(key, 0) + b * norms.get(key, 0)
        if expect != lhs.get(key, 0):
            raise TraceMismatch(f"pair trace is not of the form a<xi,eta>^2 + b at {key}")
    return a, b
