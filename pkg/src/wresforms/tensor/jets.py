"""Numeric oracle: evaluate tensor expressions at a point on random jets.

A metric is given by its Taylor polynomial at the origin of R^d (with
``g(0) = identity``), functions by theirs.  Everything is computed modulo a prime
below 2^24 so that products fit in int64: Christoffel symbols, curvature,
the Schouten tensor V, its trace J and the Weyl tensor, and iterated covariant
derivatives (each new index appended last).  Exact rational values are recovered
by Chinese remaindering and rational reconstruction.

For the conformal variation a dual axis carries ``g_eps = (1 + 2 eps psi) g``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ..exact import multi_indices
from .expr import FUNCTION_HEADS, TensorExpr

PRIMES = (16777213, 16777199, 16777183, 16777153, 16777141, 16777139, 16777127,
          16777121, 16777099, 16777049, 16777027, 16776989)
_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


class PolyRing:
    """Truncated polynomials in ``dim`` variables, graded monomial order."""

    def __init__(self, dim: int, degree: int):
        self.dim = dim
        self.degree = degree
        monos = []
        for d in range(degree + 1):
            monos.extend(sorted(multi_indices(dim, d), reverse=True))
        self.monos = monos
        self.index = {m: i for i, m in enumerate(monos)}
        self.sizes = [math.comb(dim + d, d) for d in range(degree + 1)]
        self._pairs: dict = {}
        self._derivs: dict = {}

    def size(self, prec: int) -> int:
        return self.sizes[prec]

    def pairs(self, prec: int):
        if prec not in self._pairs:
            trip = []
            for c in range(self.sizes[prec]):
                mc = self.monos[c]
                for ma in itertools.product(*(range(k + 1) for k in mc)):
                    mb = tuple(x - y for x, y in zip(mc, ma))
                    trip.append((c, self.index[ma], self.index[mb]))
            trip.sort()
            cs = np.array([t[0] for t in trip])
            starts = np.flatnonzero(np.r_[True, cs[1:] != cs[:-1]])
            self._pairs[prec] = (np.array([t[1] for t in trip]), np.array([t[2] for t in trip]), starts)
        return self._pairs[prec]

    def deriv_map(self, prec: int, k: int):
        """For output precision ``prec``: source indices and factors of ``d/dx_k``."""
        key = (prec, k)
        if key not in self._derivs:
            src, fac = [], []
            for c in range(self.sizes[prec]):
                m = list(self.monos[c])
                m[k] += 1
                src.append(self.index[tuple(m)])
                fac.append(m[k])
            self._derivs[key] = (np.array(src), np.array(fac, dtype=np.int64))
        return self._derivs[key]


@lru_cache(maxsize=None)
def _ring(dim: int, degree: int) -> PolyRing:
    return PolyRing(dim, degree)


@dataclass
class Field:
    """Tensor of truncated polynomials; ``arr`` has shape ``(E, *comps, N_prec)``."""

    arr: np.ndarray
    prec: int

    @property
    def rank(self) -> int:
        return self.arr.ndim - 2

    @property
    def dual(self) -> bool:
        return self.arr.shape[0] == 2


class FieldAlgebra:
    def __init__(self, ring: PolyRing, p: int):
        self.ring = ring
        self.p = p

    def _einsum(self, spec, a, b):
        return np.einsum(spec, a, b) % self.p

    def mul(self, A: Field, B: Field, spec: str, prec: int | None = None) -> Field:
        """Componentwise einsum ``spec`` (component axes only) with polynomial product."""
        prec = min(A.prec, B.prec) if prec is None else min(prec, A.prec, B.prec)
        ia, ib, starts = self.ring.pairs(prec)
        lhs, out = spec.split("->")
        sa, sb = lhs.split(",")
        es = f"{sa}Z,{sb}Z->{out}Z"
        Ap = A.arr[..., ia]
        Bp = B.arr[..., ib]
        p = self.p

        def red(x):
            return np.add.reduceat(x, starts, axis=-1) % p

        v0 = red(self._einsum(es, Ap[0], Bp[0]))
        if not (A.dual or B.dual):
            return Field(v0[None], prec)
        parts = []
        if A.dual:
            parts.append(self._einsum(es, Ap[1], Bp[0]))
        if B.dual:
            parts.append(self._einsum(es, Ap[0], Bp[1]))
        v1 = red(sum(parts) % p)
        return Field(np.stack([v0, v1]), prec)

    def add(self, *fields: Field, signs=None) -> Field:
        prec = min(f.prec for f in fields)
        n = self.ring.size(prec)
        E = max(f.arr.shape[0] for f in fields)
        signs = signs or [1] * len(fields)
        out = None
        for f, s in zip(fields, signs):
            a = f.arr[..., :n]
            if a.shape[0] < E:
                a = np.concatenate([a, np.zeros_like(a)])
            out = s * a if out is None else out + s * a
        return Field(out % self.p, prec)

    def scale(self, f: Field, c: int) -> Field:
        return Field((f.arr * (c % self.p)) % self.p, f.prec)

    def partial(self, f: Field) -> Field:
        """All first partials; the new index is appended after the component axes."""
        if f.prec < 1:
            raise ValueError("not enough jet precision for another derivative")
        prec = f.prec - 1
        comps = []
        for k in range(self.ring.dim):
            src, fac = self.ring.deriv_map(prec, k)
            comps.append((f.arr[..., src] * fac) % self.p)
        return Field(np.stack(comps, axis=-2), prec)

    def truncate(self, f: Field, prec: int) -> Field:
        prec = min(prec, f.prec)
        return Field(f.arr[..., : self.ring.size(prec)], prec)


def _inv(a: int, p: int) -> int:
    return pow(a % p, p - 2, p)


def _mod(c, p: int) -> int:
    c = Fraction(c)
    return c.numerator % p * _inv(c.denominator, p) % p


@dataclass
class JetSample:
    """Random integer Taylor data defining a metric and scalar functions.

    ``kind`` is ``general`` (g = identity + random higher terms), ``cf``
    (``g = exp(2 u) identity`` with ``u(0) = 0``) or ``flat``.  ``vary`` names a
    function whose dual perturbation ``g_eps = (1 + 2 eps vary) g`` is carried.
    """

    seed: int = 0
    kind: str = "general"
    dim: int = 6
    degree: int = 8
    vary: str | None = None
    spread: int = 3
    functions: dict = field(default_factory=dict)
    conformal: list | None = None

    def __post_init__(self):
        if self.kind not in ("general", "cf", "flat"):
            raise ValueError(f"unknown jet kind {self.kind!r}")
        rng = np.random.default_rng(self.seed)
        n = math.comb(self.dim + self.degree, self.degree)
        s = self.spread
        m = rng.integers(-s, s + 1, size=(self.dim, self.dim, n))
        m = m + np.swapaxes(m, 0, 1)
        m[..., 0] = 0
        self.metric_coeffs = [[[int(x) for x in m[i, j]] for j in range(self.dim)] for i in range(self.dim)]
        u = rng.integers(-s, s + 1, size=n)
        u[0] = 0
        self.conformal_coeffs = [int(x) for x in u]
        if self.conformal is not None:
            if self.conformal[0]:
                raise ValueError("the conformal factor must vanish at the origin")
            self.conformal_coeffs = list(self.conformal) + [0] * (n - len(self.conformal))
        for tag in FUNCTION_HEADS:
            if tag not in self.functions:
                self.functions[tag] = [int(x) for x in rng.integers(-s, s + 1, size=n)]


class Evaluator:
    """All geometric fields of one sample modulo one prime."""

    def __init__(self, sample: JetSample, p: int = PRIMES[0], degree: int | None = None,
                 products: dict | None = None):
        self.sample = sample
        self.p = p
        self.degree = min(degree or sample.degree, sample.degree)
        self.ring = _ring(sample.dim, self.degree)
        self.alg = FieldAlgebra(self.ring, p)
        self.products = products or {}
        self._cache: dict = {}
        self._build_metric()

    # ------------------------------------------------------------------ base data
    def _poly(self, coeffs, prec=None) -> Field:
        prec = self.degree if prec is None else prec
        n = self.ring.size(prec)
        return Field(np.array([_mod(c, self.p) for c in coeffs[:n]], dtype=np.int64)[None], prec)

    def _build_metric(self):
        s, A, p, d = self.sample, self.alg, self.p, self.sample.dim
        N = self.ring.size(self.degree)
        eye = np.zeros((1, d, d, N), dtype=np.int64)
        for i in range(d):
            eye[0, i, i, 0] = 1
        if s.kind == "general":
            h = np.array(s.metric_coeffs, dtype=np.int64)[..., :N] % p
            g = Field((eye + h[None]) % p, self.degree)
        elif s.kind == "cf":
            u = self.alg.scale(self._poly(s.conformal_coeffs), 2)
            e = self._exp(u)
            g = Field((np.eye(d, dtype=np.int64)[None, :, :, None] * e.arr[:, None, None, :]) % p, self.degree)
        else:
            g = Field(eye, self.degree)
        if s.vary:
            psi = self._poly(s.functions[s.vary])
            gpsi = self.alg.scale(self.alg.mul(g, psi, "ij,->ij"), 2)
            g = Field(np.concatenate([g.arr, gpsi.arr]) % p, self.degree)
        self.g = g
        # inverse by Neumann series in H = g - I (H(0) = 0 on the real axis)
        # the dual part of H(0) may be nonzero but squares to zero, so the series still terminates
        H = A.add(g, Field(eye, self.degree), signs=[1, -1])
        ginv = Field(eye, self.degree)
        term = Field(eye, self.degree)
        for _ in range(self.degree + 2):
            term = A.scale(A.mul(term, H, "ab,bc->ac"), -1)
            ginv = A.add(ginv, term)
        self.ginv = ginv
        # Christoffel symbols Gamma^i_jk = 1/2 g^im (d_j g_mk + d_k g_mj - d_m g_jk)
        dg = A.partial(g)  # dg[m,k,j] = d_j g_mk
        first = A.add(Field(dg.arr, dg.prec),
                      Field(np.swapaxes(dg.arr, -3, -2), dg.prec),
                      Field(np.moveaxis(dg.arr, -2, -4), dg.prec), signs=[1, 1, -1])
        # first[m, k, j]: d_j g_mk + d_k g_mj - d_m g_kj
        half = _inv(2, p)
        self.Gamma = A.scale(A.mul(ginv, first, "im,mkj->ijk"), half)

    def _exp(self, u: Field) -> Field:
        A = self.alg
        n = self.ring.size(u.prec)
        one = np.zeros((1, n), dtype=np.int64)
        one[0, 0] = 1
        total = Field(one.copy(), u.prec)
        term = Field(one.copy(), u.prec)
        for k in range(1, u.prec + 1):
            term = A.scale(A.mul(term, u, ",->"), _inv(k, self.p))
            total = A.add(total, term)
        return total

    # ------------------------------------------------------------------ fields
    def covariant(self, T: Field) -> Field:
        """``(nabla T)_{I j} = d_j T_I - sum_s Gamma^m_{j i_s} T_{..m..}``."""
        A = self.alg
        out = A.partial(T)
        r = T.rank
        letters = _LETTERS[:r]
        for s in range(r):
            t_spec = letters[:s] + "m" + letters[s + 1:]
            spec = f"mz{letters[s]},{t_spec}->{letters}z"
            corr = A.mul(self.Gamma, T, spec, out.prec)
            out = A.add(out, corr, signs=[1, -1])
        return out

    def function(self, tag: str) -> Field:
        if tag in self.products:
            parts = [self.function(t) for t in self.products[tag]]
            out = parts[0]
            for q in parts[1:]:
                out = self.alg.mul(out, q, ",->")
            return out
        return self._poly(self.sample.functions[tag])

    def base(self, head: str) -> Field:
        if head in self._cache:
            return self._cache[head]
        A, p = self.alg, self.p
        d = self.sample.dim
        if head in FUNCTION_HEADS:
            out = self.function(head)
        elif head == "g":
            out = self.g
        elif head == "Riem_up":
            G = self.Gamma
            dG = A.partial(G)  # dG[i,j,k,l] = d_l Gamma^i_jk
            t1 = Field(np.einsum("eiljkz->eijklz", dG.arr), dG.prec)
            t2 = Field(np.einsum("eikjlz->eijklz", dG.arr), dG.prec)
            q1 = A.mul(G, G, "ikm,mlj->ijkl", dG.prec)
            q2 = A.mul(G, G, "ilm,mkj->ijkl", dG.prec)
            out = A.add(t1, t2, q1, q2, signs=[1, -1, 1, -1])
        elif head == "R":
            out = A.mul(self.g, self.base("Riem_up"), "im,mjkl->ijkl")
        elif head == "Rc":
            up = self.base("Riem_up")
            out = Field(np.einsum("ekjklz->ejlz", up.arr) % p, up.prec)
        elif head == "Sc":
            out = A.mul(self.ginv, self.base("Rc"), "ij,ij->")
        elif head == "J":
            out = A.scale(self.base("Sc"), _inv(2 * (d - 1), p))
        elif head == "V":
            Jg = A.mul(self.base("J"), self.g, ",ij->ij")
            out = A.scale(A.add(self.base("Rc"), Jg, signs=[1, -1]), _inv(d - 2, p))
        elif head == "W":
            V, g, R = self.base("V"), self.g, self.base("R")
            terms = [A.mul(V, g, "jk,il->ijkl"), A.mul(V, g, "jl,ik->ijkl"),
                     A.mul(V, g, "il,jk->ijkl"), A.mul(V, g, "ik,jl->ijkl")]
            out = A.add(R, *terms, signs=[1, 1, -1, 1, -1])
        else:
            raise KeyError(head)
        self._cache[head] = out
        return out

    def field(self, head: str, nderivs: int) -> Field:
        key = (head, nderivs)
        if key not in self._cache:
            if nderivs == 0:
                self._cache[key] = self.base(head)
            else:
                self._cache[key] = self.covariant(self.field(head, nderivs - 1))
        return self._cache[key]

    def point_value(self, head: str, nderivs: int) -> np.ndarray:
        f = self.field(head, nderivs)
        if f.prec < 0:
            raise ValueError("insufficient precision")
        return f.arr[..., 0]

    # ------------------------------------------------------------------ contraction
    def evaluate(self, expr: TensorExpr):
        """Value at the origin.  Scalars give an int (or an (value, eps) pair for
        dual samples, density factor included); tensors give arrays over the
        sorted free labels."""
        p = self.p
        frees = expr.free_indices()
        dual = self.sample.vary is not None
        psi0 = self.function(self.sample.vary).arr[0, 0] if dual else 0
        shape = (2,) if dual else (1,)
        total = np.zeros(shape + (self.sample.dim,) * len(frees), dtype=np.int64)
        half_dim = self.sample.dim // 2
        for factors, c in expr.items():
            val = self._term_value(factors, frees)
            cm = c.numerator % p * _inv(c.denominator, p) % p
            if dual:
                npairs = sum(len(f.indices) for f in factors) // 2
                # (1+2 eps psi0)^(dim/2 - npairs): density and inverse metrics at the point
                w = 2 * psi0 * (half_dim - npairs) % p
                val = np.stack([val[0], (val[1] + w * val[0]) % p])
            total = (total + cm * val) % p
        if not frees:
            return (int(total[0]), int(total[1])) if dual else int(total[0])
        return total if dual else total[0]

    def _term_value(self, factors, frees):
        """Contract the point values; the metric at the origin is the identity
        on the real axis (the dual part is accounted for by the caller)."""
        p = self.p
        letters = {}
        for fac in factors:
            for lab in fac.indices:
                if lab not in letters:
                    letters[lab] = _LETTERS[len(letters)]
        out_spec = "".join(letters[x] for x in frees)
        dual = self.sample.vary is not None
        vals = []
        specs = []
        for fac in factors:
            if fac.head == "g":
                arr = self.g.arr[..., 0]
                if fac.derivs:
                    arr = np.zeros(arr.shape + (self.sample.dim,) * len(fac.derivs), dtype=np.int64)
            else:
                arr = self.point_value(fac.head, len(fac.derivs))
            vals.append(arr)
            specs.append("".join(letters[x] for x in fac.indices))
        if not vals:
            v = np.ones((2 if dual else 1,), dtype=np.int64)
            if dual:
                v[1] = 0
            return v
        # sequential pairwise contraction keeping needed labels
        acc, acc_spec = vals[0], specs[0]
        if dual and acc.shape[0] == 1:
            acc = np.concatenate([acc, np.zeros_like(acc)])
        for k in range(1, len(vals)):
            later = set("".join(specs[k + 1:])) | set(out_spec)
            keep = "".join(ch for ch in dict.fromkeys(acc_spec + specs[k]) if ch in later
                           or (acc_spec + specs[k]).count(ch) == 1)
            es = f"{acc_spec},{specs[k]}->{keep}"
            b = vals[k]
            a0 = np.einsum(es, acc[0], b[0]) % p
            if dual:
                a1 = np.einsum(es, acc[1], b[0]) % p
                if b.shape[0] == 2:
                    a1 = (a1 + np.einsum(es, acc[0], b[1])) % p
                acc = np.stack([a0, a1])
            else:
                acc = a0[None]
            acc_spec = keep
        # internal self-contractions of a single factor
        final = np.stack([np.einsum(f"{acc_spec}->{out_spec}", a) % p for a in acc])
        return final


def required_degree(expr: TensorExpr) -> int:
    """Jet degree needed to evaluate ``expr`` at the origin."""
    need = 2
    for factors in expr.terms:
        for f in factors:
            k = len(f.derivs)
            need = max(need, k + (2 if f.head in ("V", "J", "W", "R", "Rc", "Sc") else 0))
            if f.head in FUNCTION_HEADS:
                need = max(need, k)
    return need + 1


def evaluate_mod(expr: TensorExpr, sample: JetSample, p: int = PRIMES[0], products=None):
    deg = min(sample.degree, max(required_degree(expr), 3))
    return Evaluator(sample, p, deg, products).evaluate(expr)


def rational_reconstruct(a: int, m: int) -> Fraction | None:
    """``r/s`` with ``r = a s (mod m)`` and ``|r|, s <= sqrt(m/2)``."""
    bound = math.isqrt(m // 2)
    r0, r1 = m, a % m
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    return Fraction(r1, s1) if s1 > 0 else Fraction(-r1, -s1)


def evaluate_exact(expr: TensorExpr, sample: JetSample, products=None, max_primes: int = len(PRIMES)):
    """Exact rational value of a scalar at the origin (dual samples: the pair)."""
    residues = []
    last = None
    for k, p in enumerate(PRIMES[:max_primes]):
        v = evaluate_mod(expr, sample, p, products)
        residues.append((v if isinstance(v, tuple) else (v,), p))
        comps = []
        for idx in range(len(residues[0][0])):
            a, m = 0, 1
            for vals, q in residues:
                a = _crt(a, m, vals[idx], q)
                m *= q
            comps.append(rational_reconstruct(a, m))
        if None not in comps and comps == last:
            return tuple(comps) if len(comps) > 1 else comps[0]
        last = comps
    raise ArithmeticError("rational reconstruction did not stabilize")


def _crt(a: int, m: int, b: int, q: int) -> int:
    t = (b - a) * pow(m, -1, q) % q
    return a + m * t
