"""Flat bilinear invariants as polynomials in ``x = |u|^2``, ``t = <u,v>``, ``y = |v|^2``.

In flat space a full contraction of ``d^A f`` and ``d^B h`` is determined by how
many index pairs sit inside f (p), are shared (q) and sit inside h (r); it
corresponds to ``x^p t^q y^r`` where ``u``, ``v`` stand for the gradients acting on
f and h.
"""
from __future__ import annotations

from fractions import Fraction

from .expr import TensorExpr


def contraction_type(factors: tuple) -> tuple:
    if len(factors) != 2 or {f.head for f in factors} != {"f", "h"}:
        raise ValueError("expected one factor of f and one of h")
    ff = next(f for f in factors if f.head == "f")
    hh = next(f for f in factors if f.head == "h")
    a, b = list(ff.derivs), list(hh.derivs)
    shared = set(a) & set(b)
    for lab in set(a) | set(b):
        if a.count(lab) + b.count(lab) != 2:
            raise ValueError(f"index {lab!r} is not contracted")
    q = len(shared)
    p = (len(a) - q) // 2
    r = (len(b) - q) // 2
    return p, q, r


def invariant_polynomial(expr: TensorExpr) -> dict:
    """``{(p, q, r): coefficient}`` of a flat scalar bilinear in f and h."""
    out: dict = {}
    for factors, c in expr.items():
        key = contraction_type(factors)
        out[key] = out.get(key, Fraction(0)) + c
    return {k: v for k, v in out.items() if v}
