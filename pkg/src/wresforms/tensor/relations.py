"""Multiterm relations and identity certificates.

The normal form handles monoterm symmetries, derivative reordering and the
curvature decomposition.  Cyclic (first Bianchi) sums of W and the differential
Bianchi identity are not rewriting rules; they are generated as a relation
subspace from the monomials at hand and used through exact sparse elimination.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .expr import Factor, TensorExpr
from .format import to_text
from .jets import PRIMES, JetSample, evaluate_mod
from .normal import normal_form


def _replace(factors, i, new):
    return factors[:i] + tuple(new) + factors[i + 1:]


def bianchi_relations(factors: tuple) -> list:
    """Relations (as un-normalized expressions equal to zero) attached to a monomial."""
    out = []
    for i, fac in enumerate(factors):
        if fac.head != "W":
            continue
        a, b, c, d = fac.slots
        D = fac.derivs
        cyc = TensorExpr()
        for s in ((a, b, c, d), (a, c, d, b), (a, d, b, c)):
            cyc.add_term(_replace(factors, i, [Factor("W", s, D)]), 1)
        out.append((f"first Bianchi on {fac.head}", cyc))
        if D:
            e, rest = D[0], D[1:]
            for (p, q), (u, v) in (((a, b), (c, d)), ((c, d), (a, b))):
                rel = TensorExpr()
                for (x, y, z) in ((u, v, e), (v, e, u), (e, u, v)):
                    rel.add_term(_replace(factors, i, [Factor("R", (p, q, x, y), (z,) + rest)]), 1)
                out.append(("second Bianchi", rel))
    return out


def _order_key(factors) -> tuple:
    return (sum(1 for f in factors if f.head == "W"), repr(factors))


@dataclass
class RelationSpace:
    """Echelon basis of relations; rows are dicts monomial -> coefficient."""

    context: str = "general"
    dim: int = 6
    relations: list = field(default_factory=list)
    _rows: dict = field(default_factory=dict)  # pivot monomial -> (row, combination)
    _seen: set = field(default_factory=set)

    def add(self, label: str, expr: TensorExpr) -> None:
        nf = normal_form(expr, self.context, self.dim)
        idx = len(self.relations)
        self.relations.append((label, nf))
        row = dict(nf.terms)
        comb = {idx: Fraction(1)}
        row, comb = self._reduce(row, comb)
        if row:
            piv = max(row, key=_order_key)
            inv = 1 / row[piv]
            row = {k: v * inv for k, v in row.items()}
            comb = {k: v * inv for k, v in comb.items()}
            # keep rows fully reduced with respect to the new pivot
            for p, (r2, c2) in list(self._rows.items()):
                f = r2.get(piv)
                if f:
                    self._rows[p] = (_axpy(r2, row, -f), _axpy(c2, comb, -f))
            self._rows[piv] = (row, comb)

    def _reduce(self, row: dict, comb: dict):
        row, comb = dict(row), dict(comb)
        for piv, (r2, c2) in self._rows.items():
            f = row.get(piv)
            if f:
                row = _axpy(row, r2, -f)
                comb = _axpy(comb, c2, -f)
        return row, comb

    def grow(self, monomials, rounds: int = 3) -> None:
        """Add the relations of every monomial, then of the monomials they produce."""
        todo = [m for m in monomials if m not in self._seen]
        for _ in range(rounds):
            new = []
            for m in todo:
                if m in self._seen:
                    continue
                self._seen.add(m)
                for label, rel in bianchi_relations(m):
                    before = len(self.relations)
                    self.add(label, rel)
                    new.extend(k for k in self.relations[before][1].terms if k not in self._seen)
            if not new:
                return
            todo = new

    def reduce(self, expr: TensorExpr):
        """``(residual, combination)`` with ``expr = residual + sum comb[j] relation_j``."""
        row, comb = self._reduce(dict(expr.terms), {})
        return TensorExpr(row), {k: -v for k, v in comb.items() if v}


def _axpy(x: dict, y: dict, a) -> dict:
    out = dict(x)
    for k, v in y.items():
        nv = out.get(k, 0) + a * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


@dataclass
class Certificate:
    check: str
    status: str  # zero | relation-span | residue
    method: str
    residue: TensorExpr
    combination: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status in ("zero", "relation-span")

    def to_dict(self) -> dict:
        return {"check": self.check, "status": self.status, "method": self.method,
                "certificate": to_text(self.residue) if self.status == "residue"
                else "; ".join(f"{c} * [{lab}] {to_text(e)}" for lab, c, e in self.combination)}


def numeric_zero(expr: TensorExpr, kind: str, trials: int = 3, dim: int = 6) -> bool:
    for seed in range(trials):
        v = evaluate_mod(expr, JetSample(seed=1000 + seed, kind=kind, dim=dim), PRIMES[seed % len(PRIMES)])
        if v:
            return False
    return True


def verify_identity(lhs: TensorExpr, rhs: TensorExpr | None = None, context: str = "general",
                    dim: int = 6, check: str = "identity", numeric_fallback: bool = True) -> Certificate:
    """Certify ``lhs = rhs``: normal form zero, or in the relation span, or a residue."""
    diff = lhs if rhs is None else lhs - rhs
    nf = normal_form(diff, context, dim)
    if not nf:
        return Certificate(check, "zero", "normal form", nf)
    space = RelationSpace(context, dim)
    space.grow(list(nf.terms))
    residual, comb = space.reduce(nf)
    if not residual:
        combination = [(space.relations[j][0], c, space.relations[j][1]) for j, c in sorted(comb.items())]
        return Certificate(check, "relation-span", "Bianchi relation span", nf, combination)
    if numeric_fallback and not residual.free_indices():
        kind = {"general": "general", "cf": "cf", "flat": "flat"}[context]
        if numeric_zero(residual, kind, dim=dim):
            return Certificate(check, "relation-span", "numeric nullspace on random jets", residual,
                               [("vanishes on random jets", Fraction(1), residual)])
    return Certificate(check, "residue", "normal form and relation span", residual)


def express_in_basis(target: TensorExpr, basis: list, context: str = "general", dim: int = 6):
    """Coefficients ``c`` with ``target = sum c_i basis_i`` modulo relations.

    Returns ``(coefficients, residual)``; coefficients are exact and unique when the
    basis is independent modulo the relation span (checked).
    """
    from ..exact import InconsistentSystem, solve_linear

    t = normal_form(target, context, dim)
    bs = [normal_form(b, context, dim) for b in basis]
    space = RelationSpace(context, dim)
    space.grow(list(t.terms) + [k for b in bs for k in b.terms])
    t_red, _ = space.reduce(t)
    b_red = [space.reduce(b)[0] for b in bs]
    keys = sorted(set(t_red.terms).union(*(b.terms for b in b_red)), key=repr)
    rows = [[b.terms.get(k, 0) for b in b_red] for k in keys]
    rhs = [t_red.terms.get(k, 0) for k in keys]
    try:
        x, pivots, free, _ = solve_linear(rows, rhs, len(basis))
    except InconsistentSystem:
        fit = None
    else:
        fit = x
    if fit is None:
        return None, t_red
    if free:
        raise ValueError("basis structures are dependent modulo relations")
    resid = t_red - sum((b.scale(c) for b, c in zip(b_red, fit)), TensorExpr())
    return list(fit), resid
