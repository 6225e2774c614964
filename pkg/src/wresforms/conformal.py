"""Conformal geometry of bilinear differential forms of order 6.

Expressions are density-weighted scalars (the volume density is implicit and
has conformal weight equal to the dimension).  The first-order conformal
variation is taken for ``g -> (1 + 2 eps eta) g``; the result is linear in the
function ``eta``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .conventions import DIMENSION
from . import catalogue
from .exact import InconsistentSystem, rref, solve_linear
from .flat import CoefficientTable, table_to_invariant
from .tensor.expr import (Factor, TensorExpr, covariant_derivative, filtration_degrees, fresh_label,
                          free_labels, leibniz_substitute, rename_dummies)
from .tensor.normal import normal_form, riemann_decompose
from .tensor.parse import parse_expr
from .tensor.relations import Certificate, bianchi_relations, express_in_basis, verify_identity

ETA = "eta"


def _eta(*derivs) -> Factor:
    return Factor(ETA, (), tuple(derivs))


def _g(a, b) -> Factor:
    return Factor("g", (a, b))


# ---------------------------------------------------------------------------
# first-order variation of single factors

def _replace_at(fac: Factor, pos: int, label: str) -> Factor:
    idx = list(fac.indices)
    idx[pos] = label
    return fac.with_indices(idx)


@lru_cache(maxsize=None)
def _var_template(head: str, nslots: int, nderivs: int, dim: int) -> tuple:
    """Variation of ``head`` with positional labels ``s0.., d0..``: tuple of (factors, coeff)."""
    slots = tuple(f"s{k}" for k in range(nslots))
    derivs = tuple(f"d{k}" for k in range(nderivs))
    return tuple(_var_factor(Factor(head, slots, derivs), dim).items())


def _var_factor(fac: Factor, dim: int) -> TensorExpr:
    """``delta`` of one factor with all indices down."""
    if fac.derivs:
        *rest, j = fac.derivs
        inner = Factor(fac.head, fac.slots, tuple(rest))
        out = covariant_derivative(_var_factor(inner, dim), j)
        # Christoffel variation: delta Gamma^m_{ja} = d^m_j eta_a + d^m_a eta_j - g_ja eta^m
        for pos, a in enumerate(inner.indices):
            m = fresh_label()
            out.add_term((_eta(a), _replace_at(inner, pos, j)), -1)
            out.add_term((_eta(j), inner), -1)
            out.add_term((_g(j, a), _eta(m), _replace_at(inner, pos, m)), 1)
        return out
    head = fac.head
    if head in ("f0", "f1", "f2", "f3", "f", "h", ETA):
        return TensorExpr()
    if head == "g":
        return TensorExpr.monomial((_eta(), fac), 2)
    if head == "W":
        return TensorExpr.monomial((_eta(), fac), 2)
    if head == "V":
        a, b = fac.slots
        return TensorExpr.monomial((_eta(a, b),), -1)
    if head == "J":
        m = fresh_label()
        return TensorExpr([((_eta(), fac), -2), ((_eta(m, m),), -1)])
    raise ValueError(f"no variation rule for {head}; decompose R, Rc, Sc first")


def factor_variation(fac: Factor, dim: int = DIMENSION) -> TensorExpr:
    """Variation of one factor, via a memoized template keyed by its shape."""
    labels = {f"s{k}": x for k, x in enumerate(fac.slots)}
    labels.update({f"d{k}": x for k, x in enumerate(fac.derivs)})
    out = TensorExpr()
    for factors, c in _var_template(fac.head, len(fac.slots), len(fac.derivs), dim):
        out.add_term(rename_dummies(tuple(f.relabel(labels) for f in factors)), c)
    return out


def _variation_expr(expr: TensorExpr, dim: int) -> TensorExpr:
    if expr.free_indices():
        raise ValueError("conformal variation needs a scalar expression")
    expr = riemann_decompose(expr, dim)
    out = TensorExpr()
    for k, c in expr.items():
        k = rename_dummies(k)
        total = sum(len(f.indices) for f in k)
        # density weight and one inverse metric per contracted pair
        out.add_term((_eta(),) + k, c * (dim - total))
        for i, fac in enumerate(k):
            for fs, cc in factor_variation(fac, dim).items():
                out.add_term(k[:i] + fs + k[i + 1:], c * cc)
    return out


# ---------------------------------------------------------------------------
# linear ansatz

@dataclass
class AnsatzExpr:
    """``constant + sum_u u * terms[u]`` with unknown rational constants ``u``."""

    constant: TensorExpr = field(default_factory=TensorExpr)
    terms: dict = field(default_factory=dict)

    def map(self, fn) -> AnsatzExpr:
        return AnsatzExpr(fn(self.constant), {u: fn(e) for u, e in self.terms.items()})

    def substitute(self, values: dict) -> TensorExpr:
        out = self.constant.copy()
        for u, e in self.terms.items():
            out += e.scale(values[u])
        return out

    @property
    def unknowns(self) -> tuple:
        return tuple(self.terms)


def conformal_variation(expr, context: str = "general", dim: int = DIMENSION):
    """First-order conformal variation in the normal form of ``context``."""
    if isinstance(expr, AnsatzExpr):
        return expr.map(lambda e: conformal_variation(e, context, dim))
    return normal_form(_variation_expr(expr, dim), context, dim)


# ---------------------------------------------------------------------------
# growing a flat expression into the conformally flat class

def _flat_partial(expr: TensorExpr, label: str) -> TensorExpr:
    """Coordinate derivative of a tensor of ``g_hat = e^{2 eta} delta`` written in hatted objects."""
    out = TensorExpr()
    for k, c in expr.items():
        for pos, fac in enumerate(k):
            if fac.head == "g":
                continue
            if fac.head == ETA:
                # hatted Hessian of eta: -V - eta_a eta_b + 1/2 g_ab |d eta|^2
                (a,) = fac.derivs
                rest = k[:pos] + k[pos + 1:]
                m = fresh_label()
                out.add_term(rest + (Factor("V", (a, label)),), -c)
                out.add_term(rest + (_eta(a), _eta(label)), -c)
                out.add_term(rest + (_g(a, label), _eta(m), _eta(m)), c / 2)
                continue
            out.add_term(k[:pos] + (fac.differentiate(label),) + k[pos + 1:], c)
        for a in free_labels(k):
            if a == label:
                continue
            m = fresh_label()
            out.add_term((_eta(a),) + tuple(f.relabel({a: label}) for f in k), c)
            out.add_term((_eta(label),) + k, c)
            out.add_term((_g(label, a), _eta(m)) + tuple(f.relabel({a: m}) for f in k), -c)
    return out


def flat_derivatives(head: str, order: int, dim: int = DIMENSION) -> TensorExpr:
    """``d_{a0} ... d_{a(order-1)} head`` in hatted covariant objects (free labels ``a0..``)."""
    e = TensorExpr.monomial((Factor(head),))
    for k in range(order):
        e = normal_form(_flat_partial(e, f"a{k}"), "cf", dim)
    return e


class GrowthError(RuntimeError):
    """The conformal factor survived the growing procedure."""


def grow_flat(table: CoefficientTable, dim: int | None = None) -> TensorExpr:
    """Conformally flat expression whose flat-coordinate form is ``table``.

    Each flat monomial ``f_{,A} h_{,B}`` with ``delta``-contractions is rewritten
    for ``g_hat = e^{2 eta} delta``; every remaining ``eta`` must cancel.
    """
    dim = dim or table.n
    poly = table_to_invariant(table)
    cache: dict = {}

    def derivs(head, order):
        if (head, order) not in cache:
            cache[(head, order)] = flat_derivatives(head, order, dim)
        return cache[(head, order)]

    total = TensorExpr()
    for (p, q, r), c in poly.items():
        shared = [fresh_label() for _ in range(q)]
        fp = [fresh_label() for _ in range(p)]
        hp = [fresh_label() for _ in range(r)]
        flab = shared + [x for x in fp for _ in range(2)]
        hlab = shared + [x for x in hp for _ in range(2)]
        fe = derivs("f", len(flab)).relabel({f"a{k}": x for k, x in enumerate(flab)})
        he = derivs("h", len(hlab)).relabel({f"a{k}": x for k, x in enumerate(hlab)})
        # e^{(2 pairs - dim) eta} is 1 since 2 pairs = order = dim
        if 2 * (p + q + r) != dim:
            raise ValueError("growing needs order equal to the dimension")
        total += (fe * he).scale(c)
    out = normal_form(total, "cf", dim)
    if out.contains_head(ETA):
        raise GrowthError("conformal factor derivatives survive: " + repr(out))
    return out


# ---------------------------------------------------------------------------
# Hochschild coboundary

def rename_heads(expr: TensorExpr, mapping: dict) -> TensorExpr:
    return expr.map_factors(lambda f: Factor(mapping.get(f.head, f.head), f.slots, f.derivs))


def hochschild_coboundary(omega, context: str = "general", dim: int = DIMENSION):
    """Pointwise ``b tau / f0`` for ``tau(f0, f1, f2) = int f0 omega(f1, f2)``.

    ``omega`` is bilinear in the heads ``f`` and ``h``.  The result is
    ``f1 omega(f2, f3) - omega(f1 f2, f3) + omega(f1, f2 f3) - f3 omega(f1, f2)``.
    """
    if isinstance(omega, AnsatzExpr):
        return omega.map(lambda e: hochschild_coboundary(e, context, dim))

    def apply(fa, fb):
        e = omega
        for tag, val in (("f", fa), ("h", fb)):
            if isinstance(val, tuple):
                e = leibniz_substitute(e, tag, val)
            else:
                e = rename_heads(e, {tag: val})
        return e

    f1 = TensorExpr.monomial((Factor("f1"),))
    f3 = TensorExpr.monomial((Factor("f3"),))
    out = f1 * apply("f2", "f3")
    out -= apply(("f1", "f2"), "f3")
    out += apply("f1", ("f2", "f3"))
    out -= f3 * apply("f1", "f2")
    return normal_form(out, context, dim)


# ---------------------------------------------------------------------------
# constraints

@dataclass(frozen=True)
class Constraint:
    """``sum coeffs[u] u = rhs``, with the check and structure that produced it."""

    coeffs: tuple  # ((unknown, rational), ...)
    rhs: Fraction
    source: str

    def __str__(self) -> str:
        lhs = " + ".join(f"{c}*{u}" for u, c in self.coeffs) or "0"
        return f"{lhs} = {self.rhs}   [{self.source}]"


@dataclass
class ConstraintSystem:
    unknowns: tuple
    constraints: list = field(default_factory=list)

    def add(self, coeffs: dict, rhs, source: str) -> None:
        c = tuple((u, Fraction(coeffs.get(u, 0))) for u in self.unknowns if coeffs.get(u, 0))
        self.constraints.append(Constraint(c, Fraction(rhs), source))


@dataclass
class Solution:
    values: dict  # unknown -> Fraction, for determined unknowns
    free: tuple
    particular: dict


class InconsistentConstraints(ValueError):
    def __init__(self, combination: list):
        self.combination = combination
        lines = "; ".join(f"{m} * ({c})" for c, m in combination)
        super().__init__("inconsistent constraints: " + lines)


def solve_constants(system: ConstraintSystem) -> Solution:
    us = system.unknowns
    rows = [[dict(c.coeffs).get(u, 0) for u in us] for c in system.constraints]
    rhs = [c.rhs for c in system.constraints]
    if not rows:
        return Solution({}, tuple(us), {u: Fraction(0) for u in us})
    try:
        x, pivots, free, reduced = solve_linear(rows, rhs, len(us))
    except InconsistentSystem as err:
        comb = [(c, m) for c, m in zip(system.constraints, err.combination) if m]
        raise InconsistentConstraints(comb) from None
    free_set = {us[j] for j in free}
    # an unknown is determined when its reduced row involves no free column
    determined = {}
    for r, pc in enumerate(pivots):
        if all(reduced[r][j] == 0 for j in free):
            determined[us[pc]] = x[pc]
    return Solution(determined, tuple(u for u in us if u in free_set),
                    {u: x[j] for j, u in enumerate(us)})


def structure_constraints(target, structures: dict, system: ConstraintSystem, check: str,
                          context: str = "general", dim: int = DIMENSION) -> TensorExpr:
    """Require the linear-in-unknowns ``target`` to vanish, reading off its
    coefficients on the given structures.  Returns the residual of the constant part."""
    names = list(structures)
    basis = [structures[n] for n in names]
    const, cres = express_in_basis(target.constant, basis, context, dim)
    if const is None:
        raise ValueError(f"{check}: constant part is not in the span of the structures: {cres!r}")
    per_unknown = {}
    for u, e in target.terms.items():
        cu, res = express_in_basis(e, basis, context, dim)
        if cu is None or res:
            raise ValueError(f"{check}: term {u} leaves the span of the structures")
        per_unknown[u] = cu
    for s, name in enumerate(names):
        system.add({u: cu[s] for u, cu in per_unknown.items()}, -const[s], f"{check}: {name}")
    return cres


# ---------------------------------------------------------------------------
# the order-6 family

def ansatz(with_family: bool = True) -> AnsatzExpr:
    names = ("A", "B", "C", "D") + (("E", "G") if with_family else ())
    return AnsatzExpr(catalogue.omega6_confflat(), {u: catalogue.ansatz_term(u) for u in names})


def constraint_system(context: str = "general", dim: int = DIMENSION) -> ConstraintSystem:
    """Constraints from conformal invariance, then from the cocycle condition."""
    a = ansatz()
    system = ConstraintSystem(a.unknowns)
    var = conformal_variation(a, context, dim)
    structure_constraints(var, {k: parse_expr(v) for k, v in catalogue.VARIATION_STRUCTURES.items()},
                          system, "conformal variation", context, dim)
    cob = hochschild_coboundary(a, context, dim)
    structure_constraints(cob, {k: parse_expr(v) for k, v in catalogue.COCYCLE_STRUCTURES.items()},
                          system, "Hochschild coboundary", context, dim)
    return system


_DERIVED: dict = {}


def derived_constants(dim: int = DIMENSION) -> dict:
    """A, B, C, D from conformal invariance and the cocycle condition."""
    if dim not in _DERIVED:
        sol = solve_constants(constraint_system("general", dim))
        missing = [u for u in "ABCD" if u not in sol.values]
        if missing:
            raise ValueError(f"constants {missing} are not determined")
        _DERIVED[dim] = {u: sol.values[u] for u in "ABCD"}
    return dict(_DERIVED[dim])


def assemble_family(E, G, coefficients: dict | None = None) -> TensorExpr:
    """Conformally flat expression plus the fixed Weyl terms plus ``E``, ``G`` terms.

    The fixed constants default to :func:`derived_constants`."""
    values = dict(derived_constants() if coefficients is None else coefficients)
    values.update(E=Fraction(E), G=Fraction(G))
    return ansatz().substitute(values)


@dataclass
class FamilyReport:
    E: Fraction
    G: Fraction
    symmetric: Certificate
    variation: Certificate
    cocycle: Certificate
    homogeneous: bool

    @property
    def ok(self) -> bool:
        return self.symmetric.ok and self.variation.ok and self.cocycle.ok and self.homogeneous


def homogeneity_ok(expr: TensorExpr, weight: int = DIMENSION) -> bool:
    """Every monomial has ``2 k_R + k_nabla = weight``."""
    for k in expr.terms:
        kr, kd = filtration_degrees(k)
        if 2 * kr + kd != weight:
            return False
    return True


def check_family(E, G, coefficients: dict | None = None, dim: int = DIMENSION) -> FamilyReport:
    omega = assemble_family(E, G, coefficients)
    sym = verify_identity(omega, omega.swap_tags("f", "h"), "general", dim, "f/h symmetry")
    var = verify_identity(conformal_variation(omega, "general", dim), None, "general", dim,
                          "conformal variation")
    cob = verify_identity(hochschild_coboundary(omega, "general", dim), None, "general", dim,
                          "Hochschild coboundary")
    return FamilyReport(Fraction(E), Fraction(G), sym, var, cob, homogeneity_ok(omega))


# ---------------------------------------------------------------------------
# candidate Weyl terms

def _matchings(labels: list):
    if not labels:
        yield []
        return
    a = labels[0]
    for i in range(1, len(labels)):
        rest = labels[1:i] + labels[i + 1:]
        for m in _matchings(rest):
            yield [(a, labels[i])] + m


def _leading_part(expr: TensorExpr, k_r: int) -> TensorExpr:
    """Terms with exactly ``k_r`` curvature factors (higher filtration dropped)."""
    return TensorExpr([(k, c) for k, c in expr.items() if filtration_degrees(k)[0] == k_r])


@dataclass
class CandidateReport:
    monomials: list  # every contraction enumerated
    rank: int  # dimension modulo relations and higher filtration
    spanned_by: TensorExpr | None  # the reference term, if it spans the quotient


def candidate_terms(k_nabla: int = 4, reference: str = "f_{ij} h_{kl} W^{ikjl}",
                    dim: int = DIMENSION) -> CandidateReport:
    """Bilinear contractions of one underived W with ``k_nabla`` derivatives on
    ``f`` and ``h`` (at least one each), modulo first Bianchi and terms with two
    or more curvature factors."""
    monos = []
    for a in range(1, k_nabla):
        b = k_nabla - a
        positions = [("f", i) for i in range(a)] + [("h", i) for i in range(b)] + [("W", i) for i in range(4)]
        names = [f"x{i}" for i in range(len(positions))]
        for m in _matchings(names):
            lab = {}
            for n, (x, y) in enumerate(m):
                lab[x] = lab[y] = f"c{n}"
            idx = [lab[x] for x in names]
            fac = (Factor("f", (), tuple(idx[:a])), Factor("h", (), tuple(idx[a:a + b])),
                   Factor("W", tuple(idx[a + b:])))
            monos.append(TensorExpr.monomial(fac))
    reduced = [_leading_part(normal_form(e, "general", dim), 1) for e in monos]
    relations = []
    seen = set()
    for e in reduced:
        for k in e.terms:
            if k in seen:
                continue
            seen.add(k)
            for _, rel in bianchi_relations(k):
                relations.append(_leading_part(normal_form(rel, "general", dim), 1))
    keys = sorted({k for e in reduced + relations for k in e.terms}, key=repr)
    col = {k: i for i, k in enumerate(keys)}

    def row(e):
        r = [Fraction(0)] * len(keys)
        for k, c in e.items():
            r[col[k]] = c
        return r

    def rank(rows):
        return len(rref(rows, len(keys))[1]) if rows else 0

    rel_rows = [row(e) for e in relations]
    base = rank(rel_rows)
    total = rank(rel_rows + [row(e) for e in reduced])
    ref = _leading_part(normal_form(parse_expr(reference), "general", dim), 1)
    ref_rank = rank(rel_rows + [row(ref)]) if all(k in col for k in ref.terms) else None
    spans = ref_rank is not None and ref_rank - base == total - base == 1
    return CandidateReport(monos, total - base, parse_expr(reference) if spans else None)
