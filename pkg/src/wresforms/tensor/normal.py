"""Normal forms of Riemannian tensor polynomials.

Conventions (all checked against the numeric oracle in the tests):

* ``X_{A;kl} - X_{A;lk} = sum_t R_{m a_t k l} X_{A[a_t -> m]}``;
* ``R_{ijkl} = W_{ijkl} - V_{jk} g_{il} + V_{jl} g_{ik} - V_{il} g_{jk} + V_{ik} g_{jl}``,
  ``Rc = (d-2) V + J g``, ``Sc = 2 (d-1) J``;
* ``V_{ij;i} = J_{;j}`` and ``W_{ijkl;l} = (d-3) (V_{ik;j} - V_{jk;i})``.

Contexts: ``flat`` (no curvature, derivatives commute), ``cf`` (conformally
flat: W = 0, so ``V_{ij;k}`` is totally symmetric) and ``general``.

Monomials are processed by total derivative count, highest first.  Each one is
rewritten by the first applicable rule (metric absorption, curvature
decomposition, traces, divergences); a monomial with no applicable rule has its
derivative indices reordered to the representative chosen by the canonical
search with all derivative orders treated as symmetric, and the commutator
corrections go to lower levels.  If that representative is reached with both
signs, the monomial equals a combination of lower ones.
"""
from __future__ import annotations

from collections import defaultdict
from itertools import product as iproduct

from .canon import canonical_key, canonicalize
from .expr import Factor, TensorExpr, derivative_level, fresh_label

_CURV_ZERO = {"flat": {"W", "R", "Rc", "Sc", "V", "J"}, "cf": {"W"}, "general": set()}


# ---------------------------------------------------------------------------
# elementary rewrites (each returns a list of (factors, coeff) equal to the input)

def _replace(factors, i, new):
    return factors[:i] + tuple(new) + factors[i + 1:]


def commute(factors: tuple, fi: int, k: int, context: str = "general") -> list:
    """Swap derivative positions ``k, k+1`` of factor ``fi`` with Ricci corrections."""
    fac = factors[fi]
    d = list(fac.derivs)
    a, b = d[k], d[k + 1]
    d[k], d[k + 1] = b, a
    out = [(_replace(factors, fi, [Factor(fac.head, fac.slots, tuple(d))]), 1)]
    if context == "flat":
        return out
    A = fac.slots + fac.derivs[:k]
    B = fac.derivs[k + 2:]
    base = Factor(fac.head, fac.slots, fac.derivs[:k])
    for t in range(len(A)):
        m = fresh_label()
        idx = list(A)
        idx[t] = m
        X = base.with_indices(idx)
        for mask in iproduct((0, 1), repeat=len(B)):
            rd = tuple(x for x, s in zip(B, mask) if s)
            xd = tuple(x for x, s in zip(B, mask) if not s)
            R = Factor("R", (m, A[t], a, b), rd)
            out.append((_replace(factors, fi, [R, Factor(X.head, X.slots, X.derivs + xd)]), 1))
    return out


def _decompose(fac: Factor, dim: int) -> list:
    """Curvature head in terms of W, V, J and the metric: list of (factors, coeff)."""
    D = fac.derivs
    if fac.head == "R":
        i, j, k, l = fac.slots
        out = [((Factor("W", fac.slots, D),), 1)]
        for (x, y), (u, v), s in (((j, k), (i, l), -1), ((j, l), (i, k), 1),
                                  ((i, l), (j, k), -1), ((i, k), (j, l), 1)):
            out.append(((Factor("V", (x, y), D), Factor("g", (u, v))), s))
        return out
    if fac.head == "Rc":
        return [((Factor("V", fac.slots, D),), dim - 2), ((Factor("J", (), D), Factor("g", fac.slots)), 1)]
    if fac.head == "Sc":
        return [((Factor("J", (), D),), 2 * (dim - 1))]
    raise ValueError(fac.head)


def _metric_rule(factors, dim):
    for i, fac in enumerate(factors):
        if fac.head != "g":
            continue
        if fac.derivs:
            return []
        a, b = fac.slots
        if a == b:
            return [(_replace(factors, i, []), dim)]
        rest = _replace(factors, i, [])
        for x, y in ((a, b), (b, a)):
            if any(x in f.indices for f in rest):
                return [(tuple(f.relabel({x: y}) for f in rest), 1)]
    return None


def _riemann_move(slots, pos):
    """A Riemann symmetry putting slot ``pos`` last: (new slots, sign)."""
    i, j, k, l = slots
    if pos == 3:
        return slots, 1
    if pos == 2:
        return (i, j, l, k), -1
    if pos == 1:
        return (k, l, i, j), 1
    return (l, k, j, i), 1  # pos 0: W_ijkl = W_klij = W_lkji


def apply_rules(factors: tuple, context: str, dim: int):
    """First applicable rewrite, or None if the monomial is irreducible."""
    zero = _CURV_ZERO[context]
    for fac in factors:
        if fac.head in zero:
            return []
    r = _metric_rule(factors, dim)
    if r is not None:
        return r
    for i, fac in enumerate(factors):
        if fac.head in ("R", "Rc", "Sc"):
            return [(_replace(factors, i, fs), c) for fs, c in _decompose(fac, dim)]
    for i, fac in enumerate(factors):
        if fac.head == "V" and fac.slots[0] == fac.slots[1]:
            return [(_replace(factors, i, [Factor("J", (), fac.derivs)]), 1)]
        if fac.head == "W" and len(set(fac.slots)) < 4:
            return []
    for i, fac in enumerate(factors):
        if fac.head not in ("V", "W"):
            continue
        if context in ("cf", "flat") and fac.head == "V":
            r = _cf_schouten_rule(factors, i)
            if r is not None:
                return r
            continue
        for p, lab in enumerate(fac.derivs):
            if lab in fac.slots:
                if p > 0:
                    return commute(factors, i, p - 1, context)
                rest = fac.derivs[1:]
                if fac.head == "V":
                    other = fac.slots[1] if fac.slots[0] == lab else fac.slots[0]
                    return [(_replace(factors, i, [Factor("J", (), (other,) + rest)]), 1)]
                (a, b, c, _), s = _riemann_move(fac.slots, fac.slots.index(lab))
                kappa = dim - 3
                return [(_replace(factors, i, [Factor("V", (a, c), (b,) + rest)]), s * kappa),
                        (_replace(factors, i, [Factor("V", (b, c), (a,) + rest)]), -s * kappa)]
    return None


def _cf_schouten_rule(factors, i):
    """With W = 0 the positions (slot, slot, first derivative) of V are symmetric;
    any self-contraction of V is reduced toward J."""
    fac = factors[i]
    labels = list(fac.indices)
    seen = {}
    for pos, lab in enumerate(labels):
        if lab in seen:
            pa, pb = seen[lab], pos
            break
        seen[lab] = pos
    else:
        return None
    if pa <= 2 and pb <= 2:
        others = [labels[q] for q in range(3) if q not in (pa, pb)]
        new = Factor("J", (), (others[0],) + tuple(labels[3:]))
        return [(_replace(factors, i, [new]), 1)]
    if pa <= 2:
        # exact: bring the label to slot 0, then commute its partner toward derivative 0
        front = [labels[q] for q in range(3) if q != pa]
        moved = [lab] + front + labels[3:]
        moved_fac = fac.with_indices(moved)
        return commute(_replace(factors, i, [moved_fac]), i, pb - 3, "cf")
    return commute(factors, i, pa - 3, "cf")


# ---------------------------------------------------------------------------
# derivative ordering

def _regions(fac: Factor, context: str) -> int:
    """First position that must be reached by commutations (earlier ones move exactly)."""
    if fac.head == "V" and context in ("cf", "flat") and fac.derivs:
        return 3
    return len(fac.slots)


def _realize(factors: tuple, arrangement: tuple, context: str):
    """Reorder derivatives to the target arrangement: (main factors, corrections)."""
    corrections = []
    cur = list(factors)
    for orig, order in arrangement:
        target = [factors[orig].indices[q] for q in order]
        start = _regions(factors[orig], context)
        fac = cur[orig]
        labels = list(fac.indices)
        for q in range(len(labels) - 1, start - 1, -1):
            want = target[q]
            if labels[q] == want:
                continue
            cands = [p for p in range(q + 1) if labels[p] == want]
            p = max(cands)
            if p < start:
                if context in ("cf", "flat") and fac.head == "V":
                    exact = [labels[x] for x in range(3) if x != p] + [want]
                    labels[:3] = exact
                    cur[orig] = fac = fac.with_indices(labels)
                    p = 2
                else:
                    raise AssertionError("target arrangement moves a slot into a derivative")
            ns = len(fac.slots)
            while p < q:
                terms = commute(tuple(cur), orig, p - ns, context)
                main, _ = terms[0]
                corrections.extend(terms[1:])
                cur = list(main)
                fac = cur[orig]
                labels = list(fac.indices)
                p += 1
    return tuple(cur), corrections


def normal_form(expr: TensorExpr, context: str = "general", dim: int = 6) -> TensorExpr:
    """Canonical representative modulo symmetries, the Ricci identity and the
    Schouten/Weyl decomposition (first Bianchi cyclic sums are not reduced; see
    ``relations``)."""
    pending: dict = defaultdict(dict)

    def push(factors, c):
        key, sign = canonical_key(tuple(factors), context)
        if key is None or not c:
            return
        bucket = pending[derivative_level(key)]
        v = bucket.get(key, 0) + sign * c
        if v:
            bucket[key] = v
        else:
            bucket.pop(key, None)

    for k, c in expr.items():
        push(k, c)
    result = TensorExpr()
    while pending:
        level = max(pending)
        bucket = pending[level]
        if not bucket:
            del pending[level]
            continue
        key, c = bucket.popitem()
        out = apply_rules(key, context, dim)
        if out is not None:
            for fs, cc in out:
                push(fs, c * cc)
            continue
        res = canonicalize(key, context, "symmetric")
        arrs = dict(res.arrangements)
        if res.factors is None:
            weight = c / 2
            for sgn in (1, -1):
                main, corr = _realize(key, arrs[sgn], context)
                push(main, weight)
                for fs, cc in corr:
                    push(fs, weight * cc)
            # the two main terms cancel in the bucket
            continue
        main, corr = _realize(key, next(iter(arrs.values())), context)
        mkey, msign = canonical_key(main, context)
        if mkey is None:
            raise AssertionError("realized representative vanished")
        if mkey != key:
            # main term is the representative; corrections were generated
            push(main, c)
            for fs, cc in corr:
                push(fs, c * cc)
            continue
        result.add_term(key, c)
    return result


def is_zero(expr: TensorExpr, context: str = "general", dim: int = 6) -> bool:
    return not normal_form(expr, context, dim)


def canonicalize_expr(expr: TensorExpr, context: str = "general", dim: int = 6) -> TensorExpr:
    """Monoterm canonical form: metric factors absorbed, W traces dropped, each
    monomial relabeled to its canonical representative, like terms merged.
    Derivative order is kept (no commutation); idempotent."""
    out = TensorExpr()
    todo = list(expr.items())
    while todo:
        k, c = todo.pop()
        r = _metric_rule(k, dim)
        if r is not None:
            todo.extend((fs, c * cc) for fs, cc in r)
            continue
        if any(f.head in _CURV_ZERO[context] for f in k):
            continue
        if any(f.head == "W" and len(set(f.slots)) < 4 for f in k):
            continue
        key, sign = canonical_key(k, context)
        if key is not None:
            out.add_term(key, sign * c)
    return out


def riemann_decompose(expr: TensorExpr, dim: int = 6) -> TensorExpr:
    """Replace every R, Rc and Sc by W, V, J and the metric."""
    out = TensorExpr()
    todo = list(expr.items())
    while todo:
        k, c = todo.pop()
        for i, fac in enumerate(k):
            if fac.head in ("R", "Rc", "Sc"):
                todo.extend((_replace(k, i, fs), c * cc) for fs, cc in _decompose(fac, dim))
                break
        else:
            out.add_term(k, c)
    return out


def commute_derivatives(term: TensorExpr, factor: int, position: int, context: str = "general") -> TensorExpr:
    """Swap derivative slots ``position, position + 1`` of one factor of a monomial."""
    if len(term) != 1:
        raise ValueError("commute_derivatives acts on a single monomial")
    (k, c), = term.items()
    if not 0 <= factor < len(k) or not 0 <= position < len(k[factor].derivs) - 1:
        raise IndexError("no adjacent derivative pair at that position")
    return TensorExpr([(fs, c * cc) for fs, cc in commute(k, factor, position, context)])
