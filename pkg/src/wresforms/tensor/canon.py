"""Canonical relabeling of monomials under monoterm symmetries.

Each factor's index positions are split into segments:

* ``block``: a run of positions on which all permutations act with sign +1
  (symmetric metric-like slots, the first two derivatives of a scalar, and in
  the symmetric search mode every derivative run);
* ``riemann``: the 8-element group of the four slots of W or R;
* ``single``: a position that may not move.

Factors are placed greedily in order of (head, slot count, derivative count)
and the lexicographically smallest index encoding is kept, with all ties kept
as parallel states.  Free labels encode before summed ones; summed labels are
numbered by first appearance.  If the minimum is reached with both signs the
monomial vanishes.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .expr import FUNCTION_HEADS, Factor, label_counts

CONTEXTS = ("flat", "cf", "general")
MODES = ("exact", "symmetric")

_RIEMANN_GROUP = None


def _riemann_group():
    global _RIEMANN_GROUP
    if _RIEMANN_GROUP is None:
        gens = [((1, 0, 2, 3), -1), ((0, 1, 3, 2), -1), ((2, 3, 0, 1), 1)]
        elems = {(0, 1, 2, 3): 1}
        frontier = [(0, 1, 2, 3)]
        while frontier:
            nxt = []
            for p in frontier:
                for g, s in gens:
                    q = tuple(p[g[k]] for k in range(4))
                    if q not in elems:
                        elems[q] = elems[p] * s
                        nxt.append(q)
            frontier = nxt
        _RIEMANN_GROUP = tuple(elems.items())
    return _RIEMANN_GROUP


def segments(fac: Factor, context: str, mode: str) -> tuple:
    """Segment structure of a factor's positions (see module docstring)."""
    ns, nd = len(fac.slots), len(fac.derivs)
    total = ns + nd
    sym_derivs = mode == "symmetric" or context == "flat"
    segs = []
    start = ns
    if fac.head in ("W", "R"):
        segs.append(("riemann", (0, 1, 2, 3)))
    elif ns == 2:
        if fac.head == "V" and context in ("cf", "flat") and nd >= 1:
            if sym_derivs:
                return (("block", tuple(range(total))),)
            segs.append(("block", (0, 1, 2)))
            start = 3
        else:
            segs.append(("block", (0, 1)))
    elif nd >= 2 and not sym_derivs:
        segs.append(("block", (0, 1)))
        start = 2
    rest = tuple(range(start, total))
    if rest:
        if sym_derivs:
            segs.append(("block", rest))
        else:
            segs.extend(("single", (p,)) for p in rest)
    return tuple(segs)


def _shape(fac: Factor) -> tuple:
    return fac.shape


@dataclass(frozen=True)
class _State:
    remaining: tuple
    mapping: tuple  # sorted (label, number) pairs
    next_num: int
    sign: int
    placed: tuple  # ((original index, positions order), ...)


def _code(label, mapping: dict, frees: set):
    if label in frees:
        return (0, label)
    n = mapping.get(label)
    return (1, n) if n is not None else None


def _segment_options(labels, seg, mapping, next_num, frees):
    """Minimal arrangements of one segment: list of (enc, positions, sign, mapping, next)."""
    kind, pos = seg
    if kind == "single":
        p = pos[0]
        m = dict(mapping)
        code = _code(labels[p], m, frees)
        if code is None:
            m[labels[p]] = next_num
            code = (1, next_num)
            next_num += 1
        return [((code,), (p,), 1, m, next_num)]
    if kind == "riemann":
        best = None
        out = []
        for perm, sg in _riemann_group():
            m = dict(mapping)
            nn = next_num
            enc = []
            order = tuple(pos[k] for k in perm)
            for p in order:
                c = _code(labels[p], m, frees)
                if c is None:
                    m[labels[p]] = nn
                    c = (1, nn)
                    nn += 1
                enc.append(c)
            enc = tuple(enc)
            if best is None or enc < best:
                best, out = enc, [(enc, order, sg, m, nn)]
            elif enc == best:
                out.append((enc, order, sg, m, nn))
        return out
    # block
    known, unknown = [], []
    for p in pos:
        c = _code(labels[p], mapping, frees)
        (known if c is not None else unknown).append((c, p))
    known.sort()
    by_label: dict = {}
    for _, p in unknown:
        by_label.setdefault(labels[p], []).append(p)
    pairs = [ps for ps in by_label.values() if len(ps) == 2]
    singles = [ps[0] for ps in by_label.values() if len(ps) == 1]
    pairs.sort(key=lambda ps: ps[0])
    out = []
    head_enc = tuple(c for c, _ in known)
    head_pos = tuple(p for _, p in known)
    for perm in itertools.permutations(singles) if len(singles) > 1 else [tuple(singles)]:
        m = dict(mapping)
        nn = next_num
        enc = list(head_enc)
        order = list(head_pos)
        for ps in pairs:
            m[labels[ps[0]]] = nn
            enc += [(1, nn), (1, nn)]
            order += ps
            nn += 1
        for p in perm:
            m[labels[p]] = nn
            enc.append((1, nn))
            order.append(p)
            nn += 1
        out.append((tuple(enc), tuple(order), 1, m, nn))
    return out


def _factor_options(fac: Factor, segs, mapping, next_num, frees):
    labels = fac.indices
    opts = [((), (), 1, mapping, next_num)]
    for seg in segs:
        new = []
        best = None
        for enc, order, sg, m, nn in opts:
            for e2, o2, s2, m2, n2 in _segment_options(labels, seg, m, nn, frees):
                full = enc + e2
                if best is None or full < best:
                    best, new = full, [(full, order + o2, sg * s2, m2, n2)]
                elif full == best:
                    new.append((full, order + o2, sg * s2, m2, n2))
        opts = new
    return opts


@dataclass(frozen=True)
class CanonicalResult:
    factors: tuple | None  # None when the monomial vanishes by symmetry
    sign: int
    arrangements: tuple  # per sign reached: (sign, ((orig index, positions order), ...))


def _pre_rename(factors: tuple) -> tuple:
    counts = label_counts(factors)
    mapping = {}
    k = 0
    for fac in factors:
        for lab in fac.indices:
            if counts[lab] == 2 and lab not in mapping:
                mapping[lab] = f"~p{k}"
                k += 1
    return tuple(f.relabel(mapping) for f in factors)


def canonicalize(factors: tuple, context: str = "general", mode: str = "exact") -> CanonicalResult:
    return _canonicalize(_pre_rename(tuple(factors)), context, mode)


@lru_cache(maxsize=200000)
def _canonicalize(factors: tuple, context: str, mode: str) -> CanonicalResult:
    if context not in CONTEXTS or mode not in MODES:
        raise ValueError(f"bad context/mode {context}/{mode}")
    counts = label_counts(factors)
    if any(v > 2 for v in counts.values()):
        raise ValueError("an index occurs more than twice")
    frees = {x for x, v in counts.items() if v == 1}
    segs = [segments(f, context, mode) for f in factors]
    states = [_State(tuple(range(len(factors))), (), 0, 1, ())]
    prefix = []
    for _ in range(len(factors)):
        best = None
        cand = []
        min_shape = min(_shape(factors[i]) for i in states[0].remaining)
        for st in states:
            mapping = dict(st.mapping)
            for i in st.remaining:
                if _shape(factors[i]) != min_shape:
                    continue
                for enc, order, sg, m, nn in _factor_options(factors[i], segs[i], mapping, st.next_num, frees):
                    if best is None or enc < best:
                        best, cand = enc, []
                    if enc == best:
                        cand.append((st, i, order, sg, m, nn))
        prefix.append((min_shape, best))
        seen = {}
        for st, i, order, sg, m, nn in cand:
            rem = tuple(j for j in st.remaining if j != i)
            pending = tuple(sorted((lab, num) for lab, num in m.items() if _pending(lab, rem, factors)))
            key = (rem, pending, st.sign * sg)
            if key not in seen:
                seen[key] = _State(rem, tuple(sorted(m.items())), nn, st.sign * sg,
                                   st.placed + ((i, order),))
        states = list(seen.values())
    signs = {}
    for st in states:
        signs.setdefault(st.sign, st.placed)
    arrangements = tuple(sorted(signs.items(), reverse=True))
    if len(signs) == 2:
        return CanonicalResult(None, 0, arrangements)
    out = []
    for (shape, enc), (i, _) in zip(prefix, states[0].placed):
        fac = factors[i]
        labs = tuple(c[1] if c[0] == 0 else f"#{c[1]}" for c in enc)
        out.append(fac.with_indices(labs))
    return CanonicalResult(tuple(out), states[0].sign, arrangements)


def _pending(label, remaining, factors) -> bool:
    return any(label in factors[j].indices for j in remaining)


def canonical_key(factors: tuple, context: str = "general"):
    """``(key, sign)``; key None when the monomial vanishes by symmetry."""
    r = canonicalize(factors, context, "exact")
    return r.factors, r.sign


def is_function_head(head: str) -> bool:
    return head in FUNCTION_HEADS
