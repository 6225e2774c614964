"""Printers: parseable plain text and LaTeX.

Summed labels are renamed to letters; a summed index is written down at its
first occurrence and up at its second, free indices are written down.
"""
from __future__ import annotations

from fractions import Fraction

from .expr import TensorExpr, label_counts

_LETTERS = "ijklmpqrsabcdeuvwxyz"
_LATEX_HEAD = {"eta": r"\eta", "Rc": r"\mathrm{Rc}", "Sc": r"\mathrm{Sc}", "g": "g"}


def _letter_map(factors: tuple) -> dict:
    counts = label_counts(factors)
    frees = {x for x, k in counts.items() if k == 1}
    taken = {x for x in frees if len(x) == 1}
    pool = [c for c in _LETTERS if c not in taken]
    extra = 0
    mapping = {}
    for fac in factors:
        for lab in fac.indices:
            if lab in mapping:
                continue
            if lab in frees:
                mapping[lab] = lab if not lab.startswith("~") else f"z{len(mapping)}"
                continue
            if pool:
                mapping[lab] = pool.pop(0)
            else:
                extra += 1
                mapping[lab] = f"a{extra}"
    return mapping


def _needs_spaces(labels) -> bool:
    return any(len(x) > 1 for x in labels)


def _index_blocks(fac, mapping, seen, latex):
    """Runs of (variance, [tokens]) with ';' marking the derivative boundary."""
    runs = []
    tokens = [(lab, False) for lab in fac.slots] + [(lab, True) for lab in fac.derivs]
    first_deriv = True
    for lab, is_deriv in tokens:
        var = "^" if lab in seen else "_"
        seen.add(lab)
        tok = mapping[lab]
        if is_deriv and first_deriv:
            tok = ";" + tok
            first_deriv = False
        if runs and runs[-1][0] == var:
            runs[-1][1].append(tok)
        else:
            runs.append((var, [tok]))
    return runs


def _factor_text(fac, mapping, seen, latex=False) -> str:
    head = _LATEX_HEAD.get(fac.head, fac.head) if latex else fac.head
    runs = _index_blocks(fac, mapping, seen, latex)
    if not runs:
        return head
    labels = [mapping[x] for x in fac.indices]
    sep = " " if _needs_spaces(labels) else ""
    parts = []
    for var, toks in runs:
        body = sep.join(toks) if not sep else " ".join(t.replace(";", "; ") for t in toks)
        parts.append(f"{var}{{{body}}}")
    return head + "{}".join(parts)


def _coeff_text(c: Fraction, first: bool, has_factors: bool) -> str:
    sign = "-" if c < 0 else ("" if first else "+")
    a = abs(c)
    mag = "" if a == 1 and has_factors else str(a)
    if not first:
        sign = f" {sign} "
    return sign + mag


def _sort_key(item):
    factors, c = item
    return (tuple(f.shape for f in factors), repr(factors))


def to_text(expr: TensorExpr, latex: bool = False) -> str:
    if not expr.terms:
        return "0"
    out = []
    for n, (factors, c) in enumerate(sorted(expr.items(), key=_sort_key)):
        mapping = _letter_map(factors)
        seen: set = set()
        body = " ".join(_factor_text(f, mapping, seen, latex) for f in factors)
        coeff = _coeff_text(c, n == 0, bool(factors))
        if latex and c.denominator != 1:
            a = abs(c)
            coeff = coeff.replace(str(a), rf"\tfrac{{{a.numerator}}}{{{a.denominator}}}")
        out.append(coeff + (" " if coeff.strip("+- ") and body else "") + body)
    return "".join(out)


def to_latex(expr: TensorExpr) -> str:
    return to_text(expr, latex=True)
