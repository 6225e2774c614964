"""Plain-text abstract-index grammar.

EBNF::

    expr      = [sign] summand { sign summand } ;
    sign      = "+" | "-" ;
    summand   = [ rational [ "*" ] ] atom { atom } ;
    rational  = digits [ "/" digits ] ;
    atom      = "(" expr ")" | factor ;
    factor    = head { block } ;
    head      = "eta" | "f0" | "f1" | "f2" | "f3" | "delta" | "Rc" | "Sc"
              | "f" | "h" | "g" | "W" | "V" | "J" | "R" ;
    block     = ( "_" | "^" ) ( "{" indices "}" | index ) | "{}" ;
    indices   = { index | ";" } ;
    index     = letter { digit } ;

Inside braces, whitespace separates tokens and a run like ``ijk`` is read as
three indices.  Indices before the first ``;`` of a factor are tensor slots,
indices after it are covariant derivatives (``f_{;ij}`` is ``nabla_j nabla_i f``).
On scalars (functions, ``J``, ``Sc``) every index is a derivative, so ``f_i``
means ``f_{;i}``.  ``delta`` is read as the metric.  Example: ``W^{ijk}{}_{l;}{}^{l}``.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .expr import SLOT_COUNT, Factor, TensorExpr, free_labels, multiply

_HEAD = re.compile(r"eta|f[0-3]|delta|Rc|Sc|[fhgWVJR]")
_INDEX = re.compile(r"[A-Za-z][0-9]*")
_NUMBER = re.compile(r"\d+(?:/\d+)?")


class ParseError(ValueError):
    pass


class _Parser:
    def __init__(self, text: str):
        self.s = text
        self.i = 0

    def ws(self):
        while self.i < len(self.s) and self.s[self.i] in " \t\n\\,":
            # tolerate LaTeX thin spaces "\," and line breaks
            self.i += 1

    def peek(self) -> str:
        self.ws()
        return self.s[self.i] if self.i < len(self.s) else ""

    def error(self, msg):
        raise ParseError(f"{msg} at position {self.i}: {self.s[self.i:self.i + 20]!r}")

    def expr(self) -> TensorExpr:
        total = TensorExpr()
        sign = 1
        c = self.peek()
        if c in "+-":
            sign = -1 if c == "-" else 1
            self.i += 1
        total += self.summand().scale(sign)
        while True:
            c = self.peek()
            if c in "+-" and c:
                self.i += 1
                total += self.summand().scale(-1 if c == "-" else 1)
            else:
                return total

    def summand(self) -> TensorExpr:
        self.ws()
        coeff = Fraction(1)
        m = _NUMBER.match(self.s, self.i)
        if m:
            coeff = Fraction(m.group(0))
            self.i = m.end()
            if self.peek() == "*":
                self.i += 1
        atoms = []
        while True:
            c = self.peek()
            if c == "(":
                self.i += 1
                inner = self.expr()
                if self.peek() != ")":
                    self.error("expected ')'")
                self.i += 1
                atoms.append(inner)
            elif c and _HEAD.match(self.s, self.i):
                atoms.append(TensorExpr.monomial((self.factor(),)))
            else:
                break
        if not atoms:
            if m:
                return TensorExpr.monomial((), coeff)
            self.error("expected a factor or group")
        out = atoms[0]
        for a in atoms[1:]:
            out = multiply(out, a) if _has_dummies(out) or _has_dummies(a) else _concat(out, a)
        return out.scale(coeff)

    def factor(self) -> Factor:
        m = _HEAD.match(self.s, self.i)
        head = m.group(0)
        self.i = m.end()
        if head == "delta":
            head = "g"
        slots, derivs = [], []
        seen_semicolon = False
        while self.i < len(self.s):
            c = self.s[self.i]
            if c == "{" and self.s.startswith("{}", self.i):
                self.i += 2
                continue
            if c not in "_^":
                break
            self.i += 1
            if self.i < len(self.s) and self.s[self.i] == "{":
                end = self.s.find("}", self.i)
                if end < 0:
                    self.error("unclosed brace")
                body = self.s[self.i + 1:end]
                self.i = end + 1
            else:
                mm = _INDEX.match(self.s, self.i)
                if not mm:
                    self.error("expected an index")
                body = mm.group(0)
                self.i = mm.end()
            for chunk in body.replace(";", " ; ").split():
                if chunk == ";":
                    if seen_semicolon:
                        self.error("two semicolons in one factor")
                    seen_semicolon = True
                    continue
                pos = 0
                while pos < len(chunk):
                    mm = _INDEX.match(chunk, pos)
                    if not mm:
                        raise ParseError(f"bad index token {chunk!r}")
                    (derivs if seen_semicolon else slots).append(mm.group(0))
                    pos = mm.end()
        if SLOT_COUNT[head] == 0:
            # scalars: every index is a derivative, the semicolon is optional
            slots, derivs = [], slots + derivs
        if len(slots) != SLOT_COUNT[head]:
            raise ParseError(f"{head} needs {SLOT_COUNT[head]} slot indices, got {slots}")
        return Factor(head, tuple(slots), tuple(derivs))


def _has_dummies(e: TensorExpr) -> bool:
    from .expr import dummy_labels

    return any(dummy_labels(k) for k in e.terms)


def _concat(a: TensorExpr, b: TensorExpr) -> TensorExpr:
    out = TensorExpr()
    for ka, ca in a.terms.items():
        for kb, cb in b.terms.items():
            out.add_term(ka + kb, ca * cb)
    return out


def parse_expr(text: str) -> TensorExpr:
    p = _Parser(text)
    out = p.expr()
    if p.peek():
        p.error("unexpected trailing input")
    frees = {tuple(sorted(free_labels(factors))) for factors in out.terms}
    if len(frees) > 1:
        raise ParseError(f"terms have different free indices: {sorted(frees)}")
    return out


def parse_term(text: str) -> tuple:
    e = parse_expr(text)
    if len(e) != 1:
        raise ParseError("expected a single monomial")
    return next(iter(e.terms))
