"""Abstract-index tensor polynomials over Q with a numeric jet oracle."""
from __future__ import annotations

from fractions import Fraction

from .canon import canonical_key
from .expr import (Factor, TensorExpr, covariant_derivative, covariant_derivatives, filtration_degrees as
                   _factor_degrees, leibniz_substitute, multiply)
from .format import to_latex, to_text
from .jets import JetSample, evaluate_exact
from .normal import canonicalize_expr as canonicalize
from .normal import commute_derivatives, is_zero, normal_form, riemann_decompose
from .parse import ParseError, parse_expr
from .relations import Certificate, RelationSpace, express_in_basis, verify_identity


def filtration_degrees(term) -> tuple:
    """``(k_R, k_nabla)`` of a monomial (a factor tuple or a one-term expression)."""
    if isinstance(term, TensorExpr):
        if len(term) != 1:
            raise ValueError("filtration degrees are defined per monomial")
        (term, _), = term.items()
    return _factor_degrees(term)


def evaluate_components(expr: TensorExpr, jet: JetSample | None = None, n: int = 6, seed: int = 0,
                        kind: str = "general") -> Fraction:
    """Exact value at the origin of a scalar expression on a metric and function jet."""
    jet = jet or JetSample(seed=seed, kind=kind, dim=n)
    return evaluate_exact(expr, jet)


__all__ = [
    "Certificate", "Factor", "JetSample", "ParseError", "RelationSpace", "TensorExpr", "canonical_key",
    "canonicalize", "commute_derivatives", "covariant_derivative", "covariant_derivatives",
    "evaluate_components", "express_in_basis", "filtration_degrees", "is_zero", "leibniz_substitute",
    "multiply", "normal_form", "parse_expr", "riemann_decompose", "to_latex", "to_text", "verify_identity",
]
