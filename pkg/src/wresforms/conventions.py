"""Sign and normalization conventions shared by the flat and curved layers."""
from __future__ import annotations

from fractions import Fraction

from .flat import CoefficientTable

DIMENSION = 6
# X_{A;kl} - X_{A;lk} = RICCI_SIGN * sum_t R_{m a_t k l} X_{A[a_t -> m]}
RICCI_SIGN = 1
# W_{ijkl;l} = WEYL_DIVERGENCE * (V_{ik;j} - V_{jk;i}) in dimension 6 (d - 3)
WEYL_DIVERGENCE = DIMENSION - 3
# weight of the Riemannian volume density under g -> e^{2 eta} g
DENSITY_WEIGHT = DIMENSION


def display_sign(n: int) -> int:
    """Factor taking the engine's partial-derivative table to the normalization
    used by the index-notation displays: ``(-1)^(n/2)``, i.e. the D-convention
    table read with covariant derivatives in place of ``D``."""
    return -1 if (n // 2) % 2 else 1


def display_table(table: CoefficientTable) -> CoefficientTable:
    """Partial-convention table in display normalization."""
    t = table.converted("partial")
    s = display_sign(t.n)
    return CoefficientTable(t.n, {k: s * v for k, v in t.entries.items()}, "partial", t.dim)


def area_factor(n: int) -> Fraction:
    """Ratio ``|S^(n-1)| / pi^(n/2)`` (rational for even n): multiply a table
    computed with the normalized sphere measure by this and ``pi^(n/2)`` to get
    the unnormalized measure."""
    from .moments import sphere_area_factor

    rational, _ = sphere_area_factor(n)
    return Fraction(rational)
