"""Exact computation of the conformally invariant bilinear forms built from the
residue of commutators with the sign operator on middle-degree forms."""
from __future__ import annotations

__version__ = "0.1.0"
