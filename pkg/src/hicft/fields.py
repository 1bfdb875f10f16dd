"""The field tower in one place: ``F_q``, ``F_q((t))`` and ``F_q((s))((t))``.

Finite fields live in :mod:`hicft.gf`, Laurent series in
:mod:`hicft.laurent`, monomial-times-unit elements of the two-dimensional
local field in :mod:`hicft.bilaurent`.  This module re-exports them and adds
the small named operations used by the command line and the tests.
"""

from __future__ import annotations

from .bilaurent import BiLaurentElement, TwoLocalField, parse_bilaurent
from .errors import ZeroElement
from .gf import GF, fq, irreducibles, is_irreducible, prime_field
from .laurent import DEFAULT_PRECISION, LaurentElement, LaurentField, parse_laurent

FqSpec = GF


def fq_ops(F: GF, a: int, b: int) -> dict:
    """Sum, product, quotient (None when b = 0) and ``a^b`` of two field elements."""
    return {
        "add": F.add(a, b),
        "mul": F.mul(a, b),
        "div": F.div(a, b) if b else None,
        "pow": F.pow(a, b) if a else (0 if b else 1),
    }


def laurent_ops(a: LaurentElement, b: LaurentElement) -> dict:
    out = {"add": a + b, "mul": a * b}
    out["div"] = None if b.is_zero else a / b
    return out


def unit_decompose(a: LaurentElement) -> tuple[int, LaurentElement]:
    """``a = t^v * u`` with u a unit; the zero element has no decomposition."""
    if a.is_zero:
        raise ZeroElement("zero has no valuation")
    return a.unit_decompose()


def bilaurent_residue_tower(a: BiLaurentElement, outer: str = "t", precision: int = DEFAULT_PRECISION):
    """``(v_outer, leading coefficient in the inner Laurent field)``, read off the exact form."""
    return a.tower(outer, precision)


def parse_element(field, text: str):
    """Parse an element in the textual syntax of its field."""
    if isinstance(field, GF):
        return field.parse(text)
    if isinstance(field, LaurentField):
        return parse_laurent(field, text)
    if isinstance(field, TwoLocalField):
        return parse_bilaurent(field.coeff, text)
    raise TypeError(f"unknown field {field!r}")


def format_element(field, x) -> str:
    return field.format(x)


__all__ = [
    "FqSpec",
    "GF",
    "fq",
    "prime_field",
    "irreducibles",
    "is_irreducible",
    "LaurentField",
    "LaurentElement",
    "TwoLocalField",
    "BiLaurentElement",
    "fq_ops",
    "laurent_ops",
    "unit_decompose",
    "bilaurent_residue_tower",
    "parse_element",
    "format_element",
]
