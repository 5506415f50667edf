"""Molien coefficients read off symmetric-power characters.

The multiplicity of a degree-1 character ``lam`` in Sym^n(V) counts the
semi-invariants of degree ``n`` with weight ``lam``; ``lam`` trivial gives
the invariants.
"""

from __future__ import annotations

from typing import Dict, List, Optional

from .chartable import DEFAULT_MAX_DEGREE, CharacterTable, ClassFunction, inner_product
from .sympow import sym_power_characters

__all__ = [
    "NotFound",
    "molien_coefficients",
    "semiinvariant_multiplicities",
    "min_invariant_degree",
    "min_semiinvariant_degree",
    "has_degree2_invariant",
    "molien_table",
]


class NotFound(LookupError):
    def __init__(self, max_degree: int, what: str = "invariant"):
        self.max_degree = max_degree
        super().__init__(f"no {what} of degree 1..{max_degree}")


def _multiplicity(t: CharacterTable, f: ClassFunction, lam: ClassFunction) -> int:
    m = inner_product(t, f, lam)
    if m.denominator != 1 or m < 0:
        raise ArithmeticError(f"multiplicity {m} is not a nonnegative integer")
    return int(m)


def molien_coefficients(t: CharacterTable, max_degree: int, chi: Optional[ClassFunction] = None) -> List[int]:
    """Dimensions of the invariants of degree 0..max_degree."""
    chi = chi if chi is not None else t.distinguished
    return [_multiplicity(t, s, t.trivial) for s in sym_power_characters(chi, max_degree)]


def semiinvariant_multiplicities(
    t: CharacterTable, max_degree: int, chi: Optional[ClassFunction] = None
) -> List[Dict[str, int]]:
    """Per degree: {linear character name: multiplicity in Sym^n}."""
    chi = chi if chi is not None else t.distinguished
    linear = t.linear_characters()
    rows = []
    for s in sym_power_characters(chi, max_degree):
        rows.append({t.irreducibles[i].name: _multiplicity(t, s, t.character(i)) for i in linear})
    return rows


def min_invariant_degree(
    t: CharacterTable, max_degree: int = DEFAULT_MAX_DEGREE, chi: Optional[ClassFunction] = None
) -> int:
    coeffs = molien_coefficients(t, max_degree, chi)
    for n in range(1, max_degree + 1):
        if coeffs[n]:
            return n
    raise NotFound(max_degree)


def min_semiinvariant_degree(
    t: CharacterTable, max_degree: int = DEFAULT_MAX_DEGREE, chi: Optional[ClassFunction] = None
) -> int:
    rows = semiinvariant_multiplicities(t, max_degree, chi)
    for n in range(1, max_degree + 1):
        if any(rows[n].values()):
            return n
    raise NotFound(max_degree, "semi-invariant")


def has_degree2_invariant(t: CharacterTable, chi: Optional[ClassFunction] = None) -> bool:
    return molien_coefficients(t, 2, chi)[2] > 0


def molien_table(t: CharacterTable, max_degree: int = DEFAULT_MAX_DEGREE) -> Dict[str, object]:
    rows = semiinvariant_multiplicities(t, max_degree)
    out = []
    for n, row in enumerate(rows):
        inv = next((m for name, m in row.items() if _is_trivial(t, name)), 0)
        out.append({"degree": n, "invariants": inv, "semiinvariants": dict(sorted(row.items()))})
    first_inv = next((r["degree"] for r in out[1:] if r["invariants"]), None)
    first_semi = next((r["degree"] for r in out[1:] if any(r["semiinvariants"].values())), None)
    return {
        "group_name": t.group_name,
        "representation": t.distinguished_rep,
        "max_degree": max_degree,
        "coefficients": out,
        "min_invariant_degree": first_inv,
        "min_semiinvariant_degree": first_semi,
    }


def _is_trivial(t: CharacterTable, name: str) -> bool:
    chi = t.irreducibles[t.index_of(name)]
    return all(v == 1 for v in chi.values)
