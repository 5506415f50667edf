"""Symmetric powers of characters and their decompositions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple

from .chartable import CharacterTable, ClassFunction, inner_product, power_class
from .exactnum import CyclotomicNumber, binomial

__all__ = [
    "ClassFunction",
    "Decomposition",
    "NotACharacter",
    "sym_power_characters",
    "sym_power_character",
    "decompose",
    "achievable_subdims",
    "allowed_h_values",
]


class NotACharacter(ValueError):
    pass


def sym_power_characters(chi: ClassFunction, n_max: int) -> List[ClassFunction]:
    """[Sym^0 chi, ..., Sym^n_max chi] via the Newton recurrence

    s_n(g) = (1/n) * sum_{k=1..n} chi(g^k) * s_{n-k}(g).
    """
    t = chi.table
    one = CyclotomicNumber.coerce(1)
    per_class: List[List[CyclotomicNumber]] = []
    for c in range(t.class_count):
        powers = [None] + [chi.values[power_class(t, c, k)] for k in range(1, n_max + 1)]
        s = [one]
        for n in range(1, n_max + 1):
            acc = powers[1] * s[n - 1]
            for k in range(2, n + 1):
                acc = acc + powers[k] * s[n - k]
            s.append(acc * Fraction(1, n))
        per_class.append(s)
    return [ClassFunction(t, tuple(per_class[c][n] for c in range(t.class_count))) for n in range(n_max + 1)]


def sym_power_character(chi: ClassFunction, n: int) -> ClassFunction:
    if n < 0:
        raise ValueError("n must be nonnegative")
    return sym_power_characters(chi, n)[n]


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Multiplicities of irreducibles, as (irreducible index, multiplicity) pairs."""

    table: CharacterTable
    parts: Tuple[Tuple[int, int], ...]

    @property
    def degree(self) -> int:
        return sum(self.table.irreducibles[i].degree * m for i, m in self.parts)

    def degrees(self) -> List[Tuple[int, int]]:
        """(degree, multiplicity) per part, in part order."""
        return [(self.table.irreducibles[i].degree, m) for i, m in self.parts]

    def degree_multiset(self) -> List[int]:
        out: List[int] = []
        for d, m in self.degrees():
            out.extend([d] * m)
        return sorted(out)

    def reconstruct(self) -> ClassFunction:
        t = self.table
        vals = [CyclotomicNumber.coerce(0)] * t.class_count
        for i, m in self.parts:
            chi = t.irreducibles[i].values
            vals = [v + chi[c] * m for c, v in enumerate(vals)]
        return ClassFunction(t, tuple(vals))

    def to_dict(self) -> Dict[str, object]:
        return {
            "parts": [
                {
                    "index": i,
                    "name": self.table.irreducibles[i].name,
                    "degree": self.table.irreducibles[i].degree,
                    "multiplicity": m,
                }
                for i, m in self.parts
            ],
            "degree": self.degree,
        }


def decompose(f: ClassFunction) -> Decomposition:
    t = f.table
    parts = []
    for i in range(len(t.irreducibles)):
        m = inner_product(t, f, t.character(i))
        if m.denominator != 1 or m < 0:
            raise NotACharacter(f"multiplicity of {t.irreducibles[i].name} is {m}")
        if m:
            parts.append((i, int(m)))
    d = Decomposition(t, tuple(parts))
    if d.reconstruct() != f:
        raise NotACharacter("class function is not spanned by the irreducibles of its table")
    return d


def achievable_subdims(d: Decomposition) -> Tuple[int, ...]:
    """Every dimension of a subrepresentation: sums of j_i * degree_i, 0 <= j_i <= m_i."""
    sums = {0}
    for degree, mult in d.degrees():
        sums = {s + j * degree for s in sums for j in range(mult + 1)}
    return tuple(sorted(sums))


def allowed_h_values(t: CharacterTable, n: int, ambient_dim: int, chi: ClassFunction | None = None) -> Tuple[int, ...]:
    """Possible h^0(O_Z(n)) = C(ambient_dim+n, n) - q with q a subrepresentation dimension of Sym^n.

    Zero is dropped: the center is nonempty, so h^0 >= 1.
    """
    chi = chi if chi is not None else t.distinguished
    if chi.degree != ambient_dim + 1:
        raise ValueError(f"representation has degree {chi.degree}, expected {ambient_dim + 1}")
    full = binomial(ambient_dim + n, n)
    sub = achievable_subdims(decompose(sym_power_character(chi, n)))
    return tuple(sorted({full - q for q in sub} - {0}))


def h_value_sets(t: CharacterTable, ambient_dim: int, n_max: int = 5) -> Dict[int, Tuple[int, ...]]:
    chi = t.distinguished
    syms = sym_power_characters(chi, n_max)
    out = {}
    for n in range(1, n_max + 1):
        full = binomial(ambient_dim + n, n)
        sub = achievable_subdims(decompose(syms[n]))
        out[n] = tuple(sorted({full - q for q in sub} - {0}))
    return out
