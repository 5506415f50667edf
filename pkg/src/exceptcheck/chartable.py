"""Character tables with power maps: data model, JSON format, validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from .exactnum import CyclotomicNumber, NotRational, ParseError, parse_cyclotomic, total

DEFAULT_MAX_DEGREE = 12

__all__ = [
    "ConjugacyClass",
    "IrreducibleCharacter",
    "CharacterTable",
    "ClassFunction",
    "Violation",
    "ValidationReport",
    "TableParseError",
    "MissingPowerMap",
    "load",
    "from_dict",
    "to_dict",
    "validate",
    "power_class",
    "inner_product",
    "primes_up_to",
]


class TableParseError(ParseError):
    """A table file that cannot be materialized; ``location`` names the field."""

    def __init__(self, message: str, location: str = "", line: Optional[int] = None):
        self.location = location
        self.line = line
        where = location
        if line is not None:
            where = f"line {line}" + (f", {location}" if location else "")
        ValueError.__init__(self, f"{where}: {message}" if where else message)


class MissingPowerMap(KeyError):
    def __init__(self, prime: int, class_index: Optional[int] = None):
        self.prime = prime
        self.class_index = class_index
        super().__init__(f"no {prime}-power map" + ("" if class_index is None else f" for class {class_index}"))


def primes_up_to(n: int) -> List[int]:
    return [p for p in range(2, n + 1) if all(p % q for q in range(2, int(p**0.5) + 1))]


@dataclass(frozen=True)
class ConjugacyClass:
    index: int
    size: int
    element_order: int
    power_maps: Mapping[int, int]


@dataclass(frozen=True)
class IrreducibleCharacter:
    name: str
    degree: int
    values: Tuple[CyclotomicNumber, ...]


@dataclass(frozen=True, eq=False)
class CharacterTable:
    group_name: str
    order: int
    is_simple_modulo_center: bool
    center_in_commutator: bool
    classes: Tuple[ConjugacyClass, ...]
    irreducibles: Tuple[IrreducibleCharacter, ...]
    distinguished_rep: str
    primitive: bool
    source: str = ""
    notes: str = ""

    @property
    def class_count(self) -> int:
        return len(self.classes)

    @property
    def class_sizes(self) -> Tuple[int, ...]:
        return tuple(c.size for c in self.classes)

    @cached_property
    def center_order(self) -> int:
        """Number of central elements (classes of size one)."""
        return sum(1 for c in self.classes if c.size == 1)

    def index_of(self, name: str) -> int:
        for i, chi in enumerate(self.irreducibles):
            if chi.name == name:
                return i
        raise KeyError(f"{self.group_name} has no irreducible named {name!r}")

    def character(self, which: Union[int, str]) -> "ClassFunction":
        i = self.index_of(which) if isinstance(which, str) else which
        return ClassFunction(self, self.irreducibles[i].values)

    @property
    def distinguished_degree(self) -> int:
        return self.irreducibles[self.index_of(self.distinguished_rep)].degree

    @property
    def distinguished(self) -> "ClassFunction":
        return self.character(self.distinguished_rep)

    @property
    def trivial(self) -> "ClassFunction":
        return ClassFunction(self, (CyclotomicNumber.coerce(1),) * self.class_count)

    def linear_characters(self) -> List[int]:
        """Indices of the degree-1 irreducibles."""
        return [i for i, chi in enumerate(self.irreducibles) if chi.degree == 1]

    @cached_property
    def _power_cache(self) -> Dict[Tuple[int, int], int]:
        return {}

    def __repr__(self) -> str:
        return f"CharacterTable({self.group_name!r}, order={self.order}, classes={self.class_count})"


@dataclass(frozen=True, eq=False)
class ClassFunction:
    """One value per conjugacy class of ``table``."""

    table: CharacterTable
    values: Tuple[CyclotomicNumber, ...]

    def __post_init__(self):
        if len(self.values) != self.table.class_count:
            raise ValueError(f"expected {self.table.class_count} values, got {len(self.values)}")

    @property
    def degree(self) -> CyclotomicNumber:
        return self.values[0]

    def _check(self, other: "ClassFunction") -> None:
        if other.table is not self.table:
            raise ValueError("class functions live on different tables")

    def __add__(self, other: "ClassFunction") -> "ClassFunction":
        self._check(other)
        return ClassFunction(self.table, tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "ClassFunction") -> "ClassFunction":
        self._check(other)
        return ClassFunction(self.table, tuple(a - b for a, b in zip(self.values, other.values)))

    def __mul__(self, other: Union["ClassFunction", int, Fraction]) -> "ClassFunction":
        if isinstance(other, ClassFunction):
            self._check(other)
            return ClassFunction(self.table, tuple(a * b for a, b in zip(self.values, other.values)))
        return ClassFunction(self.table, tuple(a * other for a in self.values))

    __rmul__ = __mul__

    def conjugate(self) -> "ClassFunction":
        return ClassFunction(self.table, tuple(v.conjugate() for v in self.values))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ClassFunction):
            return NotImplemented
        return other.table is self.table and self.values == other.values

    def __hash__(self) -> int:
        return hash(self.values)


# ---------------------------------------------------------------------------
# file format


def _require(obj: Mapping[str, Any], key: str, kind, location: str):
    if key not in obj:
        raise TableParseError(f"missing field {key!r}", location)
    value = obj[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise TableParseError(f"{key!r} must be an integer", f"{location}.{key}".lstrip("."))
    if kind is not int and not isinstance(value, kind):
        raise TableParseError(f"{key!r} has wrong type {type(value).__name__}", f"{location}.{key}".lstrip("."))
    return value


def from_dict(obj: Mapping[str, Any]) -> CharacterTable:
    """Materialize a table from its decoded JSON object (no validation)."""
    if not isinstance(obj, Mapping):
        raise TableParseError("top level must be an object")
    classes = []
    for i, c in enumerate(_require(obj, "classes", list, "")):
        loc = f"classes[{i}]"
        if not isinstance(c, Mapping):
            raise TableParseError("class entry must be an object", loc)
        raw_maps = _require(c, "power_maps", dict, loc)
        maps = {}
        for p, target in raw_maps.items():
            try:
                prime = int(p)
            except ValueError:
                raise TableParseError(f"power map key {p!r} is not an integer", f"{loc}.power_maps") from None
            if isinstance(target, bool) or not isinstance(target, int):
                raise TableParseError("power map target must be a class index", f"{loc}.power_maps.{p}")
            maps[prime] = target
        classes.append(
            ConjugacyClass(
                index=i,
                size=_require(c, "size", int, loc),
                element_order=_require(c, "element_order", int, loc),
                power_maps=maps,
            )
        )
    irreducibles = []
    for i, chi in enumerate(_require(obj, "irreducibles", list, "")):
        loc = f"irreducibles[{i}]"
        if not isinstance(chi, Mapping):
            raise TableParseError("irreducible entry must be an object", loc)
        values = []
        for j, lit in enumerate(_require(chi, "values", list, loc)):
            try:
                values.append(parse_cyclotomic(lit))
            except ParseError as exc:
                err = TableParseError(str(exc), f"{loc}.values[{j}]")
                raise err from exc
        irreducibles.append(
            IrreducibleCharacter(
                name=_require(chi, "name", str, loc),
                degree=_require(chi, "degree", int, loc),
                values=tuple(values),
            )
        )
    return CharacterTable(
        group_name=_require(obj, "group_name", str, ""),
        order=_require(obj, "order", int, ""),
        is_simple_modulo_center=_require(obj, "is_simple_modulo_center", bool, ""),
        center_in_commutator=_require(obj, "center_in_commutator", bool, ""),
        classes=tuple(classes),
        irreducibles=tuple(irreducibles),
        distinguished_rep=_require(obj, "distinguished_rep", str, ""),
        primitive=_require(obj, "primitive", bool, ""),
        source=obj.get("source", ""),
        notes=obj.get("notes", ""),
    )


def load(path: Union[str, Path]) -> CharacterTable:
    text = Path(path).read_text(encoding="utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TableParseError(exc.msg, f"column {exc.colno}", exc.lineno) from exc
    try:
        return from_dict(obj)
    except TableParseError as exc:
        if exc.line is None:
            exc.line = _locate_line(text, exc.location)
            if exc.line is not None:
                exc.args = (f"line {exc.line}, {exc.args[0]}",)
        raise


def _locate_line(text: str, location: str) -> Optional[int]:
    # best effort: the n-th entry of classes/irreducibles is on its own line in bundled files
    import re

    m = re.match(r"(classes|irreducibles)\[(\d+)\]", location)
    if not m:
        return None
    key, idx = m.group(1), int(m.group(2))
    lines = text.splitlines()
    start = next((i for i, ln in enumerate(lines) if f'"{key}"' in ln), None)
    if start is None:
        return None
    probe = '"size"' if key == "classes" else '"name"'
    seen = -1
    for i in range(start, len(lines)):
        if probe in lines[i]:
            seen += 1
            if seen == idx:
                return i + 1
    return None


def to_dict(t: CharacterTable) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "group_name": t.group_name,
        "order": t.order,
        "is_simple_modulo_center": t.is_simple_modulo_center,
        "center_in_commutator": t.center_in_commutator,
        "primitive": t.primitive,
        "distinguished_rep": t.distinguished_rep,
    }
    if t.source:
        out["source"] = t.source
    if t.notes:
        out["notes"] = t.notes
    out["classes"] = [
        {
            "size": c.size,
            "element_order": c.element_order,
            "power_maps": {str(p): q for p, q in sorted(c.power_maps.items())},
        }
        for c in t.classes
    ]
    out["irreducibles"] = [
        {"name": chi.name, "degree": chi.degree, "values": [v.literal() for v in chi.values]}
        for chi in t.irreducibles
    ]
    return out


# ---------------------------------------------------------------------------
# power maps and inner products


def power_class(t: CharacterTable, cls: int, k: int) -> int:
    """Class of g^k for g in class ``cls``, composing prime power maps."""
    if k < 1:
        raise ValueError("k must be positive")
    cache = t._power_cache
    key = (cls, k)
    hit = cache.get(key)
    if hit is not None:
        return hit
    result = cls
    m = k
    p = 2
    while m > 1:
        while m % p == 0:
            maps = t.classes[result].power_maps
            if p not in maps:
                raise MissingPowerMap(p, result)
            result = maps[p]
            m //= p
        p += 1
    cache[key] = result
    return result


def inner_product(t: CharacterTable, a: ClassFunction, b: ClassFunction) -> Fraction:
    """(1/|G|) sum over classes of size * a(g) * conj(b(g)); must be rational."""
    terms = [a.values[i] * b.values[i].conjugate() * c.size for i, c in enumerate(t.classes)]
    s = total(terms)
    try:
        return s.as_rational() / t.order
    except NotRational:
        raise NotRational(f"inner product on {t.group_name} is not rational: {s}/{t.order}") from None


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str

    def to_dict(self) -> Dict[str, str]:
        return {"kind": self.kind, "message": self.message}


@dataclass
class ValidationReport:
    group_name: str
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, message: str) -> None:
        self.violations.append(Violation(kind, message))

    def kinds(self) -> set:
        return {v.kind for v in self.violations}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "group_name": self.group_name,
            "ok": self.ok,
            "violations": [v.to_dict() for v in self.violations],
        }


def validate(t: CharacterTable, max_degree: int = DEFAULT_MAX_DEGREE) -> ValidationReport:
    """Check the structural invariants and both orthogonality relations."""
    rep = ValidationReport(t.group_name)
    k = t.class_count
    if k == 0:
        rep.add("classes", "table has no classes")
        return rep

    # classes
    if sum(c.size for c in t.classes) != t.order:
        rep.add("class-size-sum", f"class sizes sum to {sum(c.size for c in t.classes)}, order is {t.order}")
    ident = t.classes[0]
    if ident.size != 1 or ident.element_order != 1:
        rep.add("identity-class", "class 0 must have size 1 and element order 1")
    for c in t.classes:
        if c.size < 1 or t.order % c.size:
            rep.add("class-size", f"class {c.index} has size {c.size} not dividing {t.order}")
        if c.element_order < 1:
            rep.add("element-order", f"class {c.index} has element order {c.element_order}")
    primes = primes_up_to(max_degree)
    for c in t.classes:
        for p in primes:
            if p not in c.power_maps:
                rep.add("power-map-missing", f"class {c.index} lacks the {p}-power map")
        for p, target in c.power_maps.items():
            if not 0 <= target < k:
                rep.add("power-map-range", f"class {c.index}: {p}-power map points to {target}")
                continue
            expected = c.element_order // gcd(c.element_order, p)
            if t.classes[target].element_order != expected:
                rep.add(
                    "power-map-order",
                    f"class {c.index} (order {c.element_order}) maps under p={p} to a class of order "
                    f"{t.classes[target].element_order}, expected {expected}",
                )
    for p in primes:
        if t.classes[0].power_maps.get(p, 0) != 0:
            rep.add("power-map-identity", f"{p}-power map moves the identity class")

    # characters
    names = [chi.name for chi in t.irreducibles]
    if len(set(names)) != len(names):
        rep.add("names", "irreducible names are not unique")
    if t.distinguished_rep not in names:
        rep.add("distinguished-rep", f"no irreducible named {t.distinguished_rep!r}")
    if len(t.irreducibles) != k:
        rep.add("square", f"{len(t.irreducibles)} irreducibles for {k} classes")
    shaped = True
    for chi in t.irreducibles:
        if len(chi.values) != k:
            rep.add("value-count", f"{chi.name} has {len(chi.values)} values for {k} classes")
            shaped = False
        elif chi.values[0] != chi.degree:
            rep.add("degree", f"{chi.name}: value at identity {chi.values[0]} differs from degree {chi.degree}")
    if sum(chi.degree**2 for chi in t.irreducibles) != t.order:
        rep.add("degree-sum", f"sum of squared degrees is {sum(chi.degree**2 for chi in t.irreducibles)}")
    trivial = [chi.name for chi in t.irreducibles if len(chi.values) == k and all(v == 1 for v in chi.values)]
    if len(trivial) != 1:
        rep.add("trivial", f"expected exactly one trivial character, found {len(trivial)}")
    if not shaped:
        return rep

    _check_row_orthogonality(t, rep)
    if len(t.irreducibles) == k:
        _check_column_orthogonality(t, rep)
    return rep


def _check_row_orthogonality(t: CharacterTable, rep: ValidationReport) -> None:
    conj = [[v.conjugate() for v in chi.values] for chi in t.irreducibles]
    sizes = t.class_sizes
    n = len(t.irreducibles)
    for i in range(n):
        vi = t.irreducibles[i].values
        for j in range(i, n):
            s = total(vi[c] * conj[j][c] * sizes[c] for c in range(t.class_count))
            expected = t.order if i == j else 0
            if s != expected:
                a, b = t.irreducibles[i].name, t.irreducibles[j].name
                shown = s.as_rational() / t.order if s.is_rational() else f"({s})/{t.order}"
                rep.add("orthogonality", f"<{a}, {b}> = {shown}, expected {1 if i == j else 0}")


def _check_column_orthogonality(t: CharacterTable, rep: ValidationReport) -> None:
    cols = [[chi.values[c] for chi in t.irreducibles] for c in range(t.class_count)]
    conj_cols = [[v.conjugate() for v in col] for col in cols]
    for g in range(t.class_count):
        for h in range(g, t.class_count):
            s = total(a * b for a, b in zip(cols[g], conj_cols[h]))
            expected = Fraction(t.order, t.classes[g].size) if g == h else 0
            if s != expected:
                rep.add(
                    "column-orthogonality",
                    f"classes {g},{h}: sum is {s}, expected {expected}",
                )
