"""Finite matrix groups over a cyclotomic field, enumerated from generators.

Elements are packed as integer arrays: a d x d matrix over Q(zeta_N) is
``A / den`` with ``A`` of shape (d, d, phi(N)) holding coordinates in the
power basis 1, z, ..., z^(phi-1) and ``gcd(A, den) == 1``. That form is
unique, so the packed bytes serve as the element's hash key.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exactnum import CyclotomicNumber, ParseError, _normal_conductor, parse_cyclotomic

__all__ = [
    "OrderExceeded",
    "NotAnInteger",
    "GeneratorFileError",
    "ExactMatrix",
    "MatrixGroup",
    "GroupClass",
    "closure",
    "direct_molien_coefficient",
    "direct_molien_coefficients",
    "character_of",
    "load_generators",
    "closure_from_file",
]

# Packed entries must stay far from int64 overflow inside a product.
_ENTRY_LIMIT = 1 << 24
_BATCH = 4096


class OrderExceeded(RuntimeError):
    def __init__(self, max_order: int):
        self.max_order = max_order
        super().__init__(f"closure exceeded {max_order} elements")


class NotAnInteger(ArithmeticError):
    pass


class GeneratorFileError(ValueError):
    pass


# ---------------------------------------------------------------------------
# power-basis bookkeeping


@lru_cache(maxsize=None)
def _field(n: int) -> Tuple[int, np.ndarray, np.ndarray]:
    """(phi, powers, mult): powers[e] is z^e reduced mod Phi_n; mult[i, j] is z^(i+j)."""
    phi_poly = _cyclotomic_poly(n)
    phi = len(phi_poly) - 1
    powers = np.zeros((n, phi), dtype=np.int64)
    vec = [0] * phi
    vec[0] = 1
    for e in range(n):
        powers[e] = vec
        # multiply by z, then reduce z^phi = -(c_0 + ... + c_{phi-1} z^(phi-1))
        top = vec[-1]
        vec = [0] + vec[:-1]
        if top:
            vec = [v - top * phi_poly[i] for i, v in enumerate(vec)]
    mult = np.stack([np.stack([powers[(i + j) % n] for j in range(phi)]) for i in range(phi)])
    powers.setflags(write=False)
    mult.setflags(write=False)
    return phi, powers, mult


@lru_cache(maxsize=None)
def _cyclotomic_poly(n: int) -> Tuple[int, ...]:
    """Coefficients of Phi_n, lowest degree first."""
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_div(poly, list(_cyclotomic_poly(d)))
    return tuple(poly)


def _poly_div(a: List[int], b: List[int]) -> List[int]:
    a = list(a)
    q = [0] * (len(a) - len(b) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = a[i + len(b) - 1] // b[-1]
        q[i] = c
        for j, bj in enumerate(b):
            a[i + j] -= c * bj
    if any(a):
        raise ArithmeticError("inexact polynomial division")
    return q


def _to_vector(x: CyclotomicNumber, n: int) -> Tuple[np.ndarray, int]:
    """Integer power-basis vector and denominator of x in Q(zeta_n)."""
    phi, powers, _ = _field(n)
    coeffs = x.coefficients_in(n)
    den = 1
    for c in coeffs.values():
        den = den * Fraction(c).denominator // gcd(den, Fraction(c).denominator)
    out = np.zeros(phi, dtype=object)
    for e, c in coeffs.items():
        out = out + powers[e].astype(object) * int(Fraction(c) * den)
    return out, den


def _from_vector(vec: Sequence[int], den: int, n: int) -> CyclotomicNumber:
    return CyclotomicNumber(n, {i: Fraction(int(c), den) for i, c in enumerate(vec) if c})


def _normalize(a: np.ndarray, den: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Divide each packed matrix and its denominator by their common gcd."""
    g = np.gcd.reduce(a.reshape(len(a), -1), axis=1)
    g = np.gcd(g, den)
    g[g == 0] = 1
    return a // g[:, None, None, None], den // g


def _guard(a: np.ndarray, den: np.ndarray) -> None:
    if a.size and (np.abs(a).max() > _ENTRY_LIMIT or den.max() > _ENTRY_LIMIT):
        raise ArithmeticError("packed matrix entries too large for exact int64 products")


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class ExactMatrix:
    """Square matrix with CyclotomicNumber entries, row-major."""

    entries: Tuple[Tuple[CyclotomicNumber, ...], ...]

    def __post_init__(self):
        d = len(self.entries)
        if d == 0 or any(len(row) != d for row in self.entries):
            raise ValueError("matrix must be square and nonempty")
        rows = tuple(tuple(CyclotomicNumber.coerce(x) for x in row) for row in self.entries)
        object.__setattr__(self, "entries", rows)

    @classmethod
    def identity(cls, d: int) -> "ExactMatrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d)))

    @classmethod
    def diagonal(cls, values: Sequence) -> "ExactMatrix":
        d = len(values)
        return cls(tuple(tuple(values[i] if i == j else 0 for j in range(d)) for i in range(d)))

    @property
    def dimension(self) -> int:
        return len(self.entries)

    @property
    def conductor(self) -> int:
        n = 1
        for row in self.entries:
            for x in row:
                n = n * x.conductor // gcd(n, x.conductor)
        return n

    def __mul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if other.dimension != self.dimension:
            raise ValueError("dimension mismatch")
        d = self.dimension
        cols = list(zip(*other.entries))
        out = []
        for row in self.entries:
            out.append(tuple(_dot(row, cols[c]) for c in range(d)))
        return ExactMatrix(tuple(out))

    def trace(self) -> CyclotomicNumber:
        return _sum(self.entries[i][i] for i in range(self.dimension))

    def determinant(self) -> CyclotomicNumber:
        """Gaussian elimination over the field."""
        m = [list(row) for row in self.entries]
        d = self.dimension
        det = CyclotomicNumber.coerce(1)
        for c in range(d):
            pivot = next((r for r in range(c, d) if not m[r][c].is_zero()), None)
            if pivot is None:
                return CyclotomicNumber.coerce(0)
            if pivot != c:
                m[c], m[pivot] = m[pivot], m[c]
                det = -det
            p = m[c][c]
            det = det * p
            inv = p.inverse()
            for r in range(c + 1, d):
                if m[r][c].is_zero():
                    continue
                f = m[r][c] * inv
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
        return det

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(tuple(zip(*self.entries)))

    def literal_rows(self) -> List[List[str]]:
        return [[x.literal() for x in row] for row in self.entries]


def _dot(a: Iterable[CyclotomicNumber], b: Iterable[CyclotomicNumber]) -> CyclotomicNumber:
    return _sum(x * y for x, y in zip(a, b) if not x.is_zero() and not y.is_zero())


def _sum(values: Iterable[CyclotomicNumber]) -> CyclotomicNumber:
    acc = CyclotomicNumber.coerce(0)
    for v in values:
        acc = acc + v
    return acc


# ---------------------------------------------------------------------------
# packed kernel


class _Packer:
    def __init__(self, dimension: int, conductor: int):
        self.d = dimension
        self.n = _normal_conductor(conductor)
        self.phi, self.powers, self.mult = _field(self.n)

    def pack(self, m: ExactMatrix) -> Tuple[np.ndarray, int]:
        d, phi = self.d, self.phi
        vecs, dens = [], []
        for row in m.entries:
            for x in row:
                v, den = _to_vector(x, self.n)
                vecs.append(v)
                dens.append(den)
        common = 1
        for den in dens:
            common = common * den // gcd(common, den)
        a = np.zeros((d, d, phi), dtype=object)
        for k, (v, den) in enumerate(zip(vecs, dens)):
            a[k // d, k % d] = v * (common // den)
        a = a.astype(np.int64)
        a2, den2 = _normalize(a[None], np.array([common], dtype=np.int64))
        return a2[0], int(den2[0])

    def unpack(self, a: np.ndarray, den: int) -> ExactMatrix:
        return ExactMatrix(
            tuple(tuple(_from_vector(a[r, c], den, self.n) for c in range(self.d)) for r in range(self.d))
        )

    def right_operator(self, g: np.ndarray) -> np.ndarray:
        """K with (X g)_rows = X_rows @ K, for row vectors indexed (s, i)."""
        k = np.einsum("scj,ijk->sick", g, self.mult)
        return k.reshape(self.d * self.phi, self.d * self.phi)

    def right_operators(self, gs: np.ndarray) -> np.ndarray:
        k = np.einsum("bscj,ijk->bsick", gs, self.mult)
        return k.reshape(len(gs), self.d * self.phi, self.d * self.phi)

    def times(self, a: np.ndarray, den: np.ndarray, op: np.ndarray, op_den: int) -> Tuple[np.ndarray, np.ndarray]:
        """Batch a / den times one fixed matrix, given by its right operator."""
        b = len(a)
        flat = a.reshape(b * self.d, self.d * self.phi) @ op
        out = flat.reshape(b, self.d, self.d, self.phi)
        res = _normalize(out, den * op_den)
        _guard(*res)
        return res

    def times_each(self, a, den, ops, op_den) -> Tuple[np.ndarray, np.ndarray]:
        """Batch product a[b] / den[b] times the b-th operator."""
        b = len(a)
        out = np.matmul(a.reshape(b, self.d, self.d * self.phi), ops).reshape(b, self.d, self.d, self.phi)
        res = _normalize(out, den * op_den)
        _guard(*res)
        return res

    def traces(self, a: np.ndarray, den: np.ndarray) -> np.ndarray:
        """Rows (trace vector..., den) with the trace reduced to lowest terms."""
        tr = np.einsum("bssi->bi", a)
        g = np.gcd(np.gcd.reduce(tr, axis=1), den)
        g[g == 0] = 1
        return np.concatenate([tr // g[:, None], (den // g)[:, None]], axis=1)

    def trace_value(self, row: Sequence[int]) -> CyclotomicNumber:
        return _from_vector(row[:-1], int(row[-1]), self.n)


# ---------------------------------------------------------------------------
# groups


@dataclass(frozen=True)
class GroupClass:
    """A conjugacy class: first element (in closure order), size, element order, trace."""

    representative: int
    size: int
    element_order: int
    trace: CyclotomicNumber

    def to_dict(self) -> Dict[str, object]:
        return {
            "representative": self.representative,
            "size": self.size,
            "element_order": self.element_order,
            "trace": self.trace.literal(),
        }


class MatrixGroup:
    """A closed finite matrix group; elements are kept packed, in BFS order."""

    def __init__(self, generators: Sequence[ExactMatrix], packer: _Packer, a: np.ndarray, den: np.ndarray):
        self.generators = list(generators)
        self._packer = packer
        self._a = a
        self._den = den
        self._index = {_key(a[i], den[i]): i for i in range(len(a))}

    @property
    def order(self) -> int:
        return len(self._a)

    @property
    def dimension(self) -> int:
        return self._packer.d

    @property
    def conductor(self) -> int:
        return self._packer.n

    def __len__(self) -> int:
        return self.order

    def element(self, i: int) -> ExactMatrix:
        return self._packer.unpack(self._a[i], int(self._den[i]))

    def __iter__(self):
        return (self.element(i) for i in range(self.order))

    def __contains__(self, m: ExactMatrix) -> bool:
        return self.index_of(m) is not None

    def index_of(self, m: ExactMatrix) -> Optional[int]:
        if m.dimension != self.dimension or self.conductor % _normal_conductor(m.conductor):
            return None
        a, den = self._packer.pack(m)
        return self._index.get(_key(a, den))

    def product_index(self, i: int, j: int) -> int:
        p = self._packer
        op = p.right_operator(self._a[j])
        a, den = p.times(self._a[i : i + 1], self._den[i : i + 1], op, int(self._den[j]))
        k = self._index.get(_key(a[0], den[0]))
        if k is None:
            raise ArithmeticError("group is not closed under multiplication")
        return k

    def __repr__(self) -> str:
        return f"MatrixGroup(dimension={self.dimension}, order={self.order})"


def _key(a: np.ndarray, den) -> bytes:
    return a.tobytes() + int(den).to_bytes(8, "little", signed=True)


def _setup(gens: Sequence[ExactMatrix], conductor_hint: Optional[int]) -> _Packer:
    if not gens:
        raise ValueError("at least one generator is required")
    d = gens[0].dimension
    if any(g.dimension != d for g in gens):
        raise ValueError("generators have different dimensions")
    n = 1
    for g in gens:
        c = g.conductor
        n = n * c // gcd(n, c)
    if conductor_hint is not None:
        hint = _normal_conductor(conductor_hint)
        if hint % _normal_conductor(n):
            raise ValueError(f"conductor hint {conductor_hint} does not contain the entries (need {n})")
        n = hint
    return _Packer(d, n)


def closure(gens: Sequence[ExactMatrix], max_order: int, conductor_hint: Optional[int] = None) -> MatrixGroup:
    """Breadth-first closure under right multiplication by the generators."""
    p = _setup(gens, conductor_hint)
    packed = [p.pack(g) for g in gens]
    for g in gens:
        if g.determinant().is_zero():
            raise ValueError("generator is singular")
    ops = [(p.right_operator(a), den) for a, den in packed]
    ident_a, ident_den = p.pack(ExactMatrix.identity(p.d))
    blocks_a = [ident_a[None]]
    blocks_den = [np.array([ident_den], dtype=np.int64)]
    seen = {_key(ident_a, ident_den)}
    count = 1
    frontier_a, frontier_den = blocks_a[0], blocks_den[0]
    while len(frontier_a):
        new_a, new_den = [], []
        for start in range(0, len(frontier_a), _BATCH):
            fa = frontier_a[start : start + _BATCH]
            fd = frontier_den[start : start + _BATCH]
            for op, op_den in ops:
                pa, pd = p.times(fa, fd, op, op_den)
                for i in range(len(pa)):
                    k = _key(pa[i], pd[i])
                    if k not in seen:
                        seen.add(k)
                        count += 1
                        if count > max_order:
                            raise OrderExceeded(max_order)
                        new_a.append(pa[i])
                        new_den.append(pd[i])
        if not new_a:
            break
        frontier_a = np.stack(new_a)
        frontier_den = np.array(new_den, dtype=np.int64)
        blocks_a.append(frontier_a)
        blocks_den.append(frontier_den)
    return MatrixGroup(gens, p, np.concatenate(blocks_a), np.concatenate(blocks_den))


def _power_traces(g: MatrixGroup, n_max: int) -> np.ndarray:
    """Array (order, n_max, phi + 1): reduced trace of x^k for k = 1..n_max."""
    p = g._packer
    out = np.zeros((g.order, n_max, p.phi + 1), dtype=np.int64)
    for start in range(0, g.order, _BATCH):
        a = g._a[start : start + _BATCH]
        den = g._den[start : start + _BATCH]
        ops = p.right_operators(a)
        cur_a, cur_den = a, den
        for k in range(n_max):
            out[start : start + len(a), k] = p.traces(cur_a, cur_den)
            if k + 1 < n_max:
                cur_a, cur_den = p.times_each(cur_a, cur_den, ops, den)
    return out


def direct_molien_coefficients(g: MatrixGroup, n_max: int) -> List[int]:
    """[c_0, ..., c_n_max] with c_n = (1/|G|) sum over elements of the Sym^n trace."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if n_max == 0:
        return [1]
    traces = _power_traces(g, n_max)
    rows, counts = np.unique(traces.reshape(g.order, -1), axis=0, return_counts=True)
    totals = [CyclotomicNumber.coerce(0) for _ in range(n_max + 1)]
    one = CyclotomicNumber.coerce(1)
    for row, count in zip(rows, counts):
        row = row.reshape(n_max, -1)
        power = [None] + [g._packer.trace_value(row[k]) for k in range(n_max)]
        s = [one]
        for n in range(1, n_max + 1):
            acc = power[1] * s[n - 1]
            for k in range(2, n + 1):
                acc = acc + power[k] * s[n - k]
            s.append(acc * Fraction(1, n))
        for n in range(n_max + 1):
            totals[n] = totals[n] + s[n] * int(count)
    out = []
    for n, t in enumerate(totals):
        value = t / g.order
        if not value.is_rational():
            raise NotAnInteger(f"Molien coefficient {n} is irrational: {value}")
        q = value.as_rational()
        if q.denominator != 1 or q < 0:
            raise NotAnInteger(f"Molien coefficient {n} is {q}")
        out.append(int(q))
    return out


def direct_molien_coefficient(g: MatrixGroup, n: int) -> int:
    return direct_molien_coefficients(g, n)[n]


def _inverse_index(g: MatrixGroup, i: int) -> int:
    """Index of the inverse of element i, by powering until the identity appears."""
    ident = g.index_of(ExactMatrix.identity(g.dimension))
    prev, cur = ident, i
    while cur != ident:
        prev, cur = cur, g.product_index(cur, i)
    return prev


def _conjugate_all(g: MatrixGroup, s: int, s_inv: int) -> np.ndarray:
    """Index of s^-1 x s for every element x."""
    p = g._packer
    op = p.right_operator(g._a[s])
    op_t = p.right_operator(g._a[s_inv].transpose(1, 0, 2))
    out = np.empty(g.order, dtype=np.int64)
    for start in range(0, g.order, _BATCH):
        a = g._a[start : start + _BATCH]
        den = g._den[start : start + _BATCH]
        ya, yd = p.times(a, den, op, int(g._den[s]))
        za, zd = p.times(ya.transpose(0, 2, 1, 3).copy(), yd, op_t, int(g._den[s_inv]))
        za = za.transpose(0, 2, 1, 3).copy()
        for i in range(len(za)):
            out[start + i] = g._index[_key(za[i], zd[i])]
    return out


def _element_order(g: MatrixGroup, i: int) -> int:
    ident = g.index_of(ExactMatrix.identity(g.dimension))
    cur, k = i, 1
    while cur != ident:
        cur = g.product_index(cur, i)
        k += 1
    return k


def character_of(g: MatrixGroup) -> List[GroupClass]:
    """Conjugacy classes (orbits under conjugation by the generators) with their traces."""
    parent = np.arange(g.order)

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for gen in g.generators:
        s = g.index_of(gen)
        images = _conjugate_all(g, s, _inverse_index(g, s))
        for x, y in enumerate(images):
            rx, ry = find(x), find(int(y))
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)
    sizes: Dict[int, int] = {}
    for x in range(g.order):
        r = find(x)
        sizes[r] = sizes.get(r, 0) + 1
    traces = g._packer.traces(g._a, g._den)
    return [
        GroupClass(r, size, _element_order(g, r), g._packer.trace_value(traces[r]))
        for r, size in sorted(sizes.items())
    ]


# ---------------------------------------------------------------------------
# generator files


def _parse_matrix(raw, d: int, where: str) -> ExactMatrix:
    if isinstance(raw, list) and len(raw) == d and all(isinstance(r, list) for r in raw):
        cells = [c for r in raw for c in r]
    elif isinstance(raw, list):
        cells = raw
    else:
        raise GeneratorFileError(f"{where}: expected an array of entries")
    if len(cells) != d * d:
        raise GeneratorFileError(f"{where}: expected {d * d} entries, found {len(cells)}")
    vals = []
    for k, c in enumerate(cells):
        try:
            vals.append(parse_cyclotomic(str(c)) if not isinstance(c, int) else CyclotomicNumber.coerce(c))
        except ParseError as exc:
            raise GeneratorFileError(f"{where}[{k}]: {exc}") from exc
    return ExactMatrix(tuple(tuple(vals[r * d : (r + 1) * d]) for r in range(d)))


def load_generators(path: Union[str, Path]) -> Tuple[List[ExactMatrix], Dict[str, object]]:
    """Read {dimension, conductor_hint, generators}; returns the matrices and the metadata."""
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise GeneratorFileError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise GeneratorFileError(f"{path}: top level must be an object")
    d = obj.get("dimension")
    if not isinstance(d, int) or d < 1:
        raise GeneratorFileError(f"{path}: 'dimension' must be a positive integer")
    hint = obj.get("conductor_hint")
    if hint is not None and (not isinstance(hint, int) or hint < 1):
        raise GeneratorFileError(f"{path}: 'conductor_hint' must be a positive integer")
    raw = obj.get("generators")
    if not isinstance(raw, list) or not raw:
        raise GeneratorFileError(f"{path}: 'generators' must be a nonempty array")
    gens = [_parse_matrix(m, d, f"generators[{i}]") for i, m in enumerate(raw)]
    meta = {k: v for k, v in obj.items() if k != "generators"}
    return gens, meta


def closure_from_file(path: Union[str, Path], max_order: int) -> MatrixGroup:
    gens, meta = load_generators(path)
    return closure(gens, max_order, meta.get("conductor_hint"))
