"""Exact arithmetic over Q and over cyclotomic fields Q(zeta_N).

A :class:`CyclotomicNumber` is stored as a sparse coefficient map on a fixed
basis of Q(zeta_N), where N is always the smallest conductor containing the
value.  For ``N = prod p^e`` the basis is the set of exponents ``k`` whose
top base-``p`` digit (taken from the ``p``-primary CRT component of ``k``) is
nonzero for odd ``p`` and zero for ``p = 2``.  The basis of a subfield
Q(zeta_M) embeds into the basis of Q(zeta_N) whenever every prime of N
already divides M, which makes conductor reduction a support test.

Rationals are plain :class:`fractions.Fraction` values.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple, Union

Rational = Fraction
Scalar = Union[int, Fraction, "CyclotomicNumber"]

__all__ = [
    "Rational",
    "CyclotomicNumber",
    "NotRational",
    "ParseError",
    "UnknownConductor",
    "SingularMatrix",
    "zeta",
    "parse_cyclotomic",
    "solve_linear",
    "binomial",
]


class NotRational(ValueError):
    """Raised when a cyclotomic value was required to lie in Q but does not."""


class ParseError(ValueError):
    """Malformed cyclotomic literal."""

    def __init__(self, message: str, position: int | None = None, text: str | None = None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} at offset {position}"
        if text is not None:
            message = f"{message} in {text!r}"
        super().__init__(message)


class UnknownConductor(ParseError):
    """A root-of-unity token without a conductor, e.g. ``z^2``."""


class SingularMatrix(ArithmeticError):
    pass


def binomial(n: int, k: int) -> int:
    if k < 0 or n < 0 or k > n:
        return 0
    return comb(n, k)


# ---------------------------------------------------------------------------
# basis bookkeeping


@lru_cache(maxsize=None)
def _factor(n: int) -> Tuple[Tuple[int, int], ...]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return tuple(out)


@lru_cache(maxsize=None)
def _digit_data(n: int) -> Tuple[Tuple[int, int, int, int], ...]:
    """Per prime ``p^e || n``: (p, p^e, p^(e-1), inverse of n/p^e mod p^e)."""
    data = []
    for p, e in _factor(n):
        q = p**e
        data.append((p, q, q // p, pow(n // q, -1, q)))
    return tuple(data)


def _top_digit(k: int, q: int, q1: int, inv: int) -> int:
    return ((k * inv) % q) // q1


@lru_cache(maxsize=None)
def _expansion_table(n: int) -> Tuple[Tuple[Tuple[int, int], ...], ...]:
    """For each exponent ``k`` mod ``n``: the expansion of zeta_n^k in the basis."""
    if n % 4 == 2:
        raise ValueError(f"conductor {n} is 2 mod 4")
    digits = _digit_data(n)
    table = []
    for k in range(n):
        terms: Dict[int, int] = {k: 1}
        for p, q, q1, inv in digits:
            step = n // p
            nxt: Dict[int, int] = {}
            for e, c in terms.items():
                j = _top_digit(e, q, q1, inv)
                if p == 2:
                    if j == 1:
                        e2 = (e + n // 2) % n
                        nxt[e2] = nxt.get(e2, 0) - c
                    else:
                        nxt[e] = nxt.get(e, 0) + c
                elif j == 0:
                    for t in range(1, p):
                        e2 = (e + t * step) % n
                        nxt[e2] = nxt.get(e2, 0) - c
                else:
                    nxt[e] = nxt.get(e, 0) + c
            terms = {e: c for e, c in nxt.items() if c}
        table.append(tuple(sorted(terms.items())))
    return tuple(table)


@lru_cache(maxsize=None)
def basis_exponents(n: int) -> Tuple[int, ...]:
    """Exponents forming the fixed basis of Q(zeta_n)."""
    table = _expansion_table(n)
    return tuple(k for k in range(n) if table[k] == ((k, 1),))


def _normal_conductor(n: int) -> int:
    return n // 2 if n % 4 == 2 else n


def _reduce(n: int, terms: Mapping[int, Fraction]) -> Dict[int, Fraction]:
    """Rewrite ``sum c_k zeta_n^k`` (arbitrary exponents) in the basis of n."""
    table = _expansion_table(n)
    acc: Dict[int, Fraction] = {}
    for k, c in terms.items():
        if not c:
            continue
        for b, s in table[k % n]:
            acc[b] = acc.get(b, 0) + s * c
    return {k: c for k, c in acc.items() if c}


def _shrink(n: int, coeffs: Dict[int, Fraction]) -> Tuple[int, Dict[int, Fraction]]:
    """Move a basis expansion to the smallest conductor containing it."""
    changed = True
    while changed and n > 1:
        changed = False
        if not coeffs:
            return 1, {}
        for p, e in _factor(n):
            if p == 2 or e >= 2:
                step = 4 if (p == 2 and e == 2) else p
                if all(k % step == 0 for k in coeffs):
                    n //= step
                    coeffs = {k // step: c for k, c in coeffs.items()}
                    changed = True
                    break
                continue
            # p exactly divides n: the subfield image is constant on each
            # block {k0 + t*m : t = 1..p-1} with p | k0
            m = n // p
            blocks: Dict[int, Fraction] = {}
            ok = True
            for k, c in coeffs.items():
                k0 = k % m
                # representative divisible by p in the residue class k mod m
                while k0 % p:
                    k0 += m
                prev = blocks.get(k0)
                if prev is None:
                    blocks[k0] = c
                elif prev != c:
                    ok = False
                    break
            if not ok:
                continue
            for k0, c in blocks.items():
                for t in range(1, p):
                    if coeffs.get((k0 + t * m) % n) != c:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                continue
            n = m
            coeffs = _reduce(m, {(k0 // p) % m: -c for k0, c in blocks.items()})
            changed = True
            break
    if n == 1:
        return 1, {0: coeffs[0]} if coeffs.get(0) else {}
    return n, coeffs


def _lift(n: int, coeffs: Mapping[int, Fraction], target: int) -> Dict[int, Fraction]:
    if n == target:
        return dict(coeffs)
    f = target // n
    return _reduce(target, {k * f: c for k, c in coeffs.items()})


def _tidy(c) -> Union[int, Fraction]:
    # integral coefficients are kept as int: same hash/equality, far cheaper
    if type(c) is int:
        return c
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else c


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


# ---------------------------------------------------------------------------


class CyclotomicNumber:
    """Immutable element of Q(zeta_N) in canonical form."""

    __slots__ = ("_n", "_items", "_hash")

    def __init__(self, conductor: int = 1, coefficients: Mapping[int, Scalar] | None = None):
        """Build ``sum c_k zeta_conductor^k``; exponents may be arbitrary integers."""
        if conductor < 1:
            raise ValueError("conductor must be positive")
        terms: Dict[int, Fraction] = {}
        for k, c in (coefficients or {}).items():
            terms[k] = terms.get(k, 0) + _tidy(c)
        n = conductor
        if n % 4 == 2:
            # zeta_{2m} = -zeta_m^((m+1)/2) for odd m
            m = n // 2
            half = (m + 1) // 2
            conv: Dict[int, Fraction] = {}
            for k, c in terms.items():
                e = (k * half) % m if m > 1 else 0
                conv[e] = conv.get(e, 0) + (-c if k % 2 else c)
            n, terms = m, conv
        if n == 1:
            total = sum(terms.values())
            self._set(1, {0: total} if total else {})
            return
        self._set(*_shrink(n, _reduce(n, terms)))

    def _set(self, n: int, coeffs: Mapping[int, Fraction]) -> None:
        self._n = n
        self._items = tuple(sorted((k, _tidy(c)) for k, c in coeffs.items() if c))
        self._hash = None

    @classmethod
    def _raw(cls, n: int, coeffs: Mapping[int, Fraction]) -> "CyclotomicNumber":
        obj = cls.__new__(cls)
        obj._set(n, coeffs)
        return obj

    @classmethod
    def _canonical(cls, n: int, coeffs: Dict[int, Fraction]) -> "CyclotomicNumber":
        return cls._raw(*_shrink(n, coeffs))

    @classmethod
    def from_basis(cls, conductor: int, coefficients: Mapping[int, Scalar]) -> "CyclotomicNumber":
        """Inverse of :meth:`coefficients_in`."""
        return cls(conductor, coefficients)

    @classmethod
    def coerce(cls, x: Scalar) -> "CyclotomicNumber":
        if isinstance(x, CyclotomicNumber):
            return x
        if isinstance(x, (int, Fraction)):
            return cls._raw(1, {0: x} if x else {})
        raise TypeError(f"cannot coerce {type(x).__name__} to CyclotomicNumber")

    # -- accessors ---------------------------------------------------------

    @property
    def conductor(self) -> int:
        return self._n

    @property
    def coefficients(self) -> Dict[int, Fraction]:
        return dict(self._items)

    def coefficients_in(self, conductor: int) -> Dict[int, Fraction]:
        """Coefficients in the basis of Q(zeta_conductor); requires containment."""
        target = _normal_conductor(conductor)
        if target % self._n:
            raise ValueError(f"Q(zeta_{self._n}) is not contained in Q(zeta_{conductor})")
        if conductor != target:
            raise ValueError(f"use conductor {target} instead of {conductor}")
        return _lift(self._n, dict(self._items), target)

    def is_zero(self) -> bool:
        return not self._items

    def is_rational(self) -> bool:
        return self._n == 1

    def as_rational(self) -> Fraction:
        if self._n != 1:
            raise NotRational(f"{self} is not rational")
        return Fraction(self._items[0][1]) if self._items else Fraction(0)

    # -- arithmetic --------------------------------------------------------

    def _binary(self, other: Scalar):
        other = CyclotomicNumber.coerce(other)
        n = _lcm(self._n, other._n)
        return n, other

    def __add__(self, other: Scalar) -> "CyclotomicNumber":
        try:
            n, other = self._binary(other)
        except TypeError:
            return NotImplemented
        a = _lift(self._n, dict(self._items), n)
        for k, c in _lift(other._n, dict(other._items), n).items():
            a[k] = a.get(k, 0) + c
        return CyclotomicNumber._canonical(n, {k: c for k, c in a.items() if c})

    __radd__ = __add__

    def __neg__(self) -> "CyclotomicNumber":
        return CyclotomicNumber._raw(self._n, {k: -c for k, c in self._items})

    def __sub__(self, other: Scalar) -> "CyclotomicNumber":
        try:
            return self + (-CyclotomicNumber.coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other: Scalar) -> "CyclotomicNumber":
        return (-self) + other

    def __mul__(self, other: Scalar) -> "CyclotomicNumber":
        if isinstance(other, (int, Fraction)):
            if not other:
                return CyclotomicNumber._raw(1, {})
            return CyclotomicNumber._raw(self._n, {k: c * other for k, c in self._items})
        if not isinstance(other, CyclotomicNumber):
            return NotImplemented
        if other._n == 1:
            return self * other.as_rational()
        if self._n == 1:
            return other * self.as_rational()
        n = _lcm(self._n, other._n)
        fa, fb = n // self._n, n // other._n
        prod: Dict[int, Fraction] = {}
        for ka, ca in self._items:
            ka *= fa
            for kb, cb in other._items:
                k = (ka + kb * fb) % n
                prod[k] = prod.get(k, 0) + ca * cb
        return CyclotomicNumber._canonical(n, _reduce(n, prod))

    __rmul__ = __mul__

    def galois(self, a: int) -> "CyclotomicNumber":
        """Apply zeta_N -> zeta_N^a (a coprime to N)."""
        if gcd(a, self._n) != 1:
            raise ValueError(f"{a} is not a unit mod {self._n}")
        if self._n == 1:
            return self
        return CyclotomicNumber._canonical(self._n, _reduce(self._n, {k * a: c for k, c in self._items}))

    def conjugate(self) -> "CyclotomicNumber":
        return self.galois(-1)

    def inverse(self) -> "CyclotomicNumber":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self._n == 1:
            return CyclotomicNumber.coerce(1 / self.as_rational())
        # x * prod_{sigma != 1} sigma(x) is the (rational) norm
        others = CyclotomicNumber.coerce(1)
        for a in range(2, self._n):
            if gcd(a, self._n) == 1:
                others = others * self.galois(a)
        norm = (self * others).as_rational()
        return others * (1 / norm)

    def __truediv__(self, other: Scalar) -> "CyclotomicNumber":
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        if not isinstance(other, CyclotomicNumber):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other: Scalar) -> "CyclotomicNumber":
        return CyclotomicNumber.coerce(other) * self.inverse()

    def __pow__(self, e: int) -> "CyclotomicNumber":
        if not isinstance(e, int):
            return NotImplemented
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        out = CyclotomicNumber.coerce(1)
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    # -- identity ----------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, CyclotomicNumber):
            return self._n == other._n and self._items == other._items
        if isinstance(other, (int, Fraction)):
            return self._n == 1 and self.as_rational() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            if self._n == 1:
                self._hash = hash(self.as_rational())
            else:
                self._hash = hash((self._n, self._items))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._items)

    def __repr__(self) -> str:
        return f"CyclotomicNumber({str(self)!r})"

    def __str__(self) -> str:
        return self.literal()

    def literal(self) -> str:
        """Render in the literal grammar accepted by :func:`parse_cyclotomic`."""
        if not self._items:
            return "0"
        parts: List[str] = []
        for k, c in self._items:
            mag = abs(c)
            if k == 0:
                term = str(mag)
            else:
                term = f"z{self._n}" + (f"^{k}" if k != 1 else "")
                if mag != 1:
                    term = f"{mag}*{term}"
            if not parts:
                parts.append(("-" if c < 0 else "") + term)
            else:
                parts.append((" - " if c < 0 else " + ") + term)
        return "".join(parts)

    def __reduce__(self):
        return (CyclotomicNumber, (self._n, dict(self._items)))


def zeta(n: int, k: int = 1) -> CyclotomicNumber:
    """zeta_n^k."""
    return CyclotomicNumber(n, {k: 1})


# ---------------------------------------------------------------------------
# literal grammar: z<N>, integers, / * + - ^ and parentheses

_TOKEN = re.compile(r"\s*(?:(z)(\d*)|(\d+)|([-+*/^()]))")


def _tokenize(text: str) -> List[Tuple[str, object, int]]:
    tokens = []
    pos = 0
    text_end = len(text.rstrip())
    while pos < text_end:
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError("unexpected character", pos, text)
        start = m.start(1) if m.group(1) else (m.start(3) if m.group(3) else m.start(4))
        if m.group(1):
            digits = m.group(2)
            if not digits:
                raise UnknownConductor("root of unity without conductor", start, text)
            n = int(digits)
            if n == 0:
                raise ParseError("conductor must be positive", start, text)
            tokens.append(("zeta", n, start))
        elif m.group(3):
            tokens.append(("int", int(m.group(3)), start))
        else:
            tokens.append((m.group(4), None, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def take(self, kind: str | None = None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[0]!r}", tok[2], self.text)
        self.i += 1
        return tok

    def parse(self) -> CyclotomicNumber:
        if self.peek() == "end":
            raise ParseError("empty literal", 0, self.text)
        value = self.expr()
        if self.peek() != "end":
            tok = self.tokens[self.i]
            raise ParseError(f"trailing {tok[0]!r}", tok[2], self.text)
        return value

    def expr(self) -> CyclotomicNumber:
        value = self.term()
        while self.peek() in "+-":
            op = self.take()[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> CyclotomicNumber:
        value = self.unary()
        while self.peek() in ("*", "/"):
            op, _, pos = self.take()
            rhs = self.unary()
            if op == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero", pos, self.text)
                value = value / rhs
        return value

    def unary(self) -> CyclotomicNumber:
        if self.peek() == "-":
            self.take()
            return -self.unary()
        if self.peek() == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> CyclotomicNumber:
        kind, val, pos = self.tokens[self.i]
        base = self.atom()
        if self.peek() != "^":
            return base
        self.take()
        sign = 1
        if self.peek() == "-":
            self.take()
            sign = -1
        exp = sign * self.take("int")[1]
        if kind == "zeta":
            return zeta(val, exp)
        if exp < 0 and base.is_zero():
            raise ParseError("zero to a negative power", pos, self.text)
        return base**exp

    def atom(self) -> CyclotomicNumber:
        kind, val, pos = self.tokens[self.i]
        if kind == "int":
            self.take()
            return CyclotomicNumber.coerce(val)
        if kind == "zeta":
            self.take()
            return zeta(val)
        if kind == "(":
            self.take()
            value = self.expr()
            self.take(")")
            return value
        raise ParseError(f"unexpected {kind!r}", pos, self.text)


def parse_cyclotomic(text: str) -> CyclotomicNumber:
    """Parse a literal such as ``"3*z7^2 - z7 + 1/2"``."""
    if not isinstance(text, str):
        raise ParseError(f"literal must be a string, got {type(text).__name__}")
    return _Parser(text).parse()


# ---------------------------------------------------------------------------


def solve_linear(matrix: Sequence[Sequence[Scalar]], rhs: Sequence[Scalar]) -> List[Fraction]:
    """Solve a square rational system exactly by Gauss-Jordan elimination."""
    size = len(matrix)
    rows = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    if len(rows) != size or any(len(r) != size + 1 for r in rows):
        raise ValueError("matrix must be square and match the right-hand side")
    for col in range(size):
        pivot = next((r for r in range(col, size) if rows[r][col]), None)
        if pivot is None:
            raise SingularMatrix(f"no pivot in column {col}")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        inv = 1 / rows[col][col]
        rows[col] = [x * inv for x in rows[col]]
        for r in range(size):
            if r != col and rows[r][col]:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    return [row[size] for row in rows]


def iter_terms(x: CyclotomicNumber) -> Iterator[Tuple[int, Fraction]]:
    return iter(x._items)


def total(values: Iterable[Scalar]) -> CyclotomicNumber:
    """Sum in one pass at the common conductor."""
    vals = [CyclotomicNumber.coerce(v) for v in values]
    if not vals:
        return CyclotomicNumber.coerce(0)
    n = 1
    for v in vals:
        n = _lcm(n, v.conductor)
    acc: Dict[int, Fraction] = {}
    for v in vals:
        for k, c in _lift(v.conductor, dict(v._items), n).items():
            acc[k] = acc.get(k, 0) + c
    return CyclotomicNumber._canonical(n, {k: c for k, c in acc.items() if c})
