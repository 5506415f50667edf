import cmath
import pickle
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exceptcheck.exactnum import (
    CyclotomicNumber,
    NotRational,
    ParseError,
    SingularMatrix,
    UnknownConductor,
    basis_exponents,
    parse_cyclotomic,
    solve_linear,
    total,
    zeta,
)


def approx(x: CyclotomicNumber) -> complex:
    n = x.conductor
    return sum(complex(c) * cmath.exp(2j * cmath.pi * e / n) for e, c in x.coefficients.items())


conductors = st.sampled_from([1, 3, 4, 5, 7, 8, 9, 12, 15, 20, 21, 24])


@st.composite
def cyclotomics(draw):
    n = draw(conductors)
    terms = draw(
        st.dictionaries(
            st.integers(0, n - 1),
            st.fractions(min_value=-5, max_value=5, max_denominator=6),
            max_size=4,
        )
    )
    return CyclotomicNumber(n, terms)


def close(a: complex, b: complex) -> bool:
    return abs(a - b) < 1e-9


@given(cyclotomics(), cyclotomics())
def test_ring_operations_match_complex_values(a, b):
    assert close(approx(a + b), approx(a) + approx(b))
    assert close(approx(a - b), approx(a) - approx(b))
    assert close(approx(a * b), approx(a) * approx(b))


@given(cyclotomics(), cyclotomics(), cyclotomics())
@settings(max_examples=50)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(cyclotomics())
def test_inverse(a):
    if a.is_zero():
        with pytest.raises(ZeroDivisionError):
            a.inverse()
    else:
        assert a * a.inverse() == 1


@given(cyclotomics())
def test_canonical_form_is_stable(a):
    lifted = {3 * e: c for e, c in a.coefficients.items()}
    again = CyclotomicNumber(3 * a.conductor, lifted)
    assert again == a and hash(again) == hash(a)
    assert parse_cyclotomic(a.literal()) == a
    assert pickle.loads(pickle.dumps(a)) == a


@given(cyclotomics())
def test_conjugate_matches_complex_conjugate(a):
    assert close(approx(a.conjugate()), approx(a).conjugate())
    assert (a * a.conjugate()).conjugate() == a * a.conjugate()


def test_minimal_conductor():
    assert zeta(8, 2).conductor == 4
    assert (zeta(5) + zeta(5, 4)).conductor == 5
    assert (zeta(3) + zeta(3, 2)) == -1
    assert (zeta(3) + zeta(3, 2)).conductor == 1
    assert zeta(6) == -zeta(3, 2)


def test_rationals_hash_like_fractions():
    x = CyclotomicNumber.coerce(Fraction(3, 4))
    assert hash(x) == hash(Fraction(3, 4))
    assert x.as_rational() == Fraction(3, 4)
    with pytest.raises(NotRational):
        zeta(5).as_rational()


def test_golden_ratio_identity():
    e = zeta(5)
    phi = -(e**2 + e**3)
    assert phi * phi == phi + 1
    root5 = e - e**2 - e**3 + e**4
    assert root5 * root5 == 5
    assert (1 / root5) * root5 == 1


def test_gauss_sum_seven():
    z = zeta(7)
    g = sum((z ** (j * j) for j in range(7)), CyclotomicNumber.coerce(0))
    assert g * g == -7


def test_galois_action():
    z = zeta(12)
    assert z.galois(5) == zeta(12, 5)
    with pytest.raises(ValueError):
        z.galois(2)


def test_basis_sizes_are_euler_phi():
    assert [len(basis_exponents(n)) for n in (1, 3, 4, 5, 8, 9, 12, 15, 24)] == [1, 2, 2, 4, 4, 6, 4, 8, 8]


@pytest.mark.parametrize(
    "text, value",
    [
        ("z8 - z8^3", zeta(8) - zeta(8, 3)),
        ("-6*z3", -6 * zeta(3)),
        ("1/2 + z4", Fraction(1, 2) + zeta(4)),
        ("(z5 + z5^4)^2", (zeta(5) + zeta(5, 4)) ** 2),
        ("z7^-1", zeta(7, 6)),
        ("-3", CyclotomicNumber.coerce(-3)),
    ],
)
def test_parse(text, value):
    assert parse_cyclotomic(text) == value


@pytest.mark.parametrize("text", ["", "z0", "1 +", "2**3", "z5^", "q", "(1"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_cyclotomic(text)


def test_bare_z_needs_conductor():
    with pytest.raises(UnknownConductor):
        parse_cyclotomic("z^2")


def test_solve_linear():
    assert solve_linear([[2, 1], [1, 3]], [3, 5]) == [Fraction(4, 5), Fraction(7, 5)]
    with pytest.raises(SingularMatrix):
        solve_linear([[1, 2], [2, 4]], [1, 2])


def test_total_sums_at_common_conductor():
    assert total([zeta(5, k) for k in range(5)]) == 0
    assert total([]) == 0
