import copy
import json
from fractions import Fraction
from math import ceil, comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SEVEN_DIM, TABLE_NAMES, table

from exceptcheck import chartable, obstruction
from exceptcheck.obstruction import HValueSets, NegativeR, assess, degree_bound


def lemma_r(mu: Fraction, s: int) -> int:
    return ceil(mu - s - 1) + (1 if mu.denominator == 1 else 0)


def hsets(sets, ambient=5):
    return HValueSets(ambient, {n: tuple(sorted(v)) for n, v in sets.items()})


HJ = hsets({1: {6}, 2: {21}, 3: {56}, 4: {126}, 5: {252}})


# degree_bound


def test_degree_bound_examples():
    assert degree_bound(5, 1, 7, False) == 15
    assert degree_bound(5, 1, Fraction(9, 2), True) == 1  # mu <= s + 1, non-integer: r = 0
    assert degree_bound(5, 1, 5, True) == 5  # mu = s + 1: r = 1
    assert degree_bound(5, 2, 7, False) == 20
    assert degree_bound(5, 3, 7, False) == 15


def test_negative_r():
    with pytest.raises(NegativeR):
        degree_bound(5, 0, 3, True)
    with pytest.raises(ValueError):
        degree_bound(5, 6, 7, False)
    with pytest.raises(ValueError):
        degree_bound(5, 1, 0, False)


@given(st.integers(0, 6), st.fractions(min_value=1, max_value=12, max_denominator=7))
def test_supremum_convention_is_max_over_smaller_mu(s, mu0):
    """ceil(mu0 - s - 1) equals the largest lemma r over a grid of mu < mu0 approaching mu0."""
    grid = [mu0 - Fraction(1, k) for k in range(1, 400)] + [Fraction(m) for m in range(1, ceil(mu0))]
    best = max(lemma_r(mu, s) for mu in grid if 0 < mu < mu0)
    assert ceil(mu0 - s - 1) == best


@given(
    st.integers(0, 5),
    st.fractions(min_value=Fraction(1, 2), max_value=12, max_denominator=6),
    st.fractions(min_value=0, max_value=3, max_denominator=6),
    st.booleans(),
)
def test_monotone_in_mu(dim_y, mu, delta, attained):
    try:
        low = degree_bound(5, dim_y, mu, attained)
    except NegativeR:
        return
    assert degree_bound(5, dim_y, mu + delta, attained) >= low


def test_not_monotone_in_s():
    bounds = [degree_bound(5, 5 - s, 7, False) for s in range(6)]
    assert bounds == [1, 6, 15, 20, 15, 6]
    assert bounds == [comb(6, s) for s in range(6)]


# RR identities


@given(st.lists(st.fractions(min_value=-50, max_value=50, max_denominator=12), min_size=4, max_size=4))
@settings(max_examples=100)
def test_rr_identities_recover_cubic(coeffs):
    a, b, c, e = coeffs
    h1, h2, h3, h4, h5 = (a * n**3 + b * n**2 + c * n + e for n in range(1, 6))
    q = obstruction.rr_quantities(h1, h2, h3, h4)
    assert q["HHH"] == 6 * a
    assert q["HHK"] == 4 * b
    assert obstruction.predicted_h5(h2, h3, h4, q["HHH"]) == h5
    hhh, hhk, gamma, chi = obstruction._cubic_fit((h1, h2, h3, h4))
    assert (hhh, hhk, gamma, chi) == (6 * a, 4 * b, 12 * c, e)


# cases


def test_hj_impossibility():
    rec = obstruction.hj_impossibility(HJ)
    assert rec.closed and rec.check["fourth_difference"] == 6
    # falls through unless every H_n is the full space of forms
    assert obstruction.hj_impossibility(hsets({1: {6}, 2: {21}, 3: {56}, 4: {126}, 5: {246, 252}})) is None


def test_hj_open_for_cubic(monkeypatch):
    cubic = {n: (n**3 + 5,) for n in range(1, 6)}
    monkeypatch.setattr(HValueSets, "full", lambda self, n: cubic[n][0])
    rec = obstruction.hj_impossibility(HValueSets(5, cubic))
    assert rec.check["fourth_difference"] == 0 and not rec.closed


def test_curve_hj():
    rec = obstruction.curve_case(HJ)
    (entry,) = rec.assignments
    assert entry["derived"] == {"deg": 15, "g": 10}
    assert entry["violated"] == {"name": "h3_in_H3", "holds": False, "value": 36}
    assert rec.closed


def test_curve_degenerate():
    rec = obstruction.curve_case(hsets({1: {6}, 2: {6}, 3: {6}, 4: {6}, 5: {6}}))
    assert rec.closed and rec.assignments[0]["violated"]["name"] == "degree_positive"


def test_curve_6a7():
    h = HValueSets.from_table(table("6A7"))
    rec = obstruction.curve_case(h)
    (entry,) = rec.assignments
    assert [p["name"] for p in entry["passed"]] == [
        "degree_positive",
        "genus_nonnegative",
        "h3_in_H3",
        "h4_in_H4",
        "h5_in_H5",
        "degree_bound",
    ]
    assert entry["violated"]["name"] == "degree_exceeds_2g_minus_2"
    assert rec.closed


def test_surface_6a7():
    h = HValueSets.from_table(table("6A7"))
    rec = obstruction.surface_case(h)
    derived = {e["params"]["h3"]: e["derived"] for e in rec.assignments}
    assert derived[56] == {"d": 20, "HK": 30, "chi": 11}
    assert derived[20]["d"] <= 0 and Fraction(derived[36]["d"]) <= 0
    e56 = next(e for e in rec.assignments if e["params"]["h3"] == 56)
    assert [p.get("value") for p in e56["passed"] if p["name"].startswith("h")] == [111, 186]
    assert e56["violated"]["name"] == "HK_below_HH"
    assert rec.closed


def test_surface_hj():
    rec = obstruction.surface_case(HJ)
    assert rec.closed
    assert rec.assignments[0]["violated"] == {"name": "h4_in_H4", "holds": False, "value": 111}


def test_threefold_6a7():
    h = HValueSets.from_table(table("6A7"))
    rec = obstruction.threefold_case(h)
    by = {(e["params"]["h3"], e["params"]["h4"]): e for e in rec.assignments}
    assert all(by[k]["violated"] for k in by if k[0] == 20)
    assert all(by[k]["violated"] for k in by if k[0] == 36)
    upper20 = next(e for k, e in by.items() if k[0] == 20)["violated"]
    assert upper20["name"] == "h4_at_most_rr3" and upper20["bound"] == -12
    for h4, hhh, hhk, h5 in ((120, 9, 4, 222), (126, 15, -20, 246)):
        e = by[(56, h4)]
        assert e["derived"]["HHH"] == hhh and e["derived"]["HHK"] == hhk and e["derived"]["h5"] == h5
        assert e["violated"] is None
    survivors = sorted(k for k, e in by.items() if e["violated"] is None)
    assert survivors == [(56, 120), (56, 126)]
    assert not rec.closed


def test_threefold_h3_36_interval_empty():
    q = obstruction.rr_quantities(6, 21, 36, 53)
    assert (q["lower"], q["upper"]) == (54, 52)


def test_threefold_hj():
    rec = obstruction.threefold_case(HJ)
    assert rec.closed
    assert rec.assignments[0]["violated"] == {"name": "h5_in_H5", "holds": False, "value": 246}


def test_r_analysis():
    rec = obstruction.r_analysis(table("2HaJ"))
    assert rec.closed and rec.trail == {"r": 1} and rec.check["quotient_order"] == 604800
    assert obstruction.r_analysis(table("6A7")).check["quotient_order"] == 2520
    assert obstruction.dim0_case(rec, 6).closed


def test_r_analysis_refuses_non_simple():
    d = chartable.to_dict(table("6A7"))
    d["is_simple_modulo_center"] = False
    rec = obstruction.r_analysis(chartable.from_dict(d))
    assert not rec.closed
    assert not obstruction.dim0_case(rec, 6).closed


def test_dim4():
    assert obstruction.dim4_case(table("2HaJ")).check["min_semiinvariant_degree"] == 12
    assert obstruction.dim4_case(table("6A7")).closed
    rec = obstruction.dim4_case(table("SL2F7"))
    assert not rec.closed and rec.check["min_semiinvariant_degree"] == 4


# certificates


@pytest.mark.parametrize(
    "name, witness",
    [("SL2F7", 4), ("3A7", 3), ("6A6", 6), ("SU3F3", 6), ("6PSL3F4", 6), ("2A5", 4), ("SL2F11", 4), ("SL2F13", 4),
     ("PSL2F13", 2), ("PSL2F8", 2), ("PSU3F3", 3)],
)
def test_not_exceptional(name, witness):
    cert = obstruction.check_exceptionality(table(name))
    assert (cert.verdict, cert.witness_degree) == ("not-exceptional", witness)


@pytest.mark.parametrize("shortcut", [True, False])
def test_2haj_verified(shortcut):
    cert = obstruction.check_exceptionality(table("2HaJ"), shortcut=shortcut)
    assert cert.verdict == "criterion-verified"
    assert all(c.closed for c in cert.cases)
    ids = [c.case for c in cert.cases]
    assert ids == (["dim-4", "r-analysis", "dim-0", "hj"] if shortcut else ["dim-4", "r-analysis", "dim-0", "curve", "surface", "threefold"])


def test_6a7_certificate():
    cert = obstruction.check_exceptionality(table("6A7"))
    assert cert.verdict == "inconclusive"
    assert assess(cert.to_dict())["open"] == ["threefold"]
    assert any("171" in n and "222" in n for n in cert.notes)
    assert any("(5, -5, 6)" in n for n in cert.notes)
    assert cert.case("curve").notes


def _checks(cert):
    yield cert["semiinvariants"]["check"]
    for case in cert["cases"]:
        if "check" in case:
            yield case["check"]
        for e in case.get("assignments", []):
            if e["violated"]:
                yield e["violated"]


@pytest.mark.parametrize("shortcut", [True, False])
def test_mutation_flips_verdict(shortcut):
    cert = obstruction.check_exceptionality(table("2HaJ"), shortcut=shortcut).to_dict()
    count = sum(1 for _ in _checks(cert))
    assert count >= 5
    for k in range(count):
        mutated = copy.deepcopy(cert)
        check = list(_checks(mutated))[k]
        check["holds"] = not check["holds"]
        assert assess(mutated)["verdict"] != "criterion-verified"


def test_assess_rejects_missing_cases():
    cert = obstruction.check_exceptionality(table("2HaJ"), shortcut=False).to_dict()
    cert["cases"] = [c for c in cert["cases"] if c["case"] != "surface"]
    assert assess(cert) == {"verdict": "inconclusive", "witness_degree": None, "open": ["surface"]}


def test_assess_rejects_status_mismatch():
    cert = obstruction.check_exceptionality(table("6A7")).to_dict()
    for c in cert["cases"]:
        c["status"] = "closed"
    assert assess(cert)["verdict"] == "inconclusive"


@pytest.mark.parametrize("name", ["2HaJ", "6A7"])
def test_replay_reproduces_trails(name):
    cert = obstruction.check_exceptionality(table(name), shortcut=False).to_dict()
    assert obstruction.replay(cert) == []
    tampered = copy.deepcopy(cert)
    tampered["cases"][-1]["assignments"][0]["derived"]["HHH"] = 999
    assert obstruction.replay(tampered) == ["threefold"]


@pytest.mark.parametrize("name", TABLE_NAMES)
def test_certificates_are_deterministic_json(name):
    a = json.dumps(obstruction.check_exceptionality(table(name)).to_dict())
    b = json.dumps(obstruction.check_exceptionality(table(name)).to_dict())
    assert a == b
    assert json.loads(a)["schema"] == 1


def test_dimension_7_needs_only_semiinvariants():
    for name in SEVEN_DIM:
        cert = obstruction.check_exceptionality(table(name))
        assert cert.cases == [] and cert.ambient_dim == 6


def test_rejects_unsupported_degree():
    d = chartable.to_dict(table("2A5"))
    d["distinguished_rep"] = "2a"
    with pytest.raises(ValueError):
        obstruction.check_exceptionality(chartable.from_dict(d))
    d = chartable.to_dict(table("6A7"))
    d["primitive"] = False
    with pytest.raises(ValueError):
        obstruction.check_exceptionality(chartable.from_dict(d))
