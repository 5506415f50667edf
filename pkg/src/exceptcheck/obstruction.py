"""Case elimination for a minimal log canonical center S of a G-invariant pair on P^n.

Every case produces a CaseRecord. Enumerated cases list one entry per parameter
assignment; an eliminated assignment carries exactly one violated check (the
first that fails) and the requirements it passed before that, by name and value.
``assess`` recomputes the verdict from those recorded checks alone, so the
verdict follows every recorded check verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .chartable import DEFAULT_MAX_DEGREE, CharacterTable
from .exactnum import binomial, solve_linear
from .invariants import NotFound, min_invariant_degree, min_semiinvariant_degree
from .sympow import decompose, h_value_sets, sym_power_characters

__all__ = [
    "NegativeR",
    "HValueSets",
    "CaseRecord",
    "ExceptionalityCertificate",
    "degree_bound",
    "dim4_case",
    "r_analysis",
    "dim0_case",
    "curve_case",
    "surface_case",
    "threefold_case",
    "hj_impossibility",
    "rr_quantities",
    "predicted_h5",
    "check_exceptionality",
    "assess",
    "replay",
    "SCHEMA",
]

SCHEMA = 1
CASE_ORDER = ("dim-4", "r-analysis", "dim-0", "hj", "curve", "surface", "threefold")
GEOMETRIC = ("curve", "surface", "threefold")

Number = Union[int, Fraction]


class NegativeR(ValueError):
    pass


def _json_num(x: Number):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else str(x)


def degree_bound(n: int, dim_y: int, mu_sup: Number, mu_attained: bool) -> int:
    """C(s + r, r) with s = n - dim_y.

    With mu attained, r = ceil(mu - s - 1) + 1 for integral mu and
    ceil(mu - s - 1) otherwise. With mu only a strict upper bound, r is the
    largest of those values over mu < mu_sup, which is ceil(mu_sup - s - 1).
    """
    if not 0 <= dim_y <= n:
        raise ValueError("need 0 <= dim_y <= n")
    mu = Fraction(mu_sup)
    if mu <= 0:
        raise ValueError("mu must be positive")
    s = n - dim_y
    r = ceil(mu - s - 1)
    if mu_attained and mu.denominator == 1:
        r += 1
    if r < 0:
        raise NegativeR(f"r = {r} for s = {s}, mu = {mu}")
    return binomial(s + r, r)


# ---------------------------------------------------------------------------
# allowed h-values


@dataclass(frozen=True)
class HValueSets:
    """H_n = allowed values of h^0(O_Z(n)) for n = 1..n_max on P^ambient_dim."""

    ambient_dim: int
    sets: Mapping[int, Tuple[int, ...]]
    provenance: Mapping[int, Tuple[Tuple[str, int, int], ...]] = field(default_factory=dict)

    @classmethod
    def from_table(cls, t: CharacterTable, n_max: int = 5) -> "HValueSets":
        chi = t.distinguished
        ambient = int(chi.degree.as_rational()) - 1
        syms = sym_power_characters(chi, n_max)
        prov = {}
        for n in range(1, n_max + 1):
            d = decompose(syms[n])
            prov[n] = tuple((t.irreducibles[i].name, t.irreducibles[i].degree, m) for i, m in d.parts)
        return cls(ambient, h_value_sets(t, ambient, n_max), prov)

    def __getitem__(self, n: int) -> Tuple[int, ...]:
        return self.sets[n]

    def full(self, n: int) -> int:
        return binomial(self.ambient_dim + n, n)

    def to_dict(self) -> Dict[str, object]:
        out: Dict[str, object] = {
            "ambient_dim": self.ambient_dim,
            "sets": {str(n): list(v) for n, v in sorted(self.sets.items())},
        }
        if self.provenance:
            out["decompositions"] = {
                str(n): [{"name": a, "degree": b, "multiplicity": c} for a, b, c in parts]
                for n, parts in sorted(self.provenance.items())
            }
        return out

    @classmethod
    def from_dict(cls, obj: Mapping[str, object]) -> "HValueSets":
        sets = {int(n): tuple(v) for n, v in obj["sets"].items()}
        return cls(int(obj["ambient_dim"]), sets)


# ---------------------------------------------------------------------------
# records


@dataclass
class CaseRecord:
    case: str
    status: str  # "closed" | "open"
    reason: str
    trail: Dict[str, object] = field(default_factory=dict)
    check: Optional[Dict[str, object]] = None
    assignments: List[Dict[str, object]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def closed(self) -> bool:
        return self.status == "closed"

    def to_dict(self) -> Dict[str, object]:
        out: Dict[str, object] = {"case": self.case, "status": self.status, "reason": self.reason}
        if self.check is not None:
            out["check"] = self.check
        if self.trail:
            out["trail"] = self.trail
        if self.assignments or self.case in GEOMETRIC:
            out["assignments"] = self.assignments
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _single(case: str, name: str, holds: bool, values: Dict[str, object], closed_reason: str, open_reason: str) -> CaseRecord:
    check = {"name": name, "holds": bool(holds), **values}
    return CaseRecord(case, "closed" if holds else "open", closed_reason if holds else open_reason, check=check)


class _Checker:
    """Runs named requirements in order and stops at the first failure."""

    def __init__(self, params: Dict[str, object]):
        self.entry: Dict[str, object] = {"params": params, "passed": [], "violated": None}
        self.redundant: List[str] = []

    @property
    def alive(self) -> bool:
        return self.entry["violated"] is None

    def require(self, name: str, holds: bool, **values) -> bool:
        values = {k: _json_num(v) if isinstance(v, (int, Fraction)) and not isinstance(v, bool) else v for k, v in values.items()}
        if not self.alive:
            if not holds:
                self.redundant.append(name)
            return False
        if holds:
            self.entry["passed"].append({"name": name, **values})
        else:
            self.entry["violated"] = {"name": name, "holds": False, **values}
        return bool(holds)

    def done(self) -> Dict[str, object]:
        if self.redundant:
            self.entry["also_violates"] = list(self.redundant)
        return self.entry


def _enumerated(case: str, entries: List[Dict[str, object]], trail: Dict[str, object]) -> CaseRecord:
    entries.sort(key=lambda e: tuple(e["params"].values()))
    survivors = [e for e in entries if e["violated"] is None]
    if survivors:
        reason = f"{len(survivors)} of {len(entries)} assignments survive every check"
        return CaseRecord(case, "open", reason, trail, assignments=entries)
    return CaseRecord(case, "closed", f"all {len(entries)} assignments eliminated", trail, assignments=entries)


# ---------------------------------------------------------------------------
# representation-theoretic cases


def _min_semi(t: CharacterTable, max_degree: int) -> Optional[int]:
    try:
        return min_semiinvariant_degree(t, max_degree)
    except NotFound:
        return None


def dim4_case(t: CharacterTable, max_degree: int = DEFAULT_MAX_DEGREE) -> CaseRecord:
    """A divisor S would be cut out by a semi-invariant of degree <= ambient + 1."""
    ambient = t.distinguished_degree - 1
    threshold = ambient + 1
    d = _min_semi(t, max(max_degree, threshold))
    holds = d is None or d > threshold
    return _single(
        "dim-4" if ambient == 5 else f"dim-{ambient - 1}",
        "no_semiinvariant_up_to_ambient_plus_one",
        holds,
        {"min_semiinvariant_degree": d, "searched_up_to": max(max_degree, threshold), "threshold": threshold},
        f"no semi-invariant of degree <= {threshold}",
        f"semi-invariant of degree {d}",
    )


def r_analysis(t: CharacterTable, h: Optional[HValueSets] = None) -> CaseRecord:
    """r * h^0(O_S(1)) = h^0(O_Z(1)) = ambient + 1 forces r <= ambient + 1; a simple
    quotient bigger than (ambient + 1)! cannot permute r components nontrivially."""
    ambient = t.distinguished_degree - 1
    quotient = t.order // t.center_order
    bound = _factorial(ambient + 1)
    h1 = tuple(h[1]) if h is not None else (ambient + 1,)
    values = {
        "H1": list(h1),
        "simple_modulo_center": t.is_simple_modulo_center,
        "quotient_order": quotient,
        "symmetric_group_order": bound,
    }
    holds = h1 == (ambient + 1,) and t.is_simple_modulo_center and quotient > bound
    rec = _single(
        "r-analysis",
        "quotient_simple_and_larger_than_symmetric_group",
        holds,
        values,
        "r = 1: Z = S",
        "cannot rule out r > 1",
    )
    if holds:
        rec.trail = {"r": 1}
    return rec


def dim0_case(r_record: CaseRecord, chi_degree: int) -> CaseRecord:
    """With r = 1 a zero-dimensional S is a fixed point, i.e. an invariant line."""
    established = r_record.closed
    holds = established and chi_degree > 1
    return _single(
        "dim-0",
        "fixed_point_contradicts_irreducibility",
        holds,
        {"r_equals_one": established, "representation_degree": chi_degree},
        "a G-fixed point would be an invariant line of an irreducible representation",
        "r = 1 not established",
    )


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


# ---------------------------------------------------------------------------
# geometric cases (ambient P^5)


def _mu_sup(h: HValueSets) -> int:
    # lambda < (n + 2) / (n + 1) and D ~ O(n + 1), so mu = (n + 1) lambda < n + 2
    return h.ambient_dim + 2


def hj_impossibility(h: HValueSets) -> Optional[CaseRecord]:
    """When every H_n is {C(ambient + n, n)}, no polynomial of degree <= 3 fits h_1..h_5."""
    full = [h.full(n) for n in range(1, 6)]
    if any(tuple(h[n]) != (full[n - 1],) for n in range(1, 6)):
        return None
    fourth = full[4] - 4 * full[3] + 6 * full[2] - 4 * full[1] + full[0]
    return _single(
        "hj",
        "fourth_difference_nonzero",
        fourth != 0,
        {"h": full, "fourth_difference": fourth, "covers": list(GEOMETRIC)},
        "forced h-sequence is not a polynomial of degree <= 3",
        "forced h-sequence fits a cubic",
    )


def curve_case(h: HValueSets) -> CaseRecord:
    """h_n = n deg - g + 1."""
    bound = degree_bound(h.ambient_dim, 1, _mu_sup(h), False)
    entries = []
    for h1 in h[1]:
        for h2 in h[2]:
            deg = h2 - h1
            g = deg - h1 + 1
            c = _Checker({"h1": h1, "h2": h2})
            c.require("degree_positive", deg >= 1, deg=deg)
            c.require("genus_nonnegative", g >= 0, g=g)
            for n in (3, 4, 5):
                hn = n * deg - g + 1
                c.require(f"h{n}_in_H{n}", hn in h[n], value=hn)
            c.require("degree_bound", deg <= bound, deg=deg, bound=bound)
            c.require("degree_exceeds_2g_minus_2", deg > 2 * g - 2, deg=deg, two_g_minus_2=2 * g - 2)
            entry = c.done()
            entry["derived"] = {"deg": deg, "g": g}
            entries.append(entry)
    return _enumerated("curve", entries, {"degree_bound": bound})


def _surface_solution(h1: int, h2: int, h3: int) -> Tuple[Fraction, Fraction, Fraction]:
    # h_n = (n^2/2) d - (n/2) HK + chi
    rows = [[Fraction(n * n, 2), Fraction(-n, 2), 1] for n in (1, 2, 3)]
    d, hk, chi = solve_linear(rows, [h1, h2, h3])
    return d, hk, chi


def _surface_h(n: int, d: Fraction, hk: Fraction, chi: Fraction) -> Fraction:
    return Fraction(n * n, 2) * d - Fraction(n, 2) * hk + chi


def surface_case(h: HValueSets) -> CaseRecord:
    bound = degree_bound(h.ambient_dim, 2, _mu_sup(h), False)
    entries = []
    for h1 in h[1]:
        for h2 in h[2]:
            for h3 in h[3]:
                d, hk, chi = _surface_solution(h1, h2, h3)
                c = _Checker({"h1": h1, "h2": h2, "h3": h3})
                c.require("degree_positive", d > 0, d=d)
                for n in (4, 5):
                    hn = _surface_h(n, d, hk, chi)
                    c.require(f"h{n}_in_H{n}", hn.denominator == 1 and int(hn) in h[n], value=hn)
                c.require("degree_bound", d <= bound, d=d, bound=bound)
                # K_S + B_S + Delta ~ H with B_S effective, Delta ample: H.K_S < H.H
                c.require("HK_below_HH", hk < d, HK=hk, HH=d)
                entry = c.done()
                entry["derived"] = {"d": _json_num(d), "HK": _json_num(hk), "chi": _json_num(chi)}
                entries.append(entry)
    return _enumerated("surface", entries, {"degree_bound": bound})


def _cubic_fit(hs: Sequence[int]) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
    """(H^3, H^2 K, gamma, chi) from h_n = n^3/6 H^3 + n^2/4 H^2K + n/12 gamma + chi at n = 1..4."""
    rows = [[Fraction(n**3, 6), Fraction(n * n, 4), Fraction(n, 12), 1] for n in (1, 2, 3, 4)]
    hhh, hhk, gamma, chi = solve_linear(rows, list(hs))
    return hhh, hhk, gamma, chi


def rr_quantities(h1: Number, h2: Number, h3: Number, h4: Number) -> Dict[str, Fraction]:
    hhh = Fraction(h4 - 3 * h3 + 3 * h2 - h1)  # RR-1
    hhk = 2 * (Fraction(h3 - 2 * h2 + h1) - 2 * hhh)  # RR-2
    return {
        "HHH": hhh,
        "HHK": hhk,
        "upper": Fraction(2 * h1 - 5 * h2 + 4 * h3 + 1),  # RR-3
        "lower": Fraction(3 + h1 - 3 * h2 + 3 * h3),  # RR-4
    }


def predicted_h5(h2: Number, h3: Number, h4: Number, hhh: Number) -> Fraction:
    # RR-5: H^3 = h5 - 3 h4 + 3 h3 - h2
    return Fraction(hhh) + 3 * h4 - 3 * h3 + h2


def threefold_case(h: HValueSets) -> CaseRecord:
    bound = degree_bound(h.ambient_dim, 3, _mu_sup(h), False)
    entries = []
    for h1 in h[1]:
        for h2 in h[2]:
            for h3 in h[3]:
                for h4 in h[4]:
                    q = rr_quantities(h1, h2, h3, h4)
                    c = _Checker({"h1": h1, "h2": h2, "h3": h3, "h4": h4})
                    c.require("h4_at_most_rr3", h4 <= q["upper"], h4=h4, bound=q["upper"])
                    c.require("h4_at_least_rr4", h4 >= q["lower"], h4=h4, bound=q["lower"])
                    c.require("HHH_at_least_3", q["HHH"] >= 3, HHH=q["HHH"])
                    c.require("genus_inequality", q["HHK"] >= -2 - 2 * q["HHH"], HHK=q["HHK"], bound=-2 - 2 * q["HHH"])
                    entry_derived: Dict[str, object] = {"HHH": _json_num(q["HHH"]), "HHK": _json_num(q["HHK"])}
                    if c.alive:
                        hhh, hhk, gamma, chi = _cubic_fit((h1, h2, h3, h4))
                        if (hhh, hhk) != (q["HHH"], q["HHK"]):
                            raise ArithmeticError("RR identities disagree with the cubic fit")
                        entry_derived.update(gamma=_json_num(gamma), chi=_json_num(chi))
                        c.require("gamma_integral", gamma.denominator == 1, gamma=gamma)
                        h5 = predicted_h5(h2, h3, h4, hhh)
                        entry_derived["h5"] = _json_num(h5)
                        c.require("h5_in_H5", h5.denominator == 1 and int(h5) in h[5], value=h5)
                        c.require("degree_bound", hhh <= bound, HHH=hhh, bound=bound)
                        # same adjunction relation cut by two hyperplanes: H^2.K_S < H^3
                        c.require("HHK_below_HHH", hhk < hhh, HHK=hhk, HHH=hhh)
                    entry = c.done()
                    entry["derived"] = entry_derived
                    entries.append(entry)
    return _enumerated("threefold", entries, {"degree_bound": bound})


# ---------------------------------------------------------------------------
# certificate


# Published intermediate values checked against the engine's own numbers (6.A7).
_REFERENCE = {
    "6.A7": {
        "surface_triples": [(5, -5, 6), (15, 5, -4), (15, 5, 6)],
        "threefold_h5": {120: 171, 126: 179},
        "H5_excluded": [66, 171, 179],
    }
}


@dataclass
class ExceptionalityCertificate:
    group_name: str
    representation: str
    ambient_dim: int
    verdict: str
    witness_degree: Optional[int]
    semiinvariants: Dict[str, object]
    h_sets: Optional[HValueSets]
    cases: List[CaseRecord]
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, object]:
        return {
            "schema": SCHEMA,
            "group_name": self.group_name,
            "representation": self.representation,
            "ambient_dim": self.ambient_dim,
            "verdict": self.verdict,
            "witness_degree": self.witness_degree,
            "semiinvariants": self.semiinvariants,
            "h_sets": self.h_sets.to_dict() if self.h_sets is not None else None,
            "cases": [c.to_dict() for c in self.cases],
            "notes": list(self.notes),
        }

    def case(self, name: str) -> CaseRecord:
        return next(c for c in self.cases if c.case == name)


def _reference_notes(name: str, cases: Sequence[CaseRecord], h: HValueSets) -> List[str]:
    ref = _REFERENCE.get(name)
    if not ref:
        return []
    notes = []
    by = {c.case: c for c in cases}
    if "surface" in by:
        derived = sorted(
            (e["derived"]["d"], e["derived"]["HK"], e["derived"]["chi"])
            for e in by["surface"].assignments
            if not (e["violated"] or {}).get("name") == "degree_positive"
        )
        stray = [t for t in ref["surface_triples"] if t not in derived]
        if stray:
            notes.append(
                f"surface: reference triples {stray} are not solutions for the listed H-sets; derived triples with d > 0: {derived}"
            )
    if "threefold" in by:
        for e in by["threefold"].assignments:
            h4 = e["params"]["h4"]
            if h4 in ref["threefold_h5"] and "h5" in e["derived"] and e["derived"]["h5"] != ref["threefold_h5"][h4]:
                notes.append(
                    f"threefold h4 = {h4}: reference h5 = {ref['threefold_h5'][h4]} disagrees with RR-5 recomputation h5 = {e['derived']['h5']}"
                )
    members = [v for v in ref["H5_excluded"] if v in h[5]]
    if members:
        notes.append(f"reference exclusions {members} from H5 do not hold for the computed decomposition of Sym^5")
    return notes


def check_exceptionality(
    t: CharacterTable, max_degree: int = DEFAULT_MAX_DEGREE, shortcut: bool = True
) -> ExceptionalityCertificate:
    """Run the case analysis for the distinguished representation of t."""
    degree = t.distinguished_degree
    if degree not in (6, 7):
        raise ValueError(f"distinguished representation has degree {degree}; expected 6 or 7")
    if not t.primitive:
        raise ValueError("table is not flagged primitive")
    ambient = degree - 1
    threshold = ambient + 1
    search = max(max_degree, threshold)
    semi = _min_semi(t, search)
    try:
        inv = min_invariant_degree(t, search)
    except NotFound:
        inv = None
    holds = semi is None or semi > threshold
    semiinvariants = {
        "min_semiinvariant_degree": semi,
        "min_invariant_degree": inv,
        "searched_up_to": search,
        "check": {"name": "no_semiinvariant_up_to_ambient_plus_one", "holds": holds, "threshold": threshold},
    }
    if not holds:
        return ExceptionalityCertificate(
            t.group_name, t.distinguished_rep, ambient, "not-exceptional", semi, semiinvariants, None, []
        )

    notes: List[str] = []
    if ambient != 5:
        cert = ExceptionalityCertificate(
            t.group_name, t.distinguished_rep, ambient, "inconclusive", None, semiinvariants, None, [],
            ["geometric case analysis is only wired for ambient dimension 5"],
        )
        return cert

    h = HValueSets.from_table(t)
    cases = [dim4_case(t, max_degree)]
    r_rec = r_analysis(t, h)
    cases += [r_rec, dim0_case(r_rec, degree)]
    hj = hj_impossibility(h) if shortcut else None
    if hj is not None:
        cases.append(hj)
    if hj is None or not hj.closed:
        cases += [curve_case(h), surface_case(h), threefold_case(h)]
    cases.sort(key=lambda c: CASE_ORDER.index(c.case))
    for c in cases:
        if c.case == "curve":
            for e in c.assignments:
                if e["violated"] and e["violated"]["name"] == "degree_exceeds_2g_minus_2":
                    c.notes.append(f"assignment {e['params']} passes every membership check; only deg > 2g - 2 excludes it")
    notes += _reference_notes(t.group_name, cases, h)
    cert = ExceptionalityCertificate(t.group_name, t.distinguished_rep, ambient, "", None, semiinvariants, h, cases, notes)
    verdict = assess(cert.to_dict())
    cert.verdict, cert.witness_degree = verdict["verdict"], verdict["witness_degree"]
    return cert


def _case_closed(case: Mapping[str, object]) -> bool:
    if case["case"] in GEOMETRIC:
        entries = case.get("assignments", [])
        return all(e.get("violated") is not None and e["violated"].get("holds") is False for e in entries)
    check = case.get("check")
    return bool(check and check.get("holds") is True)


def assess(cert: Mapping[str, object]) -> Dict[str, object]:
    """Verdict recomputed from the recorded checks of a certificate dict."""
    semi = cert["semiinvariants"]
    if not semi["check"]["holds"]:
        return {"verdict": "not-exceptional", "witness_degree": semi["min_semiinvariant_degree"], "open": []}
    cases = {c["case"]: c for c in cert["cases"]}
    required = ["dim-4", "r-analysis", "dim-0"]
    hj = cases.get("hj")
    if hj is not None and _case_closed(hj) and set(hj["check"].get("covers", [])) >= set(GEOMETRIC):
        required.append("hj")
    else:
        required += list(GEOMETRIC)
    open_cases = [name for name in required if name not in cases or not _case_closed(cases[name])]
    # the stored status must agree with the recorded checks
    for name, c in cases.items():
        if (c["status"] == "closed") != _case_closed(c):
            open_cases.append(name)
    verdict = "criterion-verified" if not open_cases else "inconclusive"
    return {"verdict": verdict, "witness_degree": None, "open": sorted(set(open_cases), key=CASE_ORDER.index)}


_GEOMETRIC_RUNNERS: Dict[str, Callable[[HValueSets], CaseRecord]] = {
    "curve": curve_case,
    "surface": surface_case,
    "threefold": threefold_case,
}


def replay(cert: Mapping[str, object]) -> List[str]:
    """Recompute every geometric record and the hj record from the stored H-sets.

    Returns the names of records that do not reproduce exactly (empty when the
    certificate is self-consistent).
    """
    if cert.get("h_sets") is None:
        return []
    h = HValueSets.from_dict(cert["h_sets"])
    bad = []
    for c in cert["cases"]:
        if c["case"] in _GEOMETRIC_RUNNERS:
            fresh = _GEOMETRIC_RUNNERS[c["case"]](h).to_dict()
        elif c["case"] == "hj":
            rec = hj_impossibility(h)
            fresh = rec.to_dict() if rec else None
        else:
            continue
        stored = {k: v for k, v in c.items() if k != "notes"}
        if fresh is not None:
            fresh.pop("notes", None)
        if fresh != stored:
            bad.append(c["case"])
    return bad
