import pytest

from conftest import TABLE_NAMES, table

from exceptcheck import chartable, invariants
from exceptcheck.invariants import NotFound


@pytest.mark.parametrize(
    "name, expected",
    [("SL2F7", 4), ("3A7", 3), ("6A6", 6), ("SU3F3", 6), ("PSL2F13", 2), ("2A5", 4), ("6PSL3F4", 6)],
)
def test_min_invariant_degree(name, expected):
    assert invariants.min_invariant_degree(table(name), 12) == expected


@pytest.mark.parametrize("name", ["6A7", "2HaJ"])
def test_semiinvariants_start_at_12(name):
    t = table(name)
    assert invariants.min_semiinvariant_degree(t, 12) == 12
    with pytest.raises(NotFound) as exc:
        invariants.min_semiinvariant_degree(t, 11)
    assert exc.value.max_degree == 11


@pytest.mark.parametrize("name", TABLE_NAMES)
def test_semi_at_most_invariant(name):
    t = table(name)
    semi = invariants.min_semiinvariant_degree(t, 12)
    inv = invariants.min_invariant_degree(t, 12)
    assert semi <= inv
    if t.is_simple_modulo_center and t.center_in_commutator:
        assert semi == inv
    if t.linear_characters() == [0]:
        assert semi == inv


def test_degree2_invariant():
    assert invariants.has_degree2_invariant(table("PSL2F8"))
    assert not invariants.has_degree2_invariant(table("2HaJ"))


def test_trivial_group():
    t = chartable.from_dict(
        {
            "group_name": "1",
            "order": 1,
            "is_simple_modulo_center": False,
            "center_in_commutator": True,
            "primitive": True,
            "distinguished_rep": "1a",
            "classes": [{"size": 1, "element_order": 1, "power_maps": {"2": 0, "3": 0, "5": 0, "7": 0, "11": 0}}],
            "irreducibles": [{"name": "1a", "degree": 1, "values": ["1"]}],
        }
    )
    assert chartable.validate(t).ok
    assert invariants.has_degree2_invariant(t)
    assert invariants.molien_coefficients(t, 5) == [1] * 6


def test_molien_table_shape():
    out = invariants.molien_table(table("SL2F7"), 8)
    assert out["min_invariant_degree"] == 4
    assert [r["invariants"] for r in out["coefficients"]] == [1, 0, 0, 0, 1, 0, 2, 0, 10]
    assert all(set(r["semiinvariants"]) == {"1a"} for r in out["coefficients"])


def test_character_override():
    t = table("2A5")
    assert invariants.min_invariant_degree(t, 12, t.character("2a")) == 12
