import json

import pytest

from conftest import DATA, table

from exceptcheck import matgroup
from exceptcheck.exactnum import zeta
from exceptcheck.matgroup import ExactMatrix, GeneratorFileError, OrderExceeded, closure


def heisenberg():
    z = zeta(7)
    d = ExactMatrix.diagonal([z**j for j in range(7)])
    p = ExactMatrix(tuple(tuple(1 if r == (c + 1) % 7 else 0 for c in range(7)) for r in range(7)))
    return [d, p]


def test_cyclic_group():
    g = closure([ExactMatrix.diagonal([zeta(5), zeta(5, 4)])], 100)
    assert g.order == 5
    assert matgroup.direct_molien_coefficients(g, 0) == [1]
    # invariants x^a y^b with a = b mod 5
    assert matgroup.direct_molien_coefficients(g, 6) == [1, 0, 1, 0, 1, 2, 1]


def test_cyclic_three_classes():
    g = closure([ExactMatrix.diagonal([zeta(3), zeta(3, 2)])], 10)
    traces = sorted(str(c.trace) for c in matgroup.character_of(g))
    assert traces == ["-1", "-1", "2"]


def test_heisenberg():
    g = closure(heisenberg(), 1000)
    assert g.order == 343
    classes = matgroup.character_of(g)
    assert sum(c.size for c in classes) == 343
    central = [c for c in classes if c.size == 1]
    assert {c.trace for c in central} == {7 * zeta(7, k) for k in range(7)}
    assert all(c.trace == 0 for c in classes if c.size > 1)
    assert matgroup.direct_molien_coefficients(g, 7)[1:7] == [0] * 6


def test_group_membership_and_products():
    g = closure(heisenberg(), 1000)
    a, b = g.element(17), g.element(230)
    assert (a * b) in g
    assert g.index_of(a * b) == g.product_index(17, 230)
    assert ExactMatrix.identity(7) in g
    assert ExactMatrix.diagonal([2] + [1] * 6) not in g


def test_order_exceeded():
    with pytest.raises(OrderExceeded):
        closure(heisenberg(), 100)


def test_exact_matrix_basics():
    m = ExactMatrix(((1, 2), (3, 4)))
    assert m.determinant() == -2
    assert m.trace() == 5
    assert (m * ExactMatrix.identity(2)) == m
    assert m.transpose().entries[0][1] == 3
    with pytest.raises(ValueError):
        ExactMatrix(((1, 2),))
    with pytest.raises(ValueError):
        closure([ExactMatrix(((1, 2), (2, 4)))], 10)


def test_binary_icosahedral(ico):
    assert ico.order == 120
    assert matgroup.direct_molien_coefficients(ico, 12) == [1] + [0] * 11 + [1]
    classes = matgroup.character_of(ico)
    assert len(classes) == 9
    golden = zeta(5) + zeta(5, 4)
    assert golden in {c.trace for c in classes}


def test_icosahedral_classes_match_table(ico):
    t = table("2A5")
    chi = t.character("2a")
    from_table = sorted((c.element_order, c.size, str(chi.values[c.index])) for c in t.classes)
    from_matrices = sorted((c.element_order, c.size, str(c.trace)) for c in matgroup.character_of(ico))
    assert from_table == from_matrices


def test_g7(g7):
    gens, meta = matgroup.load_generators(DATA / "generators" / "G7.json")
    assert meta["conductor_hint"] == 7
    assert all(m.determinant() == 1 for m in gens)
    assert g7.order == 343 * 336
    h7 = closure(heisenberg(), 1000, 7)
    for m in gens:
        inv = g7.element(_inverse(g7, m))
        assert all((inv * h * m) in h7 for h in heisenberg())


def _inverse(g, m):
    i = g.index_of(m)
    ident = g.index_of(ExactMatrix.identity(g.dimension))
    prev, cur = ident, i
    while cur != ident:
        prev, cur = cur, g.product_index(cur, i)
    return prev


def test_generator_file_errors(tmp_path):
    p = tmp_path / "g.json"
    p.write_text(json.dumps({"dimension": 2, "generators": [["1", "0", "0"]]}))
    with pytest.raises(GeneratorFileError, match="expected 4"):
        matgroup.load_generators(p)
    p.write_text(json.dumps({"dimension": 2, "generators": [["1", "0", "0", "z"]]}))
    with pytest.raises(GeneratorFileError):
        matgroup.load_generators(p)
    p.write_text("{")
    with pytest.raises(GeneratorFileError, match="line 1"):
        matgroup.load_generators(p)


def test_generator_file_accepts_nested_rows(tmp_path):
    p = tmp_path / "g.json"
    p.write_text(json.dumps({"dimension": 2, "conductor_hint": 4, "generators": [[["z4", "0"], ["0", "-z4"]]]}))
    gens, _ = matgroup.load_generators(p)
    assert closure(gens, 10, 4).order == 4


def test_conductor_hint_must_contain_entries():
    with pytest.raises(ValueError):
        closure([ExactMatrix.diagonal([zeta(5), zeta(5, 4)])], 10, 7)


def test_molien_rejects_a_non_group():
    g = closure([ExactMatrix.diagonal([zeta(5), zeta(5, 4)])], 10)
    partial = matgroup.MatrixGroup(g.generators, g._packer, g._a[:3], g._den[:3])
    with pytest.raises(matgroup.NotAnInteger):
        matgroup.direct_molien_coefficients(partial, 2)
