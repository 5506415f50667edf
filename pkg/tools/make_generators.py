"""Write the bundled generator files and check them before writing.

G7: Heisenberg group H7 (clock D, shift P) plus the Weil-representation
lifts of the SL2(F7) generators (quadratic phase T, normalized Fourier F).
2A5_dim2: binary icosahedral group in SL2(C).

Usage: python tools/make_generators.py [outdir]
"""

import json
import sys
from pathlib import Path

from exceptcheck.exactnum import CyclotomicNumber, zeta
from exceptcheck.matgroup import ExactMatrix, closure

OUT = Path(sys.argv[1] if len(sys.argv) > 1 else "src/exceptcheck/data/generators")


def g7_generators():
    z = zeta(7)
    n = 7
    d = ExactMatrix.diagonal([z**j for j in range(n)])
    p = ExactMatrix(tuple(tuple(1 if r == (c + 1) % n else 0 for c in range(n)) for r in range(n)))
    t = ExactMatrix.diagonal([z ** (4 * j * j) for j in range(n)])
    gauss = sum((z ** (j * j) for j in range(n)), CyclotomicNumber.coerce(0))
    assert gauss * gauss == -7
    inv = gauss.inverse()
    f = ExactMatrix(tuple(tuple(z ** (j * k) * inv for k in range(n)) for j in range(n)))
    det = f.determinant()
    if det == -1:
        f = ExactMatrix(tuple(tuple(-x for x in row) for row in f.entries))
    elif det != 1:
        raise SystemExit(f"unexpected Fourier determinant {det}")
    return [d, p, t, f]


def binary_icosahedral():
    e = zeta(5)
    root5 = e - e**2 - e**3 + e**4
    assert root5 * root5 == 5
    s = ExactMatrix.diagonal([e**3, e**2])
    a, b = e - e**4, e**2 - e**3
    k = root5.inverse()
    t = ExactMatrix(((-a * k, b * k), (b * k, a * k)))
    return [s, t]


def normalizes(gen, subgroup_gens, group):
    """gen^-1 h gen lies in <subgroup_gens> for each subgroup generator h."""
    sub = closure(subgroup_gens, 10**4, group.conductor)
    i = group.index_of(gen)
    inv = None
    for k in range(group.order):
        if group.product_index(i, k) == group.index_of(ExactMatrix.identity(group.dimension)):
            inv = group.element(k)
            break
    return all((inv * h * gen) in sub for h in subgroup_gens)


def write(name, gens, conductor, extra):
    OUT.mkdir(parents=True, exist_ok=True)
    obj = {
        "dimension": gens[0].dimension,
        "conductor_hint": conductor,
        **extra,
        "generators": [m.literal_rows() for m in gens],
    }
    (OUT / f"{name}.json").write_text(json.dumps(obj, indent=1) + "\n", encoding="utf-8")


def main():
    g7 = g7_generators()
    assert all(m.determinant() == 1 for m in g7)
    group = closure(g7, 200000, 7)
    assert group.order == 343 * 336, group.order
    assert all(normalizes(m, g7[:2], group) for m in g7[2:])
    write(
        "G7",
        g7,
        7,
        {"name": "G7", "description": "normalizer of the Heisenberg group H7 in SL7, order 115248"},
    )

    ico = binary_icosahedral()
    assert all(m.determinant() == 1 for m in ico)
    assert closure(ico, 1000, 5).order == 120
    write(
        "2A5_dim2",
        ico,
        5,
        {"name": "2.A5", "description": "binary icosahedral group in SL2, order 120", "table": "2A5", "character": "2a"},
    )
    print("wrote", OUT)


if __name__ == "__main__":
    main()
