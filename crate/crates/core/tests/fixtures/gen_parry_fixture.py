"""Regenerates golden_mean_parry.json: exact Parry masses of every
admissible golden-mean word of length 1..6, as elements a + b*sqrt(5)
of Q(sqrt 5) with rational a, b.

    python3 gen_parry_fixture.py > golden_mean_parry.json
"""

import itertools
import json

import sympy as sp

A = sp.Matrix([[1, 1], [1, 0]])
phi = (1 + sp.sqrt(5)) / 2
# A is symmetric, so the left and right Perron vectors coincide
u = sp.Matrix([phi, 1])
assert sp.simplify(A * u - phi * u) == sp.zeros(2, 1)
norm = (u.T * u)[0]


def mass(word):
    k = len(word) - 1
    return sp.nsimplify(sp.radsimp(u[word[0]] * u[word[-1]] / (phi**k * norm)), [sp.sqrt(5)])


def admissible(word):
    return all(A[a, b] == 1 for a, b in zip(word, word[1:]))


rows = []
for n in range(1, 7):
    total = 0
    for word in itertools.product([0, 1], repeat=n):
        if not admissible(word):
            continue
        m = sp.expand(sp.simplify(mass(word)))
        b = m.coeff(sp.sqrt(5))
        a = sp.expand(m - b * sp.sqrt(5))
        assert a.is_Rational and b.is_Rational
        total += m
        rows.append({"word": list(word), "a": str(a), "b": str(b), "value": float(sp.N(m, 30))})
    assert sp.simplify(total - 1) == 0

lines = ",\n".join("  " + json.dumps(r) for r in rows)
print('{"matrix": [[1, 1], [1, 0]], "max_len": 6, "masses": [\n' + lines + "\n]}")
