from __future__ import annotations

from fractions import Fraction

import sympy
from hypothesis import given
from hypothesis import strategies as st

from iwlambda.linalg import RelationSolver, kernel, lcm_denominator, mat_vec, rational_gcd, rref

small = st.integers(-4, 4)
matrices = st.integers(1, 5).flatmap(lambda r: st.integers(1, 6).flatmap(lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


@given(matrices)
def test_rref_matches_sympy(m):
    red, pivots = rref(m)
    ref, ref_pivots = sympy.Matrix(m).rref()
    assert list(pivots) == list(ref_pivots)
    for i, row in enumerate(red):
        assert [Fraction(int(x.numerator), int(x.denominator)) for x in row] == [Fraction(str(v)) for v in ref.row(i)]


@given(matrices)
def test_kernel_vectors_are_annihilated(m):
    basis = kernel(m)
    assert len(basis) == len(m[0]) - sympy.Matrix(m).rank()
    for v in basis:
        assert all(x == 0 for x in mat_vec(m, v))


@given(st.integers(2, 8).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.dictionaries(st.integers(0, n - 1), small, max_size=3), max_size=8))))
def test_relation_solver_quotient_dimension(data):
    n, relations = data
    solver = RelationSolver(n)
    for rel in relations:
        solver.add(rel)
    free, coords = solver.solve()
    rows = [[rel.get(i, 0) for i in range(n)] for rel in relations]
    rank = sympy.Matrix(rows).rank() if rows else 0
    assert len(free) == n - rank
    # Every relation becomes zero after substituting the coordinates.
    for rel in relations:
        total = {}
        for var, c in rel.items():
            for j, x in coords[var].items():
                total[j] = total.get(j, 0) + c * x
        assert all(v == 0 for v in total.values())


def test_denominators_and_gcd():
    assert lcm_denominator([Fraction(1, 4), Fraction(1, 6), 3]) == 12
    assert rational_gcd([Fraction(1, 2), Fraction(3, 4)]) == Fraction(1, 4)
    assert rational_gcd([0, 0]) == 0
