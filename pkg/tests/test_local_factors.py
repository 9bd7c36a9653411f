from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from iwlambda.characters import DirichletCharacter
from iwlambda.elliptic import CurveQ, classify_reduction, minimal_model
from iwlambda.errors import HypothesisError, InputError
from iwlambda.lambda_algebra import eval_at_zero, invariants
from iwlambda.local_factors import (
    character_local_corank,
    corank_torsion,
    d_ell,
    euler_element,
    euler_group_ring,
    f_ell,
    root_multiplicity,
    s_ell,
    sigma,
    t_ell,
)
from iwlambda.padic_core import PadicNumber, Precision

from oracles import s_ell as s_ell_oracle

E1 = CurveQ.from_ainvs([0, 0, 0, 1, -10], conductor=52)
E2 = CurveQ.from_ainvs([0, 0, 0, -584, 5444], conductor=364)
PREC = Precision(padic_digits=6, series_degree=32)


def test_s_ell_examples():
    assert s_ell(7, 5) == 5
    assert s_ell(2, 5) == 1
    assert s_ell(11, 5) == 1


@given(st.sampled_from([3, 5, 7]), st.integers(2, 3000))
def test_s_ell_matches_oracle(p, ell):
    if ell % p == 0:
        return
    assert s_ell(ell, p) == s_ell_oracle(ell, p)


def test_d_ell_examples():
    assert d_ell(classify_reduction(E1, 7), 5) == 1
    assert d_ell(classify_reduction(E1, 2), 5) == 0
    assert d_ell(classify_reduction(E1, 13), 5) == 0
    assert root_multiplicity((1, -2, 1), 1, 5) == 2


def test_euler_element_at_7_has_lambda_5():
    inv = invariants(euler_element(classify_reduction(E1, 7), 5, PREC))
    assert (inv.mu, inv.lam) == (0, 5)
    inv = invariants(euler_element(classify_reduction(E1, 13), 5, PREC))
    assert (inv.mu, inv.lam) == (0, 0)


@pytest.mark.parametrize("ell", [2, 3, 7, 11, 13, 17])
def test_euler_element_value_at_zero(ell):
    local = classify_reduction(E1, ell)
    expected = sum(Fraction(c, ell**i) for i, c in enumerate(local.euler_poly))
    assert eval_at_zero(euler_element(local, 5, PREC)) == PadicNumber.of(expected, 5, 6)


def test_euler_group_ring_evaluates_at_conductor_p_characters():
    # rho(P_ell) = P_ell(rho(ell) / ell) for rho of Gamma of conductor 25, tested through the group ring.
    local = classify_reduction(E1, 7)
    elem = euler_group_ring(local, 5, 6, 1)
    e = f_ell(7, 5, 2).residue % 5
    for j in range(1, 5):
        # sum_e c_e zeta^(j e) against P(zeta^(j f) / 7) computed term by term.
        lhs = [0] * 5
        for i, c in enumerate(elem.coeffs):
            lhs[(i * j) % 5] += c
        rhs = [0] * 5
        inv7 = pow(7, -1, 5**6)
        for i, c in enumerate(local.euler_poly):
            rhs[(i * e * j) % 5] += c * pow(inv7, i, 5**6)
        assert [x % 5**6 for x in lhs] == [x % 5**6 for x in rhs]


def test_sigma_of_worked_pair():
    assert [sigma(E1, ell, 5, PREC).sigma for ell in (2, 7, 13)] == [0, 5, 0]
    assert [sigma(E2, ell, 5, PREC).sigma for ell in (2, 7, 13)] == [0, 0, 0]
    with pytest.raises(InputError):
        sigma(E1, 5, 5, PREC)


def test_character_local_corank():
    psi = DirichletCharacter.kronecker(-7)
    assert character_local_corank(psi, 7, 5) == 0
    assert character_local_corank(psi, 11, 5) == 1  # 11 splits in Q(sqrt(-7))
    assert character_local_corank(DirichletCharacter.trivial(), 13, 5) == 1
    assert character_local_corank(DirichletCharacter.kronecker(-3), 11, 5) == 0


def _twist(c):
    base = CurveQ.from_ainvs([0, -1, 1, 0, 0])
    from iwlambda.elliptic import quadratic_twist

    return minimal_model(quadratic_twist(base, -c))


def test_t_ell_for_twists():
    omega = DirichletCharacter.teichmuller(5, 1)
    for c, D, expected in ((7, -7, 1), (3, -3, 0)):
        psi = DirichletCharacter.kronecker(D)
        phi = omega * psi
        rec = t_ell(_twist(c), phi, psi, 11, 5)
        assert rec.t == expected
        assert t_ell(_twist(c), phi, psi, c, 5).t == 0
    with pytest.raises(HypothesisError):
        t_ell(_twist(7), DirichletCharacter.trivial(), DirichletCharacter.trivial(), 11, 5)


def test_corank_torsion_split_multiplicative():
    local = classify_reduction(minimal_model(E2), 7)
    assert corank_torsion(local, 5).corank == 0
    assert corank_torsion(classify_reduction(E1, 2), 5).corank == 0
