from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iwlambda.characters import Cyclotomic, DirichletCharacter
from iwlambda.errors import HypothesisError, InputError
from iwlambda.kubota_leopoldt import (
    bernoulli_b1,
    branch_character,
    classical_lambda,
    eisenstein_element,
    gamma_index_table,
    nonprimitive_product,
    stickelberger_element,
)
from iwlambda.lambda_algebra import GroupRingElement
from iwlambda.local_factors import f_ell
from iwlambda.padic_core import PadicNumber, teichmuller

from oracles import bernoulli_b1_quadratic, kronecker, naive_stickelberger_lambda

P = 5
ODD_D = [-3, -4, -7, -8, -11, -19, -23, -24, -31, -43, -47, -51, -56, -59, -67, -71, -79, -83, -84, -88]
KL_LAMBDA_P5 = {-3: 0, -4: 1, -7: 0, -8: 0}  # frozen from oracles.naive_stickelberger_lambda


def test_bernoulli_examples():
    assert bernoulli_b1(DirichletCharacter.kronecker(-4)) == Cyclotomic.scalar(2, Fraction(-1, 2))
    assert bernoulli_b1(DirichletCharacter.kronecker(-3)) == Cyclotomic.scalar(2, Fraction(-1, 3))
    assert bernoulli_b1(DirichletCharacter.kronecker(5)).is_zero()
    with pytest.raises(InputError):
        bernoulli_b1(DirichletCharacter.trivial())


@given(st.sampled_from(ODD_D + [5, 8, 12, 13, 17, 21, 24, 28, 29]))
def test_bernoulli_matches_direct_sum(D):
    value = bernoulli_b1(DirichletCharacter.kronecker(D))
    assert value == Cyclotomic.scalar(2, bernoulli_b1_quadratic(D))
    if D > 0:
        assert value.is_zero()


@given(st.integers(1, 3), st.sampled_from([5, 8, 12, 13, 21]))
def test_even_characters_have_vanishing_b1(j, D):
    chi = DirichletCharacter.kronecker(D) * DirichletCharacter.teichmuller(7, 2 * j)
    if chi.is_even() and not chi.is_trivial():
        assert bernoulli_b1(chi).is_zero()


def test_gamma_index_table():
    table = gamma_index_table(P, 2)
    for b in range(1, 125):
        if b % P == 0:
            assert table[b] == -1
            continue
        e = int(table[b])
        assert teichmuller(b, P, 3) * pow(1 + P, e, 125) == b


def test_frozen_lambdas_match_naive_oracle():
    for D, lam in KL_LAMBDA_P5.items():
        assert naive_stickelberger_lambda(D, P, 2) == lam
        res = classical_lambda(DirichletCharacter.kronecker(D), P, level=2)
        assert (res.lam, res.mu, res.certified) == (lam, 0, True)
        assert res.partner_lambda in (None, lam)


@pytest.mark.parametrize("D", [-11, -19, -24])
def test_lambda_matches_naive_oracle_live(D):
    assert classical_lambda(DirichletCharacter.kronecker(D), P, level=2).lam == naive_stickelberger_lambda(D, P, 2)


@settings(max_examples=12, deadline=None)
@given(st.sampled_from([D for D in ODD_D if D % 5]))
def test_mu_vanishes_and_branches_agree(D):
    res = classical_lambda(DirichletCharacter.kronecker(D), P, level=2)
    assert res.mu == 0
    assert res.partner_lambda == res.lam


@pytest.mark.parametrize("D", [-3, -4, -7, -8, -11, -19])
def test_distribution_relation(D):
    theta = branch_character(DirichletCharacter.kronecker(D), P)
    hi = stickelberger_element(theta, P, 3, k=6)
    lo = stickelberger_element(theta, P, 2, k=6)
    assert hi.project(2) == lo
    assert lo.project(1) == stickelberger_element(theta, P, 1, k=6)


@pytest.mark.parametrize("D", [-3, -4, -7, -11])
def test_fast_and_direct_sums_agree(D):
    theta = branch_character(DirichletCharacter.kronecker(D), P)
    assert stickelberger_element(theta, P, 2, 6) == stickelberger_element(theta, P, 2, 6, method="direct")


@pytest.mark.parametrize("D", [-3, -4, -7, -8, -11, -19])
def test_interpolation_at_trivial_character(D):
    theta = branch_character(DirichletCharacter.kronecker(D), P)
    elem = stickelberger_element(theta, P, 2, k=6)
    # theta omega^{-1} is chi_D itself, so the value is -(1 - chi_D(p)) B_{1, chi_D}.
    expected = -(1 - kronecker(D, P)) * bernoulli_b1_quadratic(D)
    assert elem.augmentation() == PadicNumber.of(expected, P, 6)


@pytest.mark.parametrize("D", [-3, -7])
def test_lambda_is_stable_under_raising_the_level(D):
    psi = DirichletCharacter.kronecker(D)
    assert classical_lambda(psi, P, level=2).lam == classical_lambda(psi, P, level=3).lam


def test_branch_requires_even_character_and_unramified_psi():
    with pytest.raises(HypothesisError):
        stickelberger_element(DirichletCharacter.kronecker(-4), P, 1)
    with pytest.raises(HypothesisError):
        classical_lambda(DirichletCharacter.kronecker(-15), P)


def test_nonprimitive_product_empty_is_identity():
    psi = DirichletCharacter.kronecker(-7)
    G = stickelberger_element(branch_character(psi, P), P, 2, k=4)
    assert nonprimitive_product(G, (), psi, "C") == G
    with pytest.raises(InputError):
        nonprimitive_product(G, (5,), psi, "C")


def test_c_side_euler_factor_values():
    psi = DirichletCharacter.kronecker(-7)
    one = GroupRingElement.from_terms([(0, 1)], P, 6, 1)
    factor = nonprimitive_product(one, (2,), psi, "C")
    e = f_ell(2, P, 2).residue % P
    c = psi.conj().padic_value(2, P, 6)
    for j in range(P):
        # rho(gamma) = zeta^j; rho(gamma_2) = zeta^(j e); value = 1 - psi^{-1}(2) zeta^(j e).
        vals = [0] * P
        for i, coeff in enumerate(factor.coeffs):
            vals[(i * j) % P] += coeff
        target = [0] * P
        target[0] += 1
        target[(j * e) % P] -= c.residue
        assert [v % P**6 for v in vals] == [t % P**6 for t in target]


def test_lambda_additivity_under_nonprimitive_product():
    psi = DirichletCharacter.kronecker(-7)
    sigma0 = (2, 3, 7, 11)
    C, D, G = eisenstein_element(psi, P, 2, sigma0, k=4)
    assert G.invariants().lam == C.invariants().lam + D.invariants().lam
    base = stickelberger_element(branch_character(psi, P), P, 2, k=4)
    C_only = nonprimitive_product(base, sigma0, psi, "C")
    extra = sum(nonprimitive_product(GroupRingElement.from_terms([(0, 1)], P, 4, 2), (ell,), psi, "C").invariants().lam for ell in sigma0)
    assert C_only.invariants().lam == base.invariants().lam + extra


@pytest.mark.parametrize("D", [-3, -7, -8, -11])
def test_d_side_carries_the_factor_one_half(D):
    psi = DirichletCharacter.kronecker(D)
    C, Dside, _ = eisenstein_element(psi, P, 2, (), k=6)
    full = -(1 - kronecker(D, P)) * bernoulli_b1_quadratic(D)
    assert C.augmentation() == PadicNumber.of(full, P, 6)
    assert Dside.augmentation() == PadicNumber.of(full / 2, P, 6)
