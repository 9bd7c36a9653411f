from __future__ import annotations

import cmath
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from iwlambda.characters import (
    Cyclotomic,
    DirichletCharacter,
    fundamental_discriminant,
    gauss_sum,
    is_fundamental_discriminant,
)
from iwlambda.errors import InputError

from oracles import kronecker

discriminants = st.sampled_from([-3, -4, -7, -8, -11, -15, -20, -23, 5, 8, 12, 13, 21, -52, -56, 24])


@given(discriminants, st.integers(1, 500))
def test_kronecker_values_match_reciprocity_oracle(D, a):
    assert DirichletCharacter.kronecker(D).real_value(a) == kronecker(D, a)


def test_fundamental_discriminants():
    assert is_fundamental_discriminant(-4)
    assert not is_fundamental_discriminant(-16)
    assert fundamental_discriminant(-1) == -4
    assert fundamental_discriminant(-7) == -7
    assert fundamental_discriminant(-2) == -8
    with pytest.raises(InputError):
        DirichletCharacter.kronecker(-16)


def test_parse_and_parity():
    chi = DirichletCharacter.parse("kronecker:-4")
    assert chi.conductor == 4 and chi.parity == -1
    assert not chi.is_even()
    w = DirichletCharacter.parse("teichmuller^2:5")
    assert w.is_even() and w.order == 2
    prod = DirichletCharacter.parse("kronecker:-3*teichmuller:5")
    assert prod.modulus == 15
    assert prod.is_even()
    with pytest.raises(InputError):
        DirichletCharacter.parse("legendre:7")


def test_teichmuller_times_inverse_is_trivial():
    w = DirichletCharacter.teichmuller(5, 1)
    assert (w * w.conj()).is_trivial()
    assert (w**4).is_trivial()


@given(st.sampled_from([-3, -4, -7, -8, 5, 8, 13]))
def test_quadratic_gauss_sum_squares_to_sign_times_conductor(D):
    tau = gauss_sum(DirichletCharacter.kronecker(D))
    assert (tau * tau) == Cyclotomic.scalar(tau.m, D)


def test_gauss_sum_of_teichmuller_has_absolute_value_sqrt_p():
    tau = gauss_sum(DirichletCharacter.teichmuller(5, 1))
    assert abs(abs(tau.to_complex()) - 5**0.5) < 1e-9


def test_cyclotomic_arithmetic():
    z = Cyclotomic.zeta_power(5, 1)
    one = Cyclotomic.scalar(5, 1)
    total = Cyclotomic.zero(5)
    for e in range(5):
        total = total + Cyclotomic.zeta_power(5, e)
    assert total.is_zero()
    assert z.galois(2) == Cyclotomic.zeta_power(5, 2)
    assert (z * z.conjugate()) == one
    assert abs(z.to_complex() - cmath.exp(2j * cmath.pi / 5)) < 1e-12
    assert Cyclotomic.scalar(5, Fraction(1, 2), 25).coeffs[0] == 13


@given(st.integers(1, 4), st.integers(0, 24))
def test_character_values_multiply(j, a):
    chi = DirichletCharacter.teichmuller(5, j)
    b = 7
    if a % 5 == 0:
        a += 1
    lhs = chi.angle(a * b % 5)
    rhs = (chi.angle(a) + chi.angle(b)) % 1
    assert lhs == rhs
