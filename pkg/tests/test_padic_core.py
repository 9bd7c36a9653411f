from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iwlambda.errors import InputError
from iwlambda.padic_core import (
    IndeterminateValuation,
    PadicNumber,
    Precision,
    gamma_exponent,
    hensel_unit_root,
    one_unit_part,
    plog,
    primitive_root,
    teichmuller,
    valuation,
)

odd_primes = st.sampled_from([3, 5, 7, 11, 13])


def test_valuation_examples():
    assert valuation(7**4 - 1, 5) == 2
    assert valuation(1, 5) == 0
    assert valuation(2**4 - 1, 5) == 1
    assert valuation(Fraction(3, 25), 5) == -2


def test_valuation_of_zero_raises():
    with pytest.raises(InputError, match="valuation of zero"):
        valuation(0, 5)


def test_valuation_indeterminate_for_vanishing_residue():
    v = valuation(PadicNumber(5, 3, 125), 5)
    assert isinstance(v, IndeterminateValuation)
    assert v.lower_bound == 3
    assert valuation(PadicNumber(5, 3, 50), 5) == 2


def test_teichmuller_examples():
    assert teichmuller(2, 5, 2).residue == 7
    assert teichmuller(1, 5, 4) == 1
    assert teichmuller(7, 5, 2).residue == 7
    with pytest.raises(InputError):
        teichmuller(10, 5, 3)


@given(p=odd_primes, a=st.integers(1, 10**6), k=st.integers(1, 8))
def test_teichmuller_is_root_of_unity(p, a, k):
    if a % p == 0:
        a += 1
    w = teichmuller(a, p, k)
    assert w ** (p - 1) == 1
    assert (w.residue - a) % p == 0


def test_plog_examples():
    assert plog(1, k=6, p=5) == 0
    assert valuation(plog(6, k=6, p=5), 5) == 1
    with pytest.raises(InputError, match="log domain"):
        plog(2, k=4, p=5)


@settings(max_examples=60)
@given(p=odd_primes, t=st.integers(0, 10**8), k=st.integers(2, 10))
def test_plog_is_a_homomorphism(p, t, k):
    u = PadicNumber(p, k, 1 + p * t)
    assert plog(u * u) == 2 * plog(u)
    v = PadicNumber(p, k, 1 + p * (t // 7 + 3))
    assert plog(u * v) == plog(u) + plog(v)


def test_plog_matches_rational_series():
    # log(1 + 5) summed in exact rationals, then reduced mod 5^6.
    p, k = 5, 6
    x = Fraction(5)
    total = sum(((-1) ** (i + 1) * x**i / i for i in range(1, 60)), Fraction(0))
    expected = PadicNumber.of(total, p, k)
    assert plog(1 + p, k=k, p=p) == expected


def test_gamma_exponent_recovers_power():
    p, k = 5, 8
    for s in (0, 1, 7, 123):
        u = PadicNumber(p, k, pow(1 + p, s, p**k))
        assert gamma_exponent(u) == s


def test_hensel_unit_root_examples():
    assert hensel_unit_root(2, 5, 1).residue == 2
    assert hensel_unit_root(2, 5, 2).residue == 12
    assert hensel_unit_root(1, 11, 5, multiplicative=True) == 1
    with pytest.raises(InputError, match="not ordinary"):
        hensel_unit_root(5, 5, 3)


@given(p=odd_primes, a=st.integers(-40, 40), k=st.integers(1, 12))
def test_hensel_root_solves_frobenius(p, a, k):
    if a % p == 0:
        a += 1
    alpha = hensel_unit_root(a, p, k)
    assert alpha.is_unit()
    assert alpha * alpha - alpha * a + p == 0


def test_precision_mixing_never_reports_extra_digits():
    x = PadicNumber(5, 2, 7)
    y = PadicNumber(5, 6, 3)
    assert (x + y).k == 2
    assert (x * y).k == 2
    assert PadicNumber(5, 3, 50).div_p().k == 2


def test_padic_rejects_bad_input():
    with pytest.raises(InputError):
        PadicNumber.of(Fraction(1, 5), 5, 3)
    with pytest.raises(InputError):
        PadicNumber(5, 2, 5).inverse()
    with pytest.raises(InputError):
        Precision(0, 3)


def test_one_unit_part_and_primitive_root():
    assert primitive_root(5) == 2
    assert primitive_root(7) == 3
    u = one_unit_part(7, 5, 6)
    assert (u.residue - 1) % 5 == 0
    assert u * teichmuller(7, 5, 6) == 7
