from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iwlambda.elliptic import (
    ADDITIVE,
    GOOD,
    NONSPLIT,
    SPLIT,
    CurveQ,
    catalog_dump,
    classify_reduction,
    count_points,
    is_anomalous,
    is_ordinary,
    load_catalog,
    minimal_model,
    primes_up_to,
    quadratic_twist,
    trace,
)
from iwlambda.errors import InputError

from oracles import ap_brute, kronecker

E1 = CurveQ.from_ainvs([0, 0, 0, 1, -10], conductor=52)
E2 = CurveQ.from_ainvs([0, 0, 0, -584, 5444], conductor=364)
X11 = CurveQ.from_ainvs([0, -1, 1, -10, -20], conductor=11)

CURVES = [E1, E2, X11, CurveQ.from_ainvs([0, 0, 1, -1, 0]), CurveQ.from_ainvs([1, 1, 1, -10, -10])]


def test_reduction_types_of_the_worked_pair():
    assert classify_reduction(E1, 2).reduction_type == ADDITIVE
    loc = classify_reduction(E1, 13)
    assert (loc.reduction_type, loc.a, loc.euler_poly) == (NONSPLIT, -1, (1, 1))
    loc = classify_reduction(minimal_model(E2), 7)
    assert (loc.reduction_type, loc.a, loc.euler_poly) == (SPLIT, 1, (1, -1))
    loc = classify_reduction(E1, 7)
    assert (loc.reduction_type, loc.euler_poly) == (GOOD, (1, 2, 7))


def test_traces_of_e1():
    assert count_points(E1, 5) == 2
    assert count_points(E1, 7) == -2
    assert count_points(CurveQ.from_ainvs([0, 0, 0, 1, 0]), 3) == 0
    with pytest.raises(InputError):
        count_points(E1, 13)


def test_ordinary_and_anomalous():
    ok, alpha = is_ordinary(E1, 5)
    assert ok and alpha.residue % 5 == 2
    assert not is_anomalous(E1, 5)
    ok, _ = is_ordinary(CurveQ.from_ainvs([0, 0, 0, 1, 0]), 3)
    assert not ok
    assert is_anomalous(X11, 5)


@pytest.mark.parametrize("E", CURVES, ids=lambda E: str(E.ainvs))
def test_traces_match_brute_force_oracle(E):
    Em = minimal_model(E)
    for ell in primes_up_to(60):
        assert trace(Em, ell) == ap_brute(Em.ainvs, ell)


@settings(max_examples=40, deadline=None)
@given(st.integers(-30, 30), st.integers(-30, 30), st.sampled_from(primes_up_to(400)))
def test_hasse_bound(a4, a6, ell):
    if 4 * a4**3 + 27 * a6**2 == 0:
        return
    E = CurveQ.from_ainvs([a4, a6])
    if E.discriminant % ell == 0:
        return
    a = count_points(E, ell)
    assert a * a <= 4 * ell


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([-1, -2, -3, -7, 5, 13, -11]), st.sampled_from(primes_up_to(200)[3:]))
def test_twist_traces_flip_by_the_character(d, ell):
    J = quadratic_twist(X11, d)
    if (11 * d) % ell == 0 or J.discriminant % ell == 0:
        return
    D = d if d % 4 == 1 else 4 * d
    assert count_points(J, ell) == kronecker(D, ell) * count_points(X11, ell)


def test_trivial_twist_is_the_same_curve():
    assert minimal_model(quadratic_twist(E1, 1)) == minimal_model(E1)


def test_minimal_model_reduces_a_scaled_model():
    # Scaling x -> u^2 x, y -> u^3 y with u = 2 multiplies a4 by 16 and a6 by 64.
    big = CurveQ.from_ainvs([0, 0, 0, 16, -640])
    assert minimal_model(big) == E1


def test_catalog_round_trip(tmp_path):
    cat = load_catalog()
    assert cat["52a1"] == E1 and cat["E2"].conductor == 364
    path = tmp_path / "curves.tsv"
    path.write_text(catalog_dump(cat))
    again = load_catalog(str(path))
    assert {k: (v.ainvs, v.conductor) for k, v in again.items()} == {k: (v.ainvs, v.conductor) for k, v in cat.items()}


def test_parse_errors():
    with pytest.raises(InputError):
        CurveQ.parse("nosuchcurve")
    with pytest.raises(InputError):
        CurveQ.from_ainvs([0, 0, 0, 0, 0])
    with pytest.raises(InputError):
        CurveQ.parse("1,2,x")
    assert CurveQ.parse("0,0,0,1,-10") == E1
