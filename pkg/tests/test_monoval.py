import random

import pytest

from seriesval.monoval import (
    INFINITY,
    MonomialValuation,
    UncertifiedValue,
    ValueMismatch,
    initial_form,
    l_degree,
    residue_generators,
    residue_of,
    v_L,
)
from seriesval.series import TruncSeries
from tests.oracles import brute_force_vL, exponents_upto

ID2 = [[1, 0], [0, 1]]


def S(terms, trunc=None, n=2):
    return TruncSeries(n, terms, trunc)


def test_l_degree_examples():
    assert l_degree(MonomialValuation([[1, 1]]), (2, 3)) == (5,)
    assert l_degree(MonomialValuation(ID2), (4, 7)) == (4, 7)
    assert l_degree(MonomialValuation([[2, 3]]), (3, 0)) == (6,)
    with pytest.raises(ValueError):
        l_degree(MonomialValuation([[1, 1]]), (-1, 0))


def test_v_L_examples():
    cv = v_L(MonomialValuation([[1, 1]]), S({(1, 0): 1, (0, 2): 1}, 4))
    assert (cv.value, cv.certified) == ((1,), True)
    cv = v_L(MonomialValuation([[2, 3]]), S({(3, 0): 1, (0, 2): 1}, 6))
    assert (cv.value, cv.certified) == ((6,), True)
    cv = v_L(MonomialValuation(ID2), S({(0, 1): 1}, 1))
    assert (cv.value, cv.certified) == ((0, 1), True)


def test_v_L_uncertified():
    # an omitted X1^2 would have value 2 < 3
    cv = v_L(MonomialValuation([[1, 3]]), S({(0, 1): 1}, 1))
    assert cv.value == (3,) and not cv.certified


def test_v_L_zero_series():
    assert v_L(MonomialValuation([[1, 1]]), S({})).value is INFINITY
    assert not v_L(MonomialValuation([[1, 1]]), S({}, 3)).certified


def test_invalid_value_matrices():
    with pytest.raises(ValueError):
        MonomialValuation([[2, 4]])
    with pytest.raises(ValueError):
        MonomialValuation([[1, 0]])
    with pytest.raises(ValueError):
        MonomialValuation([[1, -1]])


def test_initial_form_examples():
    V = MonomialValuation([[1, 1]])
    assert initial_form(V, S({(1, 0): 2, (0, 1): 3, (1, 1): 1})) == S({(1, 0): 2, (0, 1): 3})
    V = MonomialValuation([[2, 3]])
    assert initial_form(V, S({(3, 0): 1, (0, 2): 1, (4, 0): 1})) == S({(3, 0): 1, (0, 2): 1})
    V = MonomialValuation(ID2)
    assert initial_form(V, S({(0, 1): 1, (1, 1): 1})) == S({(0, 1): 1})


def test_initial_form_needs_certificate():
    with pytest.raises(UncertifiedValue):
        initial_form(MonomialValuation([[1, 3]]), S({(0, 1): 1}, 1))


def test_residue_generators_examples():
    assert residue_generators(MonomialValuation([[1, 1]])) == [(1, -1)]
    assert residue_generators(MonomialValuation([[2, 3]])) == [(3, -2)]
    assert residue_generators(MonomialValuation(ID2)) == []


def test_residue_of_examples():
    V = MonomialValuation([[1, 1]])
    assert str(residue_of(V, S({(0, 1): 1}), S({(1, 0): 1}))) == "1/w1"
    f = S({(2, 0): 1, (1, 1): 1})
    assert residue_of(V, f, f).is_one()
    assert str(residue_of(V, f, S({(2, 0): 1}))) == "(1 + w1)/w1"


def test_residue_of_errors():
    V = MonomialValuation([[1, 1]])
    with pytest.raises(ValueMismatch):
        residue_of(V, S({(2, 0): 1}), S({(1, 0): 1}))
    with pytest.raises(UncertifiedValue):
        residue_of(MonomialValuation([[1, 3]]), S({(0, 1): 1}, 1), S({(0, 1): 1}))


def _random_B(rng, n):
    while True:
        m = rng.randint(1, min(2, n))
        B = [[rng.randint(0, 3) for _ in range(n)] for _ in range(m)]
        try:
            return MonomialValuation(B)
        except ValueError:
            continue


def _random_poly(rng, n, degree=6):
    return TruncSeries(n, {tuple(rng.choice(exponents_upto(n, degree))): rng.randint(1, 4)
                           for _ in range(rng.randint(1, 4))})


def test_valuation_axioms_sample():
    rng = random.Random(21)
    for _ in range(200):
        n = rng.randint(1, 3)
        V = _random_B(rng, n)
        f, g = _random_poly(rng, n), _random_poly(rng, n)
        vf, vg = V.value(f).value, V.value(g).value
        assert V.value(f * g).value == tuple(a + b for a, b in zip(vf, vg))
        s = V.value(f + g).value
        assert s is INFINITY or s >= min(vf, vg)
        if vf != vg:
            assert s == min(vf, vg)


def test_brute_force_oracle_small():
    V = MonomialValuation([[1, 2, 1]])
    f = S({(0, 1, 0): 1, (0, 0, 3): 1, (2, 0, 0): 1}, n=3)
    assert V.value(f).value == brute_force_vL(V.B, f.terms) == (2,)


def test_generators_have_value_zero():
    for B in ([[1, 1]], [[2, 3]], [[1, 2, 1]], [[1, 0, 2], [0, 1, 1]]):
        V = MonomialValuation(B)
        for g in residue_generators(V):
            assert V._degree(g) == (0,) * V.m
