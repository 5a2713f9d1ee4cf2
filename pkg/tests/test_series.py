import random

import pytest

from seriesval.series import (
    INCONCLUSIVE,
    NotASeries,
    ParamSeries,
    TruncSeries,
    apply_monomial_transform,
    format_param,
    series_arith,
    substitute,
    t_order,
)

BLOWUP = [[1, 0], [-1, 1]]


def X(i, n=2, trunc=None, tower=None):
    kw = {"tower": tower} if tower else {}
    return TruncSeries.variable(i, n, trunc=trunc, **kw)


def P(terms, T, tower):
    return ParamSeries.from_dict(terms, T, tower)


def test_product_of_variables():
    assert series_arith(X(0), X(1), "mul") == TruncSeries(2, {(1, 1): 1})


def test_truncated_product():
    one = TruncSeries.constant(1, 2, trunc=3)
    a, b = one + X(0), one - X(0)
    out = series_arith(a, b, "mul")
    assert out == TruncSeries(2, {(0, 0): 1, (2, 0): -1}, 3)
    assert out.trunc == 3


def test_square_of_sum():
    s = X(0, trunc=2) + X(1, trunc=2)
    assert s * s == TruncSeries(2, {(2, 0): 1, (1, 1): 2, (0, 2): 1}, 2)


def test_truncation_is_minimum():
    a = TruncSeries(2, {(1, 0): 1}, 5)
    b = TruncSeries(2, {(0, 1): 1}, 3)
    assert (a + b).trunc == 3


def test_arity_mismatch():
    with pytest.raises(ValueError):
        X(0, 2) + X(0, 3)


def test_substitute_examples(Qu):
    u = Qu.gen("u")
    z1, z2 = P({1: 1}, 8, Qu), P({1: u}, 8, Qu)
    assert substitute(TruncSeries(2, {(1, 1): 1}, tower=Qu), [z1, z2]) == P({2: u}, 8, Qu)
    z2b = P({1: 1, 2: u}, 8, Qu)
    f = TruncSeries(2, {(0, 1): 1, (1, 0): -1}, tower=Qu)
    assert substitute(f, [z1, z2b]) == P({2: u}, 8, Qu)


def test_substitute_cusp_vanishes(Q):
    f = TruncSeries(2, {(3, 0): 1, (0, 2): -1})
    out = substitute(f, [P({2: 1}, 12, Q), P({3: 1}, 12, Q)])
    assert t_order(out) is INCONCLUSIVE
    assert out.trunc == 12


def test_substitute_zero_image(Q):
    f = TruncSeries(2, {(1, 0): 1, (0, 1): 1})
    out = substitute(f, [P({1: 1}, 5, Q), ParamSeries.zero(5)])
    assert out == P({1: 1}, 5, Q)


def test_t_order():
    assert t_order(ParamSeries([1, 1], 4)) == 1
    assert t_order(ParamSeries([0, 0, 5], 4)) == 3
    assert t_order(ParamSeries.zero(8)) is INCONCLUSIVE


def test_format_param(Qu):
    s = P({1: 1, 2: Qu.gen("u")}, 8, Qu)
    assert format_param(s) == "t + u*t^2 + O(9)"


def test_monomial_transform_examples():
    f = TruncSeries(2, {(1, 1): 3})
    assert apply_monomial_transform([[1, 0], [0, 1]], f) == f
    assert apply_monomial_transform(BLOWUP, f) == TruncSeries(2, {(0, 1): 3})
    with pytest.raises(NotASeries):
        apply_monomial_transform(BLOWUP, TruncSeries(2, {(0, 1): 1}))


def test_monomial_transform_composition():
    rng = random.Random(3)
    M1, M2 = [[1, 0], [1, 1]], [[1, 1], [0, 1]]
    M12 = [[sum(M1[i][k] * M2[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    for _ in range(30):
        f = TruncSeries(2, {(rng.randint(0, 4), rng.randint(0, 4)): rng.randint(1, 5) for _ in range(3)})
        # X^A -> X^(A M): applying M2 after M1 is A M1 M2
        assert apply_monomial_transform(M12, f) == apply_monomial_transform(M2, apply_monomial_transform(M1, f))


def _rand_param(rng, T, tower):
    low = rng.randint(1, 3)
    return P({k: rng.randint(-3, 3) or 1 for k in range(low, T + 1) if k == low or rng.random() < 0.5},
             T, tower)


def _rand_poly(rng, n=2):
    return TruncSeries(n, {(rng.randint(0, 3), rng.randint(1, 3)): rng.randint(-3, 3) for _ in range(3)})


def test_substitution_is_a_ring_homomorphism(Q):
    rng = random.Random(11)
    for _ in range(40):
        ims = [_rand_param(rng, 10, Q), _rand_param(rng, 10, Q)]
        f, g = _rand_poly(rng), _rand_poly(rng)
        sf, sg = substitute(f, ims), substitute(g, ims)
        prod = substitute(f * g, ims)
        assert (sf * sg).agrees_with(prod)
        assert (sf + sg).agrees_with(substitute(f + g, ims))


def test_order_is_additive(Q):
    rng = random.Random(5)
    for _ in range(50):
        a, b = _rand_param(rng, 12, Q), _rand_param(rng, 12, Q)
        oa, ob, oab = t_order(a), t_order(b), t_order(a * b)
        if oa is not INCONCLUSIVE and ob is not INCONCLUSIVE and oa + ob <= (a * b).trunc:
            assert oab == oa + ob


def test_parameter_series_rejects_constant_term():
    with pytest.raises(ValueError):
        ParamSeries.from_dict({0: 1}, 4)
