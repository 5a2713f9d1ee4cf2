import random

import pytest

from seriesval.certificate import BudgetExhausted, Monomial2, OutcomeA, OutcomeB, replay
from seriesval.lattice import euclid_schedule
from seriesval.rank1 import (
    CertifiedValuer,
    FormallyDependent,
    ParamValuation,
    check_formal_independence,
    classify3,
    clip,
    monomialize2,
    reduce_min_value,
    value_of,
)
from seriesval.series import INCONCLUSIVE, ParamSeries, TruncSeries, format_series, substitute
from seriesval.verify import corpus
from tests.oracles import binary_gcd


def P(*images):
    return ParamValuation(images)


def ps(terms, T, tower):
    return ParamSeries.from_dict(terms, T, tower)


def mono(n, *exp, tower=None):
    return TruncSeries(n, {tuple(exp): 1}, None, tower) if tower else TruncSeries(n, {tuple(exp): 1})


def test_value_of_examples(Qu, Quu):
    u = Qu.gen("u")
    assert value_of(P(ps({1: 1}, 8, Qu), ps({1: u}, 8, Qu)), TruncSeries(2, {(1, 1): 1}, tower=Qu)) == 2
    pv = P(ps({1: 1}, 8, Qu), ps({1: 1, 2: u}, 8, Qu))
    assert value_of(pv, TruncSeries(2, {(0, 1): 1, (1, 0): -1}, tower=Qu)) == 2
    a, b = Quu.gen("u"), Quu.gen("u'")
    pv = P(ps({1: 1}, 8, Quu), ps({1: a}, 8, Quu), ps({1: b}, 8, Quu))
    assert value_of(pv, TruncSeries(3, {(0, 0, 1): 1}, tower=Quu)) == 1


def test_value_of_inconclusive(Q):
    pv = P(ps({2: 1}, 12, Q), ps({3: 1}, 12, Q))
    assert value_of(pv, TruncSeries(2, {(3, 0): 1, (0, 2): -1})) is INCONCLUSIVE


def test_images_need_visible_order(Q):
    with pytest.raises(ValueError):
        P(ParamSeries.zero(5), ps({1: 1}, 5, Q))


def _orders(coords):
    return [z.order() for z in coords]


@pytest.mark.parametrize("orders, expected", [((6, 4), [2, 2]), ((1, 1), [1, 1]), ((2, 3, 1), [1, 1, 1])])
def test_reduce_min_value_examples(Qu, orders, expected):
    u = Qu.gen("u")
    coords = [ps({o: u + k, o + 1: 1}, 16, Qu) for k, o in enumerate(orders)]
    out, steps = reduce_min_value(coords)
    assert _orders(out) == expected
    if len(orders) == 2:
        assert len(steps) == euclid_schedule(*orders).total_blowups
    if orders == (1, 1):
        assert steps == []


def test_reduce_min_value_schedule_sweep(Q):
    for d1 in range(1, 13):
        for d2 in range(1, 13):
            T = d1 + d2 + 2
            out, steps = reduce_min_value([ps({d1: 1}, T, Q), ps({d2: 1, d2 + 1: 1}, T, Q)])
            g = binary_gcd(d1, d2)
            assert _orders(out) == [g, g]
            assert len(steps) == euclid_schedule(d1, d2).total_blowups


def test_reduce_min_value_budget(Q):
    with pytest.raises(RuntimeError):
        reduce_min_value([ps({1: 1}, 30, Q), ps({20: 1}, 30, Q)], budget=3)


def test_monomialize2_already_monomial(Qu):
    u = Qu.gen("u")
    cert = monomialize2(P(ps({1: 1}, 8, Qu), ps({1: u}, 8, Qu)))
    assert cert.steps == []
    assert isinstance(cert.outcome, Monomial2)
    assert cert.outcome.residue == u


def test_monomialize2_change_then_blowup(Qu):
    u = Qu.gen("u")
    pv = P(ps({1: 1}, 12, Qu), ps({1: 1, 2: u}, 12, Qu))
    cert = monomialize2(pv)
    assert [s.kind for s in cert.steps] == ["coordinate_change", "blowup"]
    assert cert.steps[0].coefficient == 1
    assert cert.outcome.residue == u
    assert cert.outcome.common_order == 1
    assert replay(cert)[:2] == list(cert.outcome.coords)


def test_monomialize2_common_order_two(Qu):
    u = Qu.gen("u")
    cert = monomialize2(P(ps({2: 1}, 12, Qu), ps({2: u, 5: 1}, 12, Qu)))
    assert isinstance(cert.outcome, Monomial2)
    assert cert.outcome.common_order == 2
    assert cert.outcome.residue == u


def test_monomialize2_drop_counter_bounded(Qu):
    u = Qu.gen("u")
    pv = P(ps({2: 1}, 16, Qu), ps({2: 1, 3: 1, 5: u}, 16, Qu))
    cert = monomialize2(pv)
    assert isinstance(cert.outcome, Monomial2)
    assert cert.drops >= 1
    assert cert.drops <= cert.initial_min_order


def test_monomialize2_budget(Qu):
    u = Qu.gen("u")
    cert = monomialize2(P(ps({1: 1}, 12, Qu), ps({1: 1, 2: 1, 3: 1, 4: u}, 12, Qu)), steps=2)
    assert isinstance(cert.outcome, BudgetExhausted)
    assert len(cert.steps) == 2


def test_monomialize2_dependent_images(Q):
    with pytest.raises(FormallyDependent, match="X1\\^3"):
        monomialize2(P(ps({2: 1}, 8, Q), ps({3: 1}, 8, Q)))


def test_formal_independence_examples(Q, Qu):
    rel = check_formal_independence(P(ps({2: 1}, 12, Q), ps({3: 1}, 12, Q)), 3)
    assert format_series(rel) == "-X2^2 + X1^3"
    rel = check_formal_independence(P(ps({1: 1}, 6, Q), ps({1: 1}, 6, Q)), 1)
    assert format_series(rel) == "X1 - X2"
    u = Qu.gen("u")
    assert check_formal_independence(P(ps({1: 1}, 8, Qu), ps({1: u}, 8, Qu)), 4) is None


def test_classify3_outcome_b(Quu):
    u, up = Quu.gen("u"), Quu.gen("u'")
    cert = classify3(P(ps({1: 1}, 8, Quu), ps({1: u}, 8, Quu), ps({1: up}, 8, Quu)))
    out = cert.outcome
    assert isinstance(out, OutcomeB)
    assert out.j0 == 1
    assert out.u3[0] == up and all(c.is_zero() for c in out.u3[1:])
    assert out.residue_field_generators() == [u, up]


def test_classify3_outcome_b_algebraic_first(Qsqrt):
    u, up, y = Qsqrt.gen("u"), Qsqrt.gen("u'"), Qsqrt.gen("y")
    cert = classify3(P(ps({1: 1}, 12, Qsqrt), ps({1: u}, 12, Qsqrt), ps({1: y, 2: up}, 12, Qsqrt)))
    out = cert.outcome
    assert isinstance(out, OutcomeB)
    assert out.u3[:2] == (y, up)
    assert out.j0 == 2


def test_classify3_outcome_a(Qu):
    u = Qu.gen("u")
    cert = classify3(P(ps({1: 1}, 12, Qu), ps({1: u}, 12, Qu), ps({1: 1, 2: u * u}, 12, Qu)))
    out = cert.outcome
    assert isinstance(out, OutcomeA)
    assert [s.kind for s in cert.steps] == ["coordinate_change", "blowup"]
    h3 = out.containment[2]
    assert h3.to_str(["X1", "X2"]) == "X1 + X2^2"


def test_outcome_b_expansion_reproduces_z3(Quu):
    u, up = Quu.gen("u"), Quu.gen("u'")
    pv = P(ps({1: 1}, 10, Quu), ps({1: u, 3: 1}, 10, Quu), ps({1: up, 2: u}, 10, Quu))
    out = classify3(pv).outcome
    assert isinstance(out, OutcomeB)
    z1, z2, z3 = out.coords
    e3 = out.expansions[1]
    rebuilt = ParamSeries.zero(z3.trunc, Quu)
    for j, c in enumerate(e3.coeffs, start=1):
        if not c.is_zero():
            rebuilt = rebuilt + (z1 ** j).scale(c)
    assert rebuilt.truncate(e3.precision).agrees_with(z3.truncate(e3.precision))


def _agree(cert, pv, size=100, seed=42):
    valuer = CertifiedValuer(cert, pv)
    for f in corpus(pv.n, size, seed, pv.tower):
        v, h = valuer.value(f)
        assert clip(v, h) == clip(value_of(pv, f), h), format_series(f)


def test_certified_values_monomial2(Qu):
    u = Qu.gen("u")
    pv = P(ps({1: 1}, 12, Qu), ps({1: 1, 2: u}, 12, Qu))
    _agree(monomialize2(pv), pv)


def test_certified_values_classify3(Qu, Quu):
    u = Qu.gen("u")
    pv = P(ps({1: 1}, 12, Qu), ps({1: u}, 12, Qu), ps({1: 1, 2: u * u}, 12, Qu))
    _agree(classify3(pv), pv)
    a, b = Quu.gen("u"), Quu.gen("u'")
    pv = P(ps({1: 1}, 12, Quu), ps({1: a}, 12, Quu), ps({1: b, 2: 1}, 12, Quu))
    _agree(classify3(pv), pv)


def test_random_monomialize2_certificates(Qu):
    rng = random.Random(9)
    u = Qu.gen("u")
    for _ in range(8):
        d1 = rng.randint(1, 3)
        x1 = ps({d1: 1, d1 + 1: rng.randint(-2, 2)}, 14, Qu)
        d2 = rng.randint(1, 4)
        x2 = ps({d2: rng.randint(1, 3), d2 + 1: 1, d2 + 2: u}, 14, Qu)
        pv = P(x1, x2)
        try:
            cert = monomialize2(pv)
        except FormallyDependent:
            continue
        if cert.exhausted:
            continue
        assert replay(cert)[:2] == list(cert.outcome.coords)
        _agree(cert, pv, size=30, seed=rng.randint(0, 99))
