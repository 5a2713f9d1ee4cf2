import dataclasses

import pytest

from seriesval.certificate import (
    LaurentPoly,
    ReplayError,
    TransformStep,
    apply_step,
    original_in_final,
    replay,
)
from seriesval.rank1 import ParamValuation, monomialize2
from seriesval.series import ParamSeries, TruncSeries, substitute
from seriesval.verify import verify_certificate


@pytest.fixture
def cert(Qu):
    u = Qu.gen("u")
    P = ParamValuation([ParamSeries.from_dict({1: 1}, 12, Qu), ParamSeries.from_dict({1: 1, 2: u}, 12, Qu)])
    return monomialize2(P)


def test_laurent_poly_arithmetic(Q):
    x, y = LaurentPoly.variable(0, 2, Q), LaurentPoly.variable(1, 2, Q)
    m = LaurentPoly.monomial((1, -1), Q)
    assert (m * y) == x
    assert (m ** -2).to_str(["a", "b"]) == "a^(-2)*b^2"
    assert ((x + y) ** 2).to_str(["a", "b"]) == "a^2 + 2*a*b + b^2"
    with pytest.raises(ValueError):
        (x + y) ** -1


def test_replay_reproduces_coordinates(cert):
    assert replay(cert) == list(cert.outcome.coords)


def test_original_in_final_substitutes_back(cert):
    exprs = original_in_final(cert)
    z = cert.outcome.coords
    for e, x in zip(exprs, cert.images):
        f = TruncSeries(2, e.terms, None, cert.tower)
        assert substitute(f, list(z)).agrees_with(x)


def test_blowup_matrix_shape(Q):
    step = TransformStep.blowup(2, 0, 1, "blow-up")
    assert step.matrix == ((1, 0), (-1, 1))


def test_tampered_matrix_fails_replay(cert):
    steps = [dataclasses.replace(s, matrix=tuple(tuple(-x for x in r) for r in s.matrix))
             if s.kind == "blowup" else s for s in cert.steps]
    bad = dataclasses.replace(cert, steps=steps)
    with pytest.raises(ReplayError):
        replay(bad)
    res = verify_certificate(bad, 100, 42)
    assert not res.passed
    assert res.witness is not None


def test_apply_step_rejects_non_unimodular(Q):
    coords = [ParamSeries.from_dict({1: 1}, 6, Q), ParamSeries.from_dict({2: 1}, 6, Q)]
    step = TransformStep("blowup", "bad", ((2, 0), (0, 1)), divisor=0, dividend=1)
    with pytest.raises(ReplayError):
        apply_step(coords, step)


def test_verify_passes(cert):
    res = verify_certificate(cert, 100, 42)
    assert res.passed
    assert res.checked == 100
    assert res.witness is None


def test_verify_empty_steps(Qu):
    u = Qu.gen("u")
    P = ParamValuation([ParamSeries.from_dict({1: 1}, 8, Qu), ParamSeries.from_dict({1: u}, 8, Qu)])
    cert = monomialize2(P)
    assert cert.steps == []
    assert verify_certificate(cert, 100, 42).passed


def test_verify_detects_wrong_residue(cert, Qu):
    out = dataclasses.replace(cert.outcome, residue=Qu.gen("u") + 1)
    res = verify_certificate(dataclasses.replace(cert, outcome=out), 100, 42)
    assert not res.passed
