"""Independent checks of a certificate: replay plus value agreement on a corpus."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import List, Optional

from seriesval.certificate import (
    BudgetExhausted,
    Certificate,
    Monomial2,
    OutcomeA,
    OutcomeB,
    Rank2Monomial,
    ReplayError,
    replay,
)
from seriesval.field import FieldTower
from seriesval.series import INCONCLUSIVE, TruncSeries, format_series


def random_polynomial(rng: random.Random, n: int, tower: FieldTower, max_degree: int = 8,
                      max_terms: int = 4, max_coeff: int = 5) -> TruncSeries:
    """Nonzero polynomial without constant term, small integer coefficients."""
    while True:
        terms = {}
        for _ in range(rng.randint(1, max_terms)):
            deg = rng.randint(1, max_degree)
            e = [0] * n
            for _ in range(deg):
                e[rng.randrange(n)] += 1
            c = rng.randint(-max_coeff, max_coeff)
            if c:
                terms[tuple(e)] = c
        f = TruncSeries(n, terms, None, tower)
        if not f.is_zero():
            return f


def corpus(n: int, size: int, seed: int, tower: FieldTower, max_degree: int = 8) -> List[TruncSeries]:
    rng = random.Random(seed)
    return [random_polynomial(rng, n, tower, max_degree) for _ in range(size)]


@dataclass
class Mismatch:
    polynomial: str
    certificate_value: object
    direct_value: object
    horizon: Optional[int] = None


@dataclass
class VerifyResult:
    replay_ok: bool
    replay_message: str
    checked: int = 0
    skipped: int = 0
    mismatches: List[Mismatch] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.replay_ok and not self.mismatches and not self.errors

    @property
    def witness(self) -> Optional[Mismatch]:
        return self.mismatches[0] if self.mismatches else None


def _coords_match(final, recorded) -> bool:
    return list(final[: len(recorded)]) == list(recorded)


def _replay(cert: Certificate) -> tuple[bool, str]:
    try:
        final = replay(cert)
    except (ReplayError, ArithmeticError, ValueError) as exc:
        return False, str(exc)
    recorded = cert.outcome.coords
    if not _coords_match(final, recorded):
        return False, "replayed coordinates differ from the recorded ones"
    problem = _outcome_problem(cert.outcome)
    if problem:
        return False, problem
    return True, f"{len(cert.steps)} steps replayed, final coordinates reproduced"


def _outcome_problem(out) -> Optional[str]:
    """Recorded summary data that disagrees with the recorded coordinates."""
    if isinstance(out, (Monomial2, OutcomeA, OutcomeB)):
        z1, z2 = out.coords[0], out.coords[1]
        orders = [z.order() for z in out.coords]
        if any(o != out.common_order for o in orders):
            return f"recorded common order {out.common_order} but coordinate orders are {orders}"
        if z2.leading_coeff() / z1.leading_coeff() != out.residue:
            return f"recorded residue {out.residue} differs from the leading coefficient ratio"
    elif isinstance(out, Rank2Monomial):
        from seriesval.rank2 import vhat
        values = tuple(vhat(z) for z in out.coords)
        if values != tuple(tuple(v) for v in out.values):
            return "recorded values differ from the values of the coordinates"
        (a, b), (c, d) = out.values
        if a * d - b * c != out.det:
            return "recorded determinant is wrong"
    return None


def verify_certificate(cert: Certificate, size: int = 100, seed: int = 0, max_degree: int = 8) -> VerifyResult:
    ok, msg = _replay(cert)
    result = VerifyResult(ok, msg)
    if isinstance(cert.outcome, BudgetExhausted):
        return result
    polys = corpus(cert.n, size, seed, cert.tower, max_degree)
    if cert.rank == 1:
        _check_rank1(cert, polys, result)
    else:
        _check_rank2(cert, polys, result)
    return result


def _check_rank1(cert, polys, result):
    from seriesval.rank1 import CertificateError, CertifiedValuer, ParamValuation, clip, value_of
    P = ParamValuation(cert.images)
    try:
        valuer = CertifiedValuer(cert, P)
    except (CertificateError, ValueError, ArithmeticError) as exc:
        result.errors.append(f"certificate valuation unavailable: {exc}")
        f = polys[0]
        result.mismatches.append(Mismatch(format_series(f), None, value_of(P, f)))
        return
    for f in polys:
        try:
            v, h = valuer.value(f)
        except (CertificateError, ValueError, ArithmeticError) as exc:
            result.errors.append(str(exc))
            result.mismatches.append(Mismatch(format_series(f), None, value_of(P, f)))
            return
        w = value_of(P, f)
        cv, dv = clip(v, h), clip(w, h)
        result.checked += 1
        if cv != dv:
            result.mismatches.append(Mismatch(format_series(f), _show(v), _show(w), h))


def _check_rank2(cert, polys, result):
    from seriesval.rank2 import certificate_value2, substitute2, vhat
    for f in polys:
        direct = vhat(substitute2(f, cert.images))
        if direct is INCONCLUSIVE:
            result.skipped += 1
            continue
        try:
            v = certificate_value2(cert, f)
        except (ValueError, ArithmeticError) as exc:
            result.errors.append(str(exc))
            result.mismatches.append(Mismatch(format_series(f), None, _show(direct)))
            return
        result.checked += 1
        if v != direct:
            result.mismatches.append(Mismatch(format_series(f), _show(v), _show(direct)))


def _show(v):
    if v is INCONCLUSIVE:
        return "inconclusive"
    if isinstance(v, tuple):
        return list(v)
    if isinstance(v, (int,)):
        return v
    return str(v)
