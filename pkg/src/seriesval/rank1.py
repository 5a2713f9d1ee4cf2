"""Rank-one valuations given by a parametrization ``X_i -> x_i(t)``.

The valuation of ``f`` is the t-order of ``f(x_1(t), ..., x_n(t))``.  The
engines here transform the images by blow-ups (``z_b <- z_b / z_a``) and
coordinate changes (``z_i <- z_i - alpha z^E``) until the valuation is visibly
monomial, recording every step in a :class:`~seriesval.certificate.Certificate`.

Residues are decided in the field tower: a residue counts as constant when it
is algebraic over ``Q`` (all derivations vanish), and as transcendental
otherwise.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement
from typing import List, Optional, Sequence

from seriesval import linalg
from seriesval.certificate import (
    BudgetExhausted,
    Certificate,
    Expansion,
    LaurentPoly,
    Monomial2,
    OutcomeA,
    OutcomeB,
    TransformStep,
    original_in_final,
)
from seriesval.field import FieldElem, is_algebraic_over_base, rational_rows, transcendence_test
from seriesval.series import INCONCLUSIVE, ParamSeries, TruncSeries, substitute

DEFAULT_STEP_BUDGET = 64
DEFAULT_CONTAINMENT_BUDGET = 4
DEFAULT_INDEPENDENCE_BOUND = 4


class FormallyDependent(ValueError):
    """The images satisfy a polynomial relation found by linear algebra."""

    def __init__(self, relation: TruncSeries, names: Sequence[str]):
        from seriesval.series import format_series
        self.relation = relation
        super().__init__(f"images formally dependent at budget: {format_series(relation, names)} maps to 0")


class CertificateError(ValueError):
    pass


class ParamValuation:
    """``f -> ord_t f(images)`` for nonzero images of positive order."""

    def __init__(self, images: Sequence[ParamSeries]):
        images = tuple(images)
        if not images:
            raise ValueError("need at least one image")
        tower = images[0].tower
        for i, im in enumerate(images):
            if not isinstance(im, ParamSeries):
                raise TypeError(f"image {i + 1} is not a parameter series")
            if im.tower != tower:
                raise ValueError("images over different towers")
            if im.order() is INCONCLUSIVE:
                raise ValueError(f"image of X{i + 1} has no visible term through t^{im.trunc}")
        self.images = images
        self.tower = tower
        self.n = len(images)
        self.trunc = min(im.trunc for im in images)
        self._monomials: dict = {}

    def monomial_image(self, A: Sequence[int]) -> ParamSeries:
        """Image of ``X^A`` (A nonzero), cached per valuation."""
        A = tuple(A)
        if A not in self._monomials:
            i = next(k for k, a in enumerate(A) if a)
            rest = tuple(a - (k == i) for k, a in enumerate(A))
            img = self.images[i]
            self._monomials[A] = img if not any(rest) else self.monomial_image(rest) * img
        return self._monomials[A]

    def orders(self) -> list[int]:
        return [im.order() for im in self.images]

    def __repr__(self):
        return f"ParamValuation({list(self.images)})"


def value_of(P: ParamValuation, f: TruncSeries):
    """t-order of ``f`` at the parametrization, or ``INCONCLUSIVE``."""
    if f.nvars != P.n:
        raise ValueError(f"series has {f.nvars} variables, valuation expects {P.n}")
    if f.is_zero():
        return INCONCLUSIVE
    if not f.constant_term().is_zero():
        return 0
    if f.trunc is not None:
        return substitute(f, P.images).order()
    out = [P.tower.zero] * P.trunc
    for A, c in f.terms.items():
        img = P.monomial_image(A)
        c = P.tower.coerce(c)
        for k, x in enumerate(img.coeffs[: P.trunc]):
            if not x.is_zero():
                out[k] = out[k] + c * x
    return ParamSeries(out, P.trunc, P.tower).order()


# ----------------------------------------------------------------------------
# formal independence
# ----------------------------------------------------------------------------


def _monomials(n: int, lo: int, hi: int):
    for deg in range(lo, hi + 1):
        for combo in combinations_with_replacement(range(n), deg):
            e = [0] * n
            for i in combo:
                e[i] += 1
            yield tuple(e)


def check_formal_independence(P: ParamValuation, degree_bound: int) -> Optional[TruncSeries]:
    """A nonzero polynomial of degree <= bound killed by the substitution, or None.

    Only monomials whose image order is within the truncation take part, so a
    relation returned here holds exactly through ``t^T``.  ``None`` is evidence
    of independence, not a proof.
    """
    orders = P.orders()
    T = P.trunc
    monos = [A for A in _monomials(P.n, 1, degree_bound)
             if sum(a * o for a, o in zip(A, orders)) <= T]
    if not monos:
        return None
    images = [substitute(TruncSeries(P.n, {A: 1}, None, P.tower), P.images) for A in monos]
    rows: list[list[Fraction]] = []
    for k in range(1, T + 1):
        rows.extend(rational_rows([im.coeff(k) for im in images]))
    kernel = linalg.nullspace(rows, len(monos))
    if not kernel:
        return None
    vec = kernel[0]
    # primitive integer vector, lex-largest monomial positive
    from math import gcd, lcm
    den = 1
    for x in vec:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, x)
    ints = [x // g for x in ints]
    lead = max((A, c) for A, c in zip(monos, ints) if c)[1]
    if lead < 0:
        ints = [-x for x in ints]
    return TruncSeries(P.n, {A: c for A, c in zip(monos, ints) if c}, None, P.tower)


# ----------------------------------------------------------------------------
# engine session
# ----------------------------------------------------------------------------


class _OutOfBudget(Exception):
    pass


class _Collapse(Exception):
    def __init__(self, index: int):
        self.index = index


def _names(n):
    return [f"z{i + 1}" for i in range(n)]


def _monomial_image(coords, exp):
    out = None
    for z, e in zip(coords, exp):
        if e:
            p = z ** e
            out = p if out is None else out * p
    return out


class _Session:
    """Mutable state of one engine run."""

    def __init__(self, coords: Sequence[ParamSeries], budget: int):
        self.coords = list(coords)
        self.n = len(self.coords)
        self.steps: List[TransformStep] = []
        self.budget = budget
        self.drops = 0

    def _push(self, step: TransformStep):
        if len(self.steps) >= self.budget:
            raise _OutOfBudget(f"step budget {self.budget} exhausted")
        self.steps.append(step)

    def order(self, i: int) -> int:
        o = self.coords[i].order()
        if o is INCONCLUSIVE:
            raise _Collapse(i)
        return o

    def orders(self) -> list[int]:
        return [self.order(i) for i in range(self.n)]

    def blowup(self, a: int, b: int):
        before = self.order(b)
        quotient = self.coords[b].divide(self.coords[a])
        trace = f"blow-up: z{b + 1} <- z{b + 1}/z{a + 1} (order {before} -> {quotient.order()})"
        self._push(TransformStep.blowup(self.n, a, b, trace))
        self.coords[b] = quotient

    def change(self, i: int, alpha: FieldElem, exp: Sequence[int]):
        mono = LaurentPoly.monomial(exp, self.coords[0].tower).to_str(_names(self.n))
        step = TransformStep.coordinate_change(i, alpha, tuple(exp),
                                               f"coordinate change: z{i + 1} <- z{i + 1} - ({alpha})*{mono}")
        self._push(step)
        self.coords[i] = self.coords[i] - _monomial_image(self.coords, exp).scale(alpha)

    def reduce(self):
        """Blow up pairwise until every coordinate has the same order."""
        while True:
            orders = self.orders()
            lo = min(orders)
            if all(o == lo for o in orders):
                return lo
            a = orders.index(lo)
            b = next(i for i, o in enumerate(orders) if o != lo)
            q, r = divmod(orders[b], lo)
            for _ in range(q if r else q - 1):
                self.blowup(a, b)


def reduce_min_value(coords: Sequence[ParamSeries], budget: int = DEFAULT_STEP_BUDGET):
    """Euclid by blow-ups until all coordinates share the gcd of their orders.

    Returns ``(new_coords, steps)``.  Raises ``ValueError`` on an inconclusive
    order and ``RuntimeError`` when the budget runs out.
    """
    for i, z in enumerate(coords):
        if z.order() is INCONCLUSIVE:
            raise ValueError(f"order of z{i + 1} is inconclusive")
    s = _Session(coords, budget)
    try:
        s.reduce()
    except _OutOfBudget as exc:
        raise RuntimeError(str(exc)) from None
    return s.coords, s.steps


# ----------------------------------------------------------------------------
# engines
# ----------------------------------------------------------------------------


class _Drop(Exception):
    pass


def _residue_loop(s: _Session, i: int, d: int) -> FieldElem:
    """Make the residue of ``z_i / z_1`` transcendental; returns it.

    Raises ``_Drop`` when a coordinate change leaves an order not divisible by d.
    """
    e1 = tuple(int(j == 0) for j in range(s.n))
    while True:
        alpha = s.coords[i].leading_coeff() / s.coords[0].leading_coeff()
        if not is_algebraic_over_base(alpha):
            return alpha
        s.change(i, alpha, e1)
        o = s.order(i)
        if o % d:
            s.drops += 1
            raise _Drop()
        for _ in range(o // d - 1):
            s.blowup(0, i)


def _finish_exhausted(P, s, cert_rank, reason, independence_bound, candidate=False):
    return Certificate(cert_rank, P.tower, P.images, s.steps,
                       BudgetExhausted(reason, tuple(s.coords), candidate),
                       s.drops, min(P.orders()))


def _collapse(P, s, exc, independence_bound):
    rel = check_formal_independence(P, independence_bound)
    if rel is not None:
        raise FormallyDependent(rel, [f"X{i + 1}" for i in range(P.n)])
    return _finish_exhausted(
        P, s, 1, f"z{exc.index + 1} vanishes through t^{s.coords[exc.index].trunc}; "
                 "no relation found, deeper truncation needed", independence_bound)


def monomialize2(P: ParamValuation, steps: int = DEFAULT_STEP_BUDGET,
                 independence_bound: int = DEFAULT_INDEPENDENCE_BOUND) -> Certificate:
    """Two-variable monomialization: ends with a transcendental residue ``z2/z1``."""
    if P.n != 2:
        raise ValueError("monomialize2 needs exactly two images")
    s = _Session(P.images, steps)
    try:
        while True:
            d = s.reduce()
            try:
                u = _residue_loop(s, 1, d)
            except _Drop:
                continue
            outcome = Monomial2(tuple(s.coords), u, d)
            return Certificate(1, P.tower, P.images, s.steps, outcome, s.drops, min(P.orders()))
    except _OutOfBudget as exc:
        return _finish_exhausted(P, s, 1, str(exc), independence_bound)
    except _Collapse as exc:
        return _collapse(P, s, exc, independence_bound)


def _containment(P: ParamValuation, z1: ParamSeries, z2: ParamSeries, degree: int):
    """Rational ``h_i`` with ``x_i = h_i(z1, z2)`` through truncation, or None."""
    d = z1.order()
    limit = min(z1.trunc, z2.trunc, P.trunc)
    monos = [A for A in _monomials(2, 1, degree) if d * sum(A) <= limit]
    if not monos:
        return None
    imgs = [_monomial_image((z1, z2), A) for A in monos]
    T = min([limit] + [im.trunc for im in imgs])
    witnesses = []
    for x in P.images:
        rows: list[list[Fraction]] = []
        for k in range(1, T + 1):
            rows.extend(rational_rows([im.coeff(k) for im in imgs] + [-x.coeff(k)]))
        sol = linalg.solve([r[:-1] for r in rows], [-r[-1] for r in rows])
        if sol is None:
            return None
        witnesses.append(LaurentPoly(2, {A: P.tower.constant(c) for A, c in zip(monos, sol)}, P.tower))
    return tuple(witnesses), T


def _expand(z: ParamSeries, z1: ParamSeries, d: int):
    """``z`` in powers of ``z1``: (coefficients, precision, remainder, dropped)."""
    lc1 = z1.leading_coeff()
    coeffs: dict[int, FieldElem] = {}
    rho = z
    while True:
        o = rho.order()
        if o is INCONCLUSIVE:
            J = -(-(rho.trunc + 1) // d) - 1
            zero = z.tower.zero
            return tuple(coeffs.get(j, zero) for j in range(1, J + 1)), J, rho, False
        if o % d:
            return coeffs, None, rho, True
        j = o // d
        c = rho.leading_coeff() / lc1 ** j
        coeffs[j] = c
        rho = rho - (z1 ** j).scale(c)


def classify3(P: ParamValuation, steps: int = DEFAULT_STEP_BUDGET,
              containment: int = DEFAULT_CONTAINMENT_BUDGET,
              independence_bound: int = DEFAULT_INDEPENDENCE_BOUND) -> Certificate:
    """Three-variable classification into OutcomeA / OutcomeB."""
    if P.n != 3:
        raise ValueError("classify3 needs exactly three images")
    s = _Session(P.images, steps)
    e1 = (1, 0, 0)
    try:
        while True:
            d = s.reduce()
            try:
                u = _residue_loop(s, 1, d)
                _residue_loop(s, 2, d)
            except _Drop:
                continue
            z1, z2, z3 = s.coords
            found = _containment(P, z1, z2, containment)
            if found is not None:
                witnesses, through = found
                outcome = OutcomeA((z1, z2), u, d, witnesses, through)
                return Certificate(1, P.tower, P.images, s.steps, outcome, s.drops, min(P.orders()))
            dropped = False
            expansions = []
            for i in (1, 2):
                coeffs, J, rho, dropped = _expand(s.coords[i], z1, d)
                if dropped:
                    # the truncated expansion is a coordinate change of smaller value
                    for j, c in sorted(coeffs.items()):
                        s.change(i, c, tuple(j * x for x in e1))
                    s.drops += 1
                    break
                expansions.append(Expansion(coeffs, J))
            if dropped:
                continue
            zstar = z2.scale(u.inverse())
            u3, J3, _, dropped = _expand(z3, zstar, d)
            if dropped:
                # cannot happen once z3 expands in z1 with orders divisible by d
                raise CertificateError("inconsistent expansion orders")
            j0 = None
            for j, c in enumerate(u3, start=1):
                if not c.is_zero() and transcendence_test(c, [u]) == "independent":
                    j0 = j
                    break
            outcome = OutcomeB(tuple(s.coords), d, u, tuple(expansions), u3, J3, j0,
                               "found" if j0 is not None else "not found within truncation")
            return Certificate(1, P.tower, P.images, s.steps, outcome, s.drops, min(P.orders()))
    except _OutOfBudget as exc:
        return _finish_exhausted(P, s, 1, str(exc), independence_bound)
    except _Collapse as exc:
        return _collapse(P, s, exc, independence_bound)


# ----------------------------------------------------------------------------
# values derived from a certificate
# ----------------------------------------------------------------------------


def _laurent_power_series_min(G: LaurentPoly):
    """Lowest exponent of a one-variable Laurent polynomial, or None if zero."""
    return min(e[0] for e in G.terms) if G.terms else None


def _eval_laurent_series(expr: LaurentPoly, images: Sequence[ParamSeries]) -> ParamSeries:
    for e in expr.terms:
        if any(x < 0 for x in e):
            raise CertificateError("original coordinate is not a power series in the final ones")
    f = TruncSeries(expr.n, expr.terms, None, expr.tower)
    return substitute(f, images)


class CertifiedValuer:
    """Values of polynomials computed from a certificate alone."""

    def __init__(self, cert: Certificate, P: Optional[ParamValuation] = None):
        if cert.exhausted:
            raise CertificateError("budget-exhausted certificates carry no final valuation")
        self.cert = cert
        self.P = P or ParamValuation(cert.images)
        out = cert.outcome
        tower = cert.tower
        self.d = out.common_order
        if isinstance(out, (Monomial2, OutcomeA)):
            if isinstance(out, OutcomeA):
                exprs = list(out.containment)
                self.horizon = out.checked_through
            else:
                exprs = original_in_final(cert)
                self.horizon = self.P.trunc
            s = LaurentPoly.variable(0, 1, tower)
            self._mono = [e.compose([s, s * out.residue]) for e in exprs]
            self._series = None
        elif isinstance(out, OutcomeB):
            exprs = original_in_final(cert)
            T = self.P.trunc
            one = [tower.one]
            s = ParamSeries(one, T, tower)
            e2, e3 = out.expansions
            images = [s, ParamSeries(e2.coeffs, e2.precision, tower), ParamSeries(e3.coeffs, e3.precision, tower)]
            self._series = [_eval_laurent_series(e, images) for e in exprs]
            self._mono = None
            self.horizon = T
        else:
            raise CertificateError(f"unsupported outcome {type(out).__name__}")

    def value(self, f: TruncSeries):
        """``(value or INCONCLUSIVE, horizon)``: the value is exact when <= horizon."""
        if not f.constant_term().is_zero():
            return 0, self.horizon
        if self._mono is not None:
            G = LaurentPoly(1, {}, self.cert.tower)
            for A, c in f.terms.items():
                term = LaurentPoly.constant(c, 1, self.cert.tower)
                for x, k in zip(self._mono, A):
                    if k:
                        term = term * x ** k
                G = G + term
            lo = _laurent_power_series_min(G)
            if lo is None:
                return INCONCLUSIVE, self.horizon
            return self.d * lo, self.horizon
        g = substitute(f, self._series)
        o = g.order()
        horizon = min(self.horizon, self.d * (g.trunc + 1) - 1)
        return (INCONCLUSIVE if o is INCONCLUSIVE else self.d * o), horizon


def clip(v, horizon: int):
    """Values beyond the horizon are not comparable; report them as inconclusive."""
    if v is INCONCLUSIVE or v > horizon:
        return INCONCLUSIVE
    return v
