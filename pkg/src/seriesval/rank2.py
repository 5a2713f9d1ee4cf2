"""The rank-two valuation on series in ``k((u2))[[u1]]``.

An element is stored stratum by stratum: stratum ``i`` is the coefficient of
``u1^i``, a Laurent series in ``u2``.  Each stratum knows its coefficients
through ``u2^prec`` (``None`` when exact), and every exponent of ``u2`` must lie
in the window ``[-window, window]``.  Strata past ``t1`` are unknown unless
``t1`` is ``None``, which marks a polynomial in ``u1``.

The value of ``w`` is the lex-least ``(i, j)`` in its support.
"""

from __future__ import annotations

from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from seriesval.certificate import (
    BudgetExhausted,
    Certificate,
    LaurentPoly,
    Rank2Monomial,
    TransformStep,
    original_in_final,
)
from seriesval.field import RATIONALS, FieldElem, FieldTower
from seriesval.monoval import INFINITY
from seriesval.series import INCONCLUSIVE, TruncSeries, format_terms

DEFAULT_WINDOW = 24
INF = float("inf")

Rank2Value = Tuple[int, int]


class OutsideWindow(ValueError):
    pass


# ----------------------------------------------------------------------------
# one stratum
# ----------------------------------------------------------------------------


class _Strip:
    """Laurent series in u2 known through ``u2^prec`` (``None``: exact)."""

    __slots__ = ("terms", "prec")

    def __init__(self, terms: Dict[int, FieldElem], prec):
        self.prec = prec
        self.terms = {j: c for j, c in terms.items() if not c.is_zero() and (prec is None or j <= prec)}

    def p(self):
        return INF if self.prec is None else self.prec

    def low(self):
        if self.terms:
            return min(self.terms)
        return self.p() + 1

    def add(self, other: "_Strip", sign=1) -> "_Strip":
        prec = _min_prec(self.prec, other.prec)
        terms = dict(self.terms)
        for j, c in other.terms.items():
            c = c if sign > 0 else -c
            terms[j] = terms[j] + c if j in terms else c
        return _Strip(terms, prec)

    def mul(self, other: "_Strip") -> "_Strip":
        la, lb = self.low(), other.low()
        if la == INF or lb == INF:
            return _Strip({}, None)
        p = min(self.p() + lb, other.p() + la)
        terms: Dict[int, FieldElem] = {}
        for ja, ca in self.terms.items():
            for jb, cb in other.terms.items():
                j = ja + jb
                if j > p:
                    continue
                v = ca * cb
                terms[j] = terms[j] + v if j in terms else v
        return _Strip(terms, None if p == INF else int(p))

    def scale(self, c) -> "_Strip":
        return _Strip({j: c * v for j, v in self.terms.items()}, self.prec)

    def shift(self, b: int) -> "_Strip":
        return _Strip({j + b: c for j, c in self.terms.items()}, None if self.prec is None else self.prec + b)

    def is_exact_zero(self) -> bool:
        return not self.terms and self.prec is None


def _min_prec(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


# ----------------------------------------------------------------------------
# the series type
# ----------------------------------------------------------------------------


class LaurentTailSeries:
    __slots__ = ("strips", "t1", "window", "tower")

    def __init__(self, terms: Dict[Tuple[int, int], object] = (), t1: Optional[int] = None,
                 prec: Optional[int] = None, window: int = DEFAULT_WINDOW, tower: FieldTower = RATIONALS,
                 _strips: Optional[List[_Strip]] = None):
        self.window = window
        self.tower = tower
        self.t1 = t1
        if _strips is None:
            terms = dict(terms)
            if any(i < 0 for i, _ in terms):
                raise ValueError("negative power of u1")
            top = t1 if t1 is not None else max([i for i, _ in terms] + [-1])
            p = prec
            _strips = []
            for i in range(top + 1):
                row = {j: tower.coerce(c) for (ii, j), c in terms.items() if ii == i}
                _strips.append(_Strip(row, p))
        strips = [_Strip(s.terms, s.prec) for s in _strips]
        if t1 is not None:
            strips = strips[: t1 + 1]
            while len(strips) < t1 + 1:
                strips.append(_Strip({}, self._default_prec(strips)))
        else:
            while strips and strips[-1].is_exact_zero():
                strips.pop()
        for s in strips:
            if s.prec is None and s.terms and max(s.terms) > window:
                s.prec = window
            if s.prec is not None and s.prec > window:
                s.prec = window
            s.terms = {j: c for j, c in s.terms.items() if j <= window}
            if s.terms and min(s.terms) < -window:
                raise OutsideWindow(f"u2 exponent {min(s.terms)} outside the window [-{window}, {window}]")
        self.strips = strips

    @staticmethod
    def _default_prec(strips):
        ps = [s.prec for s in strips if s.prec is not None]
        return min(ps) if ps else None

    @classmethod
    def _make(cls, strips, t1, window, tower):
        try:
            return cls(t1=t1, window=window, tower=tower, _strips=strips)
        except OutsideWindow:
            return INCONCLUSIVE

    @classmethod
    def variable(cls, k: int, window: int = DEFAULT_WINDOW, tower: FieldTower = RATIONALS):
        """``u1`` (k = 0) or ``u2`` (k = 1), exact."""
        return cls({(1, 0) if k == 0 else (0, 1): 1}, window=window, tower=tower)

    # inspection ----------------------------------------------------------
    @property
    def terms(self) -> Dict[Tuple[int, int], FieldElem]:
        return {(i, j): c for i, s in enumerate(self.strips) for j, c in s.terms.items()}

    def strip(self, i: int) -> _Strip:
        if i < len(self.strips):
            return self.strips[i]
        if self.t1 is None:
            return _Strip({}, None)
        raise IndexError(f"stratum u1^{i} is beyond the truncation")

    def complete(self, i: int) -> bool:
        """Stratum i is known exactly."""
        if self.t1 is not None and i > self.t1:
            return False
        return self.strip(i).prec is None

    def is_exact(self) -> bool:
        return self.t1 is None and all(s.prec is None for s in self.strips)

    def is_zero(self) -> bool:
        return not any(s.terms for s in self.strips)

    def __eq__(self, other):
        if not isinstance(other, LaurentTailSeries):
            return NotImplemented
        return (self.t1, self.window, [(s.terms, s.prec) for s in self.strips]) == \
            (other.t1, other.window, [(s.terms, s.prec) for s in other.strips])

    def __hash__(self):
        return hash((self.t1, self.window, tuple(tuple(sorted(s.terms.items())) for s in self.strips)))

    def __repr__(self):
        return f"LaurentTailSeries({format_rank2(self)})"

    def _low1(self):
        for i, s in enumerate(self.strips):
            if not s.is_exact_zero():
                return i
        if self.t1 is None:
            return INF
        return self.t1 + 1

    # arithmetic ----------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, LaurentTailSeries):
            raise TypeError(f"expected LaurentTailSeries, got {type(other).__name__}")
        if self.tower != other.tower:
            raise ValueError("series over different towers")

    def _sum(self, other, sign):
        self._check(other)
        t1 = _min_prec(self.t1, other.t1)
        top = t1 if t1 is not None else max(len(self.strips), len(other.strips)) - 1
        strips = [self.strip(i).add(other.strip(i), sign) for i in range(top + 1)]
        return LaurentTailSeries._make(strips, t1, min(self.window, other.window), self.tower)

    def __add__(self, other):
        return self._sum(other, 1)

    def __sub__(self, other):
        return self._sum(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        c = self.tower.coerce(c)
        return LaurentTailSeries._make([s.scale(c) for s in self.strips], self.t1, self.window, self.tower)

    def __mul__(self, other):
        if not isinstance(other, LaurentTailSeries):
            return self.scale(other)
        self._check(other)
        la, lb = self._low1(), other._low1()
        ta = INF if self.t1 is None else self.t1
        tb = INF if other.t1 is None else other.t1
        t1 = min(ta + lb, tb + la)
        if t1 == INF:
            top = len(self.strips) + len(other.strips) - 2
        else:
            top = int(t1)
        strips = []
        for k in range(top + 1):
            acc = _Strip({}, None)
            for i in range(k + 1):
                try:
                    a, b = self.strip(i), other.strip(k - i)
                except IndexError:
                    continue
                acc = acc.add(a.mul(b))
            strips.append(acc)
        return LaurentTailSeries._make(strips, None if t1 == INF else int(t1), min(self.window, other.window),
                                       self.tower)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 1:
            raise ValueError("powers must be positive")
        out = self
        for _ in range(k - 1):
            out = out * self
            if out is INCONCLUSIVE:
                return out
        return out

    def shift(self, a: int, b: int):
        """Multiply by ``u1^a u2^b``; a may be negative only over empty strata."""
        strips = [s.shift(b) for s in self.strips]
        if a >= 0:
            strips = [_Strip({}, None) for _ in range(a)] + strips
        else:
            for s in strips[:-a]:
                if not s.is_exact_zero():
                    raise ValueError("division by u1 leaves the series ring")
            strips = strips[-a:]
        t1 = None if self.t1 is None else self.t1 + a
        return LaurentTailSeries._make(strips, t1, self.window, self.tower)

    def divide(self, other: "LaurentTailSeries"):
        """``self / other`` when ``vhat(self) >=lex vhat(other)``."""
        self._check(other)
        v = vhat(other)
        if v is INCONCLUSIVE or v is INFINITY:
            raise ZeroDivisionError("divisor value is not certified")
        i0, j0 = v
        lead = other.strip(i0).terms[j0]
        unit = other.shift(-i0, -j0)
        if unit is INCONCLUSIVE:
            return INCONCLUSIVE
        unit = unit.scale(lead.inverse())
        inv = _unit_inverse(unit)
        if inv is INCONCLUSIVE:
            return INCONCLUSIVE
        prod = self * inv
        if prod is INCONCLUSIVE:
            return INCONCLUSIVE
        try:
            q = prod.shift(-i0, -j0)
        except ValueError as exc:
            from seriesval.series import NotASeries
            raise NotASeries(str(exc)) from exc
        if q is INCONCLUSIVE:
            return q
        return q.scale(lead.inverse())


def _strip_inverse(s: _Strip) -> _Strip:
    """Inverse of a power series ``1 + O(u2)``."""
    if s.terms.get(0) != 1 or min(s.terms) < 0:
        raise ValueError("stratum is not a unit power series")
    p = s.prec
    one = next(iter(s.terms.values())).tower.one
    if p is None:
        raise ValueError("exact unit inverse is infinite")
    g = {0: one}
    for k in range(1, p + 1):
        acc = None
        for j in range(1, k + 1):
            c = s.terms.get(j)
            if c is not None and (k - j) in g:
                t = c * g[k - j]
                acc = t if acc is None else acc + t
        if acc is not None and not acc.is_zero():
            g[k] = -acc
    return _Strip(g, p)


def _unit_inverse(U: LaurentTailSeries):
    """Inverse of a series whose value is (0, 0) with leading coefficient 1."""
    s0 = U.strip(0)
    if s0.prec is None and len(s0.terms) == 1:
        g0 = _Strip(dict(s0.terms), None)
    else:
        if s0.prec is None:
            # exact but not a monomial: the inverse is known through the window
            s0 = _Strip(s0.terms, U.window)
        g0 = _strip_inverse(s0)
    t1 = U.t1
    if t1 is None:
        if len(U.strips) <= 1:
            return LaurentTailSeries._make([g0], None, U.window, U.tower)
        t1 = U.window
    G = [g0]
    for k in range(1, t1 + 1):
        acc = _Strip({}, None)
        for m in range(1, k + 1):
            try:
                um = U.strip(m)
            except IndexError:
                continue
            acc = acc.add(um.mul(G[k - m]))
        gk = g0.mul(acc).scale(-1)
        if gk.terms and min(gk.terms) < -U.window:
            return INCONCLUSIVE
        G.append(gk)
    return LaurentTailSeries._make(G, t1, U.window, U.tower)


# ----------------------------------------------------------------------------
# valuation
# ----------------------------------------------------------------------------


def vhat(w: LaurentTailSeries):
    """Lex-least exponent ``(i, j)``; ``INCONCLUSIVE`` when not certain.

    The value is certain when every stratum below the first visible one is
    exactly zero.
    """
    if w is INCONCLUSIVE:
        return INCONCLUSIVE
    for i, s in enumerate(w.strips):
        if s.terms:
            return (i, min(s.terms))
        if s.prec is not None:
            return INCONCLUSIVE
    if w.t1 is None:
        return INFINITY
    return INCONCLUSIVE


def in_valuation_ring(w: LaurentTailSeries) -> bool:
    v = vhat(w)
    if v is INFINITY:
        return True
    if v is INCONCLUSIVE:
        raise ValueError("value is inconclusive at this truncation")
    return v >= (0, 0)


def _in_max_ideal(v) -> bool:
    return v is not INCONCLUSIVE and v is not INFINITY and v >= (0, 1)


def substitute2(f: TruncSeries, images: Sequence[LaurentTailSeries]):
    """``f(images)`` as a LaurentTailSeries, or INCONCLUSIVE."""
    if len(images) != f.nvars:
        raise ValueError(f"need {f.nvars} images, got {len(images)}")
    tower = images[0].tower
    window = min(im.window for im in images)
    out = LaurentTailSeries({}, window=window, tower=tower)
    cache: Dict[Tuple[int, int], LaurentTailSeries] = {}
    for A, c in f.terms.items():
        term = LaurentTailSeries({(0, 0): c}, window=window, tower=tower)
        for i, e in enumerate(A):
            if e:
                if (i, e) not in cache:
                    cache[(i, e)] = images[i] ** e
                term = term * cache[(i, e)]
                if term is INCONCLUSIVE:
                    return INCONCLUSIVE
        out = out + term
        if out is INCONCLUSIVE:
            return out
    return out


def format_rank2(w: LaurentTailSeries) -> str:
    items = sorted(w.terms.items())
    body = format_terms(items, ["u1", "u2"]) if items else "0"
    if w.is_exact():
        return body
    tail = []
    if w.t1 is not None:
        tail.append(f"u1^{w.t1 + 1}")
    ps = {s.prec for s in w.strips if s.prec is not None}
    if ps:
        tail.append(f"u2^{min(ps) + 1}")
    return f"{body} + O({', '.join(tail)})"


# ----------------------------------------------------------------------------
# classification
# ----------------------------------------------------------------------------


class _OutOfBudget(Exception):
    pass


class _Stuck(Exception):
    pass


class _Session2:
    def __init__(self, coords, budget):
        self.coords = list(coords)
        self.steps: List[TransformStep] = []
        self.budget = budget

    def _push(self, step):
        if len(self.steps) >= self.budget:
            raise _OutOfBudget(f"step budget {self.budget} exhausted")
        self.steps.append(step)

    def value(self, i):
        v = vhat(self.coords[i])
        if not _in_max_ideal(v):
            raise _Stuck(f"value of z{i + 1} is not certified at this truncation")
        return v

    def blowup(self, a, b):
        q = self.coords[b].divide(self.coords[a])
        if q is INCONCLUSIVE:
            raise _Stuck(f"z{b + 1}/z{a + 1} leaves the u2 window")
        before = self.value(b)
        vq = vhat(q)
        self._push(TransformStep.blowup(2, a, b, f"blow-up: z{b + 1} <- z{b + 1}/z{a + 1} (value {_fmt_v(before)} -> {_fmt_v(vq)})"))
        self.coords[b] = q

    def change(self, i, alpha, exp):
        mono = LaurentPoly.monomial(exp, self.coords[0].tower).to_str(["z1", "z2"])
        term = self.coords[0] ** exp[0] if exp[0] else self.coords[1] ** exp[1]
        new = self.coords[i] - term.scale(alpha) if term is not INCONCLUSIVE else INCONCLUSIVE
        if new is INCONCLUSIVE:
            raise _Stuck("coordinate change leaves the u2 window")
        self._push(TransformStep.coordinate_change(
            i, alpha, tuple(exp), f"coordinate change: z{i + 1} <- z{i + 1} - ({alpha})*{mono} "
                                  f"(value -> {_fmt_v(vhat(new))})"))
        self.coords[i] = new


def _fmt_v(v):
    if v is INCONCLUSIVE:
        return "inconclusive"
    if v is INFINITY:
        return "infinity"
    return f"({v[0]},{v[1]})"


def _multiple(v, p):
    """k with v = k p (p primitive, v on the ray)."""
    return v[0] // p[0] if p[0] else v[1] // p[1]


def rank2_classify(x1: LaurentTailSeries, x2: LaurentTailSeries, steps: int = 64) -> Certificate:
    """Reduce until the two values are independent, or run out of budget."""
    images = (x1, x2)
    for k, x in enumerate(images):
        if not _in_max_ideal(vhat(x)):
            raise ValueError(f"image of X{k + 1} must have certified value >= (0,1), got {_fmt_v(vhat(x))}")
    tower = x1.tower
    s = _Session2(images, steps)
    try:
        while True:
            V = [s.value(0), s.value(1)]
            det = V[0][0] * V[1][1] - V[0][1] * V[1][0]
            if det:
                out = Rank2Monomial(tuple(s.coords), (V[0], V[1]), det)
                return Certificate(2, tower, images, s.steps, out)
            g = gcd(*V[0])
            p = (V[0][0] // g, V[0][1] // g)
            k = [_multiple(V[0], p), _multiple(V[1], p)]
            if k[0] != k[1]:
                a = 0 if k[0] < k[1] else 1
                b = 1 - a
                q, r = divmod(k[b], k[a])
                for _ in range(q if r else q - 1):
                    s.blowup(a, b)
                continue
            i0, j0 = V[0]
            alpha = s.coords[1].strip(i0).terms[j0] / s.coords[0].strip(i0).terms[j0]
            s.change(1, alpha, (1, 0))
    except _OutOfBudget as exc:
        reason = str(exc)
    except _Stuck as exc:
        reason = str(exc)
    out = BudgetExhausted(reason, tuple(s.coords), infinite_process_candidate=True)
    return Certificate(2, tower, images, s.steps, out)


def certificate_value2(cert: Certificate, f: TruncSeries):
    """Value of ``f`` read off a Monomial rank-two certificate."""
    out = cert.outcome
    if not isinstance(out, Rank2Monomial):
        raise ValueError("certificate has no final monomial valuation")
    exprs = original_in_final(cert)
    G = LaurentPoly(2, {}, cert.tower)
    for A, c in f.terms.items():
        term = LaurentPoly.constant(c, 2, cert.tower)
        for x, k in zip(exprs, A):
            if k:
                term = term * x ** k
        G = G + term
    if G.is_zero():
        return INFINITY
    V1, V2 = out.values
    return min((e[0] * V1[0] + e[1] * V2[0], e[0] * V1[1] + e[1] * V2[1]) for e in G.terms)
