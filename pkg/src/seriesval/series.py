"""Truncated multivariate power series and one-parameter series.

``TruncSeries`` is sparse: a dict from exponent tuples to nonzero field
elements, truncated at a total degree ``trunc`` (``None`` marks an exact
polynomial).  ``ParamSeries`` is dense in ``t`` with no constant term and is
known exactly through ``t^trunc``.

Every operation reports how far its result is known; nothing is dropped
silently.  An order that cannot be decided inside the truncation is
:data:`INCONCLUSIVE`, a value, not an exception.
"""

from __future__ import annotations

from typing import Dict, Iterable, Mapping, Sequence, Tuple

from seriesval.field import RATIONALS, FieldElem, FieldTower, TowerMismatch

ExpVector = Tuple[int, ...]


class _Inconclusive:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INCONCLUSIVE"

    def __reduce__(self):
        return (_Inconclusive, ())


INCONCLUSIVE = _Inconclusive()


class NotASeries(ValueError):
    """A monomial transform produced a negative exponent."""


def _min_trunc(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class TruncSeries:
    """``sum f_A X^A`` over a field tower, known through total degree ``trunc``."""

    __slots__ = ("nvars", "terms", "trunc", "tower")

    def __init__(self, nvars: int, terms: Mapping[ExpVector, object] = (), trunc: int | None = None,
                 tower: FieldTower = RATIONALS):
        self.nvars = nvars
        self.trunc = trunc
        self.tower = tower
        clean: Dict[ExpVector, FieldElem] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for exp, c in items:
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars:
                raise ValueError(f"exponent {exp} has wrong arity for {nvars} variables")
            if any(e < 0 for e in exp):
                raise NotASeries(f"negative exponent {exp}")
            if trunc is not None and sum(exp) > trunc:
                continue
            c = tower.coerce(c)
            if c.is_zero():
                continue
            if exp in clean:
                c = clean[exp] + c
                if c.is_zero():
                    del clean[exp]
                    continue
            clean[exp] = c
        self.terms = clean

    # constructors ----------------------------------------------------------
    @classmethod
    def variable(cls, i: int, nvars: int, tower: FieldTower = RATIONALS, trunc=None) -> "TruncSeries":
        exp = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(nvars, {exp: tower.one}, trunc, tower)

    @classmethod
    def constant(cls, c, nvars: int, tower: FieldTower = RATIONALS, trunc=None) -> "TruncSeries":
        return cls(nvars, {(0,) * nvars: c}, trunc, tower)

    # basic queries ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> list[ExpVector]:
        return sorted(self.terms)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def constant_term(self) -> FieldElem:
        return self.terms.get((0,) * self.nvars, self.tower.zero)

    def truncate(self, d: int | None) -> "TruncSeries":
        return TruncSeries(self.nvars, self.terms, _min_trunc(self.trunc, d), self.tower)

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (self.nvars == other.nvars and self.trunc == other.trunc
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, self.trunc, frozenset(self.terms.items())))

    def __repr__(self):
        tail = "" if self.trunc is None else f" + O(deg {self.trunc + 1})"
        return f"TruncSeries({format_series(self)}{tail})"

    # arithmetic ------------------------------------------------------------
    def _check(self, other: "TruncSeries"):
        if self.nvars != other.nvars:
            raise ValueError(f"arity mismatch: {self.nvars} vs {other.nvars}")
        if self.tower != other.tower:
            raise TowerMismatch("series over different towers")

    def _coerce(self, other):
        if isinstance(other, TruncSeries):
            self._check(other)
            return other
        return TruncSeries.constant(other, self.nvars, self.tower)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms[e] + c if e in terms else c
        return TruncSeries(self.nvars, terms, _min_trunc(self.trunc, other.trunc), self.tower)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries(self.nvars, {e: -c for e, c in self.terms.items()}, self.trunc, self.tower)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, FieldElem)) or not isinstance(other, TruncSeries):
            c = self.tower.coerce(other)
            return TruncSeries(self.nvars, {e: c * v for e, v in self.terms.items()}, self.trunc, self.tower)
        self._check(other)
        trunc = _min_trunc(self.trunc, other.trunc)
        terms: Dict[ExpVector, FieldElem] = {}
        for ea, ca in self.terms.items():
            da = sum(ea)
            for eb, cb in other.terms.items():
                if trunc is not None and da + sum(eb) > trunc:
                    continue
                e = tuple(x + y for x, y in zip(ea, eb))
                v = ca * cb
                terms[e] = terms[e] + v if e in terms else v
        return TruncSeries(self.nvars, terms, trunc, self.tower)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = TruncSeries.constant(1, self.nvars, self.tower, self.trunc)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out


def series_arith(a: TruncSeries, b: TruncSeries, op: str) -> TruncSeries:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def format_series(f: TruncSeries, names: Sequence[str] | None = None) -> str:
    names = names or [f"X{i + 1}" for i in range(f.nvars)]
    if not f.terms:
        return "0"
    return format_terms(f.terms.items(), names)


def format_terms(items: Iterable[tuple[ExpVector, FieldElem]], names: Sequence[str]) -> str:
    """Text for ``sum c * prod names^e`` in the CLI grammar, degree ascending."""
    items = sorted(items, key=lambda kv: (sum(kv[0]), tuple(-x for x in kv[0])))
    out = ""
    for exp, c in items:
        mono = "*".join(n if e == 1 else f"{n}^{e}" if e > 0 else f"{n}^({e})"
                        for n, e in zip(names, exp) if e != 0)
        s = str(c)
        if not mono:
            if _simple_negative(s):
                body, neg = s[1:], True
            else:
                body, neg = (f"({s})" if " " in s else s), False
        elif s == "1":
            body, neg = mono, False
        elif s == "-1":
            body, neg = mono, True
        elif _simple_negative(s):
            body, neg = f"{s[1:]}*{mono}", True
        else:
            body, neg = (f"({s})*{mono}" if (" " in s or "/(" in s) else f"{s}*{mono}"), False
        if not out:
            out = f"-{body}" if neg else body
        else:
            out += f" - {body}" if neg else f" + {body}"
    return out or "0"


def _simple_negative(s: str) -> bool:
    return s.startswith("-") and " " not in s and "(" not in s


# ----------------------------------------------------------------------------
# one-parameter series
# ----------------------------------------------------------------------------


class ParamSeries:
    """``c_1 t + c_2 t^2 + ...`` known exactly through ``t^trunc``."""

    __slots__ = ("coeffs", "trunc", "tower")

    def __init__(self, coeffs: Sequence, trunc: int, tower: FieldTower = RATIONALS):
        if trunc < 0:
            trunc = 0
        cs = [tower.coerce(c) for c in list(coeffs)[:trunc]]
        cs += [tower.zero] * (trunc - len(cs))
        self.coeffs = tuple(cs)
        self.trunc = trunc
        self.tower = tower

    @classmethod
    def from_dict(cls, terms: Mapping[int, object], trunc: int, tower: FieldTower = RATIONALS) -> "ParamSeries":
        if any(k <= 0 for k in terms if not _is_zero_coeff(terms[k])):
            raise ValueError("parameter series must have zero constant term")
        cs = [tower.zero] * trunc
        for k, c in terms.items():
            if 1 <= k <= trunc:
                cs[k - 1] = tower.coerce(c)
        return cls(cs, trunc, tower)

    @classmethod
    def zero(cls, trunc: int, tower: FieldTower = RATIONALS) -> "ParamSeries":
        return cls([], trunc, tower)

    def coeff(self, k: int) -> FieldElem:
        if k <= 0:
            return self.tower.zero
        if k > self.trunc:
            raise IndexError(f"t^{k} is beyond the truncation t^{self.trunc}")
        return self.coeffs[k - 1]

    def order(self):
        for k, c in enumerate(self.coeffs, start=1):
            if not c.is_zero():
                return k
        return INCONCLUSIVE

    def lower_bound(self) -> int:
        o = self.order()
        return self.trunc + 1 if o is INCONCLUSIVE else o

    def leading_coeff(self) -> FieldElem:
        o = self.order()
        if o is INCONCLUSIVE:
            raise ValueError("no visible leading coefficient")
        return self.coeffs[o - 1]

    def truncate(self, trunc: int) -> "ParamSeries":
        return ParamSeries(self.coeffs, min(trunc, self.trunc), self.tower)

    def __eq__(self, other):
        if not isinstance(other, ParamSeries):
            return NotImplemented
        return self.trunc == other.trunc and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.trunc, self.coeffs))

    def __repr__(self):
        return f"ParamSeries({format_param(self)})"

    def agrees_with(self, other: "ParamSeries") -> bool:
        """Equal through the common truncation."""
        n = min(self.trunc, other.trunc)
        return self.coeffs[:n] == other.coeffs[:n]

    # arithmetic ----------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, ParamSeries):
            raise TypeError(f"expected ParamSeries, got {type(other).__name__}")
        if self.tower != other.tower:
            raise TowerMismatch("series over different towers")

    def __add__(self, other):
        self._check(other)
        n = min(self.trunc, other.trunc)
        return ParamSeries([a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n])], n, self.tower)

    def __neg__(self):
        return ParamSeries([-c for c in self.coeffs], self.trunc, self.tower)

    def __sub__(self, other):
        self._check(other)
        n = min(self.trunc, other.trunc)
        return ParamSeries([a - b for a, b in zip(self.coeffs[:n], other.coeffs[:n])], n, self.tower)

    def scale(self, c) -> "ParamSeries":
        c = self.tower.coerce(c)
        return ParamSeries([c * x for x in self.coeffs], self.trunc, self.tower)

    def __mul__(self, other):
        if not isinstance(other, ParamSeries):
            return self.scale(other)
        self._check(other)
        n = min(self.trunc + other.lower_bound(), other.trunc + self.lower_bound())
        zero = self.tower.zero
        out = [zero] * n
        a = self.coeffs
        b = other.coeffs
        for i, x in enumerate(a, start=1):
            if x.is_zero() or i >= n:
                continue
            for j, y in enumerate(b, start=1):
                k = i + j
                if k > n:
                    break
                if not y.is_zero():
                    out[k - 1] = out[k - 1] + x * y
        return ParamSeries(out, n, self.tower)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "ParamSeries":
        if k < 1:
            raise ValueError("parameter series powers must be positive")
        out = self
        for _ in range(k - 1):
            out = out * self
        return out

    def divide(self, other: "ParamSeries") -> "ParamSeries":
        """``self / other`` for ``order(self) > order(other)`` (a blow-up quotient)."""
        self._check(other)
        o = other.order()
        if o is INCONCLUSIVE:
            raise ZeroDivisionError("divisor has no visible leading term")
        mine = self.order()
        if mine is not INCONCLUSIVE and mine <= o:
            raise NotASeries("quotient would not lie in the maximal ideal")
        lead = other.coeffs[o - 1].inverse()
        unit = other.coeffs[o - 1:]  # beta_0, beta_1, ... known through trunc - o
        num = (self.tower.zero,) + self.coeffs  # index k -> t^k
        num = num[o:]                             # self / t^o, index 0 -> t^0
        quot_order = self.lower_bound() - o
        n = min(self.trunc - o, (other.trunc - o) + quot_order)
        out = []
        # q(t) * unit(t) = num(t) coefficientwise; q_0 == 0
        tail = [(j, c) for j, c in enumerate(unit) if j and not c.is_zero()]
        lead_is_one = lead == self.tower.one
        q = [self.tower.zero]
        for k in range(1, n + 1):
            acc = num[k] if k < len(num) else self.tower.zero
            for j, c in tail:
                if j >= k:
                    break
                if not q[k - j].is_zero():
                    acc = acc - q[k - j] * c
            q.append(acc if lead_is_one or acc.is_zero() else acc * lead)
            out.append(q[k])
        return ParamSeries(out, max(n, 0), self.tower)


def _is_zero_coeff(c) -> bool:
    return c == 0


def format_param(s: ParamSeries, var: str = "t") -> str:
    items = [((k,), c) for k, c in enumerate(s.coeffs, start=1) if not c.is_zero()]
    body = format_terms(items, [var]) if items else "0"
    return f"{body} + O({s.trunc + 1})"


def t_order(s: ParamSeries):
    return s.order()


def substitute(f: TruncSeries, images: Sequence[ParamSeries]) -> ParamSeries:
    """``f(images)`` in ``t``, known through the smallest image truncation."""
    if len(images) != f.nvars:
        raise ValueError(f"need {f.nvars} images, got {len(images)}")
    if not images:
        raise ValueError("need at least one image")
    tower = images[0].tower
    for im in images:
        if im.tower != tower:
            raise TowerMismatch("images over different towers")
    if f.tower != tower:
        f = TruncSeries(f.nvars, {e: tower.coerce(c) for e, c in f.terms.items()}, f.trunc, tower)
    if not f.constant_term().is_zero():
        raise ValueError("series with a nonzero constant term has no image in the maximal ideal")
    trunc = min(im.trunc for im in images)
    if f.trunc is not None:
        lowest = min(im.lower_bound() for im in images)
        trunc = min(trunc, (f.trunc + 1) * lowest - 1)
    powers: Dict[Tuple[int, int], ParamSeries] = {}

    def power(i: int, e: int) -> ParamSeries:
        if (i, e) not in powers:
            powers[(i, e)] = images[i] if e == 1 else power(i, e - 1) * images[i]
        return powers[(i, e)]

    out = [tower.zero] * trunc
    for exp, c in f.terms.items():
        term = None
        for i, e in enumerate(exp):
            if e:
                p = power(i, e)
                term = p if term is None else term * p
        if term.trunc < trunc:
            raise AssertionError("monomial image known less far than its factors")
        for k in range(term.order() if term.order() is not INCONCLUSIVE else trunc + 1, trunc + 1):
            x = term.coeffs[k - 1]
            if not x.is_zero():
                out[k - 1] = out[k - 1] + c * x
    return ParamSeries(out, trunc, tower)


def _is_unimodular(M: Sequence[Sequence[int]]) -> bool:
    from seriesval.lattice import determinant
    return abs(determinant(M)) == 1


def apply_monomial_transform(M: Sequence[Sequence[int]], f: TruncSeries) -> TruncSeries:
    """Send every ``X^A`` to ``X^(A M)`` (row vector times matrix)."""
    n = f.nvars
    if len(M) != n or any(len(row) != n for row in M):
        raise ValueError(f"transform must be {n}x{n}")
    if not _is_unimodular(M):
        raise ValueError("transform is not unimodular")
    trunc = f.trunc
    if trunc is not None:
        row_sums = [sum(row) for row in M]
        if min(row_sums) < 1:
            raise NotASeries("truncated input: omitted terms have no degree bound under this transform")
        trunc = (trunc + 1) * min(row_sums) - 1
    terms = {}
    for a, c in f.terms.items():
        new = tuple(sum(a[i] * M[i][j] for i in range(n)) for j in range(n))
        if any(x < 0 for x in new):
            mono = "*".join(f"X{j + 1}^{x}" for j, x in enumerate(new) if x)
            raise NotASeries(f"not a series under this transform: {mono}")
        terms[new] = c
    return TruncSeries(n, terms, trunc, f.tower)
