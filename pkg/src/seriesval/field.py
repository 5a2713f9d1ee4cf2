"""Exact characteristic-zero coefficient fields.

A :class:`FieldTower` is ``Q(u_1, ..., u_r)`` followed by a chain of simple
algebraic extensions ``K_{i+1} = K_i[y_i] / (m_i(y_i))``.  Level zero stores
reduced fractions of polynomials (sympy ``PolyRing`` over ``QQ`` with
graded-lex order, denominators normalized to leading coefficient 1); every
algebraic level stores coefficient tuples of length ``deg m_i`` over the level
below.  Representations are canonical, so equality is representation equality.

Derivations ``d/du_i`` extend uniquely to the algebraic levels (char 0), which
gives the Jacobian transcendence test on every tower, algebraic or not.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from sympy import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyRing

from seriesval import linalg

__all__ = [
    "FieldError",
    "TowerMismatch",
    "UnsupportedTower",
    "ResidueNotRepresentable",
    "FieldTower",
    "FieldElem",
    "RATIONALS",
    "field_arith",
    "is_constant",
    "is_algebraic_over_base",
    "transcendence_test",
    "jacobian_rank",
    "rational_rows",
]


class FieldError(ValueError):
    pass


class TowerMismatch(FieldError):
    pass


class UnsupportedTower(FieldError):
    pass


class ResidueNotRepresentable(FieldError):
    pass


def _to_fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


# --------------------------------------------------------------------------
# level 0: Q(u_1, ..., u_r)
# --------------------------------------------------------------------------


class _Base:
    def __init__(self, names: Sequence[str]):
        self.names = tuple(names)
        self.ring = PolyRing(self.names, QQ, grlex)
        self.zero = (self.ring.zero, self.ring.one)
        self.one = (self.ring.one, self.ring.one)

    def norm(self, num, den):
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return self.zero
        if den.is_ground:
            c = den.LC
            return (num.quo_ground(c) if c != 1 else num, self.ring.one)
        num, den = num.cancel(den)
        c = den.LC
        if c != 1:
            num, den = num.quo_ground(c), den.quo_ground(c)
        return (num, den)

    def const(self, q) -> tuple:
        q = QQ(q.numerator, q.denominator) if isinstance(q, Fraction) else QQ(q)
        return (self.ring.ground_new(q), self.ring.one)

    def gen(self, i):
        return (self.ring.gens[i], self.ring.one)

    def is_zero(self, a) -> bool:
        return not a[0]

    def add(self, a, b):
        if not a[0]:
            return b
        if not b[0]:
            return a
        if a[1] == b[1]:
            if a[1] == self.ring.one:
                return (a[0] + b[0], a[1])
            return self.norm(a[0] + b[0], a[1])
        return self.norm(a[0] * b[1] + b[0] * a[1], a[1] * b[1])

    def neg(self, a):
        return (-a[0], a[1])

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if not a[0] or not b[0]:
            return self.zero
        if a[1] == self.ring.one and b[1] == self.ring.one:
            return (a[0] * b[0], a[1])
        return self.norm(a[0] * b[0], a[1] * b[1])

    def inv(self, a):
        if not a[0]:
            raise ZeroDivisionError("division by zero field element")
        return self.norm(a[1], a[0])

    def diff(self, a, i):
        x = self.ring.gens[i]
        num, den = a
        return self.norm(num.diff(x) * den - num * den.diff(x), den * den)

    def is_rational(self, a) -> bool:
        return a[0].is_ground and a[1].is_ground

    def rational_value(self, a) -> Fraction:
        return _to_fraction(a[0].LC) if a[0] else Fraction(0)

    def pieces(self, a, path=()):
        yield path, a

    def fmt(self, a) -> str:
        num, den = a
        s = _fmt_poly(num, self.names)
        if den == self.ring.one:
            return s
        if len(num) > 1 or s.startswith("-"):
            s = f"({s})"
        d = _fmt_poly(den, self.names)
        return f"{s}/({d})"


def _fmt_poly(p, names) -> str:
    if not p:
        return "0"
    parts = []
    for monom, c in p.terms(grlex):
        c = _to_fraction(c)
        factors = []
        for name, e in zip(names, monom):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        sign = "-" if c < 0 else "+"
        c = abs(c)
        if not factors:
            body = str(c)
        elif c == 1:
            body = "*".join(factors)
        else:
            body = "*".join([str(c)] + factors)
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# --------------------------------------------------------------------------
# algebraic levels
# --------------------------------------------------------------------------


class _Algebraic:
    def __init__(self, base, name: str, minpoly: Sequence):
        self.base = base
        self.name = name
        self.m = tuple(minpoly)  # c_0 .. c_d, c_d == base.one
        self.deg = len(self.m) - 1
        self.zero = (base.zero,) * self.deg
        self.one = self.lift(base.one)
        self._dy_cache: dict[int, tuple] = {}

    def lift(self, b):
        return (b,) + (self.base.zero,) * (self.deg - 1)

    def gen(self):
        return (self.base.zero, self.base.one) + (self.base.zero,) * (self.deg - 2)

    def is_zero(self, a) -> bool:
        return all(self.base.is_zero(c) for c in a)

    def add(self, a, b):
        return tuple(self.base.add(x, y) for x, y in zip(a, b))

    def neg(self, a):
        return tuple(self.base.neg(x) for x in a)

    def sub(self, a, b):
        return tuple(self.base.sub(x, y) for x, y in zip(a, b))

    def _reduce(self, coeffs: list):
        B = self.base
        d = self.deg
        for p in range(len(coeffs) - 1, d - 1, -1):
            c = coeffs[p]
            if B.is_zero(c):
                continue
            for k in range(d):
                if not B.is_zero(self.m[k]):
                    coeffs[p - d + k] = B.sub(coeffs[p - d + k], B.mul(c, self.m[k]))
            coeffs[p] = B.zero
        coeffs = coeffs[:d] + [B.zero] * (d - len(coeffs))
        return tuple(coeffs)

    def mul(self, a, b):
        B = self.base
        out = [B.zero] * (2 * self.deg - 1)
        for i, x in enumerate(a):
            if B.is_zero(x):
                continue
            for j, y in enumerate(b):
                if B.is_zero(y):
                    continue
                out[i + j] = B.add(out[i + j], B.mul(x, y))
        return self._reduce(out)

    # univariate polynomials over the base level, as trimmed lists
    def _trim(self, p):
        p = list(p)
        while p and self.base.is_zero(p[-1]):
            p.pop()
        return p

    def _pdivmod(self, a, b):
        B = self.base
        a = self._trim(a)
        b = self._trim(b)
        q = [B.zero] * max(len(a) - len(b) + 1, 0)
        inv_lc = B.inv(b[-1])
        while len(a) >= len(b) and a:
            shift = len(a) - len(b)
            c = B.mul(a[-1], inv_lc)
            q[shift] = c
            for k, bk in enumerate(b):
                a[shift + k] = B.sub(a[shift + k], B.mul(c, bk))
            a = self._trim(a)
        return q, a

    def _pmul(self, a, b):
        B = self.base
        if not a or not b:
            return []
        out = [B.zero] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] = B.add(out[i + j], B.mul(x, y))
        return self._trim(out)

    def _psub(self, a, b):
        B = self.base
        n = max(len(a), len(b))
        a = list(a) + [B.zero] * (n - len(a))
        b = list(b) + [B.zero] * (n - len(b))
        return self._trim([B.sub(x, y) for x, y in zip(a, b)])

    def inv(self, a):
        B = self.base
        r0, r1 = self._trim(self.m), self._trim(a)
        if not r1:
            raise ZeroDivisionError("division by zero field element")
        s0, s1 = [], [B.one]
        while r1:
            q, r = self._pdivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, self._psub(s0, self._pmul(q, s1))
        # r0 is a nonzero constant since the minimal polynomial is irreducible
        c = B.inv(r0[0])
        s = [B.mul(c, x) for x in s0]
        return self._reduce(s + [B.zero] * max(0, self.deg - len(s)))

    def _eval_coeffs(self, coeffs):
        """Element sum c_k y^k for base-level coefficients c_k."""
        return self._reduce(list(coeffs) + [self.base.zero] * max(0, self.deg - len(coeffs)))

    def _dy(self, i):
        if i not in self._dy_cache:
            B = self.base
            dm = self._eval_coeffs([B.diff(c, i) for c in self.m])
            mprime = self._eval_coeffs([B.mul(B_const(B, k), c) for k, c in enumerate(self.m)][1:])
            self._dy_cache[i] = self.neg(self.mul(dm, self.inv(mprime)))
        return self._dy_cache[i]

    def diff(self, a, i):
        B = self.base
        direct = tuple(B.diff(c, i) for c in a)
        da = self._eval_coeffs([B.mul(B_const(B, k), c) for k, c in enumerate(a)][1:])
        if self.is_zero(da):
            return direct
        return self.add(direct, self.mul(da, self._dy(i)))

    def is_rational(self, a) -> bool:
        return all(self.base.is_zero(c) for c in a[1:]) and self.base.is_rational(a[0])

    def rational_value(self, a) -> Fraction:
        return self.base.rational_value(a[0])

    def pieces(self, a, path=()):
        for k, c in enumerate(a):
            yield from self.base.pieces(c, path + (k,))

    def fmt(self, a) -> str:
        terms = []
        for k, c in enumerate(a):
            if self.base.is_zero(c):
                continue
            s = self.base.fmt(c)
            if k == 0:
                terms.append(s)
                continue
            y = self.name if k == 1 else f"{self.name}^{k}"
            if s == "1":
                terms.append(y)
            elif s == "-1":
                terms.append(f"-{y}")
            else:
                terms.append(f"({s})*{y}")
        if not terms:
            return "0"
        out = terms[0]
        for t in terms[1:]:
            out += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
        return out


def B_const(level, k: int):
    if isinstance(level, _Algebraic):
        return level.lift(B_const(level.base, k))
    return level.const(k)


# --------------------------------------------------------------------------
# public types
# --------------------------------------------------------------------------


class FieldTower:
    """``Q(u_1..u_r)`` with optional simple algebraic extensions on top.

    >>> T = FieldTower(["u"]).adjoin("y", [-FieldTower(["u"]).gen("u"), 0, 1])
    >>> y = T.gen("y"); y * y == T.gen("u")
    True
    """

    def __init__(self, transcendentals: Iterable[str] = ()):
        names = tuple(transcendentals)
        if len(set(names)) != len(names):
            raise FieldError(f"duplicate generator names in {names}")
        self.transcendentals = names
        self.extensions: tuple[tuple[str, tuple["FieldElem", ...]], ...] = ()
        self._level = _Base(names)
        self._base = self._level
        self._below: FieldTower | None = None

    # construction -------------------------------------------------------
    def adjoin(self, name: str, coeffs: Sequence) -> "FieldTower":
        """Adjoin a root of the monic polynomial ``sum coeffs[k] * Y^k``.

        Coefficients are elements (or rationals) of this tower, lowest degree
        first.  Irreducibility is checked by factorization, degrees 2..4, on
        top of a purely transcendental tower only.
        """
        if name in self.names:
            raise FieldError(f"generator name {name!r} already used")
        cs = [self.coerce(c) for c in coeffs]
        deg = len(cs) - 1
        if deg < 2 or deg > 4:
            raise FieldError(f"minimal polynomial degree must be 2..4, got {deg}")
        if cs[-1] != self.one:
            raise FieldError("minimal polynomial must be monic")
        if self.extensions:
            raise UnsupportedTower("irreducibility check needs a purely transcendental base")
        if not _irreducible_over_base(self._base, [c.rep for c in cs]):
            raise FieldError(f"minimal polynomial for {name!r} is reducible")
        out = FieldTower.__new__(FieldTower)
        out.transcendentals = self.transcendentals
        out.extensions = self.extensions + ((name, tuple(cs)),)
        out._base = self._base
        out._level = _Algebraic(self._level, name, [c.rep for c in cs])
        out._below = self
        return out

    # identity ------------------------------------------------------------
    @property
    def names(self) -> tuple[str, ...]:
        return self.transcendentals + tuple(n for n, _ in self.extensions)

    def _key(self):
        return (self.transcendentals, tuple((n, tuple(c.rep for c in cs)) for n, cs in self.extensions))

    def __eq__(self, other):
        return self is other or (isinstance(other, FieldTower) and self._key() == other._key())

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        ext = "".join(f", {n}: {_fmt_minpoly(n, cs)}" for n, cs in self.extensions)
        return f"FieldTower({list(self.transcendentals)}{ext})"

    @property
    def is_purely_transcendental(self) -> bool:
        return not self.extensions

    # elements -------------------------------------------------------------
    @property
    def zero(self) -> "FieldElem":
        return FieldElem(self, self._level.zero)

    @property
    def one(self) -> "FieldElem":
        return FieldElem(self, self._level.one)

    def constant(self, q) -> "FieldElem":
        return FieldElem(self, self._lift_from_base(self._base.const(Fraction(q))))

    def gen(self, name: str) -> "FieldElem":
        if name in self.transcendentals:
            return FieldElem(self, self._lift_from_base(self._base.gen(self.transcendentals.index(name))))
        tower = self
        while tower.extensions:
            if tower.extensions[-1][0] == name:
                return self.lift(FieldElem(tower, tower._level.gen()))
            tower = tower._below
        raise FieldError(f"unknown generator {name!r}")

    def _lift_from_base(self, rep):
        levels = []
        lv = self._level
        while isinstance(lv, _Algebraic):
            levels.append(lv)
            lv = lv.base
        for lv in reversed(levels):
            rep = lv.lift(rep)
        return rep

    def lift(self, elem: "FieldElem") -> "FieldElem":
        """Embed an element of a lower tower of this one."""
        if elem.tower == self:
            return elem
        if not elem.tower.names:
            return self.constant(elem.to_fraction())
        chain = []
        tower = self
        while tower is not None and tower != elem.tower:
            chain.append(tower)
            tower = tower._below
        if tower is None:
            raise TowerMismatch(f"{elem.tower!r} is not below {self!r}")
        rep = elem.rep
        for t in reversed(chain):
            rep = t._level.lift(rep)
        return FieldElem(self, rep)

    def coerce(self, x) -> "FieldElem":
        if isinstance(x, FieldElem):
            if x.tower == self:
                return x
            return self.lift(x)
        if isinstance(x, (int, Fraction)):
            return self.constant(x)
        if hasattr(x, "numerator") and hasattr(x, "denominator"):
            return self.constant(Fraction(int(x.numerator), int(x.denominator)))
        raise TypeError(f"cannot coerce {x!r} into {self!r}")


def _fmt_minpoly(name, cs) -> str:
    parts = []
    for k in range(len(cs) - 1, -1, -1):
        c = cs[k]
        if c.is_zero():
            continue
        mon = "" if k == 0 else (name if k == 1 else f"{name}^{k}")
        s = str(c)
        if not mon:
            parts.append(f"({s})")
        elif s == "1":
            parts.append(mon)
        else:
            parts.append(f"({s})*{mon}")
    return " + ".join(parts)


def _irreducible_over_base(base: _Base, coeffs) -> bool:
    ring = base.ring
    lcm = ring.one
    for num, den in coeffs:
        lcm = lcm.lcm(den)
    ext = PolyRing(base.names + ("_Y_",), QQ, grlex)
    Y = ext.gens[-1]
    poly = ext.zero
    for k, (num, den) in enumerate(coeffs):
        scaled = num * lcm.exquo(den)
        poly += ext.from_dict({m + (0,): c for m, c in scaled.terms()}) * Y**k
    _, factors = poly.factor_list()
    ydeg = [(f.degree(Y), mult) for f, mult in factors if f.degree(Y) > 0]
    return len(ydeg) == 1 and ydeg[0][1] == 1


class FieldElem:
    """Immutable element of a :class:`FieldTower` in canonical form."""

    __slots__ = ("tower", "rep", "_hash")

    def __init__(self, tower: FieldTower, rep):
        self.tower = tower
        self.rep = rep
        self._hash = None

    def _other(self, other) -> "FieldElem | None":
        if isinstance(other, FieldElem):
            if other.tower is not self.tower and other.tower != self.tower:
                raise TowerMismatch("field elements from different towers")
            return other
        if isinstance(other, (int, Fraction)):
            return self.tower.constant(other)
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return FieldElem(self.tower, self.tower._level.add(self.rep, o.rep))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return FieldElem(self.tower, self.tower._level.sub(self.rep, o.rep))

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return FieldElem(self.tower, self.tower._level.mul(self.rep, o.rep))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __neg__(self):
        return FieldElem(self.tower, self.tower._level.neg(self.rep))

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.tower.one
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inverse(self) -> "FieldElem":
        return FieldElem(self.tower, self.tower._level.inv(self.rep))

    def is_zero(self) -> bool:
        return self.tower._level.is_zero(self.rep)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.tower == other.tower and self.rep == other.rep
        if isinstance(other, (int, Fraction)):
            return self.rep == self.tower.constant(other).rep
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.rep)
        return self._hash

    def derivative(self, i: int) -> "FieldElem":
        """Partial derivative with respect to the i-th transcendental generator."""
        return FieldElem(self.tower, self.tower._level.diff(self.rep, i))

    def to_fraction(self) -> Fraction:
        if not is_constant(self):
            raise FieldError(f"{self} is not rational")
        return self.tower._level.rational_value(self.rep)

    def __str__(self):
        return self.tower._level.fmt(self.rep)

    def __repr__(self):
        return f"FieldElem({self})"


RATIONALS = FieldTower()


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------


def field_arith(a: FieldElem, b: FieldElem, op: str) -> FieldElem:
    if a.tower != b.tower:
        raise TowerMismatch("field elements from different towers")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def is_constant(a: FieldElem) -> bool:
    """True iff ``a`` lies in the rational base field."""
    return a.tower._level.is_rational(a.rep)


def _jacobian(elems: Sequence[FieldElem], r: int):
    return [[e.derivative(i) for i in range(r)] for e in elems]


def jacobian_rank(elems: Sequence[FieldElem]) -> int:
    """Rank over the tower of the Jacobian w.r.t. the transcendental generators.

    In characteristic zero this is the transcendence degree over ``Q`` of the
    field generated by ``elems``.
    """
    if not elems:
        return 0
    r = len(elems[0].tower.transcendentals)
    if r == 0:
        return 0
    return linalg.rank(_jacobian(elems, r))


def is_algebraic_over_base(a: FieldElem) -> bool:
    """True iff ``a`` is algebraic over ``Q`` (all partial derivatives vanish)."""
    return all(a.derivative(i).is_zero() for i in range(len(a.tower.transcendentals)))


def transcendence_test(f: FieldElem, gens: Sequence[FieldElem]) -> str:
    """``"independent"`` iff ``f`` is transcendental over ``Q(gens)``."""
    for g in gens:
        if g.tower != f.tower:
            raise TowerMismatch("field elements from different towers")
    lower = jacobian_rank(list(gens))
    return "independent" if jacobian_rank(list(gens) + [f]) > lower else "dependent"


def rational_rows(elems: Sequence[FieldElem]) -> list[list[Fraction]]:
    """Split one linear relation over the tower into relations over ``Q``.

    ``sum x_k * elems[k] == 0`` with rational unknowns ``x_k`` holds iff every
    returned row ``r`` satisfies ``sum x_k * r[k] == 0``.
    """
    if not elems:
        return []
    tower = elems[0].tower
    base = tower._base
    pieces = [list(tower._level.pieces(e.rep)) for e in elems]
    lcm = base.ring.one
    for ps in pieces:
        for _, (num, den) in ps:
            if num:
                lcm = lcm.lcm(den)
    rows: dict[tuple, list[Fraction]] = {}
    for k, ps in enumerate(pieces):
        for path, (num, den) in ps:
            if not num:
                continue
            scaled = num * lcm.exquo(den)
            for monom, c in scaled.terms():
                row = rows.setdefault((path, monom), [Fraction(0)] * len(elems))
                row[k] += _to_fraction(c)
    return list(rows.values())
