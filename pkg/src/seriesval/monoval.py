"""Monomial valuations of arbitrary rank and their residue fields.

A monomial valuation is fixed by an ``m x n`` value matrix whose columns are
the values of ``X_1, ..., X_n`` in ``Z^m`` (lex-ordered).  The value of a
series is the lex-minimum of the L-degrees over its support; truncated inputs
carry a certification flag saying whether omitted terms could still win.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Sequence, Tuple

from seriesval import lattice, linalg
from seriesval.field import FieldElem
from seriesval.series import ExpVector, TruncSeries

ValueVector = Tuple[int, ...]


class _Infinity:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


class UncertifiedValue(ValueError):
    pass


class ValueMismatch(ValueError):
    pass


@dataclass(frozen=True)
class CertifiedValue:
    value: object  # ValueVector or INFINITY
    certified: bool


class MonomialValuation:
    """The monomial valuation attached to the columns of ``B``."""

    def __init__(self, B: Sequence[Sequence[int]]):
        rows = [tuple(int(x) for x in row) for row in B]
        if not rows or not rows[0]:
            raise ValueError("empty value matrix")
        self.m = len(rows)
        self.n = len(rows[0])
        if any(len(r) != self.n for r in rows):
            raise ValueError("ragged value matrix")
        self.B = tuple(rows)
        self.columns = tuple(tuple(r[i] for r in rows) for i in range(self.n))
        for i, col in enumerate(self.columns):
            if any(x < 0 for x in col) or not any(col):
                raise ValueError(f"column {i + 1} must be nonzero and nonnegative, got {col}")
        if not lattice.generates_full_lattice(self.B):
            raise ValueError("columns do not generate Z^m")
        self.b_min = min(self.columns)
        self.kernel = tuple(lattice.kernel_basis(self.B))

    @classmethod
    def from_weights(cls, weights: Sequence[int]) -> "MonomialValuation":
        return cls([list(weights)])

    def __repr__(self):
        return f"MonomialValuation({[list(r) for r in self.B]})"

    def l_degree(self, A: Sequence[int]) -> ValueVector:
        if len(A) != self.n:
            raise ValueError(f"exponent needs {self.n} entries")
        if any(a < 0 for a in A):
            raise ValueError(f"negative exponent {tuple(A)}")
        return self._degree(A)

    def _degree(self, A: Sequence[int]) -> ValueVector:
        return tuple(sum(a * b for a, b in zip(A, row)) for row in self.B)

    def value(self, f: TruncSeries) -> CertifiedValue:
        """Lex-minimum L-degree over the visible support of ``f``."""
        if f.nvars != self.n:
            raise ValueError(f"series has {f.nvars} variables, valuation expects {self.n}")
        if f.is_zero():
            return CertifiedValue(INFINITY, f.trunc is None)
        best = min(self._degree(A) for A in f.terms)
        if f.trunc is None:
            return CertifiedValue(best, True)
        bound = tuple((f.trunc + 1) * x for x in self.b_min)
        return CertifiedValue(best, bound > best)

    def initial_form(self, f: TruncSeries) -> TruncSeries:
        cv = self.value(f)
        if not cv.certified:
            raise UncertifiedValue("value is not certified at this truncation")
        if cv.value is INFINITY:
            return f
        terms = {A: c for A, c in f.terms.items() if self._degree(A) == cv.value}
        return TruncSeries(f.nvars, terms, None, f.tower)

    def residue_generators(self) -> list[ExpVector]:
        """Exponents of the Laurent monomials generating the residue field."""
        return list(self.kernel)

    def kernel_coordinates(self, E: Sequence[int]) -> tuple[int, ...]:
        """Integer coordinates of a kernel vector in the residue generator basis."""
        if not self.kernel:
            if any(E):
                raise ValueError(f"{tuple(E)} is not in the kernel")
            return ()
        rows = [[Fraction(v[i]) for v in self.kernel] for i in range(self.n)]
        sol = linalg.solve(rows, [Fraction(e) for e in E])
        if sol is None or any(x.denominator != 1 for x in sol):
            raise ValueError(f"{tuple(E)} is not in the kernel lattice")
        return tuple(int(x) for x in sol)

    def residue_of(self, f: TruncSeries, g: TruncSeries) -> "LaurentRatio":
        """Residue of ``f/g`` as a ratio of polynomials in the generators."""
        vf, vg = self.value(f), self.value(g)
        if not (vf.certified and vg.certified):
            raise UncertifiedValue("residue needs certified values")
        if vf.value is INFINITY or vg.value is INFINITY:
            raise ValueMismatch("residue of a quotient involving zero")
        if vf.value != vg.value:
            raise ValueMismatch(f"values differ: {vf.value} vs {vg.value}")
        fB, gB = self.initial_form(f), self.initial_form(g)
        C = min(gB.terms)
        num = {self.kernel_coordinates([a - c for a, c in zip(A, C)]): v for A, v in fB.terms.items()}
        den = {self.kernel_coordinates([a - c for a, c in zip(A, C)]): v for A, v in gB.terms.items()}
        return LaurentRatio.normalized(num, den, len(self.kernel))


@dataclass(frozen=True)
class LaurentRatio:
    """``P(w) / Q(w)`` with P, Q polynomials in the residue generators ``w_j``."""

    num: Dict[Tuple[int, ...], FieldElem]
    den: Dict[Tuple[int, ...], FieldElem]
    ngens: int

    @classmethod
    def normalized(cls, num, den, ngens: int) -> "LaurentRatio":
        shift = [min([e[j] for e in num] + [e[j] for e in den] + [0]) for j in range(ngens)]

        def move(d):
            return {tuple(x - s for x, s in zip(e, shift)): c for e, c in d.items()}

        num, den = move(num), move(den)
        if len(den) == 1:
            # single-monomial denominator: reduce the common monomial factor
            common = [min(e[j] for e in list(num) + list(den)) for j in range(ngens)]
            num = {tuple(x - s for x, s in zip(e, common)): c for e, c in num.items()}
            den = {tuple(x - s for x, s in zip(e, common)): c for e, c in den.items()}
        lead = den[max(den)]
        return cls({e: c / lead for e, c in num.items()}, {e: c / lead for e, c in den.items()}, ngens)

    def names(self) -> list[str]:
        return [f"w{j + 1}" for j in range(self.ngens)]

    def is_one(self) -> bool:
        return self.num == self.den

    def __str__(self):
        from seriesval.series import format_terms
        names = self.names()
        n = format_terms(self.num.items(), names)
        d = format_terms(self.den.items(), names)
        if d == "1":
            return n
        if len(self.num) > 1:
            n = f"({n})"
        if len(self.den) > 1:
            d = f"({d})"
        return f"{n}/{d}"


# functional spellings of the methods


def l_degree(V: MonomialValuation, A: Sequence[int]) -> ValueVector:
    return V.l_degree(A)


def v_L(V: MonomialValuation, f: TruncSeries) -> CertifiedValue:
    return V.value(f)


def initial_form(V: MonomialValuation, f: TruncSeries) -> TruncSeries:
    return V.initial_form(f)


def residue_generators(V: MonomialValuation) -> list[ExpVector]:
    return V.residue_generators()


def residue_of(V: MonomialValuation, f: TruncSeries, g: TruncSeries) -> LaurentRatio:
    return V.residue_of(f, g)
