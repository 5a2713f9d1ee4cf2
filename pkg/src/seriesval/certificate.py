"""Replayable records of blow-ups and coordinate changes.

A certificate lists the transform steps an engine applied to the images of
``X_1..X_n`` and the terminal data it stopped at.  Two things can be done with
it without trusting the engine:

* :func:`replay` re-executes the steps on the input images (blow-ups are driven
  by their recorded exponent matrices, so a corrupted matrix is caught);
* :func:`original_in_final` inverts the steps symbolically, writing every
  ``X_i`` as a Laurent polynomial in the final coordinates, which is what
  certificate-derived values are computed from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from seriesval import lattice
from seriesval.field import FieldElem, FieldTower
from seriesval.series import NotASeries, format_terms

Exp = Tuple[int, ...]


class ReplayError(ValueError):
    pass


# ----------------------------------------------------------------------------
# Laurent polynomials over a tower
# ----------------------------------------------------------------------------


class LaurentPoly:
    """Finite sum ``c_E z^E`` with integer (possibly negative) exponents."""

    __slots__ = ("n", "terms", "tower")

    def __init__(self, n: int, terms: Dict[Exp, FieldElem], tower: FieldTower):
        self.n = n
        self.tower = tower
        self.terms = {tuple(e): c for e, c in terms.items() if not c.is_zero()}

    @classmethod
    def variable(cls, i: int, n: int, tower: FieldTower) -> "LaurentPoly":
        return cls(n, {tuple(int(j == i) for j in range(n)): tower.one}, tower)

    @classmethod
    def monomial(cls, exp: Sequence[int], tower: FieldTower, coeff=None) -> "LaurentPoly":
        return cls(len(exp), {tuple(exp): tower.one if coeff is None else tower.coerce(coeff)}, tower)

    @classmethod
    def constant(cls, c, n: int, tower: FieldTower) -> "LaurentPoly":
        return cls(n, {(0,) * n: tower.coerce(c)}, tower)

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms[e] + c if e in terms else c
        return LaurentPoly(self.n, terms, self.tower)

    def __neg__(self):
        return LaurentPoly(self.n, {e: -c for e, c in self.terms.items()}, self.tower)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            c = self.tower.coerce(other)
            return LaurentPoly(self.n, {e: c * v for e, v in self.terms.items()}, self.tower)
        terms: Dict[Exp, FieldElem] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                v = ca * cb
                terms[e] = terms[e] + v if e in terms else v
        return LaurentPoly(self.n, terms, self.tower)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            if not self.is_monomial():
                raise ReplayError("negative power of a non-monomial")
            (e, c), = self.terms.items()
            return LaurentPoly(self.n, {tuple(k * x for x in e): c ** k}, self.tower)
        out = LaurentPoly.constant(1, self.n, self.tower)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and self.n == other.n and self.terms == other.terms

    def compose(self, images: Sequence["LaurentPoly"]) -> "LaurentPoly":
        """Substitute ``z_i -> images[i]``."""
        if not images:
            return self
        m = images[0].n
        out = LaurentPoly(m, {}, self.tower)
        cache: Dict[Tuple[int, int], LaurentPoly] = {}
        for e, c in self.terms.items():
            term = LaurentPoly.constant(c, m, self.tower)
            for i, k in enumerate(e):
                if k:
                    if (i, k) not in cache:
                        cache[(i, k)] = images[i] ** k
                    term = term * cache[(i, k)]
            out = out + term
        return out

    def homogeneous_parts(self) -> Dict[int, "LaurentPoly"]:
        parts: Dict[int, Dict[Exp, FieldElem]] = {}
        for e, c in self.terms.items():
            parts.setdefault(sum(e), {})[e] = c
        return {d: LaurentPoly(self.n, t, self.tower) for d, t in parts.items()}

    def evaluate(self, values: Sequence[FieldElem]) -> FieldElem:
        out = self.tower.zero
        for e, c in self.terms.items():
            term = c
            for v, k in zip(values, e):
                if k:
                    term = term * v ** k
            out = out + term
        return out

    def to_str(self, names: Sequence[str]) -> str:
        return format_terms(self.terms.items(), names) if self.terms else "0"

    def __repr__(self):
        return f"LaurentPoly({self.to_str([f'z{i + 1}' for i in range(self.n)])})"


# ----------------------------------------------------------------------------
# steps and outcomes
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class TransformStep:
    """One transform.  Indices are 0-based; traces print them 1-based.

    ``matrix`` (blow-ups, reorders) has as row j the exponent vector of the new
    coordinate j in the old coordinates.
    """

    kind: str  # "blowup" | "coordinate_change" | "reorder"
    trace: str
    matrix: Optional[Tuple[Tuple[int, ...], ...]] = None
    divisor: Optional[int] = None
    dividend: Optional[int] = None
    index: Optional[int] = None
    coefficient: Optional[FieldElem] = None
    monomial: Optional[Exp] = None
    permutation: Optional[Tuple[int, ...]] = None

    @classmethod
    def blowup(cls, n: int, divisor: int, dividend: int, trace: str) -> "TransformStep":
        M = [list(row) for row in lattice.identity(n)]
        M[dividend][divisor] = -1
        return cls("blowup", trace, tuple(map(tuple, M)), divisor=divisor, dividend=dividend)

    @classmethod
    def coordinate_change(cls, index: int, coefficient: FieldElem, monomial: Exp, trace: str) -> "TransformStep":
        if monomial[index]:
            raise ValueError("a coordinate change may not involve its own coordinate")
        return cls("coordinate_change", trace, index=index, coefficient=coefficient, monomial=tuple(monomial))

    @classmethod
    def reorder(cls, permutation: Sequence[int], trace: str) -> "TransformStep":
        n = len(permutation)
        M = tuple(tuple(int(j == permutation[i]) for j in range(n)) for i in range(n))
        return cls("reorder", trace, M, permutation=tuple(permutation))


@dataclass
class Monomial2:
    """Two equally valued coordinates whose residue ratio is transcendental."""

    coords: tuple
    residue: FieldElem
    common_order: int
    kind: str = field(default="Monomial2", init=False)


@dataclass
class OutcomeA:
    coords: tuple                    # (z1, z2)
    residue: FieldElem
    common_order: int
    containment: Tuple[LaurentPoly, ...]   # X_i = h_i(z1, z2), rational coefficients
    checked_through: int
    kind: str = field(default="OutcomeA", init=False)


@dataclass
class Expansion:
    """``z = sum coeffs[j-1] * z1^j + O(z1^(precision+1))``."""

    coeffs: Tuple[FieldElem, ...]
    precision: int


@dataclass
class OutcomeB:
    coords: tuple                    # (z1, z2, z3)
    common_order: int
    residue: FieldElem               # u = u_{2,1}
    expansions: Tuple[Expansion, Expansion]   # of z2 and z3 in powers of z1
    u3: Tuple[FieldElem, ...]        # z3 in powers of z2/u, so that z2 = u * z1
    u3_precision: int
    j0: Optional[int]
    transcendence: str               # "found" | "not found within truncation" | "unsupported"
    kind: str = field(default="OutcomeB", init=False)

    def residue_field_generators(self) -> list[FieldElem]:
        gens = [self.residue]
        for c in self.u3:
            if not c.is_zero() and c not in gens:
                gens.append(c)
        return gens


@dataclass
class Rank2Monomial:
    coords: tuple
    values: Tuple[Tuple[int, int], Tuple[int, int]]
    det: int
    kind: str = field(default="Monomial", init=False)


@dataclass
class BudgetExhausted:
    reason: str
    coords: tuple
    infinite_process_candidate: bool = False
    kind: str = field(default="BudgetExhausted", init=False)


@dataclass
class Certificate:
    """Input images, transform steps, terminal outcome."""

    rank: int                        # 1 or 2
    tower: FieldTower
    images: tuple
    steps: List[TransformStep]
    outcome: object
    drops: int = 0
    initial_min_order: Optional[int] = None
    notes: List[str] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.images)

    @property
    def exhausted(self) -> bool:
        return isinstance(self.outcome, BudgetExhausted)


# ----------------------------------------------------------------------------
# replay and inversion
# ----------------------------------------------------------------------------


def _laurent_monomial(coords, exps):
    num = None
    den = None
    for z, e in zip(coords, exps):
        if e > 0:
            p = z ** e
            num = p if num is None else num * p
        elif e < 0:
            p = z ** (-e)
            den = p if den is None else den * p
    if num is None:
        raise ReplayError("transform produces a coordinate of nonpositive value")
    if den is None:
        return num
    try:
        return num.divide(den)
    except (NotASeries, ZeroDivisionError) as exc:
        raise ReplayError(f"transform does not produce a series: {exc}") from exc


def apply_step(coords: Sequence, step: TransformStep) -> list:
    coords = list(coords)
    n = len(coords)
    if step.kind in ("blowup", "reorder"):
        M = step.matrix
        if M is None or len(M) != n or any(len(r) != n for r in M):
            raise ReplayError(f"step matrix has the wrong shape: {M}")
        if abs(lattice.determinant(M)) != 1:
            raise ReplayError(f"step matrix is not unimodular: {M}")
        out = []
        for j, row in enumerate(M):
            if all(x == int(i == j) for i, x in enumerate(row)):
                out.append(coords[j])
            else:
                out.append(_laurent_monomial(coords, row))
        return out
    if step.kind == "coordinate_change":
        i = step.index
        term = _laurent_monomial(coords, step.monomial).scale(step.coefficient)
        coords[i] = coords[i] - term
        return coords
    raise ReplayError(f"unknown step kind {step.kind!r}")


def replay(cert: Certificate) -> list:
    coords = list(cert.images)
    for k, step in enumerate(cert.steps):
        try:
            coords = apply_step(coords, step)
        except ReplayError as exc:
            raise ReplayError(f"step {k + 1} ({step.trace}): {exc}") from exc
    return coords


def original_in_final(cert: Certificate) -> list[LaurentPoly]:
    """Each original ``X_i`` as a Laurent polynomial in the final coordinates."""
    n, tower = cert.n, cert.tower
    exprs = [LaurentPoly.variable(i, n, tower) for i in range(n)]
    for step in cert.steps:
        # previous coordinates written in terms of the next ones
        if step.kind in ("blowup", "reorder"):
            inv = lattice.inverse_unimodular(step.matrix)
            back = [LaurentPoly.monomial(row, tower) for row in inv]
        elif step.kind == "coordinate_change":
            back = [LaurentPoly.variable(i, n, tower) for i in range(n)]
            back[step.index] = back[step.index] + LaurentPoly.monomial(step.monomial, tower, step.coefficient)
        else:
            raise ReplayError(f"unknown step kind {step.kind!r}")
        exprs = [e.compose(back) for e in exprs]
    return exprs
