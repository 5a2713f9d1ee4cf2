"""Turn parsed expressions into field elements and series."""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

from seriesval.cli.parser import BigO, BinOp, Gen, Neg, Node, Num, Pow, Var, names_in, parse
from seriesval.field import FieldElem, FieldTower
from seriesval.rank2 import DEFAULT_WINDOW, LaurentTailSeries, format_rank2
from seriesval.series import ParamSeries, TruncSeries, format_param, format_series

INF = float("inf")

RANK2_VARS = ("u1", "u2")


class EvalError(ValueError):
    pass


class _Val:
    """Laurent polynomial plus, per grading, the degree from which terms are unknown."""

    __slots__ = ("terms", "bound")

    def __init__(self, terms: Dict[Tuple[int, ...], FieldElem], bound: Tuple[float, ...], gradings):
        self.bound = bound
        self.terms = {e: c for e, c in terms.items()
                      if not c.is_zero() and all(_deg(g, e) < b for g, b in zip(gradings, bound))}


def _deg(g, e):
    return sum(a * b for a, b in zip(g, e))


class _Evaluator:
    def __init__(self, tower: FieldTower, variables: Sequence[str], gradings: Sequence[Tuple[int, ...]]):
        self.tower = tower
        self.variables = list(variables)
        self.gradings = [tuple(g) for g in gradings]
        self.n = len(self.variables)
        self.exact = tuple(INF for _ in self.gradings)

    def make(self, terms, bound=None):
        return _Val(terms, self.exact if bound is None else bound, self.gradings)

    def const(self, c):
        return self.make({(0,) * self.n: self.tower.coerce(c)})

    def low(self, v: _Val, k: int):
        if v.terms:
            return min(_deg(self.gradings[k], e) for e in v.terms)
        return v.bound[k]

    def add(self, a, b, sign=1):
        terms = dict(a.terms)
        for e, c in b.terms.items():
            c = c if sign > 0 else -c
            terms[e] = terms[e] + c if e in terms else c
        return self.make(terms, tuple(min(x, y) for x, y in zip(a.bound, b.bound)))

    def mul(self, a, b):
        bound = tuple(min(a.bound[k] + self.low(b, k), b.bound[k] + self.low(a, k))
                      for k in range(len(self.gradings)))
        terms: Dict[Tuple[int, ...], FieldElem] = {}
        for ea, ca in a.terms.items():
            for eb, cb in b.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                v = ca * cb
                terms[e] = terms[e] + v if e in terms else v
        return self.make(terms, bound)

    def invert(self, v: _Val, node: Node):
        if len(v.terms) != 1 or any(b != INF for b in v.bound):
            raise EvalError(f"division at column {node.pos + 1} needs a field element or a monomial divisor")
        (e, c), = v.terms.items()
        return self.make({tuple(-x for x in e): c.inverse()})

    def eval(self, node: Node) -> _Val:
        if isinstance(node, Num):
            return self.const(node.value)
        if isinstance(node, (Var, Gen)):
            if node.name in self.variables:
                k = self.variables.index(node.name)
                return self.make({tuple(int(i == k) for i in range(self.n)): self.tower.one})
            if isinstance(node, Gen) and node.name in self.tower.names:
                return self.const(self.tower.gen(node.name))
            raise EvalError(f"unknown identifier {node.name!r} at column {node.pos + 1}")
        if isinstance(node, BigO):
            return self.make({}, tuple(float(node.order) for _ in self.gradings))
        if isinstance(node, Neg):
            v = self.eval(node.operand)
            return self.make({e: -c for e, c in v.terms.items()}, v.bound)
        if isinstance(node, Pow):
            base = self.eval(node.base)
            k = node.exponent
            if k < 0:
                base = self.invert(base, node)
                k = -k
            out = self.const(1)
            for _ in range(k):
                out = self.mul(out, base)
            return out
        if isinstance(node, BinOp):
            a = self.eval(node.left)
            b = self.eval(node.right)
            if node.op == "+":
                return self.add(a, b)
            if node.op == "-":
                return self.add(a, b, -1)
            if node.op == "*":
                return self.mul(a, b)
            if node.op == "/":
                return self.mul(a, self.invert(b, node))
        raise EvalError(f"cannot evaluate {node!r}")


def _as_node(x) -> Node:
    return parse(x) if isinstance(x, str) else x


# ----------------------------------------------------------------------------
# towers
# ----------------------------------------------------------------------------


def parse_adjoin(text: str) -> Tuple[str, Node]:
    """``"y: y^2 - u"`` -> ``("y", ast)``."""
    if ":" not in text:
        raise EvalError(f"adjoin {text!r} must look like 'y: y^2 - u'")
    name, poly = text.split(":", 1)
    name = name.strip()
    return name, parse(poly)


def build_tower(exprs: Sequence, adjoin: Sequence[str] = (), reserved: Sequence[str] = ()) -> FieldTower:
    """Transcendental generators are the unreserved names, in order of appearance."""
    specs = [parse_adjoin(s) for s in adjoin]
    algebraic = [name for name, _ in specs]
    names: List[str] = []
    for node in [_as_node(e) for e in exprs] + [poly for _, poly in specs]:
        for n in names_in(node):
            if n not in names and n not in reserved and n not in algebraic:
                names.append(n)
    tower = FieldTower(names)
    for name, poly in specs:
        v = _Evaluator(tower, [name], [(1,)]).eval(poly)
        if any(e[0] < 0 for e in v.terms):
            raise EvalError(f"minimal polynomial of {name!r} has a negative power")
        deg = max(e[0] for e in v.terms)
        coeffs = [v.terms.get((k,), tower.zero) for k in range(deg + 1)]
        tower = tower.adjoin(name, coeffs)
    return tower


def tower_description(tower: FieldTower) -> dict:
    from seriesval.series import format_terms
    ext = []
    for name, cs in tower.extensions:
        ext.append({"name": name, "minpoly": format_terms([((k,), c) for k, c in enumerate(cs) if not c.is_zero()],
                                                          [name])})
    return {"transcendentals": list(tower.transcendentals), "extensions": ext}


def tower_from_description(desc: dict) -> FieldTower:
    tower = FieldTower(desc.get("transcendentals", []))
    for e in desc.get("extensions", []):
        v = _Evaluator(tower, [e["name"]], [(1,)]).eval(parse(e["minpoly"]))
        deg = max(x[0] for x in v.terms)
        tower = tower.adjoin(e["name"], [v.terms.get((k,), tower.zero) for k in range(deg + 1)])
    return tower


# ----------------------------------------------------------------------------
# conversions
# ----------------------------------------------------------------------------


def field_elem(expr, tower: FieldTower) -> FieldElem:
    v = _Evaluator(tower, [], []).eval(_as_node(expr))
    if not v.terms:
        return tower.zero
    return v.terms[()]


def poly(expr, nvars: int, tower: FieldTower) -> TruncSeries:
    """A series in ``X1..Xn``; ``O(d)`` sets the truncation degree to ``d - 1``."""
    names = [f"X{i + 1}" for i in range(nvars)]
    node = _as_node(expr)
    v = _Evaluator(tower, names, [(1,) * nvars]).eval(node)
    for e in v.terms:
        if any(x < 0 for x in e):
            raise EvalError("negative exponent: not a power series")
    trunc = None if v.bound[0] == INF else int(v.bound[0]) - 1
    return TruncSeries(nvars, v.terms, trunc, tower)


def param_series(expr, tower: FieldTower, trunc: Optional[int] = None) -> ParamSeries:
    """A series in ``t`` without constant term, known through ``t^T``.

    ``T`` is ``d - 1`` from an ``O(d)`` marker, capped by ``trunc`` when given.
    """
    v = _Evaluator(tower, ["t"], [(1,)]).eval(_as_node(expr))
    T = None if v.bound[0] == INF else int(v.bound[0]) - 1
    if trunc is not None:
        T = trunc if T is None else min(T, trunc)
    if T is None:
        raise EvalError("parameter series need a truncation: add O(d) or pass --trunc")
    for (k,), c in v.terms.items():
        if k <= 0:
            raise EvalError("parameter series must have positive order (no constant or negative terms)")
    return ParamSeries.from_dict({k: c for (k,), c in v.terms.items()}, T, tower)


def rank2_series(expr, tower: FieldTower, window: int = DEFAULT_WINDOW) -> LaurentTailSeries:
    """A series in ``u1`` (power) and ``u2`` (Laurent); ``O(d)`` truncates both at ``d - 1``."""
    v = _Evaluator(tower, list(RANK2_VARS), [(1, 0), (0, 1)]).eval(_as_node(expr))
    if any(e[0] < 0 for e in v.terms):
        raise EvalError("negative power of u1")
    t1 = None if v.bound[0] == INF else int(v.bound[0]) - 1
    prec = None if v.bound[1] == INF else int(v.bound[1]) - 1
    if prec is not None and t1 is None:
        t1 = max([i for i, _ in v.terms] + [0])
    return LaurentTailSeries(v.terms, t1=t1, prec=prec, window=window, tower=tower)


def text_poly(f: TruncSeries) -> str:
    body = format_series(f)
    return body if f.trunc is None else f"{body} + O({f.trunc + 1})"


def text_param(s: ParamSeries) -> str:
    return format_param(s)


def text_rank2(w: LaurentTailSeries) -> str:
    return format_rank2(w)
