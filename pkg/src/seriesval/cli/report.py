"""JSON reports and certificate serialization.

Field elements and parameter series travel as text in the CLI grammar;
rank-two series, whose precision varies per stratum, travel as structured
objects with a text rendering alongside.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Dict, List, Optional

from seriesval.certificate import (
    BudgetExhausted,
    Certificate,
    Expansion,
    LaurentPoly,
    Monomial2,
    OutcomeA,
    OutcomeB,
    Rank2Monomial,
    TransformStep,
)
from seriesval.cli.evaluate import (
    _Evaluator,
    field_elem,
    param_series,
    text_param,
    text_rank2,
    tower_description,
    tower_from_description,
)
from seriesval.cli.parser import parse
from seriesval.field import FieldTower
from seriesval.rank2 import LaurentTailSeries, _Strip
from seriesval.series import ParamSeries

SCHEMA_VERSION = "1.0"


def load_schema() -> dict:
    return json.loads(resources.files("seriesval.cli").joinpath("report.schema.json").read_text())


@dataclass
class Report:
    command: str
    argv: List[str]
    inputs: Dict[str, Any]
    outcome: Dict[str, Any]
    budgets: Dict[str, Any] = field(default_factory=dict)
    certified: Optional[bool] = None
    seed: Optional[int] = None
    certificate: Optional[Dict[str, Any]] = None
    trace: List[str] = field(default_factory=list)
    exit_code: int = 0

    def to_json(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "argv": list(self.argv),
            "inputs": self.inputs,
            "outcome": self.outcome,
            "budgets": self.budgets,
            "certified": self.certified,
            "seed": self.seed,
            "certificate": self.certificate,
            "trace": list(self.trace),
            "exit_code": self.exit_code,
        }

    @classmethod
    def from_json(cls, d: Dict[str, Any]) -> "Report":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {d.get('schema_version')!r}")
        return cls(d["command"], list(d["argv"]), d["inputs"], d["outcome"], d.get("budgets", {}),
                   d.get("certified"), d.get("seed"), d.get("certificate"), list(d.get("trace", [])),
                   d.get("exit_code", 0))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


# ----------------------------------------------------------------------------
# pieces
# ----------------------------------------------------------------------------


def rank2_to_json(w: LaurentTailSeries) -> Dict[str, Any]:
    return {
        "text": text_rank2(w),
        "t1": w.t1,
        "window": w.window,
        "strata": [{"prec": s.prec, "terms": [[j, str(c)] for j, c in sorted(s.terms.items())]}
                   for s in w.strips],
    }


def rank2_from_json(d: Dict[str, Any], tower: FieldTower) -> LaurentTailSeries:
    strips = [_Strip({int(j): field_elem(c, tower) for j, c in s["terms"]}, s["prec"]) for s in d["strata"]]
    return LaurentTailSeries(t1=d["t1"], window=d["window"], tower=tower, _strips=strips)


def _series_to_json(x, rank):
    return text_param(x) if rank == 1 else rank2_to_json(x)


def _series_from_json(x, rank, tower):
    return param_series(x, tower) if rank == 1 else rank2_from_json(x, tower)


_ZNAMES = ["z1", "z2", "z3"]


def _laurent_text(p: LaurentPoly) -> str:
    return p.to_str(_ZNAMES[: p.n])


def _laurent_from_text(text: str, n: int, tower: FieldTower) -> LaurentPoly:
    v = _Evaluator(tower, _ZNAMES[:n], [(1,) * n]).eval(parse(text))
    return LaurentPoly(n, v.terms, tower)


def step_to_json(st: TransformStep) -> Dict[str, Any]:
    return {
        "kind": st.kind,
        "trace": st.trace,
        "matrix": [list(r) for r in st.matrix] if st.matrix is not None else None,
        "divisor": st.divisor,
        "dividend": st.dividend,
        "index": st.index,
        "coefficient": str(st.coefficient) if st.coefficient is not None else None,
        "monomial": list(st.monomial) if st.monomial is not None else None,
        "permutation": list(st.permutation) if st.permutation is not None else None,
    }


def step_from_json(d: Dict[str, Any], tower: FieldTower) -> TransformStep:
    return TransformStep(
        kind=d["kind"],
        trace=d["trace"],
        matrix=tuple(tuple(int(x) for x in r) for r in d["matrix"]) if d.get("matrix") is not None else None,
        divisor=d.get("divisor"),
        dividend=d.get("dividend"),
        index=d.get("index"),
        coefficient=field_elem(d["coefficient"], tower) if d.get("coefficient") is not None else None,
        monomial=tuple(d["monomial"]) if d.get("monomial") is not None else None,
        permutation=tuple(d["permutation"]) if d.get("permutation") is not None else None,
    )


def outcome_to_json(out, rank: int) -> Dict[str, Any]:
    d: Dict[str, Any] = {"kind": out.kind, "coords": [_series_to_json(z, rank) for z in out.coords]}
    if isinstance(out, Monomial2):
        d.update(residue=str(out.residue), common_order=out.common_order,
                 value_group=_value_group(out.common_order))
    elif isinstance(out, OutcomeA):
        d.update(residue=str(out.residue), common_order=out.common_order,
                 value_group=_value_group(out.common_order),
                 containment=[_laurent_text(h) for h in out.containment],
                 checked_through=out.checked_through)
    elif isinstance(out, OutcomeB):
        d.update(residue=str(out.residue), common_order=out.common_order,
                 value_group=_value_group(out.common_order),
                 expansions=[{"coeffs": [str(c) for c in e.coeffs], "precision": e.precision}
                             for e in out.expansions],
                 u3=[str(c) for c in out.u3], u3_precision=out.u3_precision, j0=out.j0,
                 transcendence=out.transcendence,
                 residue_field_generators=[str(g) for g in out.residue_field_generators()])
    elif isinstance(out, Rank2Monomial):
        d.update(values=[list(v) for v in out.values], det=out.det)
    elif isinstance(out, BudgetExhausted):
        d.update(reason=out.reason, infinite_process_candidate=out.infinite_process_candidate)
    return d


def outcome_from_json(d: Dict[str, Any], rank: int, tower: FieldTower):
    coords = tuple(_series_from_json(z, rank, tower) for z in d["coords"])
    kind = d["kind"]
    fe = lambda s: field_elem(s, tower)  # noqa: E731
    if kind == "Monomial2":
        return Monomial2(coords, fe(d["residue"]), d["common_order"])
    if kind == "OutcomeA":
        return OutcomeA(coords, fe(d["residue"]), d["common_order"],
                        tuple(_laurent_from_text(h, 2, tower) for h in d["containment"]), d["checked_through"])
    if kind == "OutcomeB":
        exps = tuple(Expansion(tuple(fe(c) for c in e["coeffs"]), e["precision"]) for e in d["expansions"])
        return OutcomeB(coords, d["common_order"], fe(d["residue"]), exps, tuple(fe(c) for c in d["u3"]),
                        d["u3_precision"], d["j0"], d["transcendence"])
    if kind == "Monomial":
        return Rank2Monomial(coords, tuple(tuple(v) for v in d["values"]), d["det"])
    if kind == "BudgetExhausted":
        return BudgetExhausted(d["reason"], coords, d["infinite_process_candidate"])
    raise ValueError(f"unknown outcome kind {kind!r}")


def certificate_to_json(cert: Certificate) -> Dict[str, Any]:
    return {
        "rank": cert.rank,
        "tower": tower_description(cert.tower),
        "images": [_series_to_json(x, cert.rank) for x in cert.images],
        "steps": [step_to_json(s) for s in cert.steps],
        "outcome": outcome_to_json(cert.outcome, cert.rank),
        "drops": cert.drops,
        "initial_min_order": cert.initial_min_order,
    }


def certificate_from_json(d: Dict[str, Any]) -> Certificate:
    try:
        tower = tower_from_description(d["tower"])
        rank = d["rank"]
        images = tuple(_series_from_json(x, rank, tower) for x in d["images"])
        steps = [step_from_json(s, tower) for s in d["steps"]]
        outcome = outcome_from_json(d["outcome"], rank, tower)
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed certificate: {exc!r}") from exc
    return Certificate(rank, tower, images, steps, outcome, d.get("drops", 0), d.get("initial_min_order"))


def _value_group(d: int) -> str:
    return "Z" if d == 1 else f"{d}Z"
