"""Command line entry point: ``seriesval <command> ...``.

Exit codes: 0 success, 2 budget exhausted, 1 error or failed verification.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional, Sequence, Tuple

from seriesval import monoval, rank1, rank2
from seriesval.certificate import BudgetExhausted, Certificate
from seriesval.cli.evaluate import (
    RANK2_VARS,
    EvalError,
    build_tower,
    param_series,
    poly,
    rank2_series,
    text_param,
    text_poly,
    text_rank2,
    tower_description,
)
from seriesval.cli.parser import ParseError, parse
from seriesval.cli.report import Report, certificate_from_json, certificate_to_json, outcome_to_json
from seriesval.field import FieldError
from seriesval.series import INCONCLUSIVE, format_terms
from seriesval.verify import verify_certificate

EXIT_OK, EXIT_ERROR, EXIT_BUDGET = 0, 1, 2

COMMANDS = ("val", "residue-gens", "residue", "monomialize2", "classify3", "rank2-val", "rank2-classify", "verify")


class CommandError(ValueError):
    pass


def _weights(text: str) -> List[List[int]]:
    try:
        return [[int(x) for x in row.split(",")] for row in text.split(";")]
    except ValueError:
        raise CommandError(f"bad --weights {text!r}: use '2,3' or '1,0;0,1'") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the report as JSON")
    common.add_argument("--trunc", type=int, default=None, help="truncation for inputs without O(d)")
    common.add_argument("--budget-steps", type=int, default=rank1.DEFAULT_STEP_BUDGET)
    common.add_argument("--budget-containment", type=int, default=rank1.DEFAULT_CONTAINMENT_BUDGET)
    common.add_argument("--seed", type=int, default=42, help="seed for random corpora")
    common.add_argument("--adjoin", action="append", default=[], metavar="'y: y^2 - u'",
                        help="adjoin a root of a monic polynomial")
    common.add_argument("--window", type=int, default=rank2.DEFAULT_WINDOW, help="u2 window for rank-two series")

    p = argparse.ArgumentParser(prog="seriesval", description="Valuations on power series fields.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("val", parents=[common], help="monomial valuation of a series")
    s.add_argument("--weights", required=True)
    s.add_argument("expr")

    s = sub.add_parser("residue-gens", parents=[common], help="residue field generators")
    s.add_argument("--weights", required=True)

    s = sub.add_parser("residue", parents=[common], help="residue of f/g")
    s.add_argument("--weights", required=True)
    s.add_argument("f")
    s.add_argument("g")

    for name, count in (("monomialize2", 2), ("classify3", 3)):
        s = sub.add_parser(name, parents=[common], help=f"rank-one engine on {count} images in t")
        s.add_argument("--images", nargs=count, required=True)

    s = sub.add_parser("rank2-val", parents=[common], help="rank-two value of a series in u1, u2")
    s.add_argument("expr")

    s = sub.add_parser("rank2-classify", parents=[common], help="rank-two classification of two images")
    s.add_argument("--images", nargs=2, required=True)

    s = sub.add_parser("verify", parents=[common], help="replay and check a certificate report")
    s.add_argument("certificate", help="report JSON file, or - for standard input")
    s.add_argument("--corpus", type=int, default=100)
    return p


# ----------------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------------


def _report(args, argv, inputs, outcome, **kw) -> Report:
    return Report(args.command, list(argv), inputs, outcome, seed=args.seed, **kw)


def _cmd_val(args, argv):
    B = _weights(args.weights)
    n = len(B[0])
    V = monoval.MonomialValuation(B)
    tower = build_tower([args.expr], args.adjoin, [f"X{i + 1}" for i in range(n)])
    f = poly(args.expr, n, tower)
    if args.trunc is not None and f.trunc is None:
        f = f.truncate(args.trunc)
    cv = V.value(f)
    value = "infinity" if cv.value is monoval.INFINITY else list(cv.value)
    inputs = {"weights": B, "series": text_poly(f), "tower": tower_description(tower)}
    rep = _report(args, argv, inputs, {"kind": "Value", "value": value}, certified=cv.certified)
    shown = value if isinstance(value, str) else (value[0] if len(value) == 1 else tuple(value))
    lines = [f"v_L({text_poly(f)}) = {shown}", f"certified: {'yes' if cv.certified else 'no'}"]
    return rep, lines


def _cmd_residue_gens(args, argv):
    B = _weights(args.weights)
    V = monoval.MonomialValuation(B)
    gens = V.residue_generators()
    names = [f"X{i + 1}" for i in range(V.n)]
    texts = [format_terms([(g, _one())], names) for g in gens]
    rep = _report(args, argv, {"weights": B},
                  {"kind": "ResidueGenerators", "exponents": [list(g) for g in gens], "monomials": texts})
    lines = [f"w{k + 1} = {t}   exponent {tuple(g)}" for k, (g, t) in enumerate(zip(gens, texts))]
    return rep, lines or ["no generators: the residue field is the base field"]


def _one():
    from seriesval.field import RATIONALS
    return RATIONALS.one


def _cmd_residue(args, argv):
    B = _weights(args.weights)
    n = len(B[0])
    V = monoval.MonomialValuation(B)
    tower = build_tower([args.f, args.g], args.adjoin, [f"X{i + 1}" for i in range(n)])
    f, g = poly(args.f, n, tower), poly(args.g, n, tower)
    r = V.residue_of(f, g)
    names = [f"X{i + 1}" for i in range(n)]
    gens = [format_terms([(e, tower.one)], names) for e in V.residue_generators()]
    rep = _report(args, argv, {"weights": B, "f": text_poly(f), "g": text_poly(g), "tower": tower_description(tower)},
                  {"kind": "Residue", "residue": str(r), "generators": gens}, certified=True)
    lines = [f"residue = {r}"] + [f"  w{k + 1} = {t}" for k, t in enumerate(gens)]
    return rep, lines


def _engine_report(args, argv, cert: Certificate, texts, extra_inputs):
    inputs = {"images": texts, "tower": tower_description(cert.tower), **extra_inputs}
    budgets = {"steps": args.budget_steps, "steps_used": len(cert.steps)}
    if args.command == "classify3":
        budgets["containment"] = args.budget_containment
    exhausted = isinstance(cert.outcome, BudgetExhausted)
    rep = _report(args, argv, inputs, outcome_to_json(cert.outcome, cert.rank), budgets=budgets,
                  certified=not exhausted, certificate=certificate_to_json(cert),
                  trace=[s.trace for s in cert.steps])
    rep.exit_code = EXIT_BUDGET if exhausted else EXIT_OK
    return rep, _engine_lines(cert)


def _engine_lines(cert: Certificate) -> List[str]:
    fmt = text_param if cert.rank == 1 else text_rank2
    out = cert.outcome
    lines = [f"step {k + 1}: {s.trace}" for k, s in enumerate(cert.steps)] or ["no transform steps"]
    lines.append(f"outcome: {out.kind}")
    for i, z in enumerate(out.coords):
        lines.append(f"  z{i + 1} = {fmt(z)}")
    d = outcome_to_json(out, cert.rank)
    for key in ("residue", "common_order", "value_group", "containment", "u3", "j0", "transcendence",
                "residue_field_generators", "values", "det", "reason", "infinite_process_candidate"):
        if key in d:
            val = d[key]
            if key == "containment":
                val = ", ".join(f"X{i + 1} = {h.replace('z', 'Z')}" for i, h in enumerate(val))
            elif key == "u3":
                val = ", ".join(f"u3_{j + 1} = {c}" for j, c in enumerate(val) if c != "0")
            lines.append(f"  {key}: {val}")
    return lines


def _rank1_inputs(args):
    tower = build_tower(args.images, args.adjoin, ["t"])
    images = [param_series(x, tower, args.trunc) for x in args.images]
    return rank1.ParamValuation(images), [text_param(x) for x in images]


def _cmd_monomialize2(args, argv):
    P, texts = _rank1_inputs(args)
    cert = rank1.monomialize2(P, args.budget_steps)
    return _engine_report(args, argv, cert, texts, {"trunc": P.trunc})


def _cmd_classify3(args, argv):
    P, texts = _rank1_inputs(args)
    cert = rank1.classify3(P, args.budget_steps, args.budget_containment)
    return _engine_report(args, argv, cert, texts, {"trunc": P.trunc})


def _rank2_value_text(v):
    if v is INCONCLUSIVE:
        return "inconclusive"
    if v is monoval.INFINITY:
        return "infinity"
    return f"({v[0]},{v[1]})"


def _cmd_rank2_val(args, argv):
    tower = build_tower([args.expr], args.adjoin, list(RANK2_VARS))
    w = rank2_series(args.expr, tower, args.window)
    v = rank2.vhat(w)
    member = None if v is INCONCLUSIVE else rank2.in_valuation_ring(w)
    outcome = {"kind": "Rank2Value", "value": _rank2_value_text(v), "in_valuation_ring": member}
    rep = _report(args, argv, {"series": text_rank2(w), "window": args.window}, outcome,
                  certified=v is not INCONCLUSIVE)
    lines = [f"vhat({text_rank2(w)}) = {_rank2_value_text(v)}"]
    if member is not None:
        lines.append(f"in valuation ring: {'yes' if member else 'no'}")
    return rep, lines


def _cmd_rank2_classify(args, argv):
    tower = build_tower(args.images, args.adjoin, list(RANK2_VARS))
    images = [rank2_series(x, tower, args.window) for x in args.images]
    cert = rank2.rank2_classify(images[0], images[1], args.budget_steps)
    return _engine_report(args, argv, cert, [text_rank2(x) for x in images], {"window": args.window})


def _cmd_verify(args, argv):
    text = sys.stdin.read() if args.certificate == "-" else open(args.certificate, encoding="utf-8").read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CommandError(f"malformed certificate: {exc}") from None
    cert_json = data.get("certificate", data) if isinstance(data, dict) else None
    if not isinstance(cert_json, dict):
        raise CommandError("malformed certificate: no certificate object")
    cert = certificate_from_json(cert_json)
    res = verify_certificate(cert, args.corpus, args.seed)
    outcome = {
        "kind": "Verification",
        "passed": res.passed,
        "replay": {"ok": res.replay_ok, "message": res.replay_message},
        "checked": res.checked,
        "skipped": res.skipped,
        "errors": res.errors,
        "mismatches": [vars(m) for m in res.mismatches],
        "witness": vars(res.witness) if res.witness else None,
    }
    rep = _report(args, argv, {"certificate_outcome": cert.outcome.kind, "corpus": args.corpus}, outcome,
                  certified=res.passed, budgets={"corpus": args.corpus})
    rep.exit_code = EXIT_OK if res.passed else EXIT_ERROR
    lines = [f"replay: {'ok' if res.replay_ok else 'FAIL'} ({res.replay_message})",
             f"values: {res.checked} checked, {res.skipped} skipped, {len(res.mismatches)} mismatches"]
    lines += [f"error: {e}" for e in res.errors]
    if res.witness:
        w = res.witness
        lines.append(f"witness: f = {w.polynomial}: certificate value {w.certificate_value}, "
                     f"direct value {w.direct_value}")
    lines.append("PASS" if res.passed else "FAIL")
    return rep, lines


_HANDLERS = {
    "val": _cmd_val,
    "residue-gens": _cmd_residue_gens,
    "residue": _cmd_residue,
    "monomialize2": _cmd_monomialize2,
    "classify3": _cmd_classify3,
    "rank2-val": _cmd_rank2_val,
    "rank2-classify": _cmd_rank2_classify,
    "verify": _cmd_verify,
}

_USER_ERRORS = (ParseError, EvalError, CommandError, FieldError, rank1.FormallyDependent, ValueError,
                ZeroDivisionError, OSError)


def run_command(argv: Sequence[str]) -> Tuple[Report, List[str]]:
    """Run one command; errors become a report with exit code 1."""
    args = build_parser().parse_args(list(argv))
    try:
        return _HANDLERS[args.command](args, argv)
    except _USER_ERRORS as exc:
        rep = Report(args.command, list(argv), {}, {"kind": "Error", "message": str(exc)}, seed=args.seed,
                     exit_code=EXIT_ERROR)
        return rep, [f"error: {exc}"]


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    rep, lines = run_command(argv)
    if args.json:
        print(rep.dumps())
    else:
        stream = sys.stderr if rep.exit_code == EXIT_ERROR and rep.outcome.get("kind") == "Error" else sys.stdout
        print("\n".join(lines), file=stream)
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
