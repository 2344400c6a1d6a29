"""Command-line interface.

Exit codes: 0 when the formula is valid / the implication holds / the
formula is true at the world (for ``countermodel``: a countermodel was
found), 1 for the negative answer, 2 for usage, parse and model errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence, TextIO

from . import __version__
from .cross_sequent import render
from .dot import model_to_dot, proof_to_dot
from .interpolation import NonTheoremError, interpolate
from .prover import ProofResult, ProofTree, prove_formula
from .semantics import (
    KripkeModel,
    ModelError,
    evaluate,
    model_from_json,
    verify_model,
)
from .syntax import FormulaSyntaxError, parse_nnf, pretty

EXIT_OK, EXIT_NO, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _dump(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def proof_to_text(t: ProofTree) -> str:
    """Indented tree, conclusion first; each line is ``rule  sequent``."""
    lines: list[str] = []

    def walk(node: ProofTree, depth: int) -> None:
        tag = node.rule.display_name if node.rule is not None else node.status
        if node.status == "saturated":
            tag = "saturated"
        lines.append(f"{'  ' * depth}{tag:<8} {render(node.sequent)}")
        for child in node.children:
            walk(child, depth + 1)

    walk(t, 0)
    return "\n".join(lines) + "\n"


def model_to_text(m: KripkeModel, world=None) -> str:
    lines = [f"worlds: {', '.join(map(str, m.worlds))}"]
    for agent, blocks in m.relations.items():
        shown = " ".join("{" + ", ".join(map(str, b)) + "}" for b in blocks)
        lines.append(f"~{agent}: {shown}")
    for w in m.worlds:
        lines.append(f"V({w}) = {{{', '.join(m.true_atoms(w))}}}")
    if world is not None:
        lines.append(f"falsified at: {world}")
    return "\n".join(lines) + "\n"


def _parse(text: str, what: str = "formula"):
    try:
        return parse_nnf(text)
    except FormulaSyntaxError as exc:
        raise UsageError(f"cannot parse {what} {text!r}: {exc}") from exc


def _agents(args) -> tuple[str, ...]:
    return tuple(a for a in (args.agents or "").split(",") if a)


def _refutation_json(r: ProofResult, emit_proof: bool) -> dict:
    data = r.to_json()
    data["falsifiedAt"] = r.interpretation[0]
    if emit_proof:
        data["search"] = r.tree.to_json()
    return data


def cmd_prove(args, out: TextIO) -> int:
    f = _parse(args.formula)
    r = prove_formula(f, _agents(args))
    if args.format == "dot":
        out.write(proof_to_dot(r.tree) if r.proved or args.emit_proof else model_to_dot(r.model, highlight=r.interpretation[0]))
    elif args.format == "json":
        data = {"formula": pretty(f), "valid": r.proved}
        if r.proved:
            data["proof"] = r.tree.to_json()
            if args.emit_proof:
                data["search"] = r.search_tree.to_json()
        else:
            data.update(_refutation_json(r, args.emit_proof))
        out.write(_dump(data))
    else:
        if r.proved:
            out.write(f"valid: {pretty(f)}\n")
            out.write(proof_to_text(r.tree))
        else:
            out.write(f"not valid: {pretty(f)}\n")
            out.write(model_to_text(r.model, r.interpretation[0]))
            if args.emit_proof:
                out.write(proof_to_text(r.tree))
    return EXIT_OK if r.proved else EXIT_NO


def cmd_countermodel(args, out: TextIO) -> int:
    f = _parse(args.formula)
    r = prove_formula(f, _agents(args))
    if args.format == "dot":
        if r.proved:
            out.write(proof_to_dot(r.tree))
        else:
            out.write(model_to_dot(r.model, highlight=r.interpretation[0]))
    elif args.format == "json":
        data = {"formula": pretty(f), "valid": r.proved}
        if not r.proved:
            data.update(_refutation_json(r, args.emit_proof))
        elif args.emit_proof:
            data["proof"] = r.tree.to_json()
        out.write(_dump(data))
    else:
        if r.proved:
            out.write(f"valid, no countermodel: {pretty(f)}\n")
            if args.emit_proof:
                out.write(proof_to_text(r.tree))
        else:
            out.write(model_to_text(r.model, r.interpretation[0]))
    return EXIT_NO if r.proved else EXIT_OK


def cmd_interpolate(args, out: TextIO) -> int:
    phi = _parse(args.phi, "antecedent")
    psi = _parse(args.psi, "consequent")
    try:
        report = interpolate(phi, psi, _agents(args))
    except NonTheoremError as exc:
        r = exc.result
        if args.format == "json":
            data = {"valid": False}
            data.update(_refutation_json(r, args.emit_proof))
            out.write(_dump(data))
        else:
            out.write(f"not valid: {pretty(phi)} -> {pretty(psi)}\n")
            out.write(model_to_text(r.model, r.interpretation[0]))
        return EXIT_NO
    if args.format == "json":
        out.write(_dump(report.to_json(with_proofs=args.emit_proof)))
    else:
        checks = report.to_json()["checks"]
        out.write(f"interpolant: {pretty(report.interpolant)}\n")
        out.write(f"pre-repair: {pretty(report.pre_repair_interpolant)}\n")
        out.write("checks: " + ", ".join(f"{k}={'ok' if v else 'FAILED'}" for k, v in checks.items()) + "\n")
        if args.emit_proof:
            out.write(proof_to_text(report.proof))
    return EXIT_OK


def _find_world(m: KripkeModel, text: str):
    for w in m.worlds:
        if str(w) == text:
            return w
    raise UsageError(f"world {text!r} is not in the model")


def cmd_checkmodel(args, out: TextIO) -> int:
    try:
        with open(args.model, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {args.model}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON in {args.model}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("model JSON must be an object")
    try:
        m = model_from_json(data)
    except ModelError as exc:
        raise UsageError(str(exc)) from exc
    report = verify_model(m)
    if not report:
        raise UsageError("invalid model: " + "; ".join(report.violations))
    w = _find_world(m, args.world)
    f = _parse(args.formula)
    holds = evaluate(m, w, f)
    if args.format == "json":
        out.write(_dump({"formula": pretty(f), "world": w, "holds": holds}))
    else:
        out.write(f"{'true' if holds else 'false'}\n")
    return EXIT_OK if holds else EXIT_NO


def cmd_selftest(args, out: TextIO) -> int:
    from .selftest import run_all

    def show(result) -> None:
        if args.format == "text":
            out.write(result.line() + "\n")
            out.flush()

    results = run_all(seed=args.seed or 0, oracle_worlds=args.oracle_worlds, on_result=show)
    if args.format == "json":
        out.write(_dump([r.to_json() for r in results]))
    return EXIT_OK if all(r.ok for r in results) else EXIT_NO


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "dot"), default="text")
    common.add_argument("--oracle-worlds", type=int, default=3, metavar="N",
                        help="largest model size for brute-force checks (default 3)")
    common.add_argument("--emit-proof", action="store_true", help="include proof trees in the output")
    common.add_argument("--seed", type=int, default=None, metavar="N", help="seed for generated corpora")
    common.add_argument("--agents", default="", help="comma-separated extra agents for countermodels")

    parser = argparse.ArgumentParser(prog="crossseq", description="Multi-agent S5 prover and interpolant synthesizer")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("prove", parents=[common], help="decide validity")
    p.add_argument("formula")
    p = sub.add_parser("countermodel", parents=[common], help="find a countermodel")
    p.add_argument("formula")
    p = sub.add_parser("interpolate", parents=[common], help="interpolant of PHI -> PSI")
    p.add_argument("phi")
    p.add_argument("psi")
    p = sub.add_parser("checkmodel", parents=[common], help="evaluate a formula in a model")
    p.add_argument("model", metavar="MODEL.json")
    p.add_argument("world")
    p.add_argument("formula")
    sub.add_parser("selftest", parents=[common], help="run the acceptance suites")
    return parser


COMMANDS = {
    "prove": cmd_prove,
    "countermodel": cmd_countermodel,
    "interpolate": cmd_interpolate,
    "checkmodel": cmd_checkmodel,
    "selftest": cmd_selftest,
}


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        if args.format == "dot" and args.command not in ("prove", "countermodel"):
            raise UsageError("--format dot is only available for prove and countermodel")
        if args.oracle_worlds < 1:
            raise UsageError("--oracle-worlds must be positive")
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        err.write(f"crossseq: error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
