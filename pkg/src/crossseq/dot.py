"""Graphviz DOT renderings of proof trees and Kripke models."""

from __future__ import annotations

import json

from .cross_sequent import render
from .prover import ProofTree
from .semantics import KripkeModel

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]
_STYLE = {
    "axiom": 'shape=box, style="rounded"',
    "rule": "shape=box",
    "saturated": 'shape=box, peripheries=2, color="#d62728"',
    "open": 'shape=box, style="dashed", color="#7f7f7f"',
}


def _q(text: str) -> str:
    return json.dumps(text, ensure_ascii=False)


def proof_to_dot(t: ProofTree, name: str = "proof") -> str:
    """Nodes are sequents, edges carry the rule applied below them; axioms get a closing edge."""
    lines = [f"digraph {name} {{", "  rankdir=BT;", '  node [fontname="monospace"];']
    counter = 0

    def visit(node: ProofTree) -> str:
        nonlocal counter
        me = f"n{counter}"
        counter += 1
        lines.append(f"  {me} [label={_q(render(node.sequent))}, {_STYLE[node.status]}];")
        if node.status == "axiom":
            tip = f"{me}_ax"
            lines.append(f"  {tip} [shape=point];")
            lines.append(f"  {me} -> {tip} [label={_q(node.rule.display_name)}];")
        for child in node.children:
            cid = visit(child)
            lines.append(f"  {me} -> {cid} [label={_q(node.rule.display_name)}];")
        return me

    visit(t)
    lines.append("}")
    return "\n".join(lines) + "\n"


def model_to_dot(m: KripkeModel, name: str = "model", highlight=None) -> str:
    """One panel per agent; each equivalence block is a coloured box of worlds."""
    lines = [f"graph {name} {{", '  node [shape=circle, fontname="monospace"];', "  compound=true;"]

    def world_label(w) -> str:
        true = m.true_atoms(w)
        return f"{w}\n{{{', '.join(true)}}}" if true else f"{w}\n{{}}"

    agents = sorted(m.relations) or [None]
    for i, agent in enumerate(agents):
        color = _PALETTE[i % len(_PALETTE)]
        panel = f"cluster_{i}"
        title = f"agent {agent}" if agent is not None else "worlds"
        lines.append(f"  subgraph {panel} {{")
        lines.append(f"    label={_q(title)}; style=dotted;")
        blocks = list(m.relations[agent]) if agent is not None else []
        covered = {w for b in blocks for w in b}
        blocks += [[w] for w in m.worlds if w not in covered]
        for j, block in enumerate(blocks):
            lines.append(f"    subgraph {panel}_{j} {{")
            lines.append(f'      label=""; style="rounded,filled"; color={_q(color)}; fillcolor={_q(color + "22")};')
            for w in block:
                extra = ", penwidth=2" if highlight is not None and w == highlight else ""
                lines.append(f"      {_q(f'{i}:{w}')} [label={_q(world_label(w))}{extra}];")
            lines.append("    }")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"
