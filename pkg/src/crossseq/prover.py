"""Terminating proof search in the split cross-sequent calculus.

Rules are tried in a fixed priority order: ``top`` axiom, ``id`` axiom,
unsaturated disjunction, unsaturated conjunction, unsaturated diamond,
unsaturated box.  Ties go to the smallest component label, then to the
left part before the right part, then to formula insertion order.  All
formulas are principal on the side they occur on, and the formulas a rule
adds go to that same side.

A closed search tree is then pruned: rule applications whose additions are
never used further up are dropped and the remaining ones replayed from the
root.  The result is still a derivation in the (unrestricted) calculus,
usually a much shorter one, and it keeps every label of the search.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator

from .cross_sequent import (
    LEFT,
    RIGHT,
    Component,
    CrossSequent,
    Hole,
    LabelAllocator,
    cluster,
    clusters,
    depth,
    formula_depth,
    is_proper,
    render,
    to_json as sequent_to_json,
)
from .semantics import KripkeModel, Report, eval_cross_sequent, model_to_json
from .syntax import And, Bot, Box, Dia, Formula, Lit, Or, Top, all_vars, pretty, subformulas

AXIOMS = frozenset({"id", "top"})
BOX_RULES = frozenset({"box_in", "box_up", "box_new"})
DIA_RULES = frozenset({"dia_T", "dia_down", "dia_in", "dia_up"})

_SYMBOLS = {
    "top": "⊤",
    "or": "∨",
    "and": "∧",
    "box_in": "□∈",
    "box_up": "□↗",
    "box_new": "□↛",
    "dia_in": "◇∈",
    "dia_up": "◇↗",
    "dia_T": "◇T",
    "dia_down": "◇↘",
}


class RuleError(ValueError):
    """A rule instance does not match the sequent it is applied to."""


class TerminationBoundError(AssertionError):
    """The search exceeded a bound that the termination argument guarantees."""


@dataclass(frozen=True)
class RuleInstance:
    """One application of a split rule.

    ``side`` is ``"L"``/``"R"`` for ordinary rules and the two-letter split
    shape (side of ``p``, side of ``~p``) for ``id``.  ``k`` is the label of
    the principal formula's component for modal rules; ``l`` is the label of
    the created component (box rules) or of the target component
    (diamond rules).
    """

    name: str
    side: str
    principal: Formula
    hole: Hole
    agent: str | None = None
    k: int | None = None
    l: int | None = None

    @property
    def label(self) -> int:
        return self.hole.label

    @property
    def display_name(self) -> str:
        if self.name == "id":
            return f"{self.side}-id"
        return f"{self.side}{_SYMBOLS[self.name]}{self.agent or ''}"

    def to_json(self) -> dict:
        data: dict = {"name": self.name, "side": self.side}
        if self.agent is not None:
            data["agent"] = self.agent
        data["principal"] = pretty(self.principal)
        data["hole"] = self.hole.to_json()
        if self.k is not None:
            data["k"] = self.k
        if self.l is not None:
            data["l"] = self.l
        data["display"] = self.display_name
        return data


@dataclass
class ProofTree:
    """A derivation node.  ``status`` is one of ``axiom``, ``rule``, ``saturated``, ``open``."""

    sequent: CrossSequent
    rule: RuleInstance | None
    status: str
    children: list["ProofTree"] = field(default_factory=list)

    def nodes(self) -> Iterator["ProofTree"]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def branches(self) -> Iterator[list["ProofTree"]]:
        path: list[ProofTree] = []

        def walk(node: ProofTree) -> Iterator[list[ProofTree]]:
            path.append(node)
            if not node.children:
                yield list(path)
            for child in node.children:
                yield from walk(child)
            path.pop()

        yield from walk(self)

    def rule_sequence(self) -> list[str]:
        """Display names in pre-order."""
        return [n.rule.display_name for n in self.nodes() if n.rule is not None]

    @property
    def closed(self) -> bool:
        return all(n.status in ("axiom", "rule") for n in self.nodes())

    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def to_json(self) -> dict:
        data: dict = {"sequent": sequent_to_json(self.sequent), "status": self.status}
        if self.rule is not None:
            data["rule"] = self.rule.to_json()
        data["children"] = [c.to_json() for c in self.children]
        return data


@dataclass
class ProofResult:
    proved: bool
    tree: ProofTree
    search_tree: ProofTree
    leaf: CrossSequent | None = None
    model: KripkeModel | None = None
    interpretation: dict[int, int] | None = None

    def to_json(self) -> dict:
        data: dict = {"valid": self.proved}
        if not self.proved:
            data["countermodel"] = model_to_json(self.model, self.interpretation)
            data["leaf"] = sequent_to_json(self.leaf)
        return data


# --------------------------------------------------------------------------
# Saturation and rule selection
# --------------------------------------------------------------------------


def _occurrences(c: Component) -> Iterator[tuple[str, Formula]]:
    for f in c.left:
        yield LEFT, f
    for f in c.right:
        yield RIGHT, f


def _opposite(lit: Lit) -> Lit:
    return Lit(lit.atom, not lit.positive)


def _missing_dia_target(s: CrossSequent, label: int, f: Dia) -> int | None:
    for member in sorted(cluster(s, label, f.agent)):
        if f.body not in s.union(member):
            return member
    return None


def is_saturated_occurrence(s: CrossSequent, label: int, f: Formula) -> bool:
    """Saturation of a formula in the unsplit view of component ``label``."""
    here = s.union(label)
    if f not in here:
        raise ValueError(f"{pretty(f)} does not occur in component {label}")
    if isinstance(f, Top):
        return False
    if isinstance(f, Bot):
        return True
    if isinstance(f, Lit):
        return _opposite(f) not in here
    if isinstance(f, Or):
        return f.left in here and f.right in here
    if isinstance(f, And):
        return f.left in here or f.right in here
    if isinstance(f, Box):
        return any(f.body in s.union(m) for m in cluster(s, label, f.agent))
    if isinstance(f, Dia):
        return _missing_dia_target(s, label, f) is None
    raise TypeError(f"not an NNF formula: {f!r}")


def is_saturated(s: CrossSequent) -> bool:
    return all(is_saturated_occurrence(s, c.label, f) for c in s.components for f in c.formulas)


def _box_variant(s: CrossSequent, label: int, agent: str) -> str:
    c = s.component(label)
    if c.agent == agent:
        return "box_in"
    if s.children(label, agent):
        return "box_up"
    return "box_new"


def _dia_variant(s: CrossSequent, source: int, target: int, agent: str) -> str:
    if source == target:
        return "dia_T"
    src = s.component(source)
    tgt = s.component(target)
    if src.agent == agent and src.parent == target:
        return "dia_down"
    if src.agent == agent and tgt.agent == agent and src.parent == tgt.parent:
        return "dia_in"
    if tgt.agent == agent and tgt.parent == source:
        return "dia_up"
    raise RuleError(f"components {source} and {target} are not in one {agent}-cluster")


def _id_shape(c: Component, atom_name: str) -> str:
    pos = Lit(atom_name, True)
    neg = Lit(atom_name, False)
    pos_sides = {side for side, f in _occurrences(c) if f == pos}
    neg_sides = {side for side, f in _occurrences(c) if f == neg}
    for shape in ("RR", "LL", "LR", "RL"):
        if shape[0] in pos_sides and shape[1] in neg_sides:
            return shape
    raise RuleError(f"no clash on {atom_name} in component {c.label}")


def applicable_rule(s: CrossSequent, alloc: LabelAllocator | None = None) -> RuleInstance | None:
    """Highest-priority rule instance applicable to ``s``, or ``None`` if saturated.

    Component-creating rules draw their new label from ``alloc`` (by default
    one past the largest label of ``s``).
    """
    best: tuple[int, int, str, Formula, object] | None = None
    for label in sorted(s.labels):
        c = s.component(label)
        here = s.union(label)
        for side, f in _occurrences(c):
            if isinstance(f, Top):
                rank, extra = 1, None
            elif isinstance(f, Lit):
                if _opposite(f) not in here:
                    continue
                rank, extra = 2, None
            elif isinstance(f, Or):
                if f.left in here and f.right in here:
                    continue
                rank, extra = 3, None
            elif isinstance(f, And):
                if f.left in here or f.right in here:
                    continue
                rank, extra = 4, None
            elif isinstance(f, Dia):
                target = _missing_dia_target(s, label, f)
                if target is None:
                    continue
                rank, extra = 5, target
            elif isinstance(f, Box):
                if any(f.body in s.union(m) for m in cluster(s, label, f.agent)):
                    continue
                rank, extra = 6, None
            else:
                continue
            if best is None or rank < best[0]:
                best = (rank, label, side, f, extra)
                if rank == 1:
                    break
        if best is not None and best[0] == 1:
            break
    if best is None:
        return None
    rank, label, side, f, extra = best
    hole = s.hole(label)
    if rank == 1:
        return RuleInstance("top", side, f, hole)
    if rank == 2:
        shape = _id_shape(s.component(label), f.atom)
        return RuleInstance("id", shape, Lit(f.atom, True), hole)
    if rank == 3:
        return RuleInstance("or", side, f, hole)
    if rank == 4:
        return RuleInstance("and", side, f, hole)
    if rank == 5:
        return RuleInstance(_dia_variant(s, label, extra, f.agent), side, f, hole, f.agent, label, extra)
    alloc = alloc or LabelAllocator.after(s)
    return RuleInstance(_box_variant(s, label, f.agent), side, f, hole, f.agent, label, alloc.fresh())


# --------------------------------------------------------------------------
# Rule application
# --------------------------------------------------------------------------


def _check_principal(s: CrossSequent, r: RuleInstance) -> Component:
    if r.hole.label not in s:
        raise RuleError(f"no component {r.hole.label}")
    if s.hole(r.hole.label) != r.hole:
        raise RuleError(f"hole {r.hole} does not address component {r.hole.label}")
    c = s.component(r.hole.label)
    if r.name != "id" and r.principal not in c.side(r.side):
        raise RuleError(f"{pretty(r.principal)} is not on side {r.side} of component {c.label}")
    return c


def check_axiom(s: CrossSequent, r: RuleInstance) -> None:
    c = _check_principal(s, r)
    if r.name == "top":
        if not isinstance(r.principal, Top):
            raise RuleError("top axiom needs a true principal")
        return
    if r.name == "id":
        p = r.principal
        if len(r.side) != 2 or not isinstance(p, Lit) or not p.positive:
            raise RuleError("id axiom needs a positive literal and a two-letter shape")
        if p not in c.side(r.side[0]) or _opposite(p) not in c.side(r.side[1]):
            raise RuleError(f"{r.side}-id does not match component {c.label}")
        return
    raise RuleError(f"{r.name} is not an axiom")


def apply_rule(s: CrossSequent, r: RuleInstance) -> list[CrossSequent]:
    """Premises of ``r`` applied bottom-up to ``s`` (empty for axioms)."""
    if r.name in AXIOMS:
        check_axiom(s, r)
        return []
    c = _check_principal(s, r)
    f = r.principal
    label = c.label
    if r.name == "or":
        if not isinstance(f, Or):
            raise RuleError("or rule needs a disjunction")
        return [s.add_formula(label, r.side, f.left).add_formula(label, r.side, f.right)]
    if r.name == "and":
        if not isinstance(f, And):
            raise RuleError("and rule needs a conjunction")
        return [s.add_formula(label, r.side, f.left), s.add_formula(label, r.side, f.right)]
    if r.name in DIA_RULES:
        if not isinstance(f, Dia) or f.agent != r.agent or r.k != label or r.l is None:
            raise RuleError("malformed diamond rule instance")
        if r.l not in s:
            raise RuleError(f"no target component {r.l}")
        if _dia_variant(s, label, r.l, r.agent) != r.name:
            raise RuleError(f"{r.name} does not fit components {label} and {r.l}")
        return [s.add_formula(r.l, r.side, f.body)]
    if r.name in BOX_RULES:
        if not isinstance(f, Box) or f.agent != r.agent or r.k != label or r.l is None:
            raise RuleError("malformed box rule instance")
        if r.l in s:
            raise RuleError(f"label {r.l} is not fresh")
        if _box_variant(s, label, r.agent) != r.name:
            raise RuleError(f"{r.name} is not the box rule that fits component {label}")
        new = Component(r.l).with_formula(r.side, f.body)
        parent = c.parent if r.name == "box_in" else label
        return [s.add_child(parent, r.agent, new)]
    raise RuleError(f"unknown rule {r.name}")


# --------------------------------------------------------------------------
# Search
# --------------------------------------------------------------------------


@dataclass
class Bounds:
    """Limits implied by the termination argument for one root sequent."""

    max_cluster: int
    max_chain: int
    max_brackets: int

    @classmethod
    def for_root(cls, s: CrossSequent, agents: Iterable[str] = ()) -> "Bounds":
        subs: set[Formula] = set()
        for f in s.formulas():
            subs |= subformulas(f)
        all_agents = set(s.agents()) | set(agents)
        initial = max((len(cl) for a in all_agents for cl in clusters(s, a)), default=1)
        return cls(initial + len(subs), depth(s) + formula_depth(s), max(len(all_agents), 1))

    def check(self, s: CrossSequent) -> None:
        for c in s.components:
            brackets = s.brackets(c.label)
            if len(brackets) > self.max_brackets:
                raise TerminationBoundError(f"component {c.label} holds {len(brackets)} brackets")
            for agent, members in brackets.items():
                if len(members) + 1 > self.max_cluster:
                    raise TerminationBoundError(
                        f"{agent}-cluster of {c.label} has {len(members) + 1} > {self.max_cluster} components"
                    )
        d = depth(s)
        if d > self.max_chain:
            raise TerminationBoundError(f"chain of length {d} exceeds {self.max_chain}")


def _search(s: CrossSequent, alloc: LabelAllocator, bounds: Bounds | None) -> tuple[ProofTree, CrossSequent | None]:
    r = applicable_rule(s, alloc)
    if r is None:
        return ProofTree(s, None, "saturated"), s
    if r.name in AXIOMS:
        return ProofTree(s, r, "axiom"), None
    node = ProofTree(s, r, "rule")
    premises = apply_rule(s, r)
    for i, premise in enumerate(premises):
        if bounds is not None:
            bounds.check(premise)
        child, leaf = _search(premise, alloc, bounds)
        node.children.append(child)
        if leaf is not None:
            node.children.extend(ProofTree(p, None, "open") for p in premises[i + 1:])
            return node, leaf
    return node, None


def extract_countermodel(leaf: CrossSequent, agents: Iterable[str] = ()) -> tuple[KripkeModel, dict[int, int]]:
    """Model read off a saturated leaf: worlds are labels, blocks are clusters.

    An atom is true at a label exactly when it does not occur (positively)
    in that component; the interpretation is the identity.
    """
    if not is_saturated(leaf):
        raise ValueError("countermodel extraction needs a saturated sequent")
    worlds = tuple(sorted(leaf.labels))
    relations = {a: [sorted(cl) for cl in clusters(leaf, a)] for a in sorted(set(leaf.agents()) | set(agents))}
    atoms_: set[str] = set()
    for f in leaf.formulas():
        atoms_ |= all_vars(f)
    valuation = {p: [l for l in worlds if Lit(p, True) not in leaf.union(l)] for p in sorted(atoms_)}
    return KripkeModel(worlds, relations, valuation), {l: l for l in worlds}


def prove(s: CrossSequent, agents: Iterable[str] = (), prune: bool = True, check_bounds: bool = True) -> ProofResult:
    """Decide validity of ``s``.

    Proved results carry the pruned derivation in ``tree`` and the raw
    strategy-driven search in ``search_tree``.  Refuted results carry the
    first saturated leaf, its countermodel, and the identity interpretation
    restricted to the labels of ``s``.
    """
    if not is_proper(s):
        raise ValueError("proof search needs a proper cross-sequent")
    agents = tuple(agents)
    alloc = LabelAllocator.after(s)
    bounds = Bounds.for_root(s, agents) if check_bounds else None
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20000))
    try:
        raw, leaf = _search(s, alloc, bounds)
        if leaf is None:
            tree = prune_proof(raw) if prune else raw
            return ProofResult(True, tree, raw)
    finally:
        sys.setrecursionlimit(limit)
    model, ident = extract_countermodel(leaf, set(agents) | set(s.agents()))
    interp = {l: ident[l] for l in s.labels}
    return ProofResult(False, raw, raw, leaf, model, interp)


def prove_formula(f: Formula, agents: Iterable[str] = (), prune: bool = True) -> ProofResult:
    """Validity of ``f``: proof search on the one-component sequent ``;#0 f``."""
    return prove(CrossSequent.single(right=[f]), agents, prune=prune)


# --------------------------------------------------------------------------
# Pruning
# --------------------------------------------------------------------------


def _occurrence_set(s: CrossSequent) -> set:
    out = set()
    for c in s.components:
        for side, f in _occurrences(c):
            out.add((c.label, side, f))
    return out


def _produced(conclusion: CrossSequent, premise: CrossSequent) -> set:
    out = _occurrence_set(premise) - _occurrence_set(conclusion)
    for label in premise.labels:
        if label not in conclusion:
            out.add(("label", label))
    return out


def _axiom_uses(r: RuleInstance) -> set:
    if r.name == "top":
        return {(r.label, r.side, r.principal)}
    p = r.principal
    return {(r.label, r.side[0], p), (r.label, r.side[1], _opposite(p))}


@dataclass
class _Plan:
    rule: RuleInstance
    children: list["_Plan"]


def _plan(node: ProofTree) -> tuple[set, _Plan]:
    r = node.rule
    if node.status == "axiom":
        return _axiom_uses(r), _Plan(r, [])
    results = [_plan(child) for child in node.children]
    produced = [_produced(node.sequent, child.sequent) for child in node.children]
    for (used, plan), made in zip(results, produced):
        if not used & made:
            return used, plan
    used = set().union(*(u - m for (u, _), m in zip(results, produced)))
    used.add((r.label, r.side, r.principal))
    if r.name in DIA_RULES:
        used.add(("label", r.l))
    return used, _Plan(r, [p for _, p in results])


def _rebase(s: CrossSequent, r: RuleInstance) -> RuleInstance:
    hole = s.hole(r.label)
    if r.name in BOX_RULES:
        return replace(r, name=_box_variant(s, r.label, r.agent), hole=hole)
    if r.name == "id":
        return replace(r, side=_id_shape(s.component(r.label), r.principal.atom), hole=hole)
    return replace(r, hole=hole)


def _replay(s: CrossSequent, plan: _Plan) -> ProofTree:
    r = _rebase(s, plan.rule)
    if r.name in AXIOMS:
        check_axiom(s, r)
        return ProofTree(s, r, "axiom")
    premises = apply_rule(s, r)
    if len(premises) != len(plan.children):
        raise RuleError("pruning plan does not match the rule arity")
    return ProofTree(s, r, "rule", [_replay(p, cp) for p, cp in zip(premises, plan.children)])


def prune_proof(tree: ProofTree) -> ProofTree:
    """Drop rule applications whose output is never used, then replay."""
    if not tree.closed:
        raise ValueError("only closed derivations can be pruned")
    _, plan = _plan(tree)
    return _replay(tree.sequent, plan)


# --------------------------------------------------------------------------
# Checking
# --------------------------------------------------------------------------


def check_proof(t: ProofTree) -> Report:
    """Local validation of every rule instance plus label coherency.

    Each premise must be exactly what :func:`apply_rule` produces, all labels
    of a conclusion survive into its premises, and every created label is
    fresh: absent from the root and created only once in the whole tree.
    """
    problems: list[str] = []
    root_labels = set(t.sequent.labels)
    created: dict[int, str] = {}
    for node in t.nodes():
        s = node.sequent
        where = render(s)
        if not is_proper(s):
            problems.append(f"improper sequent {where}")
        if node.status == "saturated":
            if node.children or not is_saturated(s):
                problems.append(f"leaf marked saturated is not saturated: {where}")
            continue
        if node.status == "open":
            continue
        if node.rule is None:
            problems.append(f"node without rule: {where}")
            continue
        r = node.rule
        try:
            premises = apply_rule(s, r)
        except RuleError as exc:
            problems.append(f"{r.display_name} at {where}: {exc}")
            continue
        if node.status == "axiom":
            if node.children:
                problems.append(f"axiom {r.display_name} has premises")
            continue
        if len(premises) != len(node.children):
            problems.append(f"{r.display_name} at {where}: expected {len(premises)} premises")
            continue
        for expected, child in zip(premises, node.children):
            missing = set(s.labels) - set(child.sequent.labels)
            if missing:
                problems.append(f"labels {sorted(missing)} lost above {r.display_name}")
            if child.sequent != expected:
                problems.append(
                    f"{r.display_name} at {where}: premise {render(child.sequent)} should be {render(expected)}"
                )
        if r.name in BOX_RULES:
            if r.l in root_labels or r.l in created:
                problems.append(f"label {r.l} reused by {r.display_name} (not fresh)")
            created[r.l] = r.display_name
    return Report(not problems, problems)


def saturation_facts(s: CrossSequent, strict: bool = False) -> set[tuple]:
    """Saturated occurrences of ``s`` as hashable facts.

    ``<a>phi`` is tracked per cluster member holding ``phi`` (the granularity
    at which the search repairs it) unless ``strict`` is set, in which case
    only whole-cluster saturation counts.
    """
    out: set[tuple] = set()
    for c in s.components:
        for f in c.formulas:
            if isinstance(f, Dia) and not strict:
                for m in cluster(s, c.label, f.agent):
                    if f.body in s.union(m):
                        out.add((c.label, f, m))
            elif is_saturated_occurrence(s, c.label, f):
                out.add((c.label, f))
    return out


def check_monotonicity(t: ProofTree, strict: bool = False) -> Report:
    """Formulas never disappear and saturation facts persist going up.

    A literal may only lose saturation in a premise where its opposite has
    just arrived, i.e. where the id axiom closes it next.  With ``strict``
    every saturated formula must stay saturated, with no exceptions; the
    search violates that reading whenever a box rule enlarges a cluster.
    """
    problems: list[str] = []
    for node in t.nodes():
        s = node.sequent
        before = saturation_facts(s, strict)
        for child in node.children:
            p = child.sequent
            for c in s.components:
                if c.label not in p:
                    problems.append(f"component {c.label} vanished above {render(s)}")
                    continue
                pc = p.component(c.label)
                if not (set(c.left) <= set(pc.left) and set(c.right) <= set(pc.right)):
                    problems.append(f"formula removed from component {c.label} above {render(s)}")
            for fact in before - saturation_facts(p, strict):
                label, f = fact[0], fact[1]
                if not strict and isinstance(f, Lit) and _opposite(f) in p.union(label):
                    continue
                problems.append(f"{pretty(f)} in {label} became unsaturated above {render(s)}")
    return Report(not problems, problems)


def refutation_holds(result: ProofResult) -> bool:
    """The countermodel falsifies the root sequent under the stored interpretation."""
    if result.proved:
        return False
    return not eval_cross_sequent(result.model, result.interpretation, result.tree.sequent)
