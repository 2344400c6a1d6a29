"""Interpolants from split derivations.

Each closed split derivation is folded bottom-up into a multiformula:
axioms give constants or literals, local rules pass the interpolant
through, the two conjunction rules combine with structural conjunction or
disjunction, and box rules on either side move the premise interpolant
from the new component ``l`` back to the principal component ``k`` under a
modality, after bringing it into the clause shape that move needs.

With ``repair`` on, every modality placed around a literal-free body is
collapsed to the constant it is equivalent to, which keeps the agents of
the interpolant inside the common agents.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cross_sequent import LEFT, RIGHT, CrossSequent
from .multiformula import (
    LabeledAtom,
    atoms as mf_atoms,
    Multiformula,
    SConj,
    SDisj,
    labels as mf_labels,
    mf_agents,
    mf_vars,
    project,
    sconj,
    sdisj,
    simplify,
)
from .prover import (
    AXIOMS,
    BOX_RULES,
    DIA_RULES,
    ProofResult,
    ProofTree,
    RuleInstance,
    prove,
    prove_formula,
)
from .semantics import BitModel, OracleBudgetError, bit_interpretations, count_models, enumerate_models
from .syntax import (
    BOT,
    TOP,
    Bot,
    Box,
    Dia,
    Formula,
    Lit,
    Or,
    And,
    Top,
    agents_of,
    all_vars,
    has_literal,
    implies,
    negate,
    pretty,
    simplify_constants,
    vars_of,
)

LOCAL = "local"
CONJUNCTIVE = "conjunctive"
DISJUNCTIVE = "disjunctive"
BOX_LIKE = "box-like"
DIAMOND_LIKE = "diamond-like"


class InterpolationError(RuntimeError):
    """Internal consistency failure while building an interpolant."""


class NonTheoremError(ValueError):
    """The implication to interpolate is not valid; carries the refutation."""

    def __init__(self, result: ProofResult):
        super().__init__("not a theorem")
        self.result = result


@dataclass(frozen=True)
class Classification:
    kind: str
    k: int | None = None
    l: int | None = None
    agent: str | None = None


def classify_rule(r: RuleInstance) -> Classification:
    if r.name in AXIOMS:
        raise ValueError("axioms have no rule type")
    if r.name == "or" or r.name in DIA_RULES:
        return Classification(LOCAL)
    if r.name == "and":
        return Classification(CONJUNCTIVE if r.side == RIGHT else DISJUNCTIVE)
    if r.name in BOX_RULES:
        kind = BOX_LIKE if r.side == RIGHT else DIAMOND_LIKE
        return Classification(kind, r.k, r.l, r.agent)
    raise ValueError(f"unknown rule {r.name}")


def interpolate_axiom(leaf: CrossSequent, r: RuleInstance) -> Multiformula:
    l = r.label
    if r.name == "top":
        return LabeledAtom(l, TOP if r.side == RIGHT else BOT)
    if r.name != "id":
        raise ValueError(f"{r.name} is not an axiom")
    p = r.principal.atom
    return LabeledAtom(
        l,
        {
            "RR": TOP,
            "LL": BOT,
            "RL": Lit(p, True),
            "LR": Lit(p, False),
        }[r.side],
    )


# --------------------------------------------------------------------------
# Clause normal forms
# --------------------------------------------------------------------------


def _cnf(u: Multiformula) -> list[list[LabeledAtom]]:
    if isinstance(u, LabeledAtom):
        return [[u]]
    if isinstance(u, SConj):
        return _cnf(u.left) + _cnf(u.right)
    return [a + b for a in _cnf(u.left) for b in _cnf(u.right)]


def _dnf(u: Multiformula) -> list[list[LabeledAtom]]:
    if isinstance(u, LabeledAtom):
        return [[u]]
    if isinstance(u, SDisj):
        return _dnf(u.left) + _dnf(u.right)
    return [a + b for a in _dnf(u.left) for b in _dnf(u.right)]


def _merge(atoms_: list[LabeledAtom], join) -> dict[int, Formula]:
    merged: dict[int, Formula] = {}
    for a in atoms_:
        merged[a.label] = join(merged[a.label], a.body) if a.label in merged else a.body
    return merged


def _normal_form(u: Multiformula, l: int, fallback: int, box: bool) -> Multiformula:
    if fallback == l:
        raise ValueError("fallback label must differ from the eliminated label")
    clauses = _cnf(u) if box else _dnf(u)
    join = Or if box else And
    unit = BOT if box else TOP
    inner = sdisj if box else sconj
    outer = sconj if box else sdisj
    built: list[Multiformula] = []
    for clause in dict.fromkeys(tuple(c) for c in clauses):
        merged = _merge(list(clause), join)
        head = LabeledAtom(l, merged.pop(l, unit))
        rest = [LabeledAtom(k, body) for k, body in merged.items()] or [LabeledAtom(fallback, unit)]
        built.append(inner([head, *rest]))
    return outer(built)


def to_box_form(u: Multiformula, l: int, fallback: int) -> Multiformula:
    """Equivalent conjunction of clauses ``l:phi || rest`` with ``l`` absent from each ``rest``."""
    return _normal_form(u, l, fallback, box=True)


def to_diamond_form(u: Multiformula, l: int, fallback: int) -> Multiformula:
    """Equivalent disjunction of clauses ``l:phi && rest`` with ``l`` absent from each ``rest``."""
    return _normal_form(u, l, fallback, box=False)


def _clauses(u: Multiformula, cls) -> list[Multiformula]:
    if isinstance(u, cls):
        return _clauses(u.left, cls) + _clauses(u.right, cls)
    return [u]


def _lift(u: Multiformula, c: Classification) -> Multiformula:
    """Replace the head ``l:phi`` of every clause by ``k:[a]phi`` / ``k:<a>phi``."""
    box = c.kind == BOX_LIKE
    outer, inner = (SConj, SDisj) if box else (SDisj, SConj)
    join_outer, join_inner = (sconj, sdisj) if box else (sdisj, sconj)
    modal = Box if box else Dia
    out = []
    for clause in _clauses(u, outer):
        head, *rest = _clauses(clause, inner)
        if not isinstance(head, LabeledAtom) or head.label != c.l:
            raise InterpolationError("clause head is not an atom at the eliminated label")
        out.append(join_inner([LabeledAtom(c.k, modal(c.agent, head.body)), *rest]))
    result = join_outer(out)
    if c.l in mf_labels(result):
        raise InterpolationError(f"label {c.l} survived the modal transformation")
    return result


def alip_repair(u: Multiformula, c: Classification | None = None) -> Multiformula:
    """Collapse ``k:[a]phi`` / ``k:<a>phi`` with a literal-free ``phi`` to a constant.

    Only atoms at label ``c.k`` whose top connective is a modality for
    ``c.agent`` are touched (all of them, when ``c`` is omitted).  The
    surrounding structure is then folded with the unit laws.
    """

    def fix(v: Multiformula) -> Multiformula:
        if isinstance(v, LabeledAtom):
            b = v.body
            if (
                isinstance(b, (Box, Dia))
                and (c is None or (v.label == c.k and b.agent == c.agent))
                and not has_literal(b.body)
            ):
                const = simplify_constants(b.body)
                if not isinstance(const, (Top, Bot)):
                    raise InterpolationError(f"literal-free {pretty(b.body)} did not reduce to a constant")
                return LabeledAtom(v.label, const)
            return v
        return type(v)(fix(v.left), fix(v.right))

    return simplify(fix(u), modal=False)


def combine(c: Classification, parts: list[Multiformula], node: CrossSequent | None = None,
            repair: bool = True) -> Multiformula:
    """Interpolant of a conclusion from the interpolants of its premises."""
    expected = 2 if c.kind in (CONJUNCTIVE, DISJUNCTIVE) else 1
    if len(parts) != expected:
        raise ValueError(f"{c.kind} step needs {expected} premise interpolants, got {len(parts)}")
    if c.kind == LOCAL:
        result = parts[0]
    elif c.kind == CONJUNCTIVE:
        result = SConj(parts[0], parts[1])
    elif c.kind == DISJUNCTIVE:
        result = SDisj(parts[0], parts[1])
    else:
        shaped = (to_box_form if c.kind == BOX_LIKE else to_diamond_form)(parts[0], c.l, c.k)
        result = _lift(shaped, c)
        if repair:
            result = alip_repair(result, c)
    result = simplify(result, modal=repair)
    if node is not None and not mf_labels(result) <= set(node.labels):
        raise InterpolationError("interpolant mentions labels outside its sequent")
    return result


def interpolant_trace(t: ProofTree, repair: bool = True) -> list[tuple[ProofTree, Multiformula]]:
    """``(node, interpolant)`` for every node of a closed split derivation, root last."""
    out: list[tuple[ProofTree, Multiformula]] = []

    def fold(node: ProofTree) -> Multiformula:
        if node.status == "axiom":
            result = interpolate_axiom(node.sequent, node.rule)
        elif node.status == "rule":
            parts = [fold(child) for child in node.children]
            result = combine(classify_rule(node.rule), parts, node.sequent, repair)
        else:
            raise InterpolationError("interpolation needs a closed derivation")
        out.append((node, result))
        return result

    fold(t)
    return out


def interpolate_proof(t: ProofTree, repair: bool = True) -> Multiformula:
    return interpolant_trace(t, repair)[-1][1]


# --------------------------------------------------------------------------
# Formula interpolation
# --------------------------------------------------------------------------


@dataclass
class InterpolationReport:
    interpolant: Formula
    pre_repair_interpolant: Formula
    left_implication_proved: bool
    right_implication_proved: bool
    var_plus_ok: bool
    var_minus_ok: bool
    agents_ok: bool
    proof: ProofTree
    left_proof: ProofResult | None = field(default=None, repr=False)
    right_proof: ProofResult | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return all(
            (
                self.left_implication_proved,
                self.right_implication_proved,
                self.var_plus_ok,
                self.var_minus_ok,
                self.agents_ok,
            )
        )

    def to_json(self, with_proofs: bool = False) -> dict:
        data = {
            "interpolant": pretty(self.interpolant),
            "preRepair": pretty(self.pre_repair_interpolant),
            "checks": {
                "leftImp": self.left_implication_proved,
                "rightImp": self.right_implication_proved,
                "varPlus": self.var_plus_ok,
                "varMinus": self.var_minus_ok,
                "agents": self.agents_ok,
            },
        }
        if with_proofs:
            data["proofs"] = {
                "endsequent": self.proof.to_json(),
                "leftImp": self.left_proof.tree.to_json() if self.left_proof else None,
                "rightImp": self.right_proof.tree.to_json() if self.right_proof else None,
            }
        return data


def interpolate_split(s: CrossSequent, agents=()) -> tuple[ProofTree, Multiformula, Multiformula]:
    """Prove a depth-0 split sequent and return ``(proof, repaired, pre-repair)`` interpolants."""
    if len(s.labels) != 1:
        raise ValueError("interpolation is only supported for single-component endsequents")
    result = prove(s, agents)
    if not result.proved:
        raise NonTheoremError(result)
    return result.tree, interpolate_proof(result.tree, True), interpolate_proof(result.tree, False)


def interpolate(phi: Formula, psi: Formula, agents=()) -> InterpolationReport:
    """Lyndon interpolant of ``phi -> psi`` in the common atoms and agents.

    Raises :class:`NonTheoremError` when the implication is not valid.
    The returned report re-proves both implications and checks the
    polarity and agent conditions.
    """
    s = CrossSequent.single(left=[negate(phi)], right=[psi])
    tree, repaired, raw = interpolate_split(s, agents)
    delta = simplify_constants(project(repaired))
    pre = simplify_constants(project(raw), modal=False)
    left = prove_formula(implies(phi, delta), agents)
    right = prove_formula(implies(delta, psi), agents)
    report = InterpolationReport(
        interpolant=delta,
        pre_repair_interpolant=pre,
        left_implication_proved=left.proved,
        right_implication_proved=right.proved,
        var_plus_ok=vars_of(delta, "+") <= vars_of(phi, "+") & vars_of(psi, "+"),
        var_minus_ok=vars_of(delta, "-") <= vars_of(phi, "-") & vars_of(psi, "-"),
        agents_ok=agents_of(delta) <= agents_of(phi) & agents_of(psi),
        proof=tree,
        left_proof=left,
        right_proof=right,
    )
    if not report.ok:
        raise InterpolationError(f"interpolant {pretty(delta)} failed verification: {report.to_json()['checks']}")
    return report


# --------------------------------------------------------------------------
# Semantic check of the sequent interpolation conditions
# --------------------------------------------------------------------------


@dataclass
class SlipReport:
    labels_ok: bool
    left_ok: bool
    right_ok: bool
    vars_ok: bool
    agents_ok: bool
    counterexample: str | None = None

    @property
    def slip(self) -> bool:
        return self.labels_ok and self.left_ok and self.right_ok and self.vars_ok

    @property
    def salip(self) -> bool:
        return self.slip and self.agents_ok


def _side_vars(s: CrossSequent, side: str, polarity: str) -> frozenset[str]:
    out: set[str] = set()
    for c in s.components:
        for f in c.side(side):
            out |= vars_of(f, polarity)
    return frozenset(out)


def _side_agents(s: CrossSequent, side: str) -> frozenset[str]:
    out: set[str] = set()
    for c in s.components:
        for f in c.side(side):
            out |= agents_of(f)
    return frozenset(out)


def _bit_mf(bm: BitModel, interp: dict[int, int], u: Multiformula) -> bool:
    if isinstance(u, LabeledAtom):
        return bool(bm.ext(u.body) >> interp[u.label] & 1)
    if isinstance(u, SConj):
        return _bit_mf(bm, interp, u.left) and _bit_mf(bm, interp, u.right)
    return _bit_mf(bm, interp, u.left) or _bit_mf(bm, interp, u.right)


def _bit_side(bm: BitModel, interp: dict[int, int], s: CrossSequent, side: str) -> bool:
    return any(bm.ext(f) >> interp[c.label] & 1 for c in s.components for f in c.side(side))


def check_slip_conditions(u: Multiformula, s: CrossSequent, max_worlds: int = 2,
                          budget: int | None = 2_000_000) -> SlipReport:
    """Check the label, semantic, polarity and agent conditions of ``u`` for ``s``.

    The two semantic conditions are checked on every model with at most
    ``max_worlds`` worlds over the atoms and agents involved, under every
    interpretation of ``s`` that respects its clusters.  ``budget`` caps
    models times interpretations.
    """
    labels_ok = mf_labels(u) <= set(s.labels)
    vars_ok = mf_vars(u, "+") <= _side_vars(s, LEFT, "-") & _side_vars(s, RIGHT, "+") and mf_vars(
        u, "-"
    ) <= _side_vars(s, LEFT, "+") & _side_vars(s, RIGHT, "-")
    agents_ok = mf_agents(u) <= _side_agents(s, LEFT) & _side_agents(s, RIGHT)
    atoms_: set[str] = set()
    for f in s.formulas():
        atoms_ |= all_vars(f)
    for a in (x.body for x in mf_atoms(u)):
        atoms_ |= all_vars(a)
    agent_set = set(s.agents()) | set(mf_agents(u))
    n_models = count_models(len(atoms_), len(agent_set), max_worlds)
    if budget is not None and n_models * max_worlds ** len(s.labels) > budget:
        raise OracleBudgetError("semantic SLIP check exceeds its budget")
    left_ok = right_ok = True
    counterexample = None
    if labels_ok:
        for bm in enumerate_models(sorted(atoms_), sorted(agent_set), max_worlds, budget=None):
            for interp in bit_interpretations(bm, s):
                holds = _bit_mf(bm, interp, u)
                if not holds and left_ok and not _bit_side(bm, interp, s, LEFT):
                    left_ok = False
                    counterexample = f"condition 1 fails: {bm.to_model()} under {interp}"
                if holds and right_ok and not _bit_side(bm, interp, s, RIGHT):
                    right_ok = False
                    counterexample = f"condition 2 fails: {bm.to_model()} under {interp}"
            if not (left_ok or right_ok):
                break
    else:
        left_ok = right_ok = False
    return SlipReport(labels_ok, left_ok, right_ok, vars_ok, agents_ok, counterexample)

