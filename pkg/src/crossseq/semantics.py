"""Kripke semantics for multi-agent S5.

Each agent's accessibility relation is stored as a partition of the worlds,
so reflexivity, symmetry and transitivity hold by construction whenever the
partition is well formed (see :func:`verify_model`).  An agent with no entry
in ``relations`` is read as the identity relation.

Besides pointwise truth, this module evaluates cross-sequents and
multiformulas under interpretations, and provides a brute-force model
enumerator that serves as an oracle independent of the proof search.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterator, Mapping, Sequence

from .cross_sequent import CrossSequent
from .multiformula import LabeledAtom, Multiformula, SConj
from .syntax import And, Bot, Box, Dia, Formula, Lit, Or, Top, agents_of, all_vars

World = Hashable
Interpretation = Mapping[int, World]

DEFAULT_MAX_WORLDS = 3
DEFAULT_MODEL_BUDGET = 250_000


class ModelError(ValueError):
    pass


class InterpretationError(ValueError):
    pass


class OracleBudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class KripkeModel:
    worlds: tuple
    relations: Mapping[str, tuple[tuple, ...]] = field(default_factory=dict)
    valuation: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "worlds", tuple(self.worlds))
        object.__setattr__(
            self, "relations", {a: tuple(tuple(b) for b in blocks) for a, blocks in sorted(self.relations.items())}
        )
        object.__setattr__(self, "valuation", {p: frozenset(ws) for p, ws in sorted(self.valuation.items())})
        index: dict[str, dict] = {}
        for agent, blocks in self.relations.items():
            lookup: dict = {}
            for block in blocks:
                fs = frozenset(block)
                for w in block:
                    lookup.setdefault(w, fs)
            index[agent] = lookup
        object.__setattr__(self, "_blocks", index)
        object.__setattr__(self, "_world_set", frozenset(self.worlds))

    def __hash__(self) -> int:
        return hash((self.worlds, tuple(self.relations.items()), tuple(self.valuation.items())))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KripkeModel):
            return NotImplemented
        return (self.worlds, self.relations, self.valuation) == (other.worlds, other.relations, other.valuation)

    def block(self, agent: str, w: World) -> frozenset:
        """The ``agent``-equivalence class of ``w``."""
        self._check_world(w)
        lookup = self._blocks.get(agent)
        if lookup is None:
            return frozenset([w])
        return lookup.get(w, frozenset([w]))

    def _check_world(self, w: World) -> None:
        if w not in self._world_set:
            raise ModelError(f"unknown world {w!r}")

    def true_atoms(self, w: World) -> list[str]:
        return [p for p, ws in self.valuation.items() if w in ws]


def evaluate(m: KripkeModel, w: World, f: Formula) -> bool:
    """``M, w |= f``."""
    m._check_world(w)
    return _eval(m, w, f)


def _eval(m: KripkeModel, w: World, f: Formula) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Lit):
        return (w in m.valuation.get(f.atom, ())) == f.positive
    if isinstance(f, And):
        return _eval(m, w, f.left) and _eval(m, w, f.right)
    if isinstance(f, Or):
        return _eval(m, w, f.left) or _eval(m, w, f.right)
    if isinstance(f, Box):
        return all(_eval(m, v, f.body) for v in m.block(f.agent, w))
    if isinstance(f, Dia):
        return any(_eval(m, v, f.body) for v in m.block(f.agent, w))
    raise TypeError(f"not an NNF formula: {f!r}")


def check_interpretation(m: KripkeModel, interp: Interpretation, s: CrossSequent) -> None:
    for label in s.labels:
        if label not in interp:
            raise InterpretationError(f"label {label} is not interpreted")
        m._check_world(interp[label])
    for c in s.components:
        if c.parent is not None and interp[c.label] not in m.block(c.agent, interp[c.parent]):
            raise InterpretationError(
                f"labels {c.parent} and {c.label} share an {c.agent}-cluster but their worlds are not {c.agent}-related"
            )


def eval_cross_sequent(m: KripkeModel, interp: Interpretation, s: CrossSequent, check: bool = True) -> bool:
    """True iff some formula of some component holds at that component's world."""
    if check:
        check_interpretation(m, interp, s)
    return any(_eval(m, interp[c.label], f) for c in s.components for f in c.formulas)


def eval_multiformula(m: KripkeModel, interp: Interpretation, u: Multiformula) -> bool:
    if isinstance(u, LabeledAtom):
        if u.label not in interp:
            raise InterpretationError(f"label {u.label} is not interpreted")
        return evaluate(m, interp[u.label], u.body)
    if isinstance(u, SConj):
        return eval_multiformula(m, interp, u.left) and eval_multiformula(m, interp, u.right)
    return eval_multiformula(m, interp, u.left) or eval_multiformula(m, interp, u.right)


# --------------------------------------------------------------------------
# Model checking on small models with bitmask extensions
# --------------------------------------------------------------------------


class BitModel:
    """Model over worlds ``0..n-1`` with extensions computed as bitmasks."""

    __slots__ = ("n", "agents", "blocks", "valuation", "_cache")

    def __init__(self, n: int, partitions: Mapping[str, Sequence[int]], valuation: Mapping[str, int]):
        self.n = n
        # partitions[a][w] = block id of w
        self.blocks: dict[str, list[int]] = {}
        for agent, rgs in partitions.items():
            masks: dict[int, int] = {}
            for w, b in enumerate(rgs):
                masks[b] = masks.get(b, 0) | (1 << w)
            self.blocks[agent] = list(masks.values())
        self.agents = tuple(partitions)
        self.valuation = dict(valuation)
        self._cache: dict[Formula, int] = {}

    def ext(self, f: Formula) -> int:
        hit = self._cache.get(f)
        if hit is not None:
            return hit
        full = (1 << self.n) - 1
        if isinstance(f, Top):
            r = full
        elif isinstance(f, Bot):
            r = 0
        elif isinstance(f, Lit):
            v = self.valuation.get(f.atom, 0)
            r = v if f.positive else full & ~v
        elif isinstance(f, And):
            r = self.ext(f.left) & self.ext(f.right)
        elif isinstance(f, Or):
            r = self.ext(f.left) | self.ext(f.right)
        elif isinstance(f, (Box, Dia)):
            body = self.ext(f.body)
            blocks = self.blocks.get(f.agent)
            if blocks is None:
                r = body
            elif isinstance(f, Box):
                r = 0
                for b in blocks:
                    if b & body == b:
                        r |= b
            else:
                r = 0
                for b in blocks:
                    if b & body:
                        r |= b
        else:
            raise TypeError(f"not an NNF formula: {f!r}")
        self._cache[f] = r
        return r

    def same_block(self, agent: str, v: int, w: int) -> bool:
        blocks = self.blocks.get(agent)
        if blocks is None:
            return v == w
        for b in blocks:
            if b >> v & 1:
                return bool(b >> w & 1)
        return False

    def block_worlds(self, agent: str, w: int) -> list[int]:
        blocks = self.blocks.get(agent)
        if blocks is None:
            return [w]
        for b in blocks:
            if b >> w & 1:
                return [v for v in range(self.n) if b >> v & 1]
        return [w]

    def to_model(self) -> KripkeModel:
        worlds = list(range(self.n))
        relations = {
            a: [[v for v in range(self.n) if b >> v & 1] for b in blocks] for a, blocks in self.blocks.items()
        }
        valuation = {p: [v for v in range(self.n) if mask >> v & 1] for p, mask in self.valuation.items()}
        return KripkeModel(tuple(worlds), relations, valuation)


def set_partitions(n: int) -> Iterator[tuple[int, ...]]:
    """All partitions of ``range(n)`` as restricted growth strings, in lexicographic order."""
    if n == 0:
        yield ()
        return

    def grow(prefix: list[int], top: int) -> Iterator[tuple[int, ...]]:
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for b in range(top + 2):
            prefix.append(b)
            yield from grow(prefix, max(top, b))
            prefix.pop()

    yield from grow([0], 0)


def _bell(n: int) -> int:
    return sum(1 for _ in set_partitions(n))


def count_models(n_atoms: int, n_agents: int, max_worlds: int) -> int:
    return sum(_bell(n) ** n_agents * 2 ** (n * n_atoms) for n in range(1, max_worlds + 1))


def enumerate_models(
    atoms: Sequence[str],
    agents: Sequence[str],
    max_worlds: int = DEFAULT_MAX_WORLDS,
    budget: int | None = DEFAULT_MODEL_BUDGET,
) -> Iterator[BitModel]:
    """Every model with 1..max_worlds worlds over the given atoms and agents.

    Order: world count, then per-agent partitions (agents in the given
    order), then valuations.  Raises :class:`OracleBudgetError` up front if
    the number of models would exceed ``budget``.
    """
    if max_worlds < 1:
        raise ValueError("max_worlds must be at least 1")
    atoms = list(atoms)
    agents = list(agents)
    total = count_models(len(atoms), len(agents), max_worlds)
    if budget is not None and total > budget:
        raise OracleBudgetError(f"{total} models exceed the budget of {budget}")
    for n in range(1, max_worlds + 1):
        parts = list(set_partitions(n))
        for choice in itertools.product(parts, repeat=len(agents)):
            partitions = dict(zip(agents, choice))
            for vals in itertools.product(range(1 << n), repeat=len(atoms)):
                yield BitModel(n, partitions, dict(zip(atoms, vals)))


def find_countermodel_bruteforce(
    f: Formula, max_worlds: int = DEFAULT_MAX_WORLDS, budget: int | None = DEFAULT_MODEL_BUDGET
) -> tuple[KripkeModel, int] | None:
    """First model (in enumeration order) and world falsifying ``f``, or ``None``."""
    atoms = sorted(all_vars(f))
    agents = sorted(agents_of(f))
    for bm in enumerate_models(atoms, agents, max_worlds, budget):
        e = bm.ext(f)
        full = (1 << bm.n) - 1
        if e != full:
            w = next(v for v in range(bm.n) if not e >> v & 1)
            return bm.to_model(), w
    return None


def bit_interpretations(bm: BitModel, s: CrossSequent) -> Iterator[dict[int, int]]:
    """All maps from the labels of ``s`` to worlds of ``bm`` that respect its clusters."""
    comps = s.components
    assign: dict[int, int] = {}

    def go(i: int) -> Iterator[dict[int, int]]:
        if i == len(comps):
            yield dict(assign)
            return
        c = comps[i]
        candidates = range(bm.n) if c.parent is None else bm.block_worlds(c.agent, assign[c.parent])
        for w in candidates:
            assign[c.label] = w
            yield from go(i + 1)
        del assign[c.label]

    yield from go(0)


# --------------------------------------------------------------------------
# Validation and JSON
# --------------------------------------------------------------------------


@dataclass
class Report:
    ok: bool
    violations: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": list(self.violations)}


def verify_model(m: KripkeModel) -> Report:
    problems: list[str] = []
    worlds = list(m.worlds)
    world_set = set(worlds)
    if not worlds:
        problems.append("model has no worlds")
    if len(world_set) != len(worlds):
        problems.append("duplicate world ids")
    for agent, blocks in m.relations.items():
        seen: set = set()
        for block in blocks:
            if not block:
                problems.append(f"agent {agent}: empty block")
            for w in block:
                if w not in world_set:
                    problems.append(f"agent {agent}: block mentions unknown world {w!r}")
                if w in seen:
                    problems.append(f"agent {agent}: world {w!r} lies in overlapping blocks")
                seen.add(w)
        missing = world_set - seen
        if missing:
            problems.append(f"agent {agent}: worlds {sorted(missing, key=repr)} not covered")
    for atom, ws in m.valuation.items():
        extra = set(ws) - world_set
        if extra:
            problems.append(f"atom {atom}: valuation mentions unknown worlds {sorted(extra, key=repr)}")
    return Report(not problems, problems)


def model_to_json(m: KripkeModel, interp: Interpretation | None = None) -> dict:
    data: dict = {
        "worlds": list(m.worlds),
        "relations": {a: [list(b) for b in blocks] for a, blocks in m.relations.items()},
        "valuation": {p: sorted(ws, key=lambda w: (str(type(w)), w)) for p, ws in m.valuation.items()},
    }
    if interp is not None:
        data["interpretation"] = {str(k): v for k, v in sorted(interp.items())}
    return data


def model_from_json(data: Mapping) -> KripkeModel:
    try:
        worlds = data["worlds"]
        relations = data.get("relations", {})
        valuation = data.get("valuation", {})
        if not isinstance(worlds, list) or not isinstance(relations, dict) or not isinstance(valuation, dict):
            raise TypeError
        return KripkeModel(
            tuple(worlds),
            {str(a): [list(b) for b in blocks] for a, blocks in relations.items()},
            {str(p): list(ws) for p, ws in valuation.items()},
        )
    except (KeyError, TypeError) as exc:
        raise ModelError(f"invalid model JSON: {exc!r}") from exc


def interpretation_from_json(data: Mapping) -> dict[int, World]:
    return {int(k): v for k, v in data.items()}
