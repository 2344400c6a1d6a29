"""Split cross-sequents: trees of hypersequents with agent-indexed brackets.

A cross-sequent is stored flat, as an ordered collection of labelled
components.  Every non-root component records the label of its parent and
the agent of the bracket it sits in, so the members of the ``a``-bracket of
a component are exactly its children recorded with agent ``a``.  This makes
the "one bracket per agent" consolidation condition structural; the
"no a-bracket inside an a-bracket" condition is checked on construction.

Each component is split into a left and a right part.  Unsplit sequents are
the special case where everything sits on the right.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Mapping, Sequence

from .syntax import Box, Formula, Or, agents_of, disjoin, modal_depth, parse_nnf, pretty

LEFT = "L"
RIGHT = "R"
SIDES = (LEFT, RIGHT)


class CrossSequentError(ValueError):
    pass


@dataclass(frozen=True)
class Component:
    label: int
    left: tuple[Formula, ...] = ()
    right: tuple[Formula, ...] = ()
    parent: int | None = None
    agent: str | None = None

    def side(self, side: str) -> tuple[Formula, ...]:
        return self.left if side == LEFT else self.right

    @property
    def formulas(self) -> tuple[Formula, ...]:
        """Unsplit view, left part first; duplicates across sides removed."""
        seen = dict.fromkeys(self.left)
        seen.update(dict.fromkeys(self.right))
        return tuple(seen)

    def with_formula(self, side: str, f: Formula) -> "Component":
        part = self.side(side)
        if f in part:
            return self
        if side == LEFT:
            return replace(self, left=part + (f,))
        return replace(self, right=part + (f,))


@dataclass(frozen=True)
class Hole:
    """Address of a component: ``(agent, index)`` steps from the root."""

    path: tuple[tuple[str, int], ...]
    label: int

    def to_json(self) -> dict:
        return {"path": [[a, i] for a, i in self.path], "label": self.label}


class CrossSequent:
    """Immutable labelled split cross-sequent.  Root label is 0."""

    __slots__ = ("_components", "_children", "_unions")

    def __init__(self, components: Iterable[Component]):
        comps: dict[int, Component] = {}
        children: dict[int, dict[str, list[int]]] = {}
        for c in components:
            if c.label in comps:
                raise CrossSequentError(f"duplicate label {c.label}")
            if c.parent is None:
                if comps:
                    raise CrossSequentError("only the first component may be the root")
                if c.label != 0:
                    raise CrossSequentError("root label must be 0")
                if c.agent is not None:
                    raise CrossSequentError("root cannot sit in a bracket")
            else:
                if c.parent not in comps:
                    raise CrossSequentError(f"parent {c.parent} of {c.label} must precede it")
                if c.agent is None:
                    raise CrossSequentError(f"component {c.label} has a parent but no agent")
                parent = comps[c.parent]
                if parent.agent == c.agent:
                    # consolidation condition (b)
                    raise CrossSequentError(
                        f"component {c.parent} is an {c.agent}-child and cannot hold an {c.agent}-bracket"
                    )
                children.setdefault(c.parent, {}).setdefault(c.agent, []).append(c.label)
            comps[c.label] = c
        if not comps:
            raise CrossSequentError("a cross-sequent needs a root component")
        self._components = comps
        self._children = children
        self._unions: dict[int, frozenset[Formula]] | None = None

    # -- construction helpers ------------------------------------------------

    @classmethod
    def single(cls, left: Sequence[Formula] = (), right: Sequence[Formula] = ()) -> "CrossSequent":
        return cls([Component(0, tuple(dict.fromkeys(left)), tuple(dict.fromkeys(right)))])

    def replace_component(self, comp: Component) -> "CrossSequent":
        old = self._components[comp.label]
        if old == comp:
            return self
        return CrossSequent(comp if c.label == comp.label else c for c in self._components.values())

    def add_formula(self, label: int, side: str, f: Formula) -> "CrossSequent":
        return self.replace_component(self.component(label).with_formula(side, f))

    def add_child(self, parent: int, agent: str, comp: Component) -> "CrossSequent":
        """New component at the end of ``parent``'s ``agent``-bracket."""
        if comp.label in self._components:
            raise CrossSequentError(f"label {comp.label} already in use")
        return CrossSequent([*self._components.values(), replace(comp, parent=parent, agent=agent)])

    # -- structure -------------------------------------------------------------

    @property
    def root(self) -> Component:
        return self._components[0]

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(self._components)

    @property
    def components(self) -> tuple[Component, ...]:
        return tuple(self._components.values())

    def __contains__(self, label: int) -> bool:
        return label in self._components

    def component(self, label: int) -> Component:
        try:
            return self._components[label]
        except KeyError:
            raise CrossSequentError(f"unknown label {label}") from None

    def children(self, label: int, agent: str) -> tuple[int, ...]:
        return tuple(self._children.get(label, {}).get(agent, ()))

    def brackets(self, label: int) -> dict[str, tuple[int, ...]]:
        return {a: tuple(ls) for a, ls in self._children.get(label, {}).items()}

    def union(self, label: int) -> frozenset[Formula]:
        if self._unions is None:
            self._unions = {l: frozenset(c.left) | frozenset(c.right) for l, c in self._components.items()}
        return self._unions[label]

    def agents(self) -> frozenset[str]:
        out = {c.agent for c in self._components.values() if c.agent is not None}
        for c in self._components.values():
            for f in c.formulas:
                out |= agents_of(f)
        return frozenset(out)

    def formulas(self) -> Iterator[Formula]:
        for c in self._components.values():
            yield from c.formulas

    def side_view(self, side: str) -> "CrossSequent":
        """``L(S)`` or ``R(S)``: drop the other half of every component, keep the shape."""
        out = []
        for c in self._components.values():
            part = c.side(side)
            out.append(replace(c, left=part, right=()) if side == LEFT else replace(c, left=(), right=part))
        return CrossSequent(out)

    def hole(self, label: int) -> Hole:
        steps: list[tuple[str, int]] = []
        cur = self.component(label)
        while cur.parent is not None:
            siblings = self.children(cur.parent, cur.agent)
            steps.append((cur.agent, siblings.index(cur.label)))
            cur = self._components[cur.parent]
        return Hole(tuple(reversed(steps)), label)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CrossSequent):
            return NotImplemented
        return canonical(self) == canonical(other)

    def __hash__(self) -> int:
        return hash(canonical(self))

    def __repr__(self) -> str:
        return f"CrossSequent({render(self)!r})"

    def __str__(self) -> str:
        return render(self)


def canonical(s: CrossSequent) -> tuple:
    """Order-insensitive key: formula sets per side, tree shape by label."""
    return tuple(
        sorted(
            (c.label, frozenset(c.left), frozenset(c.right), c.parent, c.agent)
            for c in s.components
        )
    )


# --------------------------------------------------------------------------
# Raw (possibly improper) trees, used to build and to validate shapes
# --------------------------------------------------------------------------


@dataclass
class RawComponent:
    formulas: Sequence[Formula] = ()
    brackets: list[tuple[str, list["RawComponent"]]] = field(default_factory=list)
    left: Sequence[Formula] = ()
    label: int | None = None


def raw(*formulas: Formula, brackets: Iterable[tuple[str, Iterable[RawComponent]]] = (),
        left: Sequence[Formula] = (), label: int | None = None) -> RawComponent:
    """Build a raw tree node; ``formulas`` go on the right, ``left`` on the left."""
    return RawComponent(tuple(formulas), [(a, list(ms)) for a, ms in brackets], tuple(left), label)


def _raw_is_proper(node: RawComponent, inside: str | None) -> bool:
    seen: set[str] = set()
    for agent, members in node.brackets:
        if agent in seen or agent == inside or not members:
            return False
        seen.add(agent)
        if not all(_raw_is_proper(m, agent) for m in members):
            return False
    return True


def from_raw(node: RawComponent) -> CrossSequent:
    """Label a raw tree depth-first (root 0) unless labels are given."""
    if not _raw_is_proper(node, None):
        raise CrossSequentError("improper cross-sequent")
    out: list[Component] = []
    counter = [0]

    def walk(n: RawComponent, parent: int | None, agent: str | None) -> None:
        label = n.label if n.label is not None else counter[0]
        counter[0] = max(counter[0], label) + 1
        out.append(Component(label, tuple(dict.fromkeys(n.left)), tuple(dict.fromkeys(n.formulas)), parent, agent))
        for a, members in n.brackets:
            for m in members:
                walk(m, label, a)

    walk(node, None, None)
    return CrossSequent(out)


def is_proper(s: CrossSequent | RawComponent) -> bool:
    """Both consolidation conditions hold everywhere."""
    if isinstance(s, RawComponent):
        return _raw_is_proper(s, None)
    for c in s.components:
        if c.agent is not None and s.children(c.label, c.agent):
            return False
    return True


# --------------------------------------------------------------------------
# Measures, clusters, formula interpretation
# --------------------------------------------------------------------------


def depth(s: CrossSequent, label: int = 0) -> int:
    best = 0
    for members in s.brackets(label).values():
        for m in members:
            best = max(best, depth(s, m) + 1)
    return best


def formula_depth(s: CrossSequent) -> int:
    return max((modal_depth(f) for f in s.formulas()), default=0)


def cluster_head(s: CrossSequent, label: int, agent: str) -> int:
    c = s.component(label)
    return c.parent if c.agent == agent else label


def cluster(s: CrossSequent, label: int, agent: str) -> tuple[int, ...]:
    """Labels of the ``agent``-cluster of ``label``, parent first."""
    head = cluster_head(s, label, agent)
    return (head, *s.children(head, agent))


def cluster_parent(s: CrossSequent, label: int, agent: str) -> int | None:
    head = cluster_head(s, label, agent)
    return head if s.children(head, agent) else None


def clusters(s: CrossSequent, agent: str) -> list[tuple[int, ...]]:
    """Partition of all labels into ``agent``-clusters."""
    out = []
    for c in s.components:
        if c.agent != agent:
            out.append(cluster(s, c.label, agent))
    return out


def resolve(s: CrossSequent, hole: Hole) -> Component:
    label = 0
    for agent, index in hole.path:
        members = s.children(label, agent)
        if not 0 <= index < len(members):
            raise CrossSequentError(f"dangling path step ({agent}, {index}) below {label}")
        label = members[index]
    if label != hole.label:
        raise CrossSequentError(f"path leads to {label}, hole names {hole.label}")
    return s.component(label)


def iota(s: CrossSequent, label: int = 0) -> Formula:
    """Formula interpretation of the subtree rooted at ``label`` (unsplit view)."""
    c = s.component(label)
    result = disjoin(c.formulas)
    for agent, members in s.brackets(label).items():
        for m in members:
            result = Or(result, Box(agent, iota(s, m)))
    return result


class LabelAllocator:
    """Issues strictly increasing labels, never reused within one session."""

    def __init__(self, start: int = 1):
        self._next = start

    @classmethod
    def after(cls, s: CrossSequent) -> "LabelAllocator":
        return cls(max(s.labels) + 1)

    def fresh(self) -> int:
        label = self._next
        self._next += 1
        return label

    @property
    def peek(self) -> int:
        return self._next


# --------------------------------------------------------------------------
# Rendering
# --------------------------------------------------------------------------


def render(s: CrossSequent, label: int = 0) -> str:
    """``l1, l2 ;#k r1, r2, [ ... | ... ]_a``."""
    c = s.component(label)
    left = ", ".join(pretty(f) for f in c.left)
    items = [pretty(f) for f in c.right]
    for agent, members in s.brackets(label).items():
        items.append("[" + " | ".join(render(s, m) for m in members) + f"]_{agent}")
    head = f"{left} ;#{label}" if left else f";#{label}"
    return f"{head} {', '.join(items)}" if items else head


def to_json(s: CrossSequent, label: int = 0) -> dict:
    c = s.component(label)
    return {
        "label": label,
        "left": [pretty(f) for f in c.left],
        "right": [pretty(f) for f in c.right],
        "brackets": {a: [to_json(s, m) for m in ms] for a, ms in s.brackets(label).items()},
    }


def from_json(data: Mapping) -> CrossSequent:
    out: list[Component] = []

    def walk(node: Mapping, parent: int | None, agent: str | None) -> None:
        out.append(
            Component(
                int(node["label"]),
                tuple(dict.fromkeys(parse_nnf(t) for t in node.get("left", []))),
                tuple(dict.fromkeys(parse_nnf(t) for t in node.get("right", []))),
                parent,
                agent,
            )
        )
        for a, members in node.get("brackets", {}).items():
            for m in members:
                walk(m, int(node["label"]), a)

    walk(data, None, None)
    return CrossSequent(out)
