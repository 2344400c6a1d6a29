"""Label-annotated formulas joined by structural conjunction and disjunction."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator, Union

from .syntax import And, Bot, Formula, Or, Top, agents_of, pretty, simplify_constants, vars_of


@dataclass(frozen=True)
class LabeledAtom:
    label: int
    body: Formula

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class SConj:
    left: "Multiformula"
    right: "Multiformula"

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class SDisj:
    left: "Multiformula"
    right: "Multiformula"

    def __str__(self) -> str:
        return render(self)


Multiformula = Union[LabeledAtom, SConj, SDisj]


class ProjectionError(ValueError):
    pass


def sconj(parts: Iterable[Multiformula]) -> Multiformula:
    return reduce(SConj, parts)


def sdisj(parts: Iterable[Multiformula]) -> Multiformula:
    return reduce(SDisj, parts)


def atoms(u: Multiformula) -> Iterator[LabeledAtom]:
    stack = [u]
    while stack:
        v = stack.pop()
        if isinstance(v, LabeledAtom):
            yield v
        else:
            stack.append(v.right)
            stack.append(v.left)


def labels(u: Multiformula) -> frozenset[int]:
    return frozenset(a.label for a in atoms(u))


def forget_labels(u: Multiformula) -> Formula:
    """Label-forgetting projection, defined for any multiformula."""
    if isinstance(u, LabeledAtom):
        return u.body
    cls = And if isinstance(u, SConj) else Or
    return cls(forget_labels(u.left), forget_labels(u.right))


def project(u: Multiformula) -> Formula:
    """Projection of a single-label multiformula to a plain formula."""
    found = labels(u)
    if len(found) != 1:
        raise ProjectionError(f"projection needs exactly one label, found {sorted(found)}")
    return forget_labels(u)


def mf_vars(u: Multiformula, polarity: str) -> frozenset[str]:
    return vars_of(forget_labels(u), polarity)


def mf_agents(u: Multiformula) -> frozenset[str]:
    return agents_of(forget_labels(u))


def simplify(u: Multiformula, modal: bool = True) -> Multiformula:
    """Constant folding lifted to multiformulas.

    ``l:false`` is a unit for disjunction and absorbs conjunction; ``l:true``
    dually.  Bodies are simplified with :func:`simplify_constants`.
    """
    if isinstance(u, LabeledAtom):
        body = simplify_constants(u.body, modal)
        return u if body is u.body else LabeledAtom(u.label, body)
    left = simplify(u.left, modal)
    right = simplify(u.right, modal)
    absorbing, unit = (Bot, Top) if isinstance(u, SConj) else (Top, Bot)
    for x in (left, right):
        if isinstance(x, LabeledAtom) and isinstance(x.body, absorbing):
            return x
    if isinstance(left, LabeledAtom) and isinstance(left.body, unit):
        return right
    if isinstance(right, LabeledAtom) and isinstance(right.body, unit):
        return left
    if left is u.left and right is u.right:
        return u
    return type(u)(left, right)


def render(u: Multiformula) -> str:
    if isinstance(u, LabeledAtom):
        return f"{u.label}:({pretty(u.body)})"
    op = " && " if isinstance(u, SConj) else " || "
    return f"({render(u.left)}{op}{render(u.right)})"


def to_json(u: Multiformula) -> dict:
    if isinstance(u, LabeledAtom):
        return {"label": u.label, "formula": pretty(u.body)}
    return {"and" if isinstance(u, SConj) else "or": [to_json(u.left), to_json(u.right)]}

