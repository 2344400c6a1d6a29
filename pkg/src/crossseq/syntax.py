"""Multi-agent modal formulas: representation, parsing, printing and NNF.

Formulas handed to the rest of the package are always in negation normal
form, built from :class:`Top`, :class:`Bot`, :class:`Lit`, :class:`And`,
:class:`Or`, :class:`Box` and :class:`Dia`.  The parser additionally
produces :class:`Not` and :class:`Implies` nodes; :func:`to_nnf` removes them.

ASCII grammar::

    F ::= true | false | ident | ~F | F & F | F | F | F -> F
        | [agent]F | <agent>F | (F)

Precedence is ``~ [a] <a>`` > ``&`` > ``|`` > ``->``; ``&`` and ``|`` associate
to the left and ``->`` to the right.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator, Union


class _Node:
    __slots__ = ()

    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True, slots=True)
class Top(_Node):
    pass


@dataclass(frozen=True, slots=True)
class Bot(_Node):
    pass


@dataclass(frozen=True, slots=True)
class Lit(_Node):
    atom: str
    positive: bool = True


@dataclass(frozen=True, slots=True)
class And(_Node):
    left: "Node"
    right: "Node"


@dataclass(frozen=True, slots=True)
class Or(_Node):
    left: "Node"
    right: "Node"


@dataclass(frozen=True, slots=True)
class Box(_Node):
    agent: str
    body: "Node"


@dataclass(frozen=True, slots=True)
class Dia(_Node):
    agent: str
    body: "Node"


# Surface-only connectives, never seen outside the parser / to_nnf.
@dataclass(frozen=True, slots=True)
class Not(_Node):
    body: "Node"


@dataclass(frozen=True, slots=True)
class Implies(_Node):
    left: "Node"
    right: "Node"


Formula = Union[Top, Bot, Lit, And, Or, Box, Dia]
Node = Union[Formula, Not, Implies]

TOP = Top()
BOT = Bot()


def atom(name: str) -> Lit:
    return Lit(name, True)


def neg_atom(name: str) -> Lit:
    return Lit(name, False)


def disjoin(formulas: Iterable[Formula]) -> Formula:
    """Left-nested disjunction; the empty disjunction is ``false``."""
    items = list(formulas)
    if not items:
        return BOT
    return reduce(Or, items)


def conjoin(formulas: Iterable[Formula]) -> Formula:
    items = list(formulas)
    if not items:
        return TOP
    return reduce(And, items)


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------


class FormulaSyntaxError(ValueError):
    """Raised for malformed input text; carries a 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.message = message
        self.line = line
        self.column = column


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<arrow>->)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[~&|()\[\]<>])"
)
_KEYWORDS = {"true", "false"}


@dataclass(frozen=True)
class _Token:
    kind: str  # "ident", "true", "false", or the symbol text itself; "eof" at end
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise FormulaSyntaxError(f"unknown token {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind == "ws":
            for i, ch in enumerate(value):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        elif kind == "ident":
            tokens.append(_Token(value if value in _KEYWORDS else "ident", value, line, col))
        else:
            tokens.append(_Token(value, value, line, col))
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek
        if tok.kind != kind:
            found = "end of input" if tok.kind == "eof" else repr(tok.text)
            raise FormulaSyntaxError(f"expected {kind!r}, found {found}", tok.line, tok.column)
        return self.advance()

    def parse(self) -> Node:
        result = self.implication()
        if self.peek.kind != "eof":
            tok = self.peek
            raise FormulaSyntaxError(f"unexpected {tok.text!r}", tok.line, tok.column)
        return result

    def implication(self) -> Node:
        left = self.disjunction()
        if self.peek.kind == "->":
            self.advance()
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Node:
        left = self.conjunction()
        while self.peek.kind == "|":
            self.advance()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Node:
        left = self.unary()
        while self.peek.kind == "&":
            self.advance()
            left = And(left, self.unary())
        return left

    def unary(self) -> Node:
        tok = self.peek
        if tok.kind == "~":
            self.advance()
            return Not(self.unary())
        if tok.kind == "[":
            self.advance()
            agent = self.expect("ident").text
            self.expect("]")
            return Box(agent, self.unary())
        if tok.kind == "<":
            self.advance()
            agent = self.expect("ident").text
            self.expect(">")
            return Dia(agent, self.unary())
        return self.primary()

    def primary(self) -> Node:
        tok = self.advance()
        if tok.kind == "true":
            return TOP
        if tok.kind == "false":
            return BOT
        if tok.kind == "ident":
            return Lit(tok.text, True)
        if tok.kind == "(":
            inner = self.implication()
            self.expect(")")
            return inner
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise FormulaSyntaxError(f"unexpected {found}", tok.line, tok.column)


def parse(text: str) -> Node:
    """Parse ASCII formula text into a surface tree (may contain ``Not``/``Implies``)."""
    return _Parser(text).parse()


def parse_nnf(text: str) -> Formula:
    return to_nnf(parse(text))


# --------------------------------------------------------------------------
# Printing
# --------------------------------------------------------------------------

_PREC = {Implies: 1, Or: 2, And: 3}
_UNARY = 4


def _prec(f: Node) -> int:
    return _PREC.get(type(f), _UNARY)


def pretty(f: Node) -> str:
    """Render in the parser's grammar with the minimum of parentheses."""
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bot):
        return "false"
    if isinstance(f, Lit):
        return f.atom if f.positive else "~" + f.atom
    if isinstance(f, (Box, Dia, Not)):
        prefix = f"[{f.agent}]" if isinstance(f, Box) else f"<{f.agent}>" if isinstance(f, Dia) else "~"
        body = pretty(f.body)
        if _prec(f.body) < _UNARY:
            body = f"({body})"
        return prefix + body
    if isinstance(f, (And, Or)):
        op = " & " if isinstance(f, And) else " | "
        p = _prec(f)
        left = pretty(f.left)
        if _prec(f.left) < p:
            left = f"({left})"
        right = pretty(f.right)
        if _prec(f.right) <= p:
            right = f"({right})"
        return left + op + right
    if isinstance(f, Implies):
        left = pretty(f.left)
        if _prec(f.left) <= 1:
            left = f"({left})"
        right = pretty(f.right)
        if _prec(f.right) < 1:
            right = f"({right})"
        return left + " -> " + right
    raise TypeError(f"not a formula: {f!r}")


# --------------------------------------------------------------------------
# Normal form and negation
# --------------------------------------------------------------------------


def to_nnf(f: Node) -> Formula:
    """Push negations to atoms; ``A -> B`` becomes ``~A | B``."""
    return _nnf(f, True)


def _nnf(f: Node, pos: bool) -> Formula:
    if isinstance(f, Top):
        return TOP if pos else BOT
    if isinstance(f, Bot):
        return BOT if pos else TOP
    if isinstance(f, Lit):
        return f if pos else Lit(f.atom, not f.positive)
    if isinstance(f, Not):
        return _nnf(f.body, not pos)
    if isinstance(f, And):
        cls = And if pos else Or
        return cls(_nnf(f.left, pos), _nnf(f.right, pos))
    if isinstance(f, Or):
        cls = Or if pos else And
        return cls(_nnf(f.left, pos), _nnf(f.right, pos))
    if isinstance(f, Implies):
        cls = Or if pos else And
        return cls(_nnf(f.left, not pos), _nnf(f.right, pos))
    if isinstance(f, Box):
        return Box(f.agent, _nnf(f.body, True)) if pos else Dia(f.agent, _nnf(f.body, False))
    if isinstance(f, Dia):
        return Dia(f.agent, _nnf(f.body, True)) if pos else Box(f.agent, _nnf(f.body, False))
    raise TypeError(f"not a formula: {f!r}")


def negate(f: Formula) -> Formula:
    """NNF of the negation of an NNF formula.  An involution."""
    return _nnf(f, False)


def implies(a: Formula, b: Formula) -> Formula:
    return Or(negate(a), b)


# --------------------------------------------------------------------------
# Syntactic measures
# --------------------------------------------------------------------------


def vars_of(f: Formula, polarity: str) -> frozenset[str]:
    """Atoms occurring with the given polarity (``"+"`` or ``"-"``)."""
    if polarity not in ("+", "-"):
        raise ValueError("polarity must be '+' or '-'")
    want = polarity == "+"
    return frozenset(l.atom for l in literals(f) if l.positive == want)


def all_vars(f: Formula) -> frozenset[str]:
    return frozenset(l.atom for l in literals(f))


def literals(f: Formula) -> Iterator[Lit]:
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Lit):
            yield g
        elif isinstance(g, (And, Or)):
            stack.append(g.right)
            stack.append(g.left)
        elif isinstance(g, (Box, Dia)):
            stack.append(g.body)


def has_literal(f: Formula) -> bool:
    return next(literals(f), None) is not None


def agents_of(f: Formula) -> frozenset[str]:
    found: set[str] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (And, Or)):
            stack.append(g.left)
            stack.append(g.right)
        elif isinstance(g, (Box, Dia)):
            found.add(g.agent)
            stack.append(g.body)
    return frozenset(found)


def modal_depth(f: Formula) -> int:
    if isinstance(f, (And, Or)):
        return max(modal_depth(f.left), modal_depth(f.right))
    if isinstance(f, (Box, Dia)):
        return modal_depth(f.body) + 1
    return 0


def size(f: Formula) -> int:
    """Number of nodes of the syntax tree (a literal counts as one node)."""
    if isinstance(f, (And, Or)):
        return 1 + size(f.left) + size(f.right)
    if isinstance(f, (Box, Dia)):
        return 1 + size(f.body)
    return 1


def subformulas(f: Formula) -> set[Formula]:
    out: set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        if isinstance(g, (And, Or)):
            stack.append(g.left)
            stack.append(g.right)
        elif isinstance(g, (Box, Dia)):
            stack.append(g.body)
    return out


def simplify_constants(f: Formula, modal: bool = True) -> Formula:
    """Fold ``true``/``false`` away using the unit laws.

    With ``modal=True`` a modality over a constant collapses to that constant
    (valid because every accessibility relation is reflexive).  With
    ``modal=False`` only the Boolean unit laws are applied.
    """
    if isinstance(f, (And, Or)):
        left = simplify_constants(f.left, modal)
        right = simplify_constants(f.right, modal)
        absorbing, unit = (Bot, Top) if isinstance(f, And) else (Top, Bot)
        if isinstance(left, absorbing) or isinstance(right, absorbing):
            return absorbing()
        if isinstance(left, unit):
            return right
        if isinstance(right, unit):
            return left
        if left is f.left and right is f.right:
            return f
        return type(f)(left, right)
    if isinstance(f, (Box, Dia)):
        body = simplify_constants(f.body, modal)
        if modal and isinstance(body, (Top, Bot)):
            return body
        return f if body is f.body else type(f)(f.agent, body)
    return f


def is_nnf(f: Node) -> bool:
    if isinstance(f, (Not, Implies)):
        return False
    if isinstance(f, (And, Or)):
        return is_nnf(f.left) and is_nnf(f.right)
    if isinstance(f, (Box, Dia)):
        return is_nnf(f.body)
    return isinstance(f, (Top, Bot, Lit))
