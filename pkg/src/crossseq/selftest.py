"""Acceptance suites: corpora, generators and the eight end-to-end checks.

Each suite returns a :class:`SuiteResult`; :func:`run_all` runs them in
order and feeds the proofs of suites 1-3 into the monotonicity suite.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable

from .cross_sequent import Component, CrossSequent
from .interpolation import (
    check_slip_conditions,
    interpolant_trace,
    interpolate,
    interpolate_split,
    to_box_form,
    to_diamond_form,
)
from .multiformula import LabeledAtom, Multiformula, SConj, SDisj, atoms as mf_atoms, labels as mf_labels
from .prover import ProofTree, check_monotonicity, check_proof, prove_formula
from .semantics import BitModel, bit_interpretations, enumerate_models, evaluate, find_countermodel_bruteforce, verify_model
from .syntax import (
    BOT,
    TOP,
    And,
    Box,
    Dia,
    Formula,
    Lit,
    Or,
    negate,
    parse_nnf,
    pretty,
)

AGENTS = ("a", "b")


@dataclass
class SuiteResult:
    number: int
    name: str
    ok: bool
    summary: str
    seconds: float = 0.0
    failures: list[str] = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"[{status}] criterion {self.number}: {self.name}: {self.summary} ({self.seconds:.1f}s)"

    def to_json(self) -> dict:
        return {
            "criterion": self.number,
            "name": self.name,
            "ok": self.ok,
            "summary": self.summary,
            "failures": self.failures[:20],
        }


def _finish(number: int, name: str, failures: list[str], summary: str, start: float) -> SuiteResult:
    return SuiteResult(number, name, not failures, summary, time.perf_counter() - start, failures)


# --------------------------------------------------------------------------
# Corpora
# --------------------------------------------------------------------------


def hilbert_corpus() -> list[Formula]:
    """Instances of K, T, 4, 5 and boxed (necessitated) instances over {p, q}, {a, b}."""
    bodies = ["p", "q", "~p", "p & q", "p | ~q", "[b]p", "<a>q"]
    pairs = [("p", "q"), ("q", "p"), ("p", "p & q"), ("~q", "[b]p")]
    out: list[str] = []
    for x in AGENTS:
        for f, g in pairs:
            out.append(f"[{x}](({f}) -> ({g})) -> ([{x}]({f}) -> [{x}]({g}))")
        for f in bodies:
            out.append(f"[{x}]({f}) -> ({f})")
            out.append(f"[{x}]({f}) -> [{x}][{x}]({f})")
            out.append(f"<{x}>({f}) -> [{x}]<{x}>({f})")
    for x, y in itertools.product(AGENTS, repeat=2):
        out.append(f"[{y}]([{x}]p -> p)")
        out.append(f"[{y}]([{x}]q -> [{x}][{x}]q)")
        out.append(f"[{y}](<{x}>p -> [{x}]<{x}>p)")
        out.append(f"[{y}]([{x}](p -> q) -> ([{x}]p -> [{x}]q))")
    return [parse_nnf(s) for s in out]


NON_THEOREMS = ["p -> [a]p", "[a]p -> [b]p", "<a><b>p -> <b><a>p", "[a](p | q) -> ([a]p | [a]q)"]


@lru_cache(maxsize=None)
def _formulas_of_size(n: int, atoms: tuple[str, ...], agents: tuple[str, ...], constants: bool) -> tuple[Formula, ...]:
    if n == 1:
        leaves: list[Formula] = []
        for p in atoms:
            leaves += [Lit(p, True), Lit(p, False)]
        if constants:
            leaves += [TOP, BOT]
        return tuple(leaves)
    out: list[Formula] = []
    for a in agents:
        for f in _formulas_of_size(n - 1, atoms, agents, constants):
            out += [Box(a, f), Dia(a, f)]
    for i in range(1, n - 1):
        for x in _formulas_of_size(i, atoms, agents, constants):
            for y in _formulas_of_size(n - 1 - i, atoms, agents, constants):
                out += [And(x, y), Or(x, y)]
    return tuple(out)


def enumerate_formulas(max_size: int, atoms: Iterable[str] = ("p",), agents: Iterable[str] = AGENTS,
                       constants: bool = False) -> list[Formula]:
    """Every NNF formula with at most ``max_size`` syntax-tree nodes, smallest first.

    Literals are single nodes; ``constants`` adds ``true``/``false`` leaves.
    """
    atoms, agents = tuple(atoms), tuple(agents)
    return [f for n in range(1, max_size + 1) for f in _formulas_of_size(n, atoms, agents, constants)]


def random_formula(rng: random.Random, size: int, atoms=("p", "q", "r"), agents=AGENTS) -> Formula:
    """Random NNF formula with exactly ``size`` nodes."""
    if size <= 1:
        roll = rng.random()
        if roll < 0.05:
            return TOP if rng.random() < 0.5 else BOT
        return Lit(rng.choice(atoms), rng.random() < 0.6)
    if size == 2 or rng.random() < 0.35:
        cls = Box if rng.random() < 0.5 else Dia
        return cls(rng.choice(agents), random_formula(rng, size - 1, atoms, agents))
    left = rng.randint(1, size - 2)
    cls = And if rng.random() < 0.5 else Or
    return cls(random_formula(rng, left, atoms, agents), random_formula(rng, size - 1 - left, atoms, agents))


CURATED_IMPLICATIONS = [
    ("true", "[a]p | <a>~p"),
    ("p & q", "q | r"),
    ("[a]p & [a](~p | q)", "[a]q"),
    ("<a>p & [a]q", "<a>(p & q)"),
    ("p", "[a]<a>p"),
    ("[a]p", "[a]([a]p | q)"),
    ("[a][b]p & q", "[a]q | <a><b>p"),
    ("<a>[b]p", "<a>p"),
    ("[a](p & q)", "[a]p & <b>q"),
    ("<a><b>p & [a][b]q", "<a><b>(p & q)"),
    ("[a]p & [b]q", "p & q"),
    ("<b>[a]p", "<b>p"),
    ("[a](p | q) & [a]~q", "[a]p"),
    ("[a][b](p & r)", "[b]p | [a]q"),
    ("<a>p", "<a><b>p"),
    ("[a]<b>p", "<b>p"),
    ("[b]p & <b>~q", "<b>(p & ~q)"),
    ("~<a>p", "[a](~p | q)"),
    ("[a](p -> q) & <a>p", "<a>q"),
    ("[a]p & [b]~p", "[a][a]p & <b>~p"),
]


def curated_pairs() -> list[tuple[Formula, Formula]]:
    return [(parse_nnf(a), parse_nnf(b)) for a, b in CURATED_IMPLICATIONS]


# --------------------------------------------------------------------------
# Suites
# --------------------------------------------------------------------------


def suite_hilbert(proofs: list[ProofTree] | None = None) -> SuiteResult:
    start = time.perf_counter()
    failures = []
    corpus = hilbert_corpus()
    slowest = 0.0
    for f in corpus:
        t0 = time.perf_counter()
        r = prove_formula(f, AGENTS)
        dt = time.perf_counter() - t0
        slowest = max(slowest, dt)
        if not r.proved:
            failures.append(f"not proved: {pretty(f)}")
        elif dt >= 1.0:
            failures.append(f"{pretty(f)} took {dt:.2f}s")
        if proofs is not None:
            proofs += [r.tree, r.search_tree]
    return _finish(1, "Hilbert axiom corpus", failures,
                   f"{len(corpus)} instances proved, slowest {slowest * 1000:.0f}ms", start)


def suite_non_theorems(proofs: list[ProofTree] | None = None) -> SuiteResult:
    start = time.perf_counter()
    failures = []
    for text in NON_THEOREMS:
        f = parse_nnf(text)
        r = prove_formula(f, AGENTS)
        if proofs is not None:
            proofs.append(r.tree)
        if r.proved:
            failures.append(f"proved: {text}")
            continue
        if not verify_model(r.model):
            failures.append(f"invalid countermodel for {text}")
        if evaluate(r.model, r.interpretation[0], f):
            failures.append(f"countermodel does not falsify {text}")
        if len(r.model.worlds) > len(r.leaf.labels):
            failures.append(f"{len(r.model.worlds)} worlds exceed {len(r.leaf.labels)} leaf components for {text}")
    return _finish(2, "non-theorem corpus", failures, f"{len(NON_THEOREMS)} refuted with verified countermodels", start)


def suite_exhaustive(max_size: int = 7, oracle_worlds: int = 3, proofs: list[ProofTree] | None = None,
                     constant_size: int = 4) -> SuiteResult:
    """Every formula over {p}, {a, b} up to ``max_size`` nodes, plus those with constants up to ``constant_size``."""
    start = time.perf_counter()
    failures: list[str] = []
    corpus = enumerate_formulas(max_size)
    corpus += [f for f in enumerate_formulas(constant_size, constants=True) if _has_constant(f)]
    proved = refuted = 0
    for f in corpus:
        try:
            r = prove_formula(f, AGENTS)
        except AssertionError as exc:
            failures.append(f"bound violated on {pretty(f)}: {exc}")
            continue
        if r.proved:
            proved += 1
            if find_countermodel_bruteforce(f, oracle_worlds) is not None:
                failures.append(f"proved but brute force refutes {pretty(f)}")
            report = check_proof(r.tree)
            if not report:
                failures.append(f"check_proof fails on {pretty(f)}: {report.violations[0]}")
            if proofs is not None:
                proofs += [r.tree, r.search_tree]
        else:
            refuted += 1
            if not verify_model(r.model) or evaluate(r.model, r.interpretation[0], f):
                failures.append(f"bad countermodel for {pretty(f)}")
            if proofs is not None:
                proofs.append(r.tree)
    return _finish(3, "exhaustive small formulas", failures,
                   f"{len(corpus)} formulas, {proved} proved, {refuted} refuted", start)


def _has_constant(f: Formula) -> bool:
    if isinstance(f, (And, Or)):
        return _has_constant(f.left) or _has_constant(f.right)
    if isinstance(f, (Box, Dia)):
        return _has_constant(f.body)
    return not isinstance(f, Lit)


def suite_example() -> SuiteResult:
    start = time.perf_counter()
    failures = []
    s = CrossSequent.single(right=[parse_nnf("[a]p"), parse_nnf("<a>~p")])
    tree, repaired, raw = interpolate_split(s)
    rules = tree.rule_sequence()
    if rules != ["R□↛a", "R◇↗a", "RR-id"]:
        failures.append(f"rules are {rules}")
    if (str(raw), str(repaired)) != ("0:([a]true)", "0:(true)"):
        failures.append(f"split interpolants are {raw} and {repaired}")
    report = interpolate(TOP, parse_nnf("[a]p | <a>~p"))
    pre, final = pretty(report.pre_repair_interpolant), pretty(report.interpolant)
    if pre != "[a]true":
        failures.append(f"pre-repair interpolant is {pre}")
    if final != "true":
        failures.append(f"interpolant is {final}")
    return _finish(4, "worked interpolation example", failures,
                   f"pre-repair {pre}, final {final}, rules {', '.join(rules)}", start)


def _generated_pairs(rng: random.Random, count: int) -> list[tuple[Formula, Formula]]:
    out = []
    for _ in range(count):
        phi = random_formula(rng, rng.randint(1, 7))
        rho = random_formula(rng, rng.randint(1, 5))
        out.append((phi, Or(phi, rho)))
    return out


def suite_interpolation(seed: int = 0, count: int = 100) -> SuiteResult:
    start = time.perf_counter()
    failures = []
    pairs = _generated_pairs(random.Random(seed), count) + curated_pairs()
    for phi, psi in pairs:
        try:
            report = interpolate(phi, psi)
        except Exception as exc:  # any failure is a counted failure here
            failures.append(f"{pretty(phi)} / {pretty(psi)}: {type(exc).__name__}: {exc}")
            continue
        if not report.ok:
            failures.append(f"{pretty(phi)} / {pretty(psi)}: {report.to_json()['checks']}")
    return _finish(5, "interpolation property", failures,
                   f"{len(pairs)} implications, all five checks true on {len(pairs) - len(failures)}", start)


def suite_slip(max_worlds: int = 2) -> SuiteResult:
    start = time.perf_counter()
    failures = []
    checked = 0
    for phi, psi in curated_pairs():
        s = CrossSequent.single(left=[negate(phi)], right=[psi])
        tree, _, _ = interpolate_split(s)
        for node, u in interpolant_trace(tree, repair=True):
            checked += 1
            r = check_slip_conditions(u, node.sequent, max_worlds)
            if not r.slip:
                failures.append(f"{pretty(phi)} / {pretty(psi)} at {node.sequent}: {r}")
    return _finish(6, "SLIP invariant along the fold", failures,
                   f"{len(CURATED_IMPLICATIONS)} proofs, {checked} fold nodes", start)


def suite_monotonicity(proofs: list[ProofTree]) -> SuiteResult:
    start = time.perf_counter()
    failures = []
    strict = 0
    for t in proofs:
        report = check_monotonicity(t)
        if not report:
            failures.append(report.violations[0])
        if not check_monotonicity(t, strict=True):
            strict += 1
    return _finish(7, "monotonicity and saturation persistence", failures,
                   f"{len(proofs)} trees; per-member saturation kept everywhere; "
                   f"whole-cluster diamond saturation lost by cluster growth in {strict}", start)


def random_multiformula(rng: random.Random, size: int, labels=(0, 1)) -> Multiformula:
    if size <= 1:
        return LabeledAtom(rng.choice(labels), random_formula(rng, rng.randint(1, 3), atoms=("p", "q")))
    left = rng.randint(1, size - 1)
    cls = SConj if rng.random() < 0.5 else SDisj
    return cls(random_multiformula(rng, left, labels), random_multiformula(rng, size - left, labels))


def _bit_mf(bm: BitModel, interp: dict[int, int], u: Multiformula) -> bool:
    if isinstance(u, LabeledAtom):
        return bool(bm.ext(u.body) >> interp[u.label] & 1)
    if isinstance(u, SConj):
        return _bit_mf(bm, interp, u.left) and _bit_mf(bm, interp, u.right)
    return _bit_mf(bm, interp, u.left) or _bit_mf(bm, interp, u.right)


def _clause_shape_ok(v: Multiformula, l: int, outer, inner) -> bool:
    clauses = [v]
    while any(isinstance(c, outer) for c in clauses):
        clauses = [x for c in clauses for x in ((c.left, c.right) if isinstance(c, outer) else (c,))]
    for c in clauses:
        parts = [c]
        while any(isinstance(x, inner) for x in parts):
            parts = [y for x in parts for y in ((x.left, x.right) if isinstance(x, inner) else (x,))]
        head, rest = parts[0], parts[1:]
        if not isinstance(head, LabeledAtom) or head.label != l or not rest:
            return False
        if any(a.label == l for x in rest for a in mf_atoms(x)):
            return False
    return True


def suite_normal_forms(seed: int = 0, count: int = 200, max_worlds: int = 2) -> SuiteResult:
    start = time.perf_counter()
    failures = []
    rng = random.Random(seed)
    # label 1 sits in an a-bracket of label 0, so interpretations put both in one a-block
    s = CrossSequent([Component(0, (), ()), Component(1, (), (), 0, "a")])
    models = list(enumerate_models(["p", "q"], list(AGENTS), max_worlds))
    envs = [(bm, i) for bm in models for i in bit_interpretations(bm, s)]
    for _ in range(count):
        u = random_multiformula(rng, rng.randint(1, 6))
        l, k = rng.choice([(1, 0), (0, 1)])
        for name, fn, outer, inner in (("box", to_box_form, SConj, SDisj), ("diamond", to_diamond_form, SDisj, SConj)):
            v = fn(u, l, k)
            if not mf_labels(v) <= {0, 1} or not _clause_shape_ok(v, l, outer, inner):
                failures.append(f"{name} form of {u} has the wrong shape: {v}")
                continue
            for bm, interp in envs:
                if _bit_mf(bm, interp, u) != _bit_mf(bm, interp, v):
                    failures.append(f"{name} form of {u} differs on {bm.to_model()} under {interp}")
                    break
    return _finish(8, "normal-form equivalence", failures,
                   f"{count} multiformulas, {len(envs)} model/interpretation pairs each", start)


def run_all(seed: int = 0, oracle_worlds: int = 3, on_result: Callable[[SuiteResult], None] | None = None
            ) -> list[SuiteResult]:
    proofs: list[ProofTree] = []
    runs = [
        lambda: suite_hilbert(proofs),
        lambda: suite_non_theorems(proofs),
        lambda: suite_exhaustive(oracle_worlds=oracle_worlds, proofs=proofs),
        suite_example,
        lambda: suite_interpolation(seed),
        suite_slip,
        lambda: suite_monotonicity(proofs),
        lambda: suite_normal_forms(seed),
    ]
    results = []
    for run in runs:
        result = run()
        results.append(result)
        if on_result is not None:
            on_result(result)
    return results
