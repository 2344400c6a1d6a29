import pytest
from hypothesis import settings, strategies as st

from crossseq.syntax import BOT, TOP, And, Box, Dia, Lit, Or

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def formulas(atoms=("p", "q"), agents=("a", "b"), max_leaves=6, constants=True):
    """Hypothesis strategy for NNF formulas."""
    leaves = st.builds(Lit, st.sampled_from(atoms), st.booleans())
    if constants:
        leaves = leaves | st.sampled_from([TOP, BOT])
    ag = st.sampled_from(agents)
    return st.recursive(
        leaves,
        lambda sub: st.builds(And, sub, sub)
        | st.builds(Or, sub, sub)
        | st.builds(Box, ag, sub)
        | st.builds(Dia, ag, sub),
        max_leaves=max_leaves,
    )


@pytest.fixture
def example_one():
    """The ten-component sequent Delta, [G1, [T1|T2|T3]_b | G2]_a, [L, [X1 | X2, [P]_a]_c]_b."""
    from crossseq.cross_sequent import from_raw, raw
    from crossseq.syntax import atom

    def comp(name, **kw):
        return raw(atom(name), **kw)

    tree = comp(
        "delta",
        brackets=[
            ("a", [comp("g1", brackets=[("b", [comp("t1"), comp("t2"), comp("t3")])]), comp("g2")]),
            ("b", [comp("lam", brackets=[("c", [comp("x1"), comp("x2", brackets=[("a", [comp("pi")])])])])]),
        ],
    )
    return from_raw(tree)
