import itertools

import pytest
from hypothesis import given, strategies as st

from crossseq.cross_sequent import (
    LEFT,
    RIGHT,
    Component,
    CrossSequent,
    CrossSequentError,
    Hole,
    LabelAllocator,
    cluster,
    cluster_parent,
    clusters,
    depth,
    from_json,
    from_raw,
    iota,
    is_proper,
    raw,
    render,
    resolve,
    to_json,
)
from crossseq.syntax import BOT, Box, Or, atom, parse_nnf

p, q, r = atom("p"), atom("q"), atom("r")

# depth-first labels of the ten-component example
DELTA, G1, T1, T2, T3, G2, LAM, X1, X2, PI = range(10)


def test_example_labels_follow_the_tree(example_one):
    s = example_one
    assert len(s.labels) == 10
    assert [s.component(l).right[0].atom for l in s.labels] == [
        "delta", "g1", "t1", "t2", "t3", "g2", "lam", "x1", "x2", "pi"
    ]
    assert s.children(DELTA, "a") == (G1, G2)
    assert s.children(G1, "b") == (T1, T2, T3)
    assert s.children(X2, "a") == (PI,)


def test_depth_examples(example_one):
    assert depth(CrossSequent.single(right=[p])) == 0
    assert depth(from_raw(raw(p, brackets=[("a", [raw(q)])]))) == 1
    assert depth(example_one) == 3


def test_example_clusters(example_one):
    s = example_one
    assert set(cluster(s, DELTA, "a")) == {DELTA, G1, G2}
    assert set(cluster(s, LAM, "c")) == {LAM, X1, X2}
    assert cluster(s, T1, "a") == (T1,)
    assert sorted(map(sorted, clusters(s, "a"))) == sorted(
        [[DELTA, G1, G2], [T1], [T2], [T3], [LAM], [X1], [X2, PI]]
    )
    assert sorted(map(sorted, clusters(s, "b"))) == sorted(
        [[DELTA, LAM], [G1, T1, T2, T3], [G2], [X1], [X2], [PI]]
    )
    assert sorted(map(sorted, clusters(s, "c"))) == sorted(
        [[DELTA], [G1], [T1], [T2], [T3], [G2], [LAM, X1, X2], [PI]]
    )


def test_cluster_parents(example_one):
    s = example_one
    assert cluster_parent(s, PI, "a") == X2
    assert cluster_parent(s, T2, "b") == G1
    assert cluster_parent(s, G2, "b") is None
    assert cluster_parent(s, DELTA, "a") == DELTA


def test_cluster_unknown_label(example_one):
    with pytest.raises(CrossSequentError):
        cluster(example_one, 42, "a")


def test_cluster_laws(example_one):
    s = example_one
    for agent in "abc":
        parts = clusters(s, agent)
        assert sorted(itertools.chain.from_iterable(parts)) == sorted(s.labels)
        for l, m in itertools.product(s.labels, repeat=2):
            assert (m in cluster(s, l, agent)) == (l in cluster(s, m, agent))
    for l in s.labels:
        for d, e in itertools.combinations("abc", 2):
            assert set(cluster(s, l, d)) & set(cluster(s, l, e)) == {l}


def test_properness_examples():
    S, S2 = raw(p), raw(q)
    assert is_proper(raw(r, brackets=[("a", [S, S2])]))
    assert not is_proper(raw(r, brackets=[("a", [S]), ("a", [S2])]))
    assert not is_proper(raw(r, brackets=[("a", [raw(p, brackets=[("a", [S2])])])]))
    with pytest.raises(CrossSequentError):
        from_raw(raw(r, brackets=[("a", [S]), ("a", [S2])]))


def test_constructor_enforces_condition_b():
    with pytest.raises(CrossSequentError):
        CrossSequent([Component(0), Component(1, (), (p,), 0, "a"), Component(2, (), (q,), 1, "a")])


@pytest.mark.parametrize(
    "components",
    [
        [Component(1)],
        [Component(0), Component(0, parent=0, agent="a")],
        [Component(0), Component(2, parent=1, agent="a")],
        [Component(0), Component(1, parent=0)],
        [],
    ],
)
def test_constructor_rejects_bad_trees(components):
    with pytest.raises(CrossSequentError):
        CrossSequent(components)


def test_iota_examples():
    assert iota(CrossSequent.single(right=[p, q])) == Or(p, q)
    assert iota(from_raw(raw(brackets=[("a", [raw(p)])]))) == Or(BOT, Box("a", p))
    s = from_raw(raw(q, brackets=[("a", [raw(p), raw(r)])]))
    assert iota(s) == Or(Or(q, Box("a", p)), Box("a", r))


def test_resolve_examples():
    s = from_raw(raw(p, brackets=[("a", [raw(q), raw(r)])]))
    assert resolve(s, Hole((), 0)).label == 0
    assert resolve(s, Hole((("a", 0),), 1)).right == (q,)
    with pytest.raises(CrossSequentError):
        resolve(s, Hole((("a", 2),), 3))
    assert s.hole(2) == Hole((("a", 1),), 2)


def test_label_allocator():
    alloc = LabelAllocator()
    first, second = alloc.fresh(), alloc.fresh()
    assert first == 1 and second == 2
    s = from_raw(raw(p, brackets=[("a", [raw(q, label=7)])]))
    assert LabelAllocator.after(s).fresh() == 8


def test_split_sides_and_union():
    s = CrossSequent.single(left=[p, q], right=[q, r])
    assert s.root.formulas == (p, q, r)
    assert s.union(0) == {p, q, r}
    assert s.side_view(LEFT).root.right == () and s.side_view(RIGHT).root.left == ()
    assert s.add_formula(0, LEFT, p) is s


def test_sets_not_sequences():
    a = CrossSequent.single(right=[p, q])
    b = CrossSequent.single(right=[q, p, q])
    assert a == b and hash(a) == hash(b)


def test_render_and_json_round_trip(example_one):
    s = from_raw(raw(parse_nnf("[a]p"), left=[q], brackets=[("a", [raw(p), raw()])]))
    assert render(s) == "q ;#0 [a]p, [;#1 p | ;#2]_a"
    for t in (s, example_one):
        assert from_json(to_json(t)) == t


@given(st.lists(st.sampled_from("ab"), min_size=1, max_size=6), st.data())
def test_random_trees_are_proper_and_clusters_partition(agents, data):
    comps = [Component(0)]
    for i, agent in enumerate(agents, start=1):
        candidates = [c.label for c in comps if c.agent != agent]
        parent = data.draw(st.sampled_from(candidates))
        comps.append(Component(i, (), (atom(f"x{i}"),), parent, agent))
    s = CrossSequent(comps)
    assert is_proper(s)
    for agent in "ab":
        assert sorted(itertools.chain.from_iterable(clusters(s, agent))) == sorted(s.labels)
