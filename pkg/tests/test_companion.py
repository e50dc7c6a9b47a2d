import pytest

from catrewire.companion import (
    CompanionEnumerator,
    brute_force_companion,
    count_companion,
    count_marked,
    decompose_marked,
    defect_count,
    diamond_paths,
    enumerate_balanced,
    enumerate_companion,
    enumerate_marked,
    forget_root,
    join_pair,
    mark_diamond_reroot,
    recompose_marked,
    root_balanced,
    split_unbalanced,
    unmark_diamond,
    validate_companion,
)
from catrewire.necklace import Q_LAMBDA, Q_NS
from catrewire.rewiring import UnbalancedError, fast_status
from catrewire.trees import (
    CompanionTree,
    InvalidTreeError,
    ResourceLimitError,
    TreeSyntaxError,
    count_table,
    enumerate_nonneg,
    format_companion,
    parse_companion,
    parse_qtree,
    vertex_count,
)

SYSTEMS = {"lambda": Q_LAMBDA, "nonseparable": Q_NS}

LAMBDA = {
    "s": [0, 2, 0, 0, 12, 0, 0, 128],
    "d": [1, 0, 0, 4, 0, 0, 40],
    "t": [1, 0, 0, 4, 0, 0, 40],
    "b": [0, 0, 4, 0, 0, 40],
}
NS = [1, 3, 12, 55, 273, 1428, 7752, 43263]


@pytest.mark.parametrize("kind", "sdtb")
def test_lambda_companion_counts(kind):
    want = LAMBDA[kind]
    assert [count_companion(Q_LAMBDA, n, kind, 0) for n in range(1, len(want) + 1)] == want


@pytest.mark.parametrize("kind", "sdtb")
def test_nonseparable_companion_counts(kind):
    assert [count_companion(Q_NS, n, kind, 0) for n in range(1, 9)] == NS


@pytest.mark.parametrize("name", SYSTEMS)
@pytest.mark.parametrize("kind", "sbdt")
@pytest.mark.parametrize("n", range(1, 5))
def test_grammar_matches_brute_force(name, kind, n):
    system = SYSTEMS[name]
    for k in range(3):
        got = {t.node for t in enumerate_companion(system, n, kind, k)}
        want = {t.node for t in brute_force_companion(system, n, kind, k)}
        assert got == want
        assert len(got) == count_companion(system, n, kind, k)


def test_enumerated_trees_validate():
    for tree in enumerate_companion(Q_NS, 4, "s", None):
        validate_companion(tree, Q_NS)


def test_validate_rejects_bad_edges():
    with pytest.raises(InvalidTreeError):
        validate_companion(CompanionTree(("sd", (None,))), Q_LAMBDA)
    with pytest.raises(InvalidTreeError):
        validate_companion(CompanionTree(("sbb", (("st", (None,)), None))), Q_LAMBDA)


def test_companion_text_roundtrip():
    for text in ["@s:sd(ts(_))", "@u:sbb(st(_)sd(ts(_)))", "@t:ts(_)", "@b:bbs(st(_)_)"]:
        assert format_companion(parse_companion(text)) == text


@pytest.mark.parametrize("text", ["s:st(_)", "@q:st(_)", "@s:tt(_)", "@s:st(_", "@d:st(_)"])
def test_companion_syntax_errors(text):
    with pytest.raises(TreeSyntaxError):
        parse_companion(text)


def test_defect_count():
    assert defect_count(parse_companion("@s:sbb(st(_)st(_))")) == 2
    assert defect_count(parse_companion("@t:ts(_)")) == 0


def test_unrooted_dedup():
    # one unrooted class per rooting orbit
    trees = enumerate_companion(Q_LAMBDA, 5, "u", 0)
    assert len(trees) == len({t.node for t in trees})
    assert len(trees) == count_table(Q_LAMBDA, 5)[5][0]


def test_balanced_enumeration_matches_rewiring():
    images = {}
    for tree in enumerate_nonneg(Q_NS, 5):
        from catrewire.rewiring import rewire, companion_status

        img = rewire(tree)
        images.setdefault(companion_status(img).external, set()).add(img.node)
    for k, imgs in images.items():
        assert {t.node for t in enumerate_balanced(Q_NS, 5, k)} == imgs


def test_ceiling_on_companion_enumeration(monkeypatch):
    monkeypatch.setenv("REWIRE_CEILING", "50")
    with pytest.raises(ResourceLimitError):
        enumerate_companion(Q_NS, 4, "s", 0)


@pytest.mark.parametrize("name", SYSTEMS)
@pytest.mark.parametrize("n", range(2, 7))
def test_split_join_roundtrip(name, n):
    system = SYSTEMS[name]
    en = CompanionEnumerator(system)
    pairs = set()
    for node in en.nodes("s", n, 0):
        if fast_status(node).balanced:
            continue
        tree = CompanionTree(node)
        a, b = split_unbalanced(tree)
        assert a.root_kind == "d" and b.root_kind == "t"
        assert a.size + b.size == n
        assert join_pair(a, b) == tree
        pairs.add((a.node, b.node))
    assert len(pairs) == sum(en.count("d", a, 0) * en.count("t", n - a, 0) for a in range(1, n))


def test_split_rejects_balanced():
    with pytest.raises(UnbalancedError):
        split_unbalanced(parse_companion("@s:sd(ts(_))"))


@pytest.mark.parametrize("name", SYSTEMS)
@pytest.mark.parametrize("n", range(1, 7))
def test_forget_and_reroot(name, n):
    system = SYSTEMS[name]
    seen = set()
    for tree in enumerate_balanced(system, n, 0):
        u = forget_root(tree)
        assert u.root_kind == "u"
        assert root_balanced(u) == tree
        seen.add(u.node)
    assert len(seen) == count_table(system, n)[n].get(0, 0)


def test_forget_rejects_unbalanced():
    with pytest.raises(UnbalancedError):
        forget_root(parse_companion("@s:st(ds(_))"))


@pytest.mark.parametrize("name", SYSTEMS)
@pytest.mark.parametrize("n", range(1, 7))
def test_marked_vertices(name, n):
    system = SYSTEMS[name]
    f = count_table(system, n)[n].get(0, 0)
    marked = enumerate_marked(system, n)
    assert len(marked) == count_marked(system, n) == n * f
    assert all(d.size == n for d in marked)
    keys = set()
    for tree in enumerate_balanced(system, n, 0):
        u = forget_root(tree)
        for v in range(vertex_count(u.node)):
            dec = decompose_marked(u, v)
            assert recompose_marked(dec) == (u, v)
            keys.add((dec.attachment, dec.main))
    assert keys == {(d.attachment, d.main) for d in marked}


@pytest.mark.parametrize("name", SYSTEMS)
@pytest.mark.parametrize("n", range(1, 7))
def test_marked_diamonds(name, n):
    system = SYSTEMS[name]
    images = set()
    for tree in enumerate_nonneg(system, n, 0):
        for path in diamond_paths(tree):
            img = mark_diamond_reroot(tree, path)
            assert not fast_status(img.node).balanced
            assert unmark_diamond(img) == (tree, path)
            images.add(img.node)
    en = CompanionEnumerator(system)
    unbalanced = {x for x in en.nodes("s", n, 0) if not fast_status(x).balanced}
    assert images == unbalanced


def test_mark_diamond_errors():
    with pytest.raises(ValueError, match="nonzero excess"):
        mark_diamond_reroot(parse_qtree("t()"), (0,))
    with pytest.raises(ValueError, match="not a diamond"):
        mark_diamond_reroot(parse_qtree("d(t())"), (1, 1))
