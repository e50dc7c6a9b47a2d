import random

import pytest
from hypothesis import given, strategies as st

from catrewire.companion import CompanionEnumerator
from catrewire.necklace import Q_LAMBDA, Q_NS
from catrewire.rewiring import (
    CLOSE,
    OPEN,
    InternalDefectsError,
    MatchingDeficitError,
    NotNonNegativeError,
    UnbalancedError,
    classify_defects,
    closure,
    companion_status,
    contour_corners_ccw,
    contour_corners_cw,
    cyclic_match,
    fast_status,
    inverse_closure_flat,
    is_balanced,
    iterative_match,
    pearl_paths,
    rewire,
    rewire_flat,
    unrewire,
)
from catrewire.trees import CompanionTree, enumerate_nonneg, excess, parse_companion, parse_qtree

SYSTEMS = {"lambda": Q_LAMBDA, "nonseparable": Q_NS}


def test_match_simple():
    m = cyclic_match([OPEN, CLOSE, CLOSE])
    assert m.pairs == ((0, 1),) and m.unmatched == (2,)


def test_match_wraps_around():
    m = cyclic_match([CLOSE, OPEN, CLOSE, OPEN])
    assert m.pairs == ((1, 2), (3, 0)) and m.unmatched == ()


def test_match_deficit():
    with pytest.raises(MatchingDeficitError, match="deficit"):
        cyclic_match([OPEN, OPEN, CLOSE])


@st.composite
def corner_words(draw):
    closes = draw(st.integers(1, 12))
    opens = draw(st.integers(0, closes))
    word = [OPEN] * opens + [CLOSE] * closes
    draw(st.randoms(use_true_random=False)).shuffle(word)
    return word


@given(corner_words(), st.integers(0, 2**32))
def test_matching_does_not_depend_on_schedule(word, seed):
    assert iterative_match(word, random.Random(seed)) == cyclic_match(word)


@given(corner_words())
def test_matching_is_noncrossing_and_leaves_closers_outside(word):
    m = cyclic_match(word)
    assert m.is_noncrossing()
    assert len(m.unmatched) == word.count(CLOSE) - word.count(OPEN)
    assert not any(m.token_enclosed(c) for c in m.unmatched)
    for a, b in m.pairs:
        assert word[a] == OPEN and word[b] == CLOSE


def test_corner_words_of_a_small_tree():
    tree = parse_qtree("d(t())")
    assert contour_corners_cw(tree).kinds() == [OPEN, CLOSE]
    comp = rewire(tree)
    assert contour_corners_ccw(comp).kinds()[0] == CLOSE


@pytest.mark.parametrize(
    "text, image",
    [
        ("d(t())", "@s:sd(ts(_))"),
        ("bb(t()t())", "@s:sbb(st(_)st(_))"),
        ("t()", "@s:st(_)"),
    ],
)
def test_rewire_examples(text, image):
    out = rewire(parse_qtree(text))
    assert str(out) == image
    st_ = companion_status(out)
    assert st_.balanced and st_.internal == 0 and st_.external == excess(parse_qtree(text))


def test_closure_serialization():
    cm = closure(parse_qtree("d(t())"))
    assert cm.serialize() == "d(t())\narcs: (1,1.1)\n"


def test_negative_tree_rejected():
    with pytest.raises(NotNonNegativeError, match="not non-negative"):
        rewire(parse_qtree("d(e())", Q_NS))


def test_unrewire_guards():
    with pytest.raises(UnbalancedError):
        unrewire(parse_companion("@s:st(ds(_))"))
    with pytest.raises(InternalDefectsError, match="internal defects present"):
        unrewire(parse_companion("@s:sd(ts(bsb(_st(_))))"))
    with pytest.raises(UnbalancedError):
        unrewire(parse_companion("@t:ts(_)"))


def test_root_kinds_and_balance():
    assert is_balanced(parse_companion("@t:ts(_)"))
    assert classify_defects(parse_companion("@t:ts(_)")) == (0, 0)
    assert not is_balanced(parse_companion("@d:ds(_)"))
    assert companion_status(parse_companion("@s:sbb(st(_)st(ds(_)))")).internal == 1


@pytest.mark.parametrize("name", SYSTEMS)
@pytest.mark.parametrize("n", range(1, 7))
def test_roundtrip_and_closure_properties(name, n):
    system = SYSTEMS[name]
    for tree in enumerate_nonneg(system, n):
        ft, root, cm = rewire_flat(tree)
        paths = pearl_paths(cm.base, cm.root)
        for d, t in cm.arcs:
            assert paths[t][: len(paths[d])] == paths[d]  # matched inside its own subtree
        assert len(cm.unmatched) == excess(tree)
        assert not any(cm.matching.token_enclosed(i) for i in cm.matching.unmatched)
        image = CompanionTree(ft.nest(root))
        assert unrewire(image) == tree
        # the counterclockwise closure of the image restores the same edge set
        assert inverse_closure_flat(ft, root).edge_set() == cm.edge_set()


@pytest.mark.parametrize("name", SYSTEMS)
@pytest.mark.parametrize("kind", ["s", "b", "t"])
def test_fast_status_agrees(name, kind):
    en = CompanionEnumerator(SYSTEMS[name])
    for n in range(1, 5):
        for k in range(3):
            for node in en.nodes(kind, n, k):
                tree = CompanionTree(node)
                assert fast_status(node) == companion_status(tree)
