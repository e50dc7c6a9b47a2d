"""Corner words, cyclic arc matching, closure and the rewiring maps.

The clockwise closure of a non-negative Q-tree grows a half edge at the
opening corner of every diamond pearl and matches it with the next free
triangle corner; trading red edges for the resulting blue arcs is the
rewiring.  The counterclockwise closure of a companion tree matches diamond
corners with free square corners and gives the way back.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .trees import (
    CompanionTree,
    FlatTree,
    Pearl,
    PlaneTree,
    QTree,
    format_companion,
    format_qtree,
    is_nonnegative,
    walk,
)

OPEN = "open"
CLOSE = "close"


class MatchingDeficitError(ValueError):
    pass


class NotNonNegativeError(ValueError):
    pass


class UnbalancedError(ValueError):
    pass


class InternalDefectsError(ValueError):
    pass


@dataclass(frozen=True)
class CornerWord:
    tokens: tuple  # ((OPEN|CLOSE, pearl), ...) in walk order
    orientation: str  # "cw" or "ccw"
    marks: dict = field(default_factory=dict)  # pearl -> gap index (gap g sits before token g)
    root_gap: int = 0

    def kinds(self) -> list[str]:
        return [k for k, _ in self.tokens]

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class ArcMatching:
    length: int
    pairs: tuple  # ((open index, close index), ...) sorted by open index
    unmatched: tuple  # close indices

    def encloses_token(self, arc: tuple[int, int], c: int) -> bool:
        a, b = arc
        L = self.length
        return 0 < (c - a) % L < (b - a) % L

    def encloses_gap(self, arc: tuple[int, int], g: int) -> bool:
        a, b = arc
        L = self.length
        return 1 <= (g - a) % L <= (b - a) % L

    def gap_enclosed(self, g: int) -> bool:
        return any(self.encloses_gap(arc, g) for arc in self.pairs)

    def token_enclosed(self, c: int) -> bool:
        return any(self.encloses_token(arc, c) for arc in self.pairs)

    def is_noncrossing(self) -> bool:
        for i, x in enumerate(self.pairs):
            for y in self.pairs[i + 1:]:
                inside = [self.encloses_token(x, e) for e in y]
                if inside[0] != inside[1]:
                    return False
        return True


def cyclic_match(word: CornerWord | Sequence[str]) -> ArcMatching:
    """Stack matching of openers with the next free closer, around the cycle."""
    kinds = word.kinds() if isinstance(word, CornerWord) else list(word)
    opens = kinds.count(OPEN)
    if opens > len(kinds) - opens:
        raise MatchingDeficitError(f"deficit: {opens} openers, {len(kinds) - opens} closers")
    match: dict[int, int] = {}
    stack: list[int] = []
    for i, k in enumerate(kinds):
        if k == OPEN:
            stack.append(i)
        elif stack:
            match[stack.pop()] = i
    if stack:
        used = set(match.values())
        for i, k in enumerate(kinds):
            if not stack:
                break
            if k == CLOSE and i not in used:
                match[stack.pop()] = i
    used = set(match.values())
    unmatched = tuple(i for i, k in enumerate(kinds) if k == CLOSE and i not in used)
    return ArcMatching(len(kinds), tuple(sorted(match.items())), unmatched)


def iterative_match(word: CornerWord | Sequence[str], rng: random.Random) -> ArcMatching:
    """Match adjacent opener/closer pairs one at a time, in random order."""
    kinds = word.kinds() if isinstance(word, CornerWord) else list(word)
    L = len(kinds)
    if kinds.count(OPEN) > L - kinds.count(OPEN):
        raise MatchingDeficitError("deficit")
    alive = list(range(L))
    match: dict[int, int] = {}
    while True:
        ready = [
            j for j in range(len(alive))
            if kinds[alive[j]] == OPEN and kinds[alive[(j + 1) % len(alive)]] == CLOSE
        ]
        if not ready:
            break
        j = rng.choice(ready)
        a, b = alive[j], alive[(j + 1) % len(alive)]
        match[a] = b
        alive = [x for x in alive if x not in (a, b)]
    unmatched = tuple(i for i in alive if kinds[i] == CLOSE)
    return ArcMatching(L, tuple(sorted(match.items())), unmatched)


# -- clockwise side ---------------------------------------------------------

def _cw_word(ft: FlatTree, root: Pearl) -> CornerWord:
    tokens = []
    marks = {}
    for ev, p in walk(ft, root, +1):
        c = ft.kind(p)
        if ev == "leave":
            if c == "d":
                tokens.append((OPEN, p))
        elif c == "t":
            tokens.append((CLOSE, p))
        else:
            marks[p] = len(tokens)
    return CornerWord(tuple(tokens), "cw", marks)


def contour_corners_cw(tree: PlaneTree) -> CornerWord:
    ft, root = tree.flat()
    return _cw_word(ft, root)


@dataclass
class ClosedMap:
    base: FlatTree
    root: Optional[Pearl]
    word: CornerWord
    matching: ArcMatching
    color: str  # colour of the arcs: "blue" for the closure, "red" for the inverse

    @property
    def arcs(self) -> list[tuple[Pearl, Pearl]]:
        t = self.word.tokens
        return [(t[a][1], t[b][1]) for a, b in self.matching.pairs]

    @property
    def unmatched(self) -> list[Pearl]:
        return [self.word.tokens[i][1] for i in self.matching.unmatched]

    def edge_set(self) -> frozenset:
        """Tree edges and arcs together, as unordered pearl pairs."""
        edges = {frozenset((a, b)) for a, b in self.base.links.items()}
        edges.update(frozenset(arc) for arc in self.arcs)
        return frozenset(edges)

    def pearl_paths(self) -> dict[Pearl, tuple[int, ...]]:
        return pearl_paths(self.base, self.root)

    def serialize(self) -> str:
        node = self.base.nest(self.root)
        head = format_qtree(node) if self.color == "blue" else format_companion(CompanionTree(node))
        paths = self.pearl_paths()
        arcs = " ".join(
            "(" + ".".join(map(str, paths[a])) + "," + ".".join(map(str, paths[b])) + ")"
            for a, b in self.arcs
        )
        return head + "\narcs: " + arcs + "\n"


def pearl_paths(ft: FlatTree, root: Pearl) -> dict[Pearl, tuple[int, ...]]:
    """Child offsets from the root, then the pearl position in its vertex."""
    out: dict[Pearl, tuple[int, ...]] = {}
    stack = [(root[0], root[1], ())]
    while stack:
        v, e, path = stack.pop()
        L = len(ft.words[v])
        for off in range(L):
            p = (v, (e + off) % L)
            out[p] = path + (off,)
            if off:
                q = ft.links.get(p)
                if q is not None:
                    stack.append((q[0], q[1], path + (off,)))
    return out


def closure(tree: QTree) -> ClosedMap:
    if not is_nonnegative(tree):
        raise NotNonNegativeError("not non-negative")
    ft, root = tree.flat()
    word = _cw_word(ft, root)
    return ClosedMap(ft, root, word, cyclic_match(word), "blue")


def _swap_arcs(ft: FlatTree, arcs) -> FlatTree:
    out = ft.copy()
    for d, _ in arcs:
        out.unlink(d)
    for d, p in arcs:
        out.link(d, p)
    return out


def rewire_flat(tree: QTree) -> tuple[FlatTree, Pearl, ClosedMap]:
    """Rewired flat tree (same vertex numbering as ``tree.flat()``), its root, and the closure."""
    cm = closure(tree)
    return _swap_arcs(cm.base, cm.arcs), cm.root, cm


def rewire(tree: QTree) -> CompanionTree:
    ft, root, _ = rewire_flat(tree)
    return CompanionTree(ft.nest(root))


# -- counterclockwise side --------------------------------------------------

def _start_pearl(tree: PlaneTree) -> tuple[FlatTree, Pearl]:
    # unrooted trees are stored written from a free square pearl
    return tree.flat()


def _ccw_word(ft: FlatTree, root: Pearl) -> CornerWord:
    tokens = []
    marks = {}
    for ev, p in walk(ft, root, -1):
        c = ft.kind(p)
        if c == "d":
            if ev == "leave" or p == root:
                tokens.append((OPEN, p))
        elif ev == "free":
            if c == "s":
                tokens.append((CLOSE, p))
            elif c == "t" or p == root:
                marks[p] = len(tokens)
    return CornerWord(tuple(tokens), "ccw", marks)


def contour_corners_ccw(tree: PlaneTree) -> CornerWord:
    ft, root = _start_pearl(tree)
    return _ccw_word(ft, root)


def inverse_closure(tree: CompanionTree) -> ClosedMap:
    ft, root = _start_pearl(tree)
    return inverse_closure_flat(ft, root)


def inverse_closure_flat(ft: FlatTree, start: Pearl) -> ClosedMap:
    word = _ccw_word(ft, start)
    return ClosedMap(ft, start, word, cyclic_match(word), "red")


def _balanced(tree: PlaneTree, cm: ClosedMap) -> bool:
    kind = tree.root_kind
    if kind == "u":
        raise ValueError("balance is defined for rooted trees")
    if kind == "d":
        return False
    if kind == "s":
        # the root square is token 0 of its own walk
        return cm.matching.unmatched == (0,)
    return not cm.matching.gap_enclosed(cm.word.marks[cm.root])


def is_balanced(tree: CompanionTree) -> bool:
    return _balanced(tree, inverse_closure(tree))


def _defects(cm: ClosedMap) -> tuple[int, int]:
    internal = external = 0
    for p, g in cm.word.marks.items():
        if p == cm.root or cm.base.kind(p) != "t":
            continue
        if cm.matching.gap_enclosed(g):
            internal += 1
        else:
            external += 1
    return internal, external


def classify_defects(tree: CompanionTree) -> tuple[int, int]:
    """(internal, external) counts of non-root free triangle pearls."""
    return _defects(inverse_closure(tree))


@dataclass(frozen=True)
class CompanionStatus:
    balanced: bool
    internal: int
    external: int


def companion_status(tree: CompanionTree) -> CompanionStatus:
    cm = inverse_closure(tree)
    internal, external = _defects(cm)
    return CompanionStatus(_balanced(tree, cm), internal, external)


def fast_status(node) -> CompanionStatus:
    """:func:`companion_status` computed straight from a nested rooted node."""
    kinds: list[str] = []
    defects: list[int] = []

    def visit(n) -> None:
        w, kids = n
        for off in range(len(w) - 1, 0, -1):
            kid = kids[off - 1]
            if kid is None:
                c = w[off]
                if c == "s":
                    kinds.append(CLOSE)
                elif c == "t":
                    defects.append(len(kinds))
            else:
                if w[off] == "d":
                    kinds.append(OPEN)
                visit(kid)
                if kid[0][0] == "d":
                    kinds.append(OPEN)

    kind = node[0][0]
    if kind == "s":
        kinds.append(CLOSE)
    elif kind == "d":
        kinds.append(OPEN)
    visit(node)
    m = cyclic_match(kinds)
    if kind == "s":
        balanced = m.unmatched == (0,)
    elif kind == "d":
        balanced = False
    else:
        balanced = not m.gap_enclosed(0)
    internal = sum(1 for g in defects if m.gap_enclosed(g))
    return CompanionStatus(balanced, internal, len(defects) - internal)


def unrewire_flat(tree: CompanionTree) -> tuple[FlatTree, Pearl, ClosedMap]:
    if tree.root_kind != "s":
        raise UnbalancedError("unbalanced input: the root must be a square pearl")
    cm = inverse_closure(tree)
    if not _balanced(tree, cm):
        raise UnbalancedError("unbalanced input")
    internal, _ = _defects(cm)
    if internal:
        raise InternalDefectsError(f"internal defects present ({internal})")
    return _swap_arcs(cm.base, cm.arcs), cm.root, cm


def unrewire(tree: CompanionTree) -> QTree:
    ft, root, _ = unrewire_flat(tree)
    return QTree(ft.nest(root))
