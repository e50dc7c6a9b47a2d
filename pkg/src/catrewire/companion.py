"""Companion trees: grammar enumeration, validation and the structural bijections.

Grammar, for a vertex entered at some pearl: every other black pearl takes a
square-entered child, every diamond pearl a triangle-entered child, a
triangle pearl either a diamond-entered child or nothing (a defect), and a
square pearl that is not the entry either a black-entered child or nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .necklace import NecklaceSystem, rotations
from .rewiring import (
    UnbalancedError,
    fast_status,
    inverse_closure,
    inverse_closure_flat,
    rewire_flat,
)
from .trees import (
    CompanionTree,
    FlatTree,
    InvalidTreeError,
    Node,
    Pearl,
    QTree,
    check_ceiling,
    flatten,
    format_companion_node,
    iter_nodes,
    pearl_counts,
    square_based,
)

CHILD_ENTRY = {"b": "s", "d": "t", "t": "d", "s": "b"}
ROOT_KINDS = ("s", "b", "d", "t")


class CompanionEnumerator:
    """Memoized generation and counting of rooted companion trees.

    Classes are indexed by (entry kind, size, defects).  A root vertex and a
    non-root vertex entered at the same kind of pearl expand the same way.
    """

    def __init__(self, system: NecklaceSystem, max_pearls: int | None = None):
        self.system = system
        self.words: dict[str, list[tuple[str, int]]] = {}
        for kind in ROOT_KINDS:
            rots = rotations(system, kind, max_pearls)
            self.words[kind] = [(r.word, r.origin.size) for r in rots]
        if any(sz < 1 for ws in self.words.values() for _, sz in ws):
            raise ValueError("companion enumeration needs every necklace size to be at least 1")
        self._nodes: dict = {}
        self._slots: dict = {}
        self._ncount: dict = {}
        self._scount: dict = {}

    # counts ---------------------------------------------------------------
    def count(self, kind: str, n: int, k: int) -> int:
        key = (kind, n, k)
        hit = self._ncount.get(key)
        if hit is not None:
            return hit
        total = 0
        if n >= 1 and k >= 0:
            for word, sz in self.words[kind]:
                if sz <= n:
                    total += self.slot_count(word[1:], n - sz, k)
        self._ncount[key] = total
        return total

    def slot_count(self, suffix: str, m: int, k: int) -> int:
        key = (suffix, m, k)
        hit = self._scount.get(key)
        if hit is not None:
            return hit
        if not suffix:
            total = 1 if (m == 0 and k == 0) else 0
        else:
            c, rest = suffix[0], suffix[1:]
            total = 0
            if c == "t" and k > 0:
                total += self.slot_count(rest, m, k - 1)
            elif c == "s":
                total += self.slot_count(rest, m, k)
            child = CHILD_ENTRY[c]
            for m1 in range(1, m + 1):
                for k1 in range(k + 1):
                    a = self.count(child, m1, k1)
                    if a:
                        total += a * self.slot_count(rest, m - m1, k - k1)
        self._scount[key] = total
        return total

    def count_any(self, kind: str, n: int) -> int:
        """Total over every defect count."""
        # at most one defect per triangle pearl, so the sum is finite
        total, k = 0, 0
        while True:
            c = self.count(kind, n, k)
            if c == 0 and k > self._max_triangles(n):
                return total
            total += c
            k += 1

    def _max_triangles(self, n: int) -> int:
        per = max((w.count("t") for ws in self.words.values() for w, _ in ws), default=0)
        return per * n

    # trees ----------------------------------------------------------------
    def nodes(self, kind: str, n: int, k: int) -> list[Node]:
        key = (kind, n, k)
        hit = self._nodes.get(key)
        if hit is not None:
            return hit
        out = []
        if n >= 1 and k >= 0:
            for word, sz in self.words[kind]:
                if sz <= n:
                    out.extend((word, kids) for kids in self.slots(word[1:], n - sz, k))
        self._nodes[key] = out
        return out

    def slots(self, suffix: str, m: int, k: int) -> list[tuple]:
        key = (suffix, m, k)
        hit = self._slots.get(key)
        if hit is not None:
            return hit
        if not suffix:
            out = [()] if (m == 0 and k == 0) else []
        else:
            c, rest = suffix[0], suffix[1:]
            out = []
            if c == "t" and k > 0:
                out.extend((None,) + tail for tail in self.slots(rest, m, k - 1))
            elif c == "s":
                out.extend((None,) + tail for tail in self.slots(rest, m, k))
            child = CHILD_ENTRY[c]
            for m1 in range(1, m + 1):
                for k1 in range(k + 1):
                    kids = self.nodes(child, m1, k1)
                    if not kids:
                        continue
                    tails = self.slots(rest, m - m1, k - k1)
                    out.extend((kid,) + tail for kid in kids for tail in tails)
        self._slots[key] = out
        return out


def count_companion(system: NecklaceSystem, size: int, root_kind: str = "s",
                    defects: int | None = 0, max_pearls: int | None = None) -> int:
    en = CompanionEnumerator(system, max_pearls)
    if defects is None:
        return en.count_any(root_kind, size)
    return en.count(root_kind, size, defects)


def _predicted(en: CompanionEnumerator, kind: str, size: int, defects: int | None) -> int:
    total = 0
    for n in range(1, size + 1):
        total += en.count_any(kind, n) if defects is None else sum(
            en.count(kind, n, k) for k in range(defects + 1))
    return total


def enumerate_companion(system: NecklaceSystem, size: int, root_kind: str = "s",
                        defects: int | None = 0, max_pearls: int | None = None) -> list[CompanionTree]:
    """Trees of one size and root kind; ``defects=None`` means any number of defects."""
    if size < 1:
        raise ValueError("size must be at least 1")
    if defects is not None and defects < 0:
        raise ValueError("defects must be non-negative")
    en = CompanionEnumerator(system, max_pearls)
    kind = "s" if root_kind == "u" else root_kind
    check_ceiling(_predicted(en, kind, size, defects), f"{root_kind}-rooted companion trees up to size {size}")
    if defects is None:
        nodes = [n for k in range(en._max_triangles(size) + 1) for n in en.nodes(kind, size, k)]
    else:
        nodes = en.nodes(kind, size, defects)
    if root_kind != "u":
        return [CompanionTree(n) for n in nodes]
    seen: dict = {}
    for n in nodes:
        u = forget_root_any(CompanionTree(n))
        seen.setdefault(u.node, u)
    return sorted(seen.values(), key=lambda t: t.node)


def enumerate_balanced(system: NecklaceSystem, size: int, defects: int,
                       max_pearls: int | None = None) -> list[CompanionTree]:
    """Square-rooted balanced companion trees with the given external defects and no internal one."""
    en = CompanionEnumerator(system, max_pearls)
    check_ceiling(_predicted(en, "s", size, defects), f"companion trees up to size {size}")
    out = []
    for n in en.nodes("s", size, defects):
        st = fast_status(n)
        if st.balanced and st.internal == 0:
            out.append(CompanionTree(n))
    return out


# -- validation -------------------------------------------------------------

def validate_companion(tree: CompanionTree, system: NecklaceSystem | None = None) -> None:
    root = tree.node
    if root[0].count("s") != 1:
        raise InvalidTreeError("every vertex has exactly one square pearl")
    for n in iter_nodes(root):
        word, kids = n
        if word.count("s") != 1 or len(kids) != len(word) - 1:
            raise InvalidTreeError(f"malformed vertex {word!r}")
        if system is not None and system.lookup(square_based(word)[1:]) is None:
            raise InvalidTreeError(f"necklace of {word!r} not in system {system.name!r}")
        for c, kid in zip(word[1:], kids):
            if kid is None:
                if c in "bd":
                    raise InvalidTreeError(f"pearl {c!r} of {word!r} has no edge")
            elif kid[0][0] != CHILD_ENTRY[c]:
                raise InvalidTreeError(f"edge {c}-{kid[0][0]} is neither black nor blue")
    c = pearl_counts(root)
    extra = 0 if tree.root_kind in ("b", "d") else 1
    if c["s"] != c["b"] + c["d"] + extra:
        raise InvalidTreeError("pearl counts violate |s| = |b| + |d| + [root not b/d]")


def defect_count(tree: CompanionTree) -> int:
    """Non-root free triangle pearls."""
    k = 0
    for n in iter_nodes(tree.node):
        k += sum(1 for c, kid in zip(n[0][1:], n[1]) if c == "t" and kid is None)
    return k


def brute_force_companion(system: NecklaceSystem, size: int, root_kind: str = "s",
                          defects: int = 0, max_pearls: int | None = None) -> list[CompanionTree]:
    """Companion trees from unconstrained attachments, filtered by validation.

    Every pearl may stay free or take any child whose entry pearl gives a
    black or blue edge; only then are degree rules and defects checked.
    """
    entries = {kind: [(r.word, r.origin.size) for r in rotations(system, kind, max_pearls)]
               for kind in ROOT_KINDS}
    memo: dict = {}

    def gen(kind: str, n: int) -> list[Node]:
        if (kind, n) in memo:
            return memo[(kind, n)]
        out = []
        for word, sz in entries[kind]:
            if sz > n:
                continue
            for kids in gen_slots(word[1:], n - sz):
                out.append((word, kids))
        memo[(kind, n)] = out
        return out

    def gen_slots(suffix: str, m: int) -> list[tuple]:
        if not suffix:
            return [()] if m == 0 else []
        out = [(None,) + t for t in gen_slots(suffix[1:], m)]
        for m1 in range(1, m + 1):
            for kid in gen(CHILD_ENTRY[suffix[0]], m1):
                out.extend((kid,) + t for t in gen_slots(suffix[1:], m - m1))
        return out

    result = []
    for node in gen(root_kind, size):
        tree = CompanionTree(node)
        try:
            validate_companion(tree, system)
        except InvalidTreeError:
            continue
        if defect_count(tree) == defects:
            result.append(tree)
    return result


# -- rooting ----------------------------------------------------------------

def unrooted_key(ft: FlatTree) -> Node:
    """Least nested form over all rootings at a free square pearl."""
    return min((ft.nest(p) for p in ft.free_pearls("s")), key=format_companion_node)


def forget_root_any(tree: CompanionTree) -> CompanionTree:
    ft, _ = tree.flat()
    return CompanionTree(unrooted_key(ft), rooted=False)


def forget_root(tree: CompanionTree) -> CompanionTree:
    st = fast_status(tree.node)
    if tree.root_kind != "s" or not st.balanced:
        raise UnbalancedError("unbalanced input")
    if st.internal or st.external:
        raise ValueError("forget_root expects a defect-free tree")
    return forget_root_any(tree)


def root_balanced(tree: CompanionTree) -> CompanionTree:
    """Root an unrooted tree at the square pearl its inverse closure leaves unmatched."""
    if defect_count(tree):
        raise ValueError("root_balanced expects a defect-free tree")
    cm = inverse_closure(tree)
    (p,) = cm.unmatched
    return CompanionTree(cm.base.nest(p))


# -- unbalanced trees as pairs ----------------------------------------------

def _root_partner(cm) -> Pearl:
    """Diamond pearl matched with the root square (token 0)."""
    for a, b in cm.matching.pairs:
        if b == 0:
            return cm.word.tokens[a][1]
    raise UnbalancedError("balanced input: the root square is unmatched")


def split_unbalanced(tree: CompanionTree) -> tuple[CompanionTree, CompanionTree]:
    if tree.root_kind != "s":
        raise ValueError("split expects a square-rooted tree")
    if defect_count(tree):
        raise ValueError("split expects a defect-free tree")
    cm = inverse_closure(tree)
    y = _root_partner(cm)
    ft = cm.base.copy()
    z = ft.unlink(y)
    return CompanionTree(ft.nest(y)), CompanionTree(ft.nest(z))


def _merge(a: Node, b: Node) -> tuple[FlatTree, Pearl, Pearl]:
    fa, ea = flatten(a)
    fb, eb = flatten(b)
    off = len(fa.words)
    ft = FlatTree(fa.words + fb.words, dict(fa.links))
    for (v, i), (w, j) in fb.links.items():
        ft.links[(v + off, i)] = (w + off, j)
    return ft, (0, ea[0]), (off, eb[0])


def join_pair(diamond_rooted: CompanionTree, triangle_rooted: CompanionTree) -> CompanionTree:
    if diamond_rooted.root_kind != "d" or triangle_rooted.root_kind != "t":
        raise ValueError("join expects a diamond-rooted and a triangle-rooted tree")
    ft, y, z = _merge(diamond_rooted.node, triangle_rooted.node)
    ft.link(y, z)
    cm = inverse_closure_flat(ft, ft.free_pearls("s")[0])
    for a, b in cm.arcs:
        if a == y:
            return CompanionTree(ft.nest(b))
    raise AssertionError("joined diamond left unmatched")


# -- marked trees -----------------------------------------------------------

@dataclass(frozen=True)
class MarkedDecomposition:
    """A vertex-marked companion tree split at the marked vertex.

    ``attachment`` is the black-rooted tree hanging from the marked square, if
    any; ``main`` is the tree read from the marked square.
    """

    attachment: Optional[Node]
    main: Node

    @property
    def necklace(self) -> str:
        return self.main[0][1:]

    @property
    def size(self) -> int:
        from .trees import vertex_count

        return vertex_count(self.main) + (vertex_count(self.attachment) if self.attachment else 0)


def _preorder(ft: FlatTree, root: Pearl) -> list[int]:
    out = []
    stack = [root]
    while stack:
        v, e = stack.pop()
        out.append(v)
        L = len(ft.words[v])
        for off in range(L - 1, 0, -1):
            q = ft.links.get((v, (e + off) % L))
            if q is not None:
                stack.append(q)
    return out


def decompose_marked(tree: CompanionTree, vertex: int) -> MarkedDecomposition:
    """Split an unrooted tree at a marked vertex (numbered in ``tree.flat()`` preorder)."""
    ft, _ = tree.flat()
    ft = ft.copy()
    sq = (vertex, 0)
    attachment = None
    if sq in ft.links:
        q = ft.unlink(sq)
        attachment = ft.nest(q)
    return MarkedDecomposition(attachment, ft.nest(sq))


def recompose_marked(dec: MarkedDecomposition) -> tuple[CompanionTree, int]:
    if dec.attachment is None:
        ft, entries = flatten(dec.main)
        marked = 0
    else:
        ft, sq, b = _merge(dec.main, dec.attachment)
        ft.link(sq, b)
        marked = 0
    key = unrooted_key(ft)
    root = next(p for p in ft.free_pearls("s") if ft.nest(p) == key)
    return CompanionTree(key, rooted=False), _preorder(ft, root).index(marked)


def enumerate_marked(system: NecklaceSystem, size: int, max_pearls: int | None = None) -> list[MarkedDecomposition]:
    """The marked-vertex class: an optional black-rooted attachment times a square-rooted tree."""
    en = CompanionEnumerator(system, max_pearls)
    out = [MarkedDecomposition(None, n) for n in en.nodes("s", size, 0)]
    for a in range(1, size):
        mains = en.nodes("s", size - a, 0)
        for att in en.nodes("b", a, 0):
            out.extend(MarkedDecomposition(att, m) for m in mains)
    return out


def count_marked(system: NecklaceSystem, size: int, max_pearls: int | None = None) -> int:
    en = CompanionEnumerator(system, max_pearls)
    return en.count("s", size, 0) + sum(en.count("b", a, 0) * en.count("s", size - a, 0) for a in range(1, size))


# -- marked diamonds ----------------------------------------------------------

def mark_diamond_reroot(tree: QTree, marked: tuple[int, ...]) -> CompanionTree:
    """Rewire an excess-0 tree and reroot at the square its marked diamond was wired to.

    ``marked`` is a pearl path (child offsets, then a pearl position).
    """
    from .rewiring import pearl_paths
    from .trees import excess

    if excess(tree) != 0:
        raise ValueError("nonzero excess")
    ft, root, cm = rewire_flat(tree)
    where = {path: p for p, path in pearl_paths(cm.base, cm.root).items()}
    x = where.get(tuple(marked))
    if x is None or cm.base.kind(x) != "d":
        raise ValueError("marked pearl not a diamond")
    return CompanionTree(ft.nest(cm.base.links[x]))


def unmark_diamond(tree: CompanionTree) -> tuple[QTree, tuple[int, ...]]:
    """Inverse of :func:`mark_diamond_reroot` on unbalanced defect-free trees."""
    from .rewiring import pearl_paths

    if tree.root_kind != "s" or defect_count(tree):
        raise ValueError("expects a square-rooted defect-free tree")
    cm = inverse_closure(tree)
    x = _root_partner(cm)
    (u,) = cm.unmatched
    ft = cm.base.copy()
    for d, _ in cm.arcs:
        ft.unlink(d)
    for d, s in cm.arcs:
        ft.link(d, s)
    return QTree(ft.nest(u)), pearl_paths(ft, u)[x]


def diamond_paths(tree: QTree) -> list[tuple[int, ...]]:
    from .rewiring import pearl_paths

    ft, root = tree.flat()
    return sorted(path for p, path in pearl_paths(ft, root).items() if ft.kind(p) == "d")
