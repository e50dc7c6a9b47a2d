"""Plane trees over necklace vertices, Q-trees, excess and the parking process.

A rooted tree is stored as a nested node ``(word, kids)``.  ``word`` is the
vertex necklace read clockwise from its entry pearl: the root pearl for the
root vertex, and the pearl linked to the parent otherwise.  ``kids[j]`` is the
subtree hanging from pearl ``word[j + 1]`` or ``None`` when that pearl is free.
Every pearl carries at most one edge, so this nesting fixes the plane
embedding and doubles as a canonical form.

For surgery (rewiring, rerooting) trees are flattened into a
:class:`FlatTree`: words written from their square pearl plus a symmetric
pearl-to-pearl link table.
"""

from __future__ import annotations

import os
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator

from .necklace import NecklaceSystem, Weight

Node = tuple  # (word: str, kids: tuple[Node | None, ...])
Pearl = tuple  # (vertex id, index in the square-based word)

DEFAULT_CEILING = 10**7


class ResourceLimitError(RuntimeError):
    pass


class TreeSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"position {position}: {message}")
        self.position = position


class InvalidTreeError(ValueError):
    pass


def ceiling() -> int:
    raw = os.environ.get("REWIRE_CEILING")
    return int(raw) if raw else DEFAULT_CEILING


def check_ceiling(predicted: int, what: str) -> None:
    limit = ceiling()
    if predicted > limit:
        raise ResourceLimitError(
            f"{what}: {predicted} trees would be materialized, ceiling is {limit}"
        )


def square_based(word: str) -> str:
    i = word.index("s")
    return word[i:] + word[:i]


# -- nested nodes -----------------------------------------------------------

def iter_nodes(node: Node) -> Iterator[Node]:
    stack = [node]
    while stack:
        cur = stack.pop()
        yield cur
        stack.extend(k for k in reversed(cur[1]) if k is not None)


def vertex_count(node: Node) -> int:
    return sum(1 for _ in iter_nodes(node))


def necklace_multiset(node: Node) -> Counter:
    """Vertex necklaces with rotation forgotten."""
    return Counter(square_based(n[0])[1:] for n in iter_nodes(node))


def pearl_counts(node: Node) -> Counter:
    c: Counter = Counter()
    for n in iter_nodes(node):
        c.update(n[0])
    return c


def tree_size(node: Node, system: NecklaceSystem | None = None) -> int:
    if system is None or not system.graded:
        return vertex_count(node)
    total = 0
    for n in iter_nodes(node):
        s = system.lookup(square_based(n[0])[1:])
        if s is None:
            raise InvalidTreeError(f"necklace {n[0]!r} not in system {system.name!r}")
        total += s.size
    return total


def subtree_at(node: Node, path: tuple[int, ...]) -> Node:
    """Follow child pearl offsets from the root."""
    for off in path:
        if not 1 <= off < len(node[0]) or node[1][off - 1] is None:
            raise KeyError(f"no child at pearl offset {off}")
        node = node[1][off - 1]
    return node


# -- flat form --------------------------------------------------------------

@dataclass
class FlatTree:
    words: list[str]  # square-based words
    links: dict = field(default_factory=dict)  # Pearl -> Pearl, symmetric

    def link(self, a: Pearl, b: Pearl) -> None:
        if a in self.links or b in self.links:
            raise InvalidTreeError(f"pearl already carries an edge: {a} or {b}")
        self.links[a] = b
        self.links[b] = a

    def unlink(self, a: Pearl) -> Pearl:
        b = self.links.pop(a)
        del self.links[b]
        return b

    def kind(self, p: Pearl) -> str:
        return self.words[p[0]][p[1]]

    def pearls(self) -> Iterator[Pearl]:
        for v, w in enumerate(self.words):
            for i in range(len(w)):
                yield (v, i)

    def free_pearls(self, kind: str) -> list[Pearl]:
        return [p for p in self.pearls() if self.kind(p) == kind and p not in self.links]

    def copy(self) -> FlatTree:
        return FlatTree(list(self.words), dict(self.links))

    def is_tree(self) -> bool:
        n = len(self.words)
        if len(self.links) != 2 * (n - 1):
            return False
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for i in range(len(self.words[v])):
                q = self.links.get((v, i))
                if q is not None and q[0] not in seen:
                    seen.add(q[0])
                    stack.append(q[0])
        return len(seen) == n

    def nest(self, root: Pearl) -> Node:
        """Nested form read from a free root pearl."""
        if root in self.links:
            raise InvalidTreeError(f"root pearl {root} carries an edge")
        return self._nest(root[0], root[1])

    def _nest(self, v: int, e: int) -> Node:
        full = self.words[v]
        L = len(full)
        kids = []
        for off in range(1, L):
            q = self.links.get((v, (e + off) % L))
            kids.append(None if q is None else self._nest(q[0], q[1]))
        return (full[e:] + full[:e], tuple(kids))


def flatten(node: Node) -> tuple[FlatTree, list[int]]:
    """Flat copy with vertices numbered in clockwise preorder.

    Returns the tree and, per vertex, the square-based index of its entry
    pearl, so that nested pearl ``(v, off)`` is flat pearl
    ``(v, (entry[v] + off) % len)``.
    """
    words: list[str] = []
    entries: list[int] = []
    links: dict = {}

    def visit(n: Node) -> int:
        v = len(words)
        word = n[0]
        L = len(word)
        e = (-word.index("s")) % L
        words.append(square_based(word))
        entries.append(e)
        for off, kid in enumerate(n[1], start=1):
            if kid is not None:
                c = visit(kid)
                a, b = (v, (e + off) % L), (c, entries[c])
                links[a] = b
                links[b] = a
        return v

    visit(node)
    return FlatTree(words, links), entries


def walk(tree: FlatTree, start: Pearl, direction: int = 1) -> list[tuple[str, Pearl]]:
    """Contour walk from a free pearl.

    ``direction`` +1 follows the clockwise pearl order of each necklace, -1
    the counterclockwise one.  Emits ``('free', p)`` at the corner of a free
    pearl and ``('leave', p)`` at the corner of a linked pearl just before the
    walk crosses its edge.
    """
    out = [("free", start)]
    stack = [[start[0], start[1], 1]]
    while stack:
        top = stack[-1]
        v, e, off = top
        L = len(tree.words[v])
        if off >= L:
            stack.pop()
            if stack:
                out.append(("leave", (v, e)))
            continue
        top[2] = off + 1
        p = (v, (e + direction * off) % L)
        q = tree.links.get(p)
        if q is None:
            out.append(("free", p))
        else:
            out.append(("leave", p))
            stack.append([q[0], q[1], 1])
    return out


# -- tree values ------------------------------------------------------------

@dataclass(frozen=True)
class PlaneTree:
    node: Node
    rooted: bool = True

    @property
    def root_kind(self) -> str:
        return self.node[0][0] if self.rooted else "u"

    @property
    def size(self) -> int:
        return vertex_count(self.node)

    def vertices(self) -> list[Node]:
        return list(iter_nodes(self.node))

    def necklaces(self) -> Counter:
        return necklace_multiset(self.node)

    def pearl_counts(self) -> Counter:
        return pearl_counts(self.node)

    def flat(self) -> tuple[FlatTree, Pearl]:
        ft, entries = flatten(self.node)
        return ft, (0, entries[0])


class QTree(PlaneTree):
    """Square-rooted tree with black (b-s) and red (d-s) edges."""

    def __str__(self) -> str:
        return format_qtree(self.node)


class CompanionTree(PlaneTree):
    """Tree with black (b-s) and blue (d-t) edges, rooted on any pearl or unrooted."""

    def __str__(self) -> str:
        return format_companion(self)


# -- Q-trees ----------------------------------------------------------------

def validate_qtree(tree: PlaneTree, system: NecklaceSystem | None = None) -> None:
    if not tree.rooted or tree.node[0][0] != "s":
        raise InvalidTreeError("a Q-tree is rooted on a square pearl")
    for n in iter_nodes(tree.node):
        word, kids = n
        if not word.startswith("s") or "s" in word[1:]:
            raise InvalidTreeError(f"vertex {word!r} is not entered at its square pearl")
        if len(kids) != len(word) - 1:
            raise InvalidTreeError(f"vertex {word!r} has {len(kids)} child entries")
        if system is not None and system.lookup(word[1:]) is None:
            raise InvalidTreeError(f"necklace {word[1:] or 'e'!r} not in system {system.name!r}")
        for c, kid in zip(word[1:], kids):
            if c in "bd" and kid is None:
                raise InvalidTreeError(f"pearl {c!r} of {word!r} has no edge")
            if c == "t" and kid is not None:
                raise InvalidTreeError(f"triangle pearl of {word!r} carries an edge")


def _resolve(node: Node, ref: tuple[int, ...]) -> tuple[Node, int]:
    if not ref:
        raise KeyError("empty pearl reference")
    vertex = subtree_at(node, tuple(ref[:-1]))
    p = ref[-1]
    if not 0 <= p < len(vertex[0]):
        raise KeyError(f"pearl position {p} outside vertex {vertex[0]!r}")
    return vertex, p


def _balance(node: Node) -> int:
    c = pearl_counts(node)
    return c["t"] - c["d"]


def excess(tree: PlaneTree, ref: tuple[int, ...] = (0,)) -> int:
    """Triangles minus diamonds beyond a pearl, the pearl included.

    ``ref`` is a pearl path: child offsets from the root then a pearl
    position in the reached vertex.  ``(0,)`` is the root pearl.
    """
    vertex, p = _resolve(tree.node, ref)
    if p == 0:
        return _balance(vertex)
    here = {"t": 1, "d": -1}.get(vertex[0][p], 0)
    kid = vertex[1][p - 1]
    return here + (_balance(kid) if kid is not None else 0)


def _min_excess(node: Node) -> tuple[int, int]:
    """(subtree balance, least excess over all its pearls)."""
    word, kids = node
    total = 0
    least = None
    for c, kid in zip(word[1:], kids):
        here = {"t": 1, "d": -1}.get(c, 0)
        if kid is None:
            e = here
        else:
            b, m = _min_excess(kid)
            e = here + b
            least = m if least is None else min(least, m)
        total += e
        least = e if least is None else min(least, e)
    least = total if least is None else min(least, total)
    return total, least


def is_nonnegative(tree: PlaneTree) -> bool:
    return _min_excess(tree.node)[1] >= 0


# -- parking ----------------------------------------------------------------

@dataclass(frozen=True)
class ParkingOutcome:
    spots: int
    cars: int
    filled: int
    parked: int

    @property
    def spots_filled(self) -> bool:
        return self.filled == self.spots

    @property
    def all_cars_parked(self) -> bool:
        return self.parked == self.cars


def park(tree: PlaneTree, order: str = "contour", seed: int = 0) -> ParkingOutcome:
    """Cars sit on triangle pearls, spots are diamond pearls.

    A car drives toward the root and passes the diamond pearls whose red edge
    lies on its way, nearest first; it takes the first free one.  ``order`` is
    ``contour`` (clockwise discovery), ``reverse`` or ``shuffle``.
    """
    cars: list[tuple] = []  # ancestor spot chain per car, nearest first
    spots: list[tuple] = []

    def visit(node: Node, chain: tuple) -> None:
        word, kids = node
        for off, (c, kid) in enumerate(zip(word[1:], kids), start=1):
            if c == "t":
                cars.append(chain)
            if c == "d":
                spot = len(spots)
                spots.append(spot)
                visit(kid, (spot,) + chain)
            elif kid is not None:
                visit(kid, chain)

    visit(tree.node, ())
    if order == "reverse":
        cars.reverse()
    elif order == "shuffle":
        random.Random(seed).shuffle(cars)
    elif order != "contour":
        raise ValueError(f"unknown car order {order!r}")
    taken = set()
    parked = 0
    for chain in cars:
        for spot in chain:
            if spot not in taken:
                taken.add(spot)
                parked += 1
                break
    return ParkingOutcome(len(spots), len(cars), len(taken), parked)


def parking_oracle(tree: PlaneTree, order: str = "contour", seed: int = 0) -> bool:
    return park(tree, order, seed).spots_filled


# -- enumeration ------------------------------------------------------------

class QTreeEnumerator:
    """Memoized generation of Q-trees by root-necklace decomposition.

    With ``nonneg`` set, diamond children must have excess at least 1 and
    black children at least 0 (so every pearl has non-negative excess);
    otherwise all Q-trees are produced.
    """

    def __init__(self, system: NecklaceSystem, nonneg: bool = True, max_pearls: int | None = None):
        self.system = system
        self.nonneg = nonneg
        self.max_pearls = max_pearls
        self._trees: dict[int, list] = {}
        self._slots: dict = {}
        self.necklaces = system.necklaces(max_pearls)
        if any(s.size < 1 for s in self.necklaces):
            raise ValueError("tree enumeration needs every necklace size to be at least 1")

    def trees(self, n: int) -> list[tuple[Node, int]]:
        """(node, excess) pairs for all trees of size n."""
        if n in self._trees:
            return self._trees[n]
        out = []
        for s in self.necklaces:
            if s.size > n:
                continue
            for kids, e in self.slots(s.word, n - s.size):
                out.append((("s" + s.word, kids), e))
        self._trees[n] = out
        return out

    def slots(self, suffix: str, m: int) -> list[tuple[tuple, int]]:
        key = (suffix, m)
        hit = self._slots.get(key)
        if hit is not None:
            return hit
        if not suffix:
            out = [((), 0)] if m == 0 else []
        else:
            c, rest = suffix[0], suffix[1:]
            out = []
            if c == "t":
                out = [((None,) + k, e + 1) for k, e in self.slots(rest, m)]
            else:
                for m1 in range(1, m + 1):
                    tails = self.slots(rest, m - m1)
                    if not tails:
                        continue
                    for child, ce in self.trees(m1):
                        if c == "d":
                            if self.nonneg and ce < 1:
                                continue
                            ce -= 1
                        for k, e in tails:
                            out.append(((child,) + k, e + ce))
        self._slots[key] = out
        return out


def _count_total(system, n, nonneg=True, max_pearls=None) -> int:
    table = count_table(system, n, nonneg=nonneg, max_pearls=max_pearls, weighted=False)
    return sum(sum(row.values()) for row in table[1:])


def enumerate_nonneg(system: NecklaceSystem, size: int, excess_filter: int | None = None,
                     max_pearls: int | None = None) -> list[QTree]:
    if size < 1:
        raise ValueError("size must be at least 1")
    if excess_filter is not None and excess_filter < 0:
        raise ValueError("excess filter must be non-negative")
    check_ceiling(_count_total(system, size, True, max_pearls), f"non-negative trees up to size {size}")
    en = QTreeEnumerator(system, nonneg=True, max_pearls=max_pearls)
    return [QTree(node) for node, e in en.trees(size) if excess_filter is None or e == excess_filter]


def enumerate_all_qtrees(system: NecklaceSystem, size: int, max_pearls: int | None = None) -> list[QTree]:
    """All valid Q-trees of a size, negative ones included."""
    check_ceiling(_count_total(system, size, False, max_pearls), f"Q-trees up to size {size}")
    en = QTreeEnumerator(system, nonneg=False, max_pearls=max_pearls)
    return [QTree(node) for node, _ in en.trees(size)]


# -- counting ---------------------------------------------------------------

def _weight_value(weight: Weight, K):
    if isinstance(weight, str):
        from .series import ring_symbol

        return ring_symbol(K, weight)
    return weight.numerator if weight.denominator == 1 else weight


def count_table(system: NecklaceSystem, max_size: int, nonneg: bool = True,
                max_pearls: int | None = None, weighted: bool = True) -> list[dict[int, object]]:
    """``table[n][k]`` = weighted number of trees of size n and excess k.

    Counts are Python integers/fractions, or polynomials in the weight
    symbols when the system carries formal weights.
    """
    K = None
    if weighted and system.weight_symbols:
        from .series import coefficient_ring

        K = coefficient_ring(system.weight_symbols)
    necks = system.necklaces(max_pearls)
    if any(s.size < 1 for s in necks):
        raise ValueError("tree counting needs every necklace size to be at least 1")
    table: list[dict[int, object]] = [dict() for _ in range(max_size + 1)]
    memo: dict = {}

    def slots(nb: int, nd: int, m: int) -> dict[int, int]:
        key = (nb, nd, m)
        if key in memo:
            return memo[key]
        if nb == 0 and nd == 0:
            out = {0: 1} if m == 0 else {}
        else:
            out: dict[int, int] = {}
            is_d = nb == 0
            rest = (nb, nd - 1) if is_d else (nb - 1, nd)
            for m1 in range(1, m + 1):
                tail = slots(rest[0], rest[1], m - m1)
                if not tail:
                    continue
                for ce, cc in table[m1].items():
                    if is_d:
                        if nonneg and ce < 1:
                            continue
                        ce -= 1
                    for e, c in tail.items():
                        out[e + ce] = out.get(e + ce, 0) + c * cc
        memo[key] = out
        return out

    for n in range(1, max_size + 1):
        row: dict[int, object] = {}
        for s in necks:
            if s.size > n:
                continue
            dist = slots(s.blacks, s.diamonds, n - s.size)
            if not dist:
                continue
            w = _weight_value(s.weight, K) if weighted else 1
            for e, c in dist.items():
                k = e + s.triangles
                row[k] = row.get(k, 0) + w * c
        table[n] = {k: v for k, v in sorted(row.items()) if v != 0}
    return table


def count_nonneg(system: NecklaceSystem, size: int, excess: int | None = None,
                 max_pearls: int | None = None, weighted: bool = True):
    row = count_table(system, size, True, max_pearls, weighted)[size]
    if excess is None:
        return sum(row.values())
    return row.get(excess, 0)


# -- text forms -------------------------------------------------------------

def format_qtree(node: Node) -> str:
    word, kids = node
    head = word[1:] or "e"
    return head + "(" + "".join(format_qtree(k) for k in kids if k is not None) + ")"


def format_companion_node(node: Node) -> str:
    word, kids = node
    return word + "(" + "".join("_" if k is None else format_companion_node(k) for k in kids) + ")"


def format_companion(tree: PlaneTree) -> str:
    return f"@{tree.root_kind}:" + format_companion_node(tree.node)


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.i = 0

    def skip(self) -> None:
        while self.i < len(self.text) and self.text[self.i].isspace():
            self.i += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.i] if self.i < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            got = self.peek() or "end of input"
            raise TreeSyntaxError(f"expected {ch!r}, got {got!r}", self.i)
        self.i += 1

    def word(self, alphabet: str) -> str:
        self.skip()
        j = self.i
        while self.i < len(self.text) and self.text[self.i] in alphabet:
            self.i += 1
        return self.text[j:self.i]

    def done(self) -> None:
        if self.peek():
            raise TreeSyntaxError(f"trailing input {self.text[self.i:]!r}", self.i)


def parse_qtree(text: str, system: NecklaceSystem | None = None) -> QTree:
    r = _Reader(text)

    def node() -> Node:
        pos = r.i
        w = r.word("bdteε")
        if w in ("e", "ε"):
            w = ""
        elif not w or any(c not in "bdt" for c in w):
            raise TreeSyntaxError(f"bad necklace word {w!r}", pos)
        r.expect("(")
        kids = []
        for c in w:
            kids.append(node() if c in "bd" else None)
        r.expect(")")
        return ("s" + w, tuple(kids))

    n = node()
    r.done()
    tree = QTree(n)
    validate_qtree(tree, system)
    return tree


def parse_companion(text: str) -> CompanionTree:
    r = _Reader(text)
    r.expect("@")
    kind = r.word("sbdtu")
    if len(kind) != 1:
        raise TreeSyntaxError(f"bad root kind {kind!r}", r.i)
    r.expect(":")

    def node() -> Node:
        pos = r.i
        w = r.word("sbdt")
        if w.count("s") != 1:
            raise TreeSyntaxError(f"vertex word {w!r} needs exactly one square pearl", pos)
        r.expect("(")
        kids = []
        for _ in w[1:]:
            if r.peek() == "_":
                r.i += 1
                kids.append(None)
            else:
                kids.append(node())
        r.expect(")")
        return (w, tuple(kids))

    n = node()
    r.done()
    if kind == "u":
        if n[0][0] != "s":
            raise TreeSyntaxError("unrooted trees are written from a square pearl", 3)
        return CompanionTree(n, rooted=False)
    if n[0][0] != kind:
        raise TreeSyntaxError(f"root vertex does not start with a {kind!r} pearl", 3)
    return CompanionTree(n)
