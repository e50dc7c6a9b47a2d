"""Check suites shared by the command line and the test-suite.

Each suite returns a :class:`CheckResult`, a named list of rows
``(label, ok, detail)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .companion import (
    CompanionEnumerator,
    decompose_marked,
    diamond_paths,
    enumerate_marked,
    forget_root,
    join_pair,
    mark_diamond_reroot,
    recompose_marked,
    root_balanced,
    split_unbalanced,
    unmark_diamond,
)
from .necklace import NecklaceSystem
from .rewiring import (
    fast_status,
    inverse_closure_flat,
    iterative_match,
    pearl_paths,
    rewire_flat,
    rewire,
    unrewire,
)
from .series import (
    check_parametrization,
    solve_catalytic,
    split_u,
)
from .trees import (
    CompanionTree,
    QTree,
    QTreeEnumerator,
    check_ceiling,
    count_table,
    enumerate_all_qtrees,
    excess,
    is_nonnegative,
    park,
    vertex_count,
)


@dataclass
class CheckResult:
    name: str
    rows: list = field(default_factory=list)

    def add(self, label: str, ok: bool, detail: str = "") -> None:
        self.rows.append((label, bool(ok), detail))

    @property
    def ok(self) -> bool:
        return bool(self.rows) and all(r[1] for r in self.rows)

    def lines(self) -> list[str]:
        out = [f"{self.name}: {'ok' if self.ok else 'FAILED'}"]
        for label, ok, detail in self.rows:
            out.append(f"  {label}: {'ok' if ok else 'FAILED'}" + (f" ({detail})" if detail else ""))
        return out

    def to_data(self) -> dict:
        return {
            "name": self.name,
            "ok": self.ok,
            "rows": [{"label": l, "ok": ok, "detail": d} for l, ok, d in self.rows],
        }


def _closure_properties(tree: QTree, cm) -> bool:
    """Each diamond matched inside its own subtree; unmatched triangles enclosed by no arc."""
    paths = pearl_paths(cm.base, cm.root)
    for x, y in cm.arcs:
        px, py = paths[x], paths[y]
        if py[: len(px)] != px or len(py) == len(px):
            return False
    m = cm.matching
    if any(m.token_enclosed(i) for i in m.unmatched):
        return False
    return m.is_noncrossing() and len(m.unmatched) == excess(tree)


def bijection_check(system: NecklaceSystem, max_size: int, max_pearls: int | None = None,
                    schedules: int = 3, schedule_max_size: int = 6) -> CheckResult:
    """Rewiring is a bijection from non-negative trees of excess k onto balanced trees with k external defects."""
    res = CheckResult(f"rewiring bijection [{system.name}]")
    qen = QTreeEnumerator(system, nonneg=True, max_pearls=max_pearls)
    cen = CompanionEnumerator(system, max_pearls)
    table = count_table(system, max_size, max_pearls=max_pearls, weighted=False)
    check_ceiling(sum(sum(r.values()) for r in table[1:]), f"non-negative trees up to size {max_size}")
    check_ceiling(sum(cen.count_any("s", n) for n in range(1, max_size + 1)),
                  f"companion trees up to size {max_size}")
    rng = random.Random(0)
    for n in range(1, max_size + 1):
        images: dict[int, set] = {}
        injective = roundtrip = props = closure_match = schedule_ok = True
        count = 0
        for node, k in qen.trees(n):
            tree = QTree(node)
            count += 1
            ft, root, cm = rewire_flat(tree)
            if not _closure_properties(tree, cm):
                props = False
            img = ft.nest(root)
            bucket = images.setdefault(k, set())
            if img in bucket:
                injective = False
            bucket.add(img)
            if inverse_closure_flat(ft, root).edge_set() != cm.edge_set():
                closure_match = False
            if unrewire(CompanionTree(img)) != tree:
                roundtrip = False
            if schedules and n <= schedule_max_size:
                word = cm.word
                for _ in range(schedules):
                    if iterative_match(word, rng) != cm.matching:
                        schedule_ok = False
        onto = True
        back = True
        sizes = []
        for k in range(cen._max_triangles(n) + 1):
            balanced = set()
            for node in cen.nodes("s", n, k):
                st = fast_status(node)
                if st.balanced and st.internal == 0:
                    balanced.add(node)
            got = images.get(k, set())
            if balanced != got:
                onto = False
            for node in balanced:
                if rewire(unrewire(CompanionTree(node))).node != node:
                    back = False
            if balanced:
                sizes.append(f"k={k}:{len(balanced)}")
        cen._nodes.clear()
        cen._slots.clear()
        detail = f"|F|={count} " + " ".join(sizes)
        res.add(f"n={n} injective", injective, detail)
        res.add(f"n={n} onto balanced defect-k class", onto)
        res.add(f"n={n} unrewire(rewire) = id", roundtrip)
        res.add(f"n={n} rewire(unrewire) = id", back)
        res.add(f"n={n} inverse closure of image = closure", closure_match)
        res.add(f"n={n} closure properties", props)
        if schedules and n <= schedule_max_size:
            res.add(f"n={n} matching independent of schedule", schedule_ok)
    return res


def unbalanced_check(system: NecklaceSystem, max_size: int, max_pearls: int | None = None) -> CheckResult:
    """Square-rooted trees split into balanced ones and (diamond-rooted, triangle-rooted) pairs."""
    res = CheckResult(f"unbalanced decomposition [{system.name}]")
    cen = CompanionEnumerator(system, max_pearls)
    check_ceiling(sum(cen.count("s", n, 0) for n in range(1, max_size + 1)), "defect-free companion trees")
    for n in range(1, max_size + 1):
        sq = cen.nodes("s", n, 0)
        balanced, unbalanced = [], []
        for node in sq:
            (balanced if fast_status(node).balanced else unbalanced).append(node)
        conv = sum(cen.count("d", a, 0) * cen.count("t", n - a, 0) for a in range(1, n))
        res.add(f"n={n} |C_s| = |B_0| + sum |C_d||C_t|", len(sq) == len(balanced) + conv,
                f"{len(sq)} = {len(balanced)} + {conv}")
        pairs = set()
        split_ok = True
        for node in unbalanced:
            tree = CompanionTree(node)
            a, b = split_unbalanced(tree)
            if a.root_kind != "d" or b.root_kind != "t" or a.size + b.size != n:
                split_ok = False
            pairs.add((a.node, b.node))
            if join_pair(a, b) != tree:
                split_ok = False
        expected = {(x, y) for a in range(1, n) for x in cen.nodes("d", a, 0) for y in cen.nodes("t", n - a, 0)}
        join_ok = pairs == expected
        res.add(f"n={n} split/join roundtrips", split_ok and join_ok, f"{len(unbalanced)} unbalanced")
        forget_ok = True
        classes = set()
        for node in balanced:
            tree = CompanionTree(node)
            u = forget_root(tree)
            classes.add(u.node)
            if root_balanced(u) != tree:
                forget_ok = False
        res.add(f"n={n} forget_root/root_balanced roundtrips", forget_ok and len(classes) == len(balanced))
    return res


def marked_diamond_check(system: NecklaceSystem, max_size: int, max_pearls: int | None = None) -> CheckResult:
    """Excess-0 trees, plain or with one marked diamond, match square-rooted defect-free trees."""
    res = CheckResult(f"marked diamonds [{system.name}]")
    qen = QTreeEnumerator(system, nonneg=True, max_pearls=max_pearls)
    cen = CompanionEnumerator(system, max_pearls)
    for n in range(1, max_size + 1):
        target = set(cen.nodes("s", n, 0))
        got = set()
        plain = marked = 0
        ok = True
        for node, k in qen.trees(n):
            if k:
                continue
            tree = QTree(node)
            plain += 1
            ft, root, _ = rewire_flat(tree)
            got.add(ft.nest(root))
            for path in diamond_paths(tree):
                marked += 1
                img = mark_diamond_reroot(tree, path)
                if img.node in got:
                    ok = False
                got.add(img.node)
                if fast_status(img.node).balanced or unmark_diamond(img) != (tree, path):
                    ok = False
        res.add(f"n={n} f + f_d = [t^n] C_s", plain + marked == len(target) and got == target and ok,
                f"{plain} + {marked} = {len(target)}")
    return res


def marked_vertex_check(system: NecklaceSystem, max_size: int, max_pearls: int | None = None) -> CheckResult:
    """Vertex-marked unrooted trees: |C_o(n)| = n f_n, and the marked split is invertible."""
    res = CheckResult(f"marked vertices [{system.name}]")
    cen = CompanionEnumerator(system, max_pearls)
    table = count_table(system, max_size, max_pearls=max_pearls, weighted=False)
    for n in range(1, max_size + 1):
        f = table[n].get(0, 0)
        count = cen.count("s", n, 0) + sum(cen.count("b", a, 0) * cen.count("s", n - a, 0) for a in range(1, n))
        ok = True
        seen = set()
        for node in cen.nodes("s", n, 0):
            st = fast_status(node)
            if not st.balanced:
                continue
            unrooted = forget_root(CompanionTree(node))
            for v in range(vertex_count(unrooted.node)):
                dec = decompose_marked(unrooted, v)
                if recompose_marked(dec) != (unrooted, v):
                    ok = False
                seen.add((dec.attachment, dec.main))
        expected = {(d.attachment, d.main) for d in enumerate_marked(system, n, max_pearls)}
        res.add(f"n={n} |C_o| = n f_n", count == n * f and seen == expected and ok,
                f"{count} = {n}*{f}")
    return res


def series_check(system: NecklaceSystem, order: int, bivariate_size: int = 8,
                 max_pearls: int | None = None) -> CheckResult:
    """Counts, the catalytic solution at u=0 and the companion parametrization agree exactly."""
    res = CheckResult(f"series routes [{system.name}]")
    sys_ = system if max_pearls is None else system.bounded(max_pearls)
    table = count_table(sys_, order)
    rep = check_parametrization(sys_, order)
    K = rep.f_catalytic.ring
    for n in range(1, order + 1):
        counted = K(table[n].get(0, 0)) if not hasattr(table[n].get(0, 0), "ring") else table[n][0]
        a, b = rep.f_catalytic[n], rep.f_companion[n]
        res.add(f"t^{n} counts = F(0) = Csq - Cd*Ct", counted == a == b, str(a))
        res.add(f"t^{n} n*f_n = [t^n] Co", rep.companion.Co[n] == a * n)
    F = solve_catalytic(sys_, min(order, bivariate_size))
    for n in range(1, min(order, bivariate_size) + 1):
        coeffs = split_u(F[n])
        want = {k: (v if hasattr(v, "ring") else K(v)) for k, v in table[n].items()}
        res.add(f"t^{n} bivariate counts", coeffs == want)
    return res


def parking_check(system: NecklaceSystem, max_size: int, orders=("contour", "reverse", "shuffle"),
                  max_pearls: int | None = None) -> CheckResult:
    """Non-negative exactly when every diamond spot gets a car, under several car orders."""
    res = CheckResult(f"parking [{system.name}]")
    for n in range(1, max_size + 1):
        trees = enumerate_all_qtrees(system, n, max_pearls)
        agree = True
        zero_cars = True
        nonneg = 0
        for i, tree in enumerate(trees):
            nn = is_nonnegative(tree)
            nonneg += nn
            for order in orders:
                out = park(tree, order, seed=i)
                if out.spots_filled != nn:
                    agree = False
                if nn and excess(tree) == 0 and not out.all_cars_parked:
                    zero_cars = False
        res.add(f"n={n} non-negative <=> spots filled", agree, f"{nonneg}/{len(trees)} non-negative")
        res.add(f"n={n} excess 0 non-negative => all cars park", zero_cars)
    return res


SUITES = {
    "bijection": bijection_check,
    "unbalanced": unbalanced_check,
    "marked-diamond": marked_diamond_check,
    "marked-vertex": marked_vertex_check,
    "parking": parking_check,
}


def run_all(system: NecklaceSystem, max_size: int, order: int, max_pearls: int | None = None) -> list[CheckResult]:
    out = [fn(system, max_size, max_pearls=max_pearls) for fn in SUITES.values()]
    out.append(series_check(system, order, bivariate_size=max_size, max_pearls=max_pearls))
    return out
