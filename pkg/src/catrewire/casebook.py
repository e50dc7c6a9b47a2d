"""Named example systems with closed-form oracles, and a runner for each."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, factorial
from typing import Callable

from .companion import CompanionEnumerator
from .necklace import (
    Necklace,
    NecklaceSystem,
    Q_LAMBDA,
    Q_NS,
    q_all,
    vertex_gf,
    vertex_ring,
)
from .series import (
    check_parametrization,
    solve_catalytic,
    solve_companion_system,
    solve_inhomogeneous,
    linear_reduce,
)
from .trees import count_table, enumerate_nonneg, excess, park
from .verify import CheckResult


def double_factorial(n: int) -> int:
    if n < -1:
        raise ValueError("double factorial needs n >= -1")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _exact(num: int, den: int, what: str) -> int:
    q, r = divmod(num, den)
    if r:
        raise ArithmeticError(f"{what}: {num}/{den} is not an integer")
    return q


def lambda_counts(n: int) -> tuple[int, int]:
    """(f_n, c_n) for the lambda system; sizes are 3n - 1."""
    if n < 1:
        raise ValueError("n must be at least 1")
    top = 2 ** (2 * n - 1) * double_factorial(3 * n - 3)
    c = _exact(top, factorial(n) * double_factorial(n - 1), "c_n")
    f = _exact(top, factorial(n + 1) * double_factorial(n - 1), "f_n")
    if c != (n + 1) * f:
        raise ArithmeticError(f"c_{n} != (n+1) f_{n}")
    if n >= 3:
        prev = lambda_counts(n - 2)[1]
        if c * n * (n - 1) != 48 * (3 * n - 5) * (3 * n - 7) * prev:
            raise ArithmeticError(f"recurrence fails at n={n}")
    return f, c


def tutte_ns_count(n: int) -> int:
    if n < 1:
        raise ValueError("n must be at least 1")
    return _exact(2 * comb(3 * n, n), (n + 1) * (2 * n + 1), "tutte count")


# parking: cars on triangles, spots on diamonds
PARKING = NecklaceSystem(
    "parking",
    explicit=(Necklace(""), Necklace("t"))
    + tuple(Necklace(w + tail) for w in ("b", "d", "bb", "bd", "db", "dd") for tail in ("", "t")),
)

# xu(1 + uv)^2 + w, graded by x
TRIANGULATION = NecklaceSystem(
    "triangulation",
    explicit=(
        Necklace("t"),
        Necklace("ttb"),
        Necklace("tbt"),
        Necklace("ttbtb"),
        Necklace("d", size=0),
    ),
)

LINEAR_BASIC = NecklaceSystem("linear-basic", explicit=(Necklace("t"), Necklace("b"), Necklace("d")))

ALL4 = q_all(4)


def triangulation_polynomial():
    R = vertex_ring()
    v, w, u, x = R.gens[:4]
    return x * u * (1 + u * v) ** 2 + w


@dataclass
class CaseEntry:
    name: str
    system: NecklaceSystem
    description: str
    runner: Callable[["CaseEntry", int, int], CheckResult]
    max_size: int = 8
    order: int = 12
    oracles: dict = field(default_factory=dict)


def _run_lambda(case: CaseEntry, max_size: int, order: int) -> CheckResult:
    res = CheckResult("lambda")
    system = case.system
    table = count_table(system, max_size)
    sol = solve_companion_system(system, order)
    cen = CompanionEnumerator(system)
    for n in range(1, (order + 1) // 3 + 1):
        f, c = lambda_counts(n)
        m = 3 * n - 1
        res.add(f"n={n} f_n by series", sol.f[m] == f, f"{f}")
        res.add(f"n={n} c_n by series", sol.Csq[m] == c, f"{c}")
        if m <= max_size:
            counted = len(enumerate_nonneg(system, m, 0))
            res.add(f"n={n} f_n by enumeration", counted == table[m].get(0, 0) == f, str(counted))
            res.add(f"n={n} c_n by enumeration", cen.count("s", m, 0) == c)
    for m in range(1, max_size + 1):
        if m % 3 != 2:
            res.add(f"size {m} has no excess-0 trees", not table[m].get(0))
    # C = tC^2 + 2t^2/(1 - 2tC), cleared of its denominator
    C = sol.Csq
    tC = C.shift()
    lhs = C - 2 * tC * C
    rhs = tC * C - 2 * tC * tC * C + (C * 0 + 2).shift(2)
    res.add("C = tC^2 + 2t^2/(1-2tC)", lhs == rhs)
    return res


def _run_nonseparable(case: CaseEntry, max_size: int, order: int) -> CheckResult:
    res = CheckResult("nonseparable")
    system = case.system
    table = count_table(system, max(max_size, order))
    rep = check_parametrization(system, order)
    for n in range(1, order + 1):
        want = tutte_ns_count(n)
        res.add(f"n={n} Tutte count", table[n].get(0, 0) == want == rep.f_catalytic[n], str(want))
        if n <= min(max_size, 5):
            res.add(f"n={n} Tutte count by enumeration", len(enumerate_nonneg(system, n, 0)) == want)
    res.add("f = Csq - Cd*Ct and n f_n = [t^n] Co", rep.ok)
    sol = rep.companion
    for n in range(order + 1):
        vals = {sol.Csq[n], sol.Cb[n], sol.Cd[n], sol.Ct[n]}
        if len(vals) != 1:
            res.add(f"t^{n} companion series equal", False, str(vals))
            break
    else:
        res.add("four companion series equal", True)
    return res


def _run_parking(case: CaseEntry, max_size: int, order: int) -> CheckResult:
    res = CheckResult("parking")
    system = case.system
    F = solve_catalytic(system, max_size)
    for n in range(1, max_size + 1):
        parked = 0
        agree = True
        for i, tree in enumerate(enumerate_nonneg(system, n, 0)):
            out = park(tree, "contour")
            parked += out.spots_filled and out.all_cars_parked
            agree &= excess(tree) == 0
        res.add(f"n={n} fully parked = [t^n u^0] F", agree and F.at_u0()[n] == parked, str(parked))
    return res


def _run_triangulation(case: CaseEntry, max_size: int, order: int) -> CheckResult:
    res = CheckResult("triangulation")
    Q = triangulation_polynomial()
    res.add("necklace system encodes xu(1+uv)^2 + w", vertex_gf(case.system, graded=True) == Q)
    sol = solve_inhomogeneous(Q, min(order, 8))
    res.add("F(0) = Csq - Cd*Ct", sol.value.ok)
    res.add("d/dx F(0) = (1+Cb) Q'_x", sol.derivative.ok)
    return res


def _run_linear(case: CaseEntry, max_size: int, order: int) -> CheckResult:
    res = CheckResult("linear-basic")
    rep = linear_reduce([0, 1], [1], [1], order)
    res.add("t(1+Cb)P(Cd) = F(t,0)", rep.ok)
    for n in range(1, order + 1):
        res.add(f"n={n} f_n = n - 1", rep.f[n] == n - 1 == rep.f_catalytic[n])
    table = count_table(case.system, max_size)
    for n in range(1, max_size + 1):
        res.add(f"n={n} count", table[n].get(0, 0) == n - 1)
    return res


def _run_all(case: CaseEntry, max_size: int, order: int) -> CheckResult:
    res = CheckResult(case.system.name)
    table = count_table(case.system, order)
    rep = check_parametrization(case.system, order)
    for n in range(1, order + 1):
        res.add(f"n={n} counts = series", table[n].get(0, 0) == rep.f_catalytic[n] == rep.f_companion[n],
                str(table[n].get(0, 0)))
    res.add("n f_n = [t^n] Co", rep.derivative.ok)
    return res


CASES: dict[str, CaseEntry] = {
    c.name: c
    for c in (
        CaseEntry("lambda", Q_LAMBDA, "closed linear lambda terms", _run_lambda, 8, 12,
                  {"f,c": lambda_counts}),
        CaseEntry("nonseparable", Q_NS, "nonseparable maps", _run_nonseparable, 5, 12,
                  {"f": tutte_ns_count}),
        CaseEntry("parking", PARKING, "fully parked trees", _run_parking, 6, 6),
        CaseEntry("triangulation", TRIANGULATION, "graded equation without a global t",
                  _run_triangulation, 0, 8),
        CaseEntry("linear-basic", LINEAR_BASIC, "P = u, R = S = 1", _run_linear, 8, 12),
        CaseEntry("all-necklaces", ALL4, "every necklace with at most 4 pearls", _run_all, 0, 12),
    )
}


def get_case(name: str) -> CaseEntry:
    try:
        return CASES[name]
    except KeyError:
        raise KeyError(f"unknown case {name!r}; known: {', '.join(CASES)}") from None


def run_case(name: str, max_size: int | None = None, order: int | None = None) -> CheckResult:
    case = get_case(name)
    return case.runner(case, case.max_size if max_size is None else max_size,
                       case.order if order is None else order)
