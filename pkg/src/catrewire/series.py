"""Exact truncated power series and the fixed-point solvers built on them.

Coefficients live in ``QQ[u, weights...]`` (sympy sparse polynomials), so the
catalytic variable, formal necklace weights and plain rationals share one
coefficient ring.  Every solver runs the same degree-by-degree recursion:
for each degree the unknown coefficients are iterated until they stop
changing, which terminates after one or two rounds whenever each equation
carries a positive degree shift, and detects ill-founded gradings otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from sympy import QQ, Symbol
from sympy.polys.polyerrors import ExactQuotientFailed
from sympy.polys.rings import PolyElement, ring

from .necklace import NecklaceSystem, vertex_gf, vertex_ring

MAX_ROUNDS = 500


class NonWellFoundedError(ValueError):
    pass


class DividedDifferenceError(ArithmeticError):
    pass


@lru_cache(maxsize=None)
def coefficient_ring(weights: tuple[str, ...] = (), with_u: bool = True):
    """``QQ[u, weights...]``.  ``with_u`` is accepted for symmetry; u is always present."""
    return ring(("u",) + tuple(weights), QQ)[0]


def ring_symbol(K, name: str) -> PolyElement:
    return K.gens[K.symbols.index(Symbol(name))]


def split_u(p: PolyElement) -> dict[int, PolyElement]:
    """Coefficients of the powers of u (first ring variable)."""
    K = p.ring
    out: dict[int, dict] = {}
    for exps, c in p.terms():
        out.setdefault(exps[0], {})[(0,) + exps[1:]] = c
    return {k: K.from_dict(d) for k, d in sorted(out.items())}


def at_u0(p: PolyElement) -> PolyElement:
    K = p.ring
    return K.from_dict({e: c for e, c in p.terms() if e[0] == 0}) if p else K.zero


def divided_difference(p: PolyElement) -> PolyElement:
    """(p(u) - p(0)) / u, asserting exact divisibility."""
    K = p.ring
    rest = p - at_u0(p)
    if not rest:
        return K.zero
    try:
        return rest.exquo(K.gens[0])
    except ExactQuotientFailed as exc:  # pragma: no cover - would be an arithmetic bug
        raise DividedDifferenceError("inconsistent divided difference") from exc


def format_coefficient(p) -> str:
    s = str(p)
    return s.replace("**", "^")


@dataclass(frozen=True)
class TruncatedSeries:
    coeffs: tuple
    ring: object
    var: str = "t"

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int):
        return self.coeffs[n] if 0 <= n < len(self.coeffs) else self.ring.zero

    def _other(self, other) -> TruncatedSeries:
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries((self.ring(other),) + (self.ring.zero,) * self.order, self.ring, self.var)

    def __add__(self, other) -> TruncatedSeries:
        o = self._other(other)
        n = min(self.order, o.order)
        return TruncatedSeries(tuple(self[i] + o[i] for i in range(n + 1)), self.ring, self.var)

    __radd__ = __add__

    def __sub__(self, other) -> TruncatedSeries:
        o = self._other(other)
        n = min(self.order, o.order)
        return TruncatedSeries(tuple(self[i] - o[i] for i in range(n + 1)), self.ring, self.var)

    def __neg__(self) -> TruncatedSeries:
        return TruncatedSeries(tuple(-c for c in self.coeffs), self.ring, self.var)

    def __mul__(self, other) -> TruncatedSeries:
        o = self._other(other)
        n = min(self.order, o.order)
        out = []
        for m in range(n + 1):
            acc = self.ring.zero
            for a in range(m + 1):
                x = self.coeffs[a]
                if x:
                    y = o.coeffs[m - a]
                    if y:
                        acc += x * y
            out.append(acc)
        return TruncatedSeries(tuple(out), self.ring, self.var)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        n = min(self.order, other.order)
        return all(self[i] == other[i] for i in range(n + 1))

    def __hash__(self):
        return hash(tuple(str(c) for c in self.coeffs))

    def shift(self, k: int = 1) -> TruncatedSeries:
        """Multiply by var^k, keeping the order."""
        z = (self.ring.zero,) * k
        return TruncatedSeries((z + self.coeffs)[: self.order + 1], self.ring, self.var)

    def at_u0(self) -> TruncatedSeries:
        return TruncatedSeries(tuple(at_u0(c) for c in self.coeffs), self.ring, self.var)

    def divided_difference(self) -> TruncatedSeries:
        return TruncatedSeries(tuple(divided_difference(c) for c in self.coeffs), self.ring, self.var)

    def derivative(self) -> TruncatedSeries:
        return TruncatedSeries(
            tuple(self.coeffs[i] * i for i in range(1, len(self.coeffs))), self.ring, self.var
        )

    def truncate(self, order: int) -> TruncatedSeries:
        return TruncatedSeries(self.coeffs[: order + 1], self.ring, self.var)

    def lines(self) -> list[str]:
        return [f"{self.var}^{n}: {format_coefficient(c)}" for n, c in enumerate(self.coeffs)]

    def to_data(self) -> list[str]:
        return [format_coefficient(c) for c in self.coeffs]

    def integers(self) -> list:
        """Coefficients as Python numbers (only for u- and weight-free series)."""
        out = []
        for c in self.coeffs:
            if not c:
                out.append(0)
                continue
            if not c.is_ground:
                raise ValueError(f"coefficient {c} is not a constant")
            q = c.LC
            out.append(int(q.numerator) if q.denominator == 1 else q)
        return out


# -- generic degree-by-degree solver ------------------------------------------

@dataclass(frozen=True)
class Term:
    coef: PolyElement
    shift: int
    factors: tuple[str, ...]


DERIVED = {
    "dF": ("F", lambda c, n: divided_difference(c)),
    "Cb1": ("Cb", lambda c, n: c + 1 if n == 0 else c),
}


def solve_system(equations: dict[str, list[Term]], K, order: int) -> dict[str, TruncatedSeries]:
    """Solve ``X = sum coef * t^shift * prod(factors)`` for all unknowns to ``order``.

    Factors name unknowns or the derived series ``dF`` (divided difference of
    F) and ``Cb1`` (1 + Cb).
    """
    names = list(equations)
    derived = {d: src for d, (src, _) in DERIVED.items() if src in equations}
    keys: set = set()
    for terms in equations.values():
        for t in terms:
            f = tuple(sorted(t.factors))
            for i in range(2, len(f) + 1):
                keys.add(f[:i])
            for name in f:
                if name not in equations and name not in derived:
                    raise ValueError(f"unknown factor {name!r}")
    prods = sorted(keys, key=len)
    series: dict[str, list] = {name: [] for name in list(names) + list(derived) + prods}
    one = K.one

    def value(f: tuple, m: int):
        if not f:
            return one if m == 0 else K.zero
        if len(f) == 1:
            return series[f[0]][m]
        return series[f][m]

    for n in range(order + 1):
        for name in series:
            series[name].append(K.zero)
        for _ in range(MAX_ROUNDS):
            for d, src in derived.items():
                series[d][n] = DERIVED[d][1](series[src][n], n)
            for f in prods:
                head, last = f[:-1], f[-1]
                acc = K.zero
                for a in range(n + 1):
                    x = value(head, a)
                    if x:
                        y = series[last][n - a]
                        if y:
                            acc += x * y
                series[f][n] = acc
            changed = False
            new = {}
            for name in names:
                acc = K.zero
                for t in equations[name]:
                    m = n - t.shift
                    if m >= 0:
                        v = value(tuple(sorted(t.factors)), m)
                        if v:
                            acc += t.coef * v
                new[name] = acc
            for name in names:
                if new[name] != series[name][n]:
                    changed = True
                series[name][n] = new[name]
            if not changed:
                break
        else:
            raise NonWellFoundedError(f"non-wellfounded grading: degree {n} does not stabilize")
    return {name: TruncatedSeries(tuple(series[name]), K) for name in names}


# -- translating vertex polynomials -------------------------------------------

def _coefficient_ring_for(Q: PolyElement):
    weights = tuple(str(s) for s in Q.ring.symbols[4:])
    return coefficient_ring(weights)


def _to_K(K, coeff, u_exp: int, weight_exps: tuple) -> PolyElement:
    return K.from_dict({(u_exp,) + tuple(weight_exps): coeff})


def _is_graded(Q: PolyElement) -> bool:
    return any(e[3] for e in Q.monoms())


def catalytic_terms(Q: PolyElement, graded: bool) -> list[Term]:
    K = _coefficient_ring_for(Q)
    out = []
    for (a, b, c, d, *e), coeff in Q.terms():
        if not graded and d:
            raise ValueError("x appears in an ungraded equation")
        out.append(Term(_to_K(K, coeff, c, e), d if graded else 1, ("F",) * a + ("dF",) * b))
    return out


def companion_terms(P: PolyElement, graded: bool, shift_offset: int = 0,
                    extra: tuple[str, ...] = ()) -> list[Term]:
    """Terms of P(Csq, Ct, Cd): the w-slot takes Ct and the u-slot takes Cd."""
    K = _coefficient_ring_for(P)
    out = []
    for (a, b, c, d, *e), coeff in P.terms():
        shift = (d if graded else 1) + shift_offset
        out.append(Term(_to_K(K, coeff, 0, e), shift, extra + ("Csq",) * a + ("Ct",) * b + ("Cd",) * c))
    return out


def _check_wellfounded(Q: PolyElement) -> None:
    for a, b, c, d, *_ in Q.monoms():
        if d == 0 and b == 0:
            raise NonWellFoundedError(
                "non-wellfounded grading: a size-0 monomial without a w (diamond) factor"
            )


def _gf(Q, graded=None):
    if isinstance(Q, NecklaceSystem):
        return vertex_gf(Q, graded=graded)
    return Q


def solve_catalytic(Q, order: int, graded: bool = False) -> TruncatedSeries:
    """F = t Q(F, (F - F(0))/u, u), or F = Q(F, (F - F(0))/u, u, x) when graded."""
    Q = _gf(Q, graded)
    if order < 1:
        raise ValueError("order must be at least 1")
    if graded:
        _check_wellfounded(Q)
    K = _coefficient_ring_for(Q)
    sol = solve_system({"F": catalytic_terms(Q, graded)}, K, order)["F"]
    return TruncatedSeries(sol.coeffs, K, "x" if graded else "t")


@dataclass(frozen=True)
class CompanionSolution:
    Csq: TruncatedSeries
    Cb: TruncatedSeries
    Cd: TruncatedSeries
    Ct: TruncatedSeries
    Co: TruncatedSeries  # (1 + Cb) * Q(...) times t, or (1 + Cb) * Q'_x(...) when graded
    graded: bool = False

    @property
    def f(self) -> TruncatedSeries:
        return self.Csq - self.Cd * self.Ct

    def get(self, name: str) -> TruncatedSeries:
        return {"Csq": self.Csq, "Cb": self.Cb, "Cd": self.Cd, "Ct": self.Ct, "Co": self.Co, "f": self.f}[name]


def solve_companion_system(Q, order: int, graded: bool = False) -> CompanionSolution:
    Q = _gf(Q, graded)
    if order < 1:
        raise ValueError("order must be at least 1")
    if graded:
        _check_wellfounded(Q)
    R = Q.ring
    v, w, u, x = R.gens[:4]
    K = _coefficient_ring_for(Q)
    eqs = {
        "Csq": companion_terms(Q, graded),
        "Cb": companion_terms(Q.diff(v), graded, extra=("Cb1",)),
        "Cd": companion_terms(Q.diff(w), graded, extra=("Cb1",)),
        "Ct": companion_terms(Q.diff(u), graded, extra=("Cb1",)),
    }
    if graded:
        eqs["Co"] = companion_terms(Q.diff(x), graded, extra=("Cb1",))
    else:
        eqs["Co"] = companion_terms(Q, graded, extra=("Cb1",))
    var = "x" if graded else "t"
    sol = {k: TruncatedSeries(s.coeffs, K, var) for k, s in solve_system(eqs, K, order).items()}
    return CompanionSolution(sol["Csq"], sol["Cb"], sol["Cd"], sol["Ct"], sol["Co"], graded)


# -- checks -------------------------------------------------------------------

@dataclass
class IdentityReport:
    name: str
    rows: list = field(default_factory=list)  # (degree, left, right, ok)

    def add(self, n: int, left, right) -> None:
        self.rows.append((n, left, right, left == right))

    @property
    def ok(self) -> bool:
        return all(r[3] for r in self.rows)

    @property
    def failures(self) -> list:
        return [r for r in self.rows if not r[3]]

    def lines(self) -> list[str]:
        out = [f"{self.name}: {'ok' if self.ok else 'FAILED'}"]
        for n, a, b, ok in self.rows:
            mark = "ok" if ok else "MISMATCH"
            out.append(f"  {n}: {format_coefficient(a)} | {format_coefficient(b)} {mark}")
        return out


@dataclass
class ParametrizationReport:
    f_catalytic: TruncatedSeries
    f_companion: TruncatedSeries
    companion: CompanionSolution
    value: IdentityReport
    derivative: IdentityReport

    @property
    def ok(self) -> bool:
        return self.value.ok and self.derivative.ok

    def lines(self) -> list[str]:
        return self.value.lines() + self.derivative.lines()


def check_parametrization(Q, order: int) -> ParametrizationReport:
    """f from the catalytic equation at u=0 against Csq - Cd Ct, and n f_n against [t^n] Co."""
    if order < 2:
        raise ValueError("order must be at least 2")
    F = solve_catalytic(Q, order)
    comp = solve_companion_system(Q, order)
    fa = F.at_u0()
    fb = comp.f
    value = IdentityReport("f = Csq - Cd*Ct")
    deriv = IdentityReport("n*f_n = [t^n] Co")
    for n in range(order + 1):
        value.add(n, fa[n], fb[n])
        deriv.add(n, fa[n] * n, comp.Co[n])
    return ParametrizationReport(fa, fb, comp, value, deriv)


@dataclass
class InhomogeneousSolution:
    F: TruncatedSeries
    companion: CompanionSolution
    value: IdentityReport
    derivative: IdentityReport

    @property
    def ok(self) -> bool:
        return self.value.ok and self.derivative.ok


def solve_inhomogeneous(Q, order: int) -> InhomogeneousSolution:
    """Graded equation without a global t; identities checked per x-degree."""
    Q = _gf(Q, True)
    F = solve_catalytic(Q, order, graded=True)
    comp = solve_companion_system(Q, order, graded=True)
    F0 = F.at_u0()
    value = IdentityReport("F(0) = Csq - Cd*Ct")
    deriv = IdentityReport("d/dx F(0) = (1+Cb) Q'_x")
    fb = comp.f
    dF0 = F0.derivative()
    for n in range(order + 1):
        value.add(n, F0[n], fb[n])
    for n in range(order):
        deriv.add(n, dF0[n], comp.Co[n])
    return InhomogeneousSolution(F, comp, value, deriv)


def _u_poly(p, R) -> PolyElement:
    """Accept a coefficient list [c0, c1, ...] or a vertex-ring polynomial in u."""
    if isinstance(p, PolyElement):
        if any(e[0] or e[1] or e[3] for e in p.monoms()):
            raise ValueError("expected a polynomial in u alone")
        return R.from_dict(dict(p.terms())) if p.ring != R else p
    u = R.gens[2]
    out = R.zero
    for i, c in enumerate(p):
        out += R(QQ(c)) * u**i if not isinstance(c, str) else R.zero
    return out


@dataclass
class LinearReport:
    Cb: TruncatedSeries
    Cd: TruncatedSeries
    f: TruncatedSeries
    f_catalytic: TruncatedSeries
    check: IdentityReport

    @property
    def ok(self) -> bool:
        return self.check.ok


def linear_reduce(P, R, S, order: int) -> LinearReport:
    """Solve Cb = t(1+Cb)R(Cd), Cd = t(1+Cb)S(Cd) and form f = t(1+Cb)P(Cd)."""
    V = vertex_ring()
    P, R, S = (_u_poly(p, V) for p in (P, R, S))
    if not P:
        raise ValueError("P is zero")
    K = coefficient_ring()

    def terms(poly, extra):
        return [Term(K(c), 1, extra + ("Cd",) * e[2]) for e, c in poly.terms()]

    eqs = {"Cb": terms(R, ("Cb1",)), "Cd": terms(S, ("Cb1",)), "f": terms(P, ("Cb1",))}
    sol = solve_system(eqs, K, order)
    v, w = V.gens[:2]
    F = solve_catalytic(P + R * v + S * w, order).at_u0()
    rep = IdentityReport("t(1+Cb)P(Cd) = F(t,0)")
    for n in range(order + 1):
        rep.add(n, sol["f"][n], F[n])
    return LinearReport(sol["Cb"], sol["Cd"], sol["f"], F, rep)


def series_from_counts(counts: Sequence, K=None, var: str = "t") -> TruncatedSeries:
    K = K or coefficient_ring()
    return TruncatedSeries(tuple(K(c) if not isinstance(c, PolyElement) else c for c in counts), K, var)
