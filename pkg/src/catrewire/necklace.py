"""Necklace systems: the allowed vertex types of Q-trees and companion trees.

A necklace is a clockwise cyclic word carrying one square pearl (the local
root, implicit in :attr:`Necklace.word`) followed by black, diamond and
triangle pearls.  A system is a finite list of necklaces, each with a weight
and a size, or the regular system of all words, which is only ever expanded
up to an explicit pearl bound.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence, Union

from sympy import QQ, Symbol
from sympy.polys.rings import PolyElement, ring

Weight = Union[Fraction, str]

RESERVED_NAMES = frozenset({"v", "w", "u", "x", "t"})


class PearlKind(enum.Enum):
    SQUARE = "s"
    BLACK = "b"
    DIAMOND = "d"
    TRIANGLE = "t"

    @property
    def letter(self) -> str:
        return self.value


class SystemError_(ValueError):
    """Invalid necklace system (violates a structural invariant)."""


class SystemSyntaxError(SystemError_):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Necklace:
    word: str
    weight: Weight = Fraction(1)
    size: int = 1

    def __post_init__(self):
        if any(c not in "bdt" for c in self.word):
            raise ValueError(f"necklace word {self.word!r} must be over 'b', 'd', 't'")
        if isinstance(self.weight, int):
            object.__setattr__(self, "weight", Fraction(self.weight))
        if isinstance(self.weight, str) and self.weight in RESERVED_NAMES:
            raise ValueError(f"weight symbol {self.weight!r} is reserved")
        if self.size < 0:
            raise ValueError("necklace size must be non-negative")

    @property
    def full(self) -> str:
        """Word including the square pearl at position 0."""
        return "s" + self.word

    @property
    def blacks(self) -> int:
        return self.word.count("b")

    @property
    def diamonds(self) -> int:
        return self.word.count("d")

    @property
    def triangles(self) -> int:
        return self.word.count("t")

    @property
    def is_terminal(self) -> bool:
        return self.blacks == 0 and self.diamonds == 0


@dataclass(frozen=True)
class RerootedNecklace:
    word: str  # read clockwise from the new root pearl; exactly one 's'
    origin: Necklace
    offset: int  # index of the root pearl in origin.full

    @property
    def kind(self) -> str:
        return self.word[0]


@dataclass(frozen=True)
class NecklaceSystem:
    name: str
    explicit: tuple[Necklace, ...] | None = None
    regular: str | None = None  # only "all" is supported

    def __post_init__(self):
        if (self.explicit is None) == (self.regular is None):
            raise ValueError("a system is either explicit or regular")
        if self.regular is not None and self.regular != "all":
            raise ValueError(f"unknown regular description {self.regular!r}")
        if self.explicit is not None:
            _validate(self.explicit)

    def necklaces(self, max_pearls: int | None = None) -> tuple[Necklace, ...]:
        if self.explicit is not None:
            return self.explicit
        if max_pearls is None:
            raise ValueError(f"system {self.name!r} is infinite; pass max_pearls")
        return _all_words(max_pearls)

    def lookup(self, word: str) -> Necklace | None:
        if self.regular == "all":
            return Necklace(word) if all(c in "bdt" for c in word) else None
        for s in self.explicit:
            if s.word == word:
                return s
        return None

    @property
    def weight_symbols(self) -> tuple[str, ...]:
        if self.explicit is None:
            return ()
        return tuple(sorted({s.weight for s in self.explicit if isinstance(s.weight, str)}))

    @property
    def graded(self) -> bool:
        """True when some necklace has a size other than 1."""
        return self.explicit is not None and any(s.size != 1 for s in self.explicit)

    def bounded(self, max_pearls: int) -> NecklaceSystem:
        """Explicit copy of the system restricted to its first expansion."""
        return NecklaceSystem(f"{self.name}<={max_pearls}", explicit=self.necklaces(max_pearls))


def _all_words(max_pearls: int) -> tuple[Necklace, ...]:
    return tuple(
        Necklace("".join(w)) for n in range(max_pearls + 1) for w in product("bdt", repeat=n)
    )


def _validate(necklaces: Sequence[Necklace]) -> None:
    seen = set()
    for s in necklaces:
        if s.word in seen:
            raise SystemError_(f"duplicate necklace {s.word or 'e'!r}")
        seen.add(s.word)
        if s.size == 0 and s.diamonds == 0:
            raise SystemError_(f"unbounded zero-size: necklace {s.word or 'e'!r} has size 0 and no diamond")
    if not any(s.is_terminal for s in necklaces):
        raise SystemError_("no terminal necklace")


# -- file format ------------------------------------------------------------

_WORD = re.compile(r"[bdt]+|ε|e")
_RATIONAL = re.compile(r"[+-]?\d+(/\d+)?")
_SYMBOL = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def parse_system(text: str, name: str = "system") -> NecklaceSystem:
    """Parse the line-oriented system-file format."""
    necklaces: list[Necklace] = []
    regular = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        col0 = raw.find(line) + 1 if line else 1
        if not line or line.startswith("#"):
            continue
        if line.startswith("name:"):
            name = line[5:].strip()
            if not name:
                raise SystemSyntaxError("empty name", lineno, col0 + 5)
            continue
        if line.startswith("regular:"):
            value = line[8:].strip()
            if value != "all":
                raise SystemSyntaxError(f"unknown regular description {value!r}", lineno, col0 + 8)
            regular = value
            continue
        head, bar, attrs = line.partition("|")
        token = head.strip()
        m = _WORD.fullmatch(token)
        if not m:
            bad = next((i for i, c in enumerate(token) if c not in "bdt"), 0)
            raise SystemSyntaxError(f"bad necklace word {token!r}", lineno, col0 + bad)
        word = "" if token in ("e", "ε") else token
        weight: Weight = Fraction(1)
        size = 1
        if bar:
            offset = col0 + len(head) + 1
            for field in attrs.split():
                key, eq, value = field.partition("=")
                col = offset + attrs.find(field)
                if not eq:
                    raise SystemSyntaxError(f"expected key=value, got {field!r}", lineno, col)
                if key == "weight":
                    if _RATIONAL.fullmatch(value):
                        weight = Fraction(value)
                    elif _SYMBOL.fullmatch(value) and value not in RESERVED_NAMES:
                        weight = value
                    else:
                        raise SystemSyntaxError(f"bad weight {value!r}", lineno, col)
                elif key == "size":
                    if not value.isdigit():
                        raise SystemSyntaxError(f"bad size {value!r}", lineno, col)
                    size = int(value)
                else:
                    raise SystemSyntaxError(f"unknown attribute {key!r}", lineno, col)
        necklaces.append(Necklace(word, weight, size))
    if regular is not None:
        if necklaces:
            raise SystemError_("a regular system takes no explicit necklace lines")
        return NecklaceSystem(name, regular=regular)
    if not necklaces:
        raise SystemError_("no terminal necklace")
    return NecklaceSystem(name, explicit=tuple(necklaces))


def _format_weight(w: Weight) -> str:
    return w if isinstance(w, str) else str(w)


def serialize_system(system: NecklaceSystem) -> str:
    lines = [f"name: {system.name}"]
    if system.regular is not None:
        lines.append(f"regular: {system.regular}")
    else:
        for s in system.explicit:
            attrs = []
            if s.weight != Fraction(1):
                attrs.append(f"weight={_format_weight(s.weight)}")
            if s.size != 1:
                attrs.append(f"size={s.size}")
            lines.append((s.word or "e") + (" | " + " ".join(attrs) if attrs else ""))
    return "\n".join(lines) + "\n"


# -- generating functions ---------------------------------------------------

def vertex_ring(weights: Iterable[str] = ()) -> object:
    """Polynomial ring QQ[v, w, u, x, weights...] holding vertex polynomials."""
    return ring(("v", "w", "u", "x") + tuple(weights), QQ)[0]


def weight_element(R, weight: Weight) -> PolyElement:
    if isinstance(weight, str):
        return R.gens[R.symbols.index(Symbol(weight))]
    return R(QQ(weight.numerator, weight.denominator))


def vertex_gf(system: NecklaceSystem, max_pearls: int | None = None,
              graded: bool | None = None) -> PolyElement:
    """Weighted vertex polynomial sum q_s v^#b w^#d u^#t (times x^size if graded)."""
    if graded is None:
        graded = system.graded
    R = vertex_ring(system.weight_symbols)
    v, w, u, x = R.gens[:4]
    total = R.zero
    for s in system.necklaces(max_pearls):
        term = weight_element(R, s.weight) * v**s.blacks * w**s.diamonds * u**s.triangles
        if graded:
            term *= x**s.size
        total += term
    return total


def reroot_sets(system: NecklaceSystem, max_pearls: int | None = None) -> dict[str, list[RerootedNecklace]]:
    """Rerootings of every necklace on each of its black, diamond or triangle pearls."""
    out: dict[str, list[RerootedNecklace]] = {"b": [], "d": [], "t": []}
    for s in system.necklaces(max_pearls):
        full = s.full
        for i, c in enumerate(full):
            if c != "s":
                out[c].append(RerootedNecklace(full[i:] + full[:i], s, i))
    return out


def rotations(system: NecklaceSystem, kind: str, max_pearls: int | None = None) -> list[RerootedNecklace]:
    """Root vertex types for trees rooted on a pearl of the given kind."""
    if kind == "s":
        return [RerootedNecklace(s.full, s, 0) for s in system.necklaces(max_pearls)]
    return reroot_sets(system, max_pearls)[kind]


# -- built-in systems -------------------------------------------------------

Q_LAMBDA = NecklaceSystem("lambda", explicit=(Necklace("bb"), Necklace("t"), Necklace("d")))
Q_NS = NecklaceSystem(
    "nonseparable",
    explicit=tuple(Necklace(a + b + c) for a in ("", "b") for b in ("", "d") for c in ("", "t")),
)
Q_ALL = NecklaceSystem("all", regular="all")


def q_all(max_pearls: int = 4) -> NecklaceSystem:
    return NecklaceSystem(f"all<={max_pearls}", explicit=_all_words(max_pearls))


def with_formal_weights(system: NecklaceSystem, prefix: str = "q_") -> NecklaceSystem:
    """Copy of an explicit system where each necklace carries its own weight symbol."""
    return NecklaceSystem(
        system.name + "-weighted",
        explicit=tuple(Necklace(s.word, prefix + (s.word or "e"), s.size) for s in system.necklaces()),
    )
