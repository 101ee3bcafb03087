"""GGS and EGS groups: accompanying vectors, generators, words and sections."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Sequence

from . import gfp
from .tree import (
    Automorphism,
    Recursive,
    compose,
    cyclic,
    identity,
    index_vertex,
    level_vertices,
    rist_place,
)


class PreconditionError(ValueError):
    pass


class WordSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class AccompanyingVector:
    p: int
    values: tuple[int, ...]

    def __post_init__(self):
        gfp.check_modulus(self.p)
        vals = tuple(int(x) % self.p for x in self.values)
        if len(vals) != self.p - 1:
            raise gfp.ParameterError(f"accompanying vector for p={self.p} needs {self.p - 1} entries, got {len(vals)}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def parse(cls, p: int, text: str) -> "AccompanyingVector":
        try:
            vals = [int(x) for x in text.replace(" ", "").split(",") if x != ""]
        except ValueError as exc:
            raise gfp.ParameterError(f"cannot parse accompanying vector {text!r}") from exc
        return cls(p, tuple(vals))

    def __getitem__(self, i: int) -> int:
        """``alpha_i`` for 1 <= i <= p-1, and ``alpha_0 = 0``."""
        if i % self.p == 0:
            return 0
        return self.values[(i % self.p) - 1]

    @property
    def is_periodic(self) -> bool:
        return sum(self.values) % self.p == 0

    @property
    def is_symmetric(self) -> bool:
        return all(self[i] == self[self.p - i] for i in range(1, (self.p - 1) // 2 + 1))

    @property
    def is_zero(self) -> bool:
        return not any(self.values)

    def __str__(self):
        return ",".join(map(str, self.values))


KINDS = {"GGS": ("a", "b"), "EGS": ("a", "b", "c"), "F": ("a", "c")}


@dataclass(frozen=True)
class GroupFamily:
    kind: str
    vector: AccompanyingVector

    def __post_init__(self):
        kind = self.kind.upper()
        if kind not in KINDS:
            raise gfp.ParameterError(f"unknown family kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if self.vector.is_zero:
            raise gfp.ParameterError("accompanying vector must have a nonzero entry")

    @property
    def p(self) -> int:
        return self.vector.p

    @property
    def generator_names(self) -> tuple[str, ...]:
        return KINDS[self.kind]

    def with_kind(self, kind: str) -> "GroupFamily":
        return GroupFamily(kind, self.vector)

    def word(self, text: str) -> "GroupWord":
        return parse_word(text, self)

    def __str__(self):
        return f"{self.kind}(p={self.p}, alpha=({self.vector}))"


def ggs(p: int, alpha: Sequence[int]) -> GroupFamily:
    return GroupFamily("GGS", AccompanyingVector(p, tuple(alpha)))


def egs(p: int, alpha: Sequence[int]) -> GroupFamily:
    return GroupFamily("EGS", AccompanyingVector(p, tuple(alpha)))


def f_subgroup(p: int, alpha: Sequence[int]) -> GroupFamily:
    return GroupFamily("F", AccompanyingVector(p, tuple(alpha)))


# generators ----------------------------------------------------------------

@lru_cache(maxsize=None)
def _generator_power(vec: AccompanyingVector, name: str, e: int) -> Automorphism:
    p = vec.p
    e %= p
    if e == 0:
        return identity(p)
    if name == "a":
        return cyclic(p, e)
    node = Recursive(p, 0, name=f"{name}^{e}" if e != 1 else name)
    if name == "b":
        node.define([cyclic(p, e * vec[i + 1]) for i in range(p - 1)] + [node])
    elif name == "c":
        node.define([node] + [cyclic(p, e * vec[i]) for i in range(1, p)])
    else:
        raise gfp.ParameterError(f"unknown generator {name!r}")
    return node


def generator(fam: GroupFamily, name: str) -> Automorphism:
    if name not in fam.generator_names:
        raise gfp.ParameterError(f"{fam.kind} has no generator {name!r}")
    return _generator_power(fam.vector, name, 1)


@lru_cache(maxsize=None)
def _conjugator(vec: AccompanyingVector) -> Automorphism:
    f = Recursive(vec.p, 0, name="f")
    big_c = compose(cyclic(vec.p, 1), f)
    f.define([big_c] * vec.p)
    return big_c


def conjugator_C(fam: GroupFamily) -> Automorphism:
    """The automorphism ``C = a f`` with ``f = (C, ..., C)``; it conjugates b to c and fixes a."""
    if fam.kind != "EGS":
        raise PreconditionError("the conjugator is defined for EGS families")
    return _conjugator(fam.vector)


# words ---------------------------------------------------------------------

def _reduce(syllables, p: int) -> tuple[tuple[str, int], ...]:
    out: list[list] = []
    for g, e in syllables:
        e %= p
        if e == 0:
            continue
        if out and out[-1][0] == g:
            out[-1][1] = (out[-1][1] + e) % p
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([g, e])
    return tuple((g, e) for g, e in out)


class Exponents(NamedTuple):
    a: int
    b: int
    c: int

    def is_zero(self) -> bool:
        return not (self.a or self.b or self.c)


@dataclass(frozen=True)
class GroupWord:
    """Freely reduced word: syllables ``(generator, exponent)`` with exponents in 1..p-1."""

    syllables: tuple[tuple[str, int], ...]
    family: GroupFamily = field(compare=True)

    def __post_init__(self):
        names = self.family.generator_names
        for g, _ in self.syllables:
            if g not in names:
                raise gfp.ParameterError(f"generator {g!r} not allowed in {self.family.kind} words")
        object.__setattr__(self, "syllables", _reduce(self.syllables, self.family.p))

    @classmethod
    def identity(cls, family: GroupFamily) -> "GroupWord":
        return cls((), family)

    @classmethod
    def gen(cls, family: GroupFamily, name: str, e: int = 1) -> "GroupWord":
        return cls(((name, e),), family)

    @property
    def p(self) -> int:
        return self.family.p

    def __len__(self):
        return len(self.syllables)

    def __bool__(self):
        return bool(self.syllables)

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        if other.family != self.family:
            raise gfp.ParameterError("words from different families")
        return GroupWord(self.syllables + other.syllables, self.family)

    def inverse(self) -> "GroupWord":
        return GroupWord(tuple((g, -e) for g, e in reversed(self.syllables)), self.family)

    def __pow__(self, k: int) -> "GroupWord":
        base = self if k >= 0 else self.inverse()
        return GroupWord(base.syllables * abs(k), self.family)

    def conjugate(self, by: "GroupWord") -> "GroupWord":
        """``self^by = by^-1 self by``."""
        return by.inverse() * self * by

    def __str__(self):
        if not self.syllables:
            return "1"
        return "*".join(g if e == 1 else f"{g}^{e}" for g, e in self.syllables)

    def __repr__(self):
        return f"GroupWord({str(self)!r}, {self.family})"


def commutator(x: GroupWord, y: GroupWord) -> GroupWord:
    """``[x, y] = x^-1 y^-1 x y``."""
    return x.inverse() * y.inverse() * x * y


_TOKEN = re.compile(r"\s*(?:(?P<int>-?\d+)|(?P<gen>[a-zA-Z])|(?P<op>[\^\*\[\],\(\)]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise WordSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def parse_word(text: str, family: GroupFamily) -> GroupWord:
    """Parse ``a``, ``b``, ``c``, ``x^k``, ``x*y`` (or juxtaposition), ``[x,y]``, ``(x)`` and ``1``."""
    tokens = _tokenize(text)
    i = 0

    def peek():
        return tokens[i]

    def take(expected=None):
        nonlocal i
        tok = tokens[i]
        if expected is not None and tok[1] != expected:
            raise WordSyntaxError(f"expected {expected!r}, found {tok[1] or 'end of input'!r}", tok[2])
        i += 1
        return tok

    def atom() -> GroupWord:
        kind, val, pos = peek()
        if kind == "gen":
            take()
            if val not in family.generator_names:
                raise WordSyntaxError(f"generator {val!r} is not in {family.kind}", pos)
            return GroupWord.gen(family, val)
        if kind == "int" and val == "1":
            take()
            return GroupWord.identity(family)
        if val == "[":
            take()
            x = expr()
            take(",")
            y = expr()
            take("]")
            return commutator(x, y)
        if val == "(":
            take()
            x = expr()
            take(")")
            return x
        raise WordSyntaxError(f"unexpected {val or 'end of input'!r}", pos)

    def term() -> GroupWord:
        x = atom()
        while peek()[1] == "^":
            take()
            kind, val, pos = take()
            if kind != "int":
                raise WordSyntaxError("exponent must be an integer", pos)
            x = x ** int(val)
        return x

    def expr() -> GroupWord:
        x = term()
        while True:
            kind, val, _ = peek()
            if val == "*":
                take()
                x = x * term()
            elif kind == "gen" or val in ("[", "(") or (kind == "int" and val == "1"):
                x = x * term()
            else:
                return x

    w = expr()
    if peek()[0] != "end":
        kind, val, pos = peek()
        raise WordSyntaxError(f"unexpected {val!r}", pos)
    return w


def word_to_aut(w: GroupWord) -> Automorphism:
    vec = w.family.vector
    if not w.syllables:
        return identity(w.p)
    return compose(*[_generator_power(vec, g, e) for g, e in w.syllables])


def abelianization(w: GroupWord) -> Exponents:
    """Exponent sums mod p for a, b, c; all zero iff w lies in the derived subgroup."""
    sums = {"a": 0, "b": 0, "c": 0}
    for g, e in w.syllables:
        sums[g] += e
    p = w.p
    return Exponents(sums["a"] % p, sums["b"] % p, sums["c"] % p)


def syllable_length(w: GroupWord) -> int:
    """Number of b/c syllables of the reduced word; an upper bound for the minimal length."""
    return sum(1 for g, _ in w.syllables if g != "a")


def _section_letter(w: GroupWord, i: int) -> tuple[GroupWord, int]:
    vec = w.family.vector
    p = w.p
    cur = i
    out = []
    for g, e in w.syllables:
        if g == "a":
            cur = (cur + e) % p
        elif g == "b":
            out.append(("b", e) if cur == p - 1 else ("a", e * vec[cur + 1]))
        else:
            out.append(("c", e) if cur == 0 else ("a", e * vec[cur]))
    return GroupWord(tuple(out), w.family), cur


def section_word(w: GroupWord, v: Sequence[int]) -> GroupWord:
    """Word for the section of w at vertex v (any v, by symbol pushing)."""
    for x in v:
        if not 0 <= x < w.p:
            raise gfp.ParameterError(f"letter {x} outside alphabet")
        w, _ = _section_letter(w, x)
    return w


def word_section(w: GroupWord, i: int) -> GroupWord:
    if abelianization(w).a != 0:
        raise PreconditionError(f"{w} is not in the first level stabilizer")
    return section_word(w, (i,))


def word_action(w: GroupWord, v: Sequence[int]) -> tuple[int, ...]:
    out = []
    for x in v:
        w, img = _section_letter(w, x)
        out.append(img)
    return tuple(out)


def level_sections(w: GroupWord, n: int) -> list[GroupWord]:
    """Words for the sections at all level-n vertices, breadth-first."""
    layer = [w]
    for _ in range(n):
        layer = [section_word(u, (i,)) for u in layer for i in range(w.p)]
    return layer


def recurrence_witness(fam: GroupFamily, name: str, i: int) -> GroupWord:
    """A word in the first level stabilizer whose section at ``i`` is the generator ``name``."""
    p = fam.p
    vec = fam.vector
    if name not in fam.generator_names:
        raise gfp.ParameterError(f"{fam.kind} has no generator {name!r}")
    a = GroupWord.gen(fam, "a")
    if name == "b":
        return GroupWord.gen(fam, "b").conjugate(a ** (i + 1))
    if name == "c":
        return GroupWord.gen(fam, "c").conjugate(a**i)
    # a^k with section a: use b (or c) at a coordinate where it has an a-section
    carrier = "b" if "b" in fam.generator_names else "c"
    for j in range(p):
        coef = vec[j + 1] if carrier == "b" else vec[j]
        if (carrier == "b" and j == p - 1) or (carrier == "c" and j == 0) or coef == 0:
            continue
        e = pow(coef, -1, p)
        return GroupWord.gen(fam, carrier, e).conjugate(a ** ((i - j) % p))
    raise PreconditionError("zero accompanying vector")


@dataclass(frozen=True)
class PlacedWord:
    """An element of the level-n stabilizer of Aut T given by words for its level-n sections.

    ``words[i]`` is the section at the i-th level-n vertex (breadth-first).
    """

    depth: int
    words: tuple[GroupWord, ...]

    def __post_init__(self):
        if not self.words:
            raise ValueError("empty placement")
        p = self.words[0].p
        if len(self.words) != p**self.depth:
            raise ValueError(f"need {p ** self.depth} sections, got {len(self.words)}")

    @property
    def family(self) -> GroupFamily:
        return self.words[0].family

    @classmethod
    def trivial(cls, family: GroupFamily, depth: int) -> "PlacedWord":
        return cls(depth, tuple(GroupWord.identity(family) for _ in range(family.p**depth)))

    @classmethod
    def at(cls, w: GroupWord, v: Sequence[int]) -> "PlacedWord":
        """``w * v``: w placed at vertex v, identity at the other vertices of that level."""
        idx = 0
        for x in v:
            idx = idx * w.p + x
        words = [GroupWord.identity(w.family)] * (w.p ** len(v))
        words[idx] = w
        return cls(len(v), tuple(words))

    @classmethod
    def from_word(cls, w: GroupWord, n: int) -> "PlacedWord":
        from .tree import is_level_trivial

        if not is_level_trivial(word_to_aut(w), n):
            raise PreconditionError(f"{w} does not stabilize level {n}")
        return cls(n, tuple(level_sections(w, n)))

    def __mul__(self, other: "PlacedWord") -> "PlacedWord":
        if other.depth != self.depth:
            raise ValueError("placements at different depths")
        return PlacedWord(self.depth, tuple(x * y for x, y in zip(self.words, other.words)))

    def inverse(self) -> "PlacedWord":
        return PlacedWord(self.depth, tuple(x.inverse() for x in self.words))

    def abelianizations(self) -> list[Exponents]:
        return [abelianization(w) for w in self.words]

    def to_automorphism(self) -> Automorphism:
        p = self.words[0].p
        factors = [
            rist_place(word_to_aut(w), index_vertex(i, self.depth, p))
            for i, w in enumerate(self.words)
            if w.syllables
        ]
        return compose(*factors) if factors else identity(p)


def random_word(fam: GroupFamily, n_syllables: int, rng) -> GroupWord:
    """Random reduced word with about ``n_syllables`` syllables (``rng``: numpy Generator)."""
    names = fam.generator_names
    syl = []
    prev = None
    for _ in range(n_syllables):
        g = prev
        while g == prev:
            g = names[int(rng.integers(len(names)))]
        syl.append((g, int(rng.integers(1, fam.p))))
        prev = g
    return GroupWord(tuple(syl), fam)


__all__ = [
    "AccompanyingVector",
    "GroupFamily",
    "GroupWord",
    "Exponents",
    "PlacedWord",
    "PreconditionError",
    "WordSyntaxError",
    "abelianization",
    "commutator",
    "conjugator_C",
    "egs",
    "f_subgroup",
    "generator",
    "ggs",
    "level_sections",
    "level_vertices",
    "parse_word",
    "random_word",
    "recurrence_witness",
    "section_word",
    "syllable_length",
    "word_action",
    "word_section",
    "word_to_aut",
]
