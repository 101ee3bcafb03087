"""Canonical sequences for the kernel of the completion map of an EGS-group.

A kernel element is described by an index assignment: one residue mod p
per vertex of depth at most n, with each internal vertex carrying the sum
of its children's indices.  The depth-n indices give the canonical element
``prod_v (c^-1 b)^{i_v} * v``.

Membership in ``H_n`` (level-n stabilizer elements all of whose level-n
sections lie in the commutator subgroup) is decided exactly from words: a
section word lies in ``[G, G]`` iff its three exponent sums vanish.  The
quotient-level test in :mod:`treegroups.quotient` is weaker, because
``c^-1 b`` survives in the commutator image of every finite quotient.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .gfp import ParameterError
from .groups import (
    Exponents,
    GroupFamily,
    GroupWord,
    PlacedWord,
    PreconditionError,
    abelianization,
    generator,
    level_sections,
    word_to_aut,
)
from .quotient import hn_image_membership, level_rep, perm_inv, perm_mul
from .tree import (
    Automorphism,
    Recursive,
    check_vertex,
    compose,
    cyclic,
    identity,
    index_vertex,
    invert,
    is_level_trivial,
    level_offset,
    level_vertices,
    rist_place,
    vertex_index,
)

ROOT_CONVENTIONS = ("free", "zero")


def _egs(fam: GroupFamily) -> GroupFamily:
    return fam if fam.kind == "EGS" else fam.with_kind("EGS")


# t_n -----------------------------------------------------------------------

@lru_cache(maxsize=None)
def t_element(fam: GroupFamily, n: int) -> Automorphism:
    """``t_1 = b`` and ``t_{n+1} = (t_n, a^alpha_1, ..., a^alpha_{p-1})`` with trivial activity."""
    if n < 1:
        raise ValueError("n must be >= 1")
    fam = _egs(fam)
    if n == 1:
        return generator(fam, "b")
    p = fam.p
    children = [t_element(fam, n - 1)] + [cyclic(p, fam.vector[i]) for i in range(1, p)]
    return Recursive(p, 0, children, name=f"t{n}")


def cb_word(fam: GroupFamily) -> GroupWord:
    """The word ``c^-1 b``."""
    return GroupWord((("c", -1), ("b", 1)), _egs(fam))


def cb_child_word(fam: GroupFamily, i: int) -> GroupWord:
    """A word for ``(c^-1 b) * i``, namely ``(c^-1 b^a)^(a^i)``."""
    fam = _egs(fam)
    a = GroupWord.gen(fam, "a")
    b = GroupWord.gen(fam, "b")
    c = GroupWord.gen(fam, "c")
    return (c.inverse() * b.conjugate(a)).conjugate(a ** i)


# level vectors and theta ---------------------------------------------------

@dataclass(frozen=True)
class LevelVector:
    """One residue per vertex of a fixed level, breadth-first."""

    p: int
    n: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.p**self.n:
            raise ParameterError(f"need {self.p ** self.n} entries, got {len(self.entries)}")
        object.__setattr__(self, "entries", tuple(int(e) % self.p for e in self.entries))

    @classmethod
    def zero(cls, p: int, n: int) -> "LevelVector":
        return cls(p, n, (0,) * p**n)

    def __add__(self, other: "LevelVector") -> "LevelVector":
        if (other.p, other.n) != (self.p, self.n):
            raise ParameterError("level vectors of different shape")
        return LevelVector(self.p, self.n, tuple(x + y for x, y in zip(self.entries, other.entries)))

    def scale(self, k: int) -> "LevelVector":
        return LevelVector(self.p, self.n, tuple(k * x for x in self.entries))

    def is_zero(self) -> bool:
        return not any(self.entries)


def theta(x: LevelVector) -> LevelVector:
    """Sum over the children of each level-(n-1) vertex; level 1 goes to the zero vector of level 0."""
    if x.n < 1:
        raise ValueError("theta needs n >= 1")
    if x.n == 1:
        return LevelVector.zero(x.p, 0)
    e = x.entries
    p = x.p
    return LevelVector(p, x.n - 1, tuple(sum(e[j * p:(j + 1) * p]) for j in range(p ** (x.n - 1))))


# index assignments ---------------------------------------------------------

@dataclass(frozen=True)
class IndexAssignment:
    """Residues for all vertices of depth <= depth, breadth-first (root first)."""

    p: int
    depth: int
    indices: tuple[int, ...]

    def __post_init__(self):
        need = level_offset(self.p, self.depth + 1)
        if len(self.indices) != need:
            raise ParameterError(f"depth {self.depth} needs {need} indices, got {len(self.indices)}")
        object.__setattr__(self, "indices", tuple(int(i) % self.p for i in self.indices))

    @classmethod
    def zero(cls, p: int, depth: int) -> "IndexAssignment":
        return cls(p, depth, (0,) * level_offset(p, depth + 1))

    @classmethod
    def from_levels(cls, p: int, levels: Sequence[Sequence[int]]) -> "IndexAssignment":
        flat = [int(x) for lev in levels for x in lev]
        return cls(p, len(levels) - 1, tuple(flat))

    def index(self, v: Sequence[int]) -> int:
        v = check_vertex(v, self.p)
        if len(v) > self.depth:
            raise ValueError(f"vertex {v} below depth {self.depth}")
        return self.indices[level_offset(self.p, len(v)) + vertex_index(v, self.p)]

    def level(self, k: int) -> LevelVector:
        off = level_offset(self.p, k)
        return LevelVector(self.p, k, self.indices[off:off + self.p**k])

    def leaf_vector(self) -> LevelVector:
        return self.level(self.depth)

    def restrict(self, n: int) -> "IndexAssignment":
        if n > self.depth:
            raise ValueError("cannot restrict to a deeper level")
        return IndexAssignment(self.p, n, self.indices[: level_offset(self.p, n + 1)])

    def __add__(self, other: "IndexAssignment") -> "IndexAssignment":
        if (other.p, other.depth) != (self.p, self.depth):
            raise ParameterError("assignments of different shape")
        return IndexAssignment(self.p, self.depth, tuple(x + y for x, y in zip(self.indices, other.indices)))

    def scale(self, k: int) -> "IndexAssignment":
        return IndexAssignment(self.p, self.depth, tuple(k * x for x in self.indices))

    def to_dict(self) -> dict:
        return {"p": self.p, "depth": self.depth, "indices": list(self.indices)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "IndexAssignment":
        try:
            return cls(int(d["p"]), int(d["depth"]), tuple(d["indices"]))
        except KeyError as exc:
            raise ParameterError(f"assignment JSON lacks field {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "IndexAssignment":
        return cls.from_dict(json.loads(text))


def summation_failures(asg: IndexAssignment, root_convention: str = "free") -> list[tuple[int, ...]]:
    """Internal vertices where the index differs from the sum of the children's indices."""
    if root_convention not in ROOT_CONVENTIONS:
        raise ValueError(f"root convention must be one of {ROOT_CONVENTIONS}")
    p = asg.p
    bad = []
    for k in range(asg.depth):
        parent = asg.level(k).entries
        below = theta(asg.level(k + 1)).entries if k > 0 else (sum(asg.level(1).entries) % p,)
        for j, (x, s) in enumerate(zip(parent, below)):
            if x != s:
                bad.append(index_vertex(j, k, p))
    if root_convention == "zero" and asg.indices[0] != 0 and () not in bad:
        bad.insert(0, ())
    return bad


def check_summation(asg: IndexAssignment, root_convention: str = "free") -> bool:
    """Every internal vertex carries the sum of its children's indices (mod p).

    With ``root_convention="zero"`` the root index must also vanish.
    """
    return not summation_failures(asg, root_convention)


def extend_assignment(asg: IndexAssignment, rng: np.random.Generator | None = None) -> IndexAssignment:
    """A valid depth+1 assignment restricting to ``asg``.

    Without ``rng`` each vertex passes its index to its first child.  With
    ``rng`` the p-1 other children are drawn uniformly and the first child
    absorbs the difference, which is uniform over all valid extensions.
    """
    p = asg.p
    new = []
    for x in asg.leaf_vector().entries:
        if rng is None:
            kids = [x] + [0] * (p - 1)
        else:
            rest = [int(r) for r in rng.integers(0, p, size=p - 1)]
            kids = [(x - sum(rest)) % p] + rest
        new.extend(kids)
    return IndexAssignment(p, asg.depth + 1, asg.indices + tuple(new))


def random_assignment(p: int, depth: int, rng: np.random.Generator, root_convention: str = "free") -> IndexAssignment:
    """Uniform valid assignment: pick the leaf vector freely and sum upwards."""
    if root_convention not in ROOT_CONVENTIONS:
        raise ValueError(f"root convention must be one of {ROOT_CONVENTIONS}")
    leaf = LevelVector(p, depth, tuple(int(x) for x in rng.integers(0, p, size=p**depth)))
    if root_convention == "zero" and depth >= 1:
        # shift one leaf so the total vanishes
        e = list(leaf.entries)
        e[0] = (e[0] - sum(e)) % p
        leaf = LevelVector(p, depth, tuple(e))
    return assignment_from_leaves(leaf)


def assignment_from_leaves(leaf: LevelVector) -> IndexAssignment:
    """The unique valid (free-root) assignment with the given leaf vector."""
    p = leaf.p
    levels = [leaf.entries]
    cur = leaf
    while cur.n > 0:
        e = cur.entries
        cur = LevelVector(p, cur.n - 1, tuple(sum(e[j * p:(j + 1) * p]) for j in range(p ** (cur.n - 1))))
        levels.append(cur.entries)
    return IndexAssignment.from_levels(p, list(reversed(levels)))


def count_extensions(asg: IndexAssignment) -> int:
    """Number of valid depth+1 extensions, by brute force over all child labellings."""
    p = asg.p
    total = 1
    for x in asg.leaf_vector().entries:
        total *= sum(1 for kids in product(range(p), repeat=p) if sum(kids) % p == x)
    return total


def path_assignment(p: int, stem: Sequence[int], n: int) -> IndexAssignment:
    """Indicator of the infinite path ``stem 0 0 0 ...``, cut at depth n."""
    stem = check_vertex(stem, p)
    path = tuple(stem[:n]) + (0,) * max(0, n - len(stem))
    idx = [0] * level_offset(p, n + 1)
    for k in range(n + 1):
        idx[level_offset(p, k) + vertex_index(path[:k], p)] = 1
    return IndexAssignment(p, n, tuple(idx))


def path_sum(asg: IndexAssignment) -> IndexAssignment:
    """``sum_v z_v * gamma_v`` over the leaves v of ``asg``, with ``gamma_v = v00...``."""
    p, n = asg.p, asg.depth
    total = IndexAssignment.zero(p, n)
    for j, z in enumerate(asg.leaf_vector().entries):
        if z:
            total = total + path_assignment(p, index_vertex(j, n, p), n).scale(z)
    return total


# canonical elements and H_n ------------------------------------------------

def canonical_placed(fam: GroupFamily, asg: IndexAssignment, n: int | None = None) -> PlacedWord:
    """``prod_{|v| = n} (c^-1 b)^{i_v} * v`` as words for the level-n sections."""
    fam = _egs(fam)
    if asg.p != fam.p:
        raise ParameterError("assignment and family use different primes")
    n = asg.depth if n is None else n
    cb = cb_word(fam)
    return PlacedWord(n, tuple(cb ** e for e in asg.level(n).entries))


def canonical_element(fam: GroupFamily, asg: IndexAssignment, n: int | None = None) -> Automorphism:
    """Tree automorphism of the canonical element at depth n (default: the assignment's depth)."""
    fam = _egs(fam)
    n = asg.depth if n is None else n
    cb = word_to_aut(cb_word(fam))
    factors = [
        rist_place(cb ** e, v)
        for v, e in zip(level_vertices(fam.p, n), asg.level(n).entries)
        if e
    ]
    return compose(*factors) if factors else identity(fam.p)


def hn_class(x: PlacedWord) -> tuple[Exponents, ...]:
    """Image of a level-n stabilizer element in ``Stab(n) / H_n``: its section abelianizations."""
    return tuple(x.abelianizations())


def hn_membership(x: PlacedWord) -> bool:
    """Exact test for ``x`` in ``H_n``: all level-n section words have zero exponent sums."""
    return all(e.is_zero() for e in x.abelianizations())


def word_hn_membership(x: GroupWord, n: int) -> bool:
    return hn_membership(PlacedWord.from_word(x, n))


def same_hn_coset(x: PlacedWord, y: PlacedWord) -> bool:
    return hn_membership(x * y.inverse())


def chain_step_holds(fam: GroupFamily, asg: IndexAssignment, n: int) -> bool:
    """Exact check of ``g_{n+1} in g_n H_n`` for the canonical elements of ``asg``.

    The level-n section of ``g_{n+1}`` at u is ``prod_i ((c^-1 b) * i)^{i_ui}``,
    written with the word for ``(c^-1 b) * i``.  For n = 0 this is the root
    step with ``H_0 = [G, G]``.
    """
    fam = _egs(fam)
    if n + 1 > asg.depth:
        raise ValueError("assignment too shallow")
    p = fam.p
    cb = cb_word(fam)
    child = [cb_child_word(fam, i) for i in range(p)]
    words = []
    for j, u in enumerate(level_vertices(p, n)):
        w = GroupWord.identity(fam)
        for i in range(p):
            w = w * child[i] ** asg.index(u + (i,))
        words.append(w * cb ** (-asg.index(u)))
    return hn_membership(PlacedWord(n, tuple(words)))


def kernel_condition_holds(fam: GroupFamily, asg: IndexAssignment) -> bool:
    """The whole chain ``g_{k+1} in g_k H_k`` for k < depth (k = 0 uses the root index)."""
    return all(chain_step_holds(fam, asg, k) for k in range(asg.depth))


def separates(fam: GroupFamily, asg1: IndexAssignment, asg2: IndexAssignment, n: int) -> bool:
    """True iff the depth-n canonical elements lie in different ``H_n`` cosets (exact)."""
    g = canonical_placed(fam, asg1, n)
    h = canonical_placed(fam, asg2, n)
    return not same_hn_coset(g, h)


def quotient_separates(fam: GroupFamily, asg1: IndexAssignment, asg2: IndexAssignment, n: int, m: int) -> bool:
    """The same question asked in the level-m quotient; never separates, see module docstring."""
    fam = _egs(fam)
    x = perm_mul(level_rep(canonical_element(fam, asg1, n), m), perm_inv(level_rep(canonical_element(fam, asg2, n), m)))
    return not hn_image_membership(fam, n, m, x)


# kernel condition witnesses ------------------------------------------------

@dataclass(frozen=True)
class WitnessVerdict:
    exists: bool
    exponents: tuple[int, ...] | None
    failing_vertex: tuple[int, ...] | None
    section_exponents: tuple[Exponents, ...]
    quotient_confirmed: bool | None

    def to_dict(self) -> dict:
        return {
            "exists": self.exists,
            "exponents": list(self.exponents) if self.exponents is not None else None,
            "failing_vertex": list(self.failing_vertex) if self.failing_vertex is not None else None,
            "section_exponents": [list(e) for e in self.section_exponents],
            "quotient_confirmed": self.quotient_confirmed,
        }


def kernel_coset_witness(fam: GroupFamily, n: int, m: int | None, x: GroupWord) -> WitnessVerdict:
    """Decide whether some y in CH_n has ``x y^-1 in H_n``; return y's exponents if so.

    The section of y at v is ``(c^-1 b)^{e_v}`` with exponent sums
    ``(0, e_v, -e_v)``, so a witness exists iff every level-n section of x
    has ``d_a = 0`` and ``d_b + d_c = 0``, and then ``e_v = d_b``.  When m
    is given, the witness is also checked in the level-m quotient.
    """
    fam = _egs(fam)
    if x.family.kind != "EGS":
        x = GroupWord(x.syllables, fam)
    if not is_level_trivial(word_to_aut(x), n):
        raise PreconditionError(f"{x} is not in the level-{n} stabilizer")
    if m is not None and m <= n:
        raise ValueError("need n < m")
    p = fam.p
    secs = tuple(abelianization(w) for w in level_sections(x, n))
    exps = []
    for j, e in enumerate(secs):
        if e.a != 0 or (e.b + e.c) % p != 0:
            return WitnessVerdict(False, None, index_vertex(j, n, p), secs, None)
        exps.append(e.b)
    confirmed = None
    if m is not None:
        y = PlacedWord(n, tuple(cb_word(fam) ** e for e in exps)).to_automorphism()
        z = perm_mul(level_rep(word_to_aut(x), m), perm_inv(level_rep(y, m)))
        confirmed = hn_image_membership(fam, n, m, z)
    return WitnessVerdict(True, tuple(exps), None, secs, confirmed)


def quotient_witness_search(fam: GroupFamily, n: int, m: int, x: GroupWord, limit: int = 3**9) -> list[tuple[int, ...]]:
    """All exponent families e with ``x y_e^-1`` passing the level-m H_n image test (exhaustive)."""
    fam = _egs(fam)
    p = fam.p
    if p ** (p**n) > limit:
        raise ValueError("too many candidates for exhaustive search")
    if x.family.kind != "EGS":
        x = GroupWord(x.syllables, fam)
    xp = level_rep(word_to_aut(x), m)
    cb = word_to_aut(cb_word(fam))
    placed = [[level_rep(rist_place(cb ** e, v), m) for e in range(p)] for v in level_vertices(p, n)]
    found = []
    for e in product(range(p), repeat=p**n):
        y = placed[0][e[0]]
        for j in range(1, len(e)):
            y = perm_mul(y, placed[j][e[j]])
        if hn_image_membership(fam, n, m, perm_mul(xp, perm_inv(y))):
            found.append(e)
    return found


# structural checks on canonical elements -----------------------------------

def nesting_element(fam: GroupFamily, u: Sequence[int], i: int) -> Automorphism:
    """``rist_place(c^-1 b, u i) * rist_place(c^-1 b, u)^-1``."""
    fam = _egs(fam)
    u = tuple(u)
    cb = word_to_aut(cb_word(fam))
    return compose(rist_place(cb, u + (i,)), invert(rist_place(cb, u)))


def nesting_holds(fam: GroupFamily, u: Sequence[int], i: int, m: int) -> bool:
    fam = _egs(fam)
    return hn_image_membership(fam, len(tuple(u)), m, level_rep(nesting_element(fam, u, i), m))


def nesting_holds_exact(fam: GroupFamily, u: Sequence[int], i: int) -> bool:
    fam = _egs(fam)
    u = tuple(u)
    placed_v = PlacedWord.at(cb_child_word(fam, i), u)
    placed_u = PlacedWord.at(cb_word(fam), u)
    return hn_membership(placed_v * placed_u.inverse())


def commute_to_depth(g: Automorphism, h: Automorphism, depth: int) -> bool:
    return compose(g, h).portrait(depth) == compose(h, g).portrait(depth)


def has_exponent_p(g: Automorphism, depth: int) -> bool:
    """Whether ``g^p`` is trivial down to ``depth`` (false for ``c^-1 b``, whose order is p^2)."""
    return (g ** g.p).portrait(depth).is_trivial()


def power_in_hn(fam: GroupFamily, asg: IndexAssignment, n: int | None = None) -> bool:
    """Exact check that the p-th power of the depth-n canonical element lies in ``H_n``."""
    g = canonical_placed(fam, asg, n)
    return hn_membership(PlacedWord(g.depth, tuple(w ** g.words[0].p for w in g.words)))


def canonical_elements(fam: GroupFamily, assignments: Iterable[IndexAssignment]) -> list[Automorphism]:
    return [canonical_element(fam, a) for a in assignments]


def kernel_group_log_order(p: int, n: int) -> int:
    """log_p of the number of valid free-root assignments at depth n: the leaf vector is free."""
    return p**n


def kernel_group_order(p: int, n: int) -> int:
    return p ** kernel_group_log_order(p, n)
