"""Exact finite quotients acting on the p**n leaves of the truncated tree.

Every group here sits inside the level-n truncation of the automorphisms
with cyclic activities.  That group has a chain of point stabilizers with
basic orbits of size at most p: take as base the vertices ``w0`` for the
internal vertices ``w`` in breadth-first order.  The stabilizer of the
first ``d`` base points is the set of elements whose first ``d`` portrait
labels vanish, and the basic orbit at step ``d`` is ``{w0, ..., w(p-1)}``.

A group is stored as a BSGS for this base: for each position ``d`` at most
one strong generator whose first nonzero label sits at ``d`` and equals 1.
Sifting is elimination along the labels; the Schreier-Sims closure only has
to sift p-th powers and commutators of strong generators, because each
basic transversal is ``{1, u, ..., u^(p-1)}``.

Permutations are numpy int arrays of leaf images; products read left to
right (``x * y`` applies x first).
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .groups import GroupFamily, generator
from .tree import Automorphism, DepthCapError, depth_cap, level_offset, vertex_index

CACHE_VERSION = 1
CACHE_ENV = "TREEGROUPS_CACHE_DIR"

LeafPermutation = np.ndarray


class DegreeError(ValueError):
    pass


# permutation helpers -------------------------------------------------------

def perm_mul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Apply x, then y."""
    return y[x]


def perm_inv(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    out[x] = np.arange(len(x), dtype=x.dtype)
    return out


def perm_pow(x: np.ndarray, e: int) -> np.ndarray:
    if e < 0:
        x, e = perm_inv(x), -e
    out = np.arange(len(x), dtype=x.dtype)
    base = x
    while e:
        if e & 1:
            out = base[out]
        base = base[base]
        e >>= 1
    return out


def perm_comm(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``[x, y] = x^-1 y^-1 x y``."""
    return perm_mul(perm_mul(perm_inv(x), perm_inv(y)), perm_mul(x, y))


def is_identity_perm(x: np.ndarray) -> bool:
    return bool((x == np.arange(len(x))).all())


def identity_perm(degree: int) -> np.ndarray:
    return np.arange(degree, dtype=np.int64)


def _degree_to_level(degree: int, p: int) -> int:
    n = 0
    d = 1
    while d < degree:
        d *= p
        n += 1
    if d != degree:
        raise DegreeError(f"degree {degree} is not a power of {p}")
    return n


@lru_cache(maxsize=None)
def _label_probe(p: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Leaf indices and divisors for reading all portrait labels off a leaf permutation."""
    probe, div = [], []
    for k in range(n):
        for i in range(p**k):
            probe.append(i * p ** (n - k))
            div.append(p ** (n - k - 1))
    return np.array(probe, dtype=np.int64), np.array(div, dtype=np.int64)


def perm_labels(x: np.ndarray, p: int, n: int | None = None) -> np.ndarray:
    """Portrait labels (breadth-first) of the level-n truncation given by leaf images."""
    if n is None:
        n = _degree_to_level(len(x), p)
    probe, div = _label_probe(p, n)
    return (x[probe] // div) % p


def labels_to_perm(labels: np.ndarray, p: int, n: int) -> np.ndarray:
    from .tree import Portrait

    return Portrait(p, n, labels).leaf_permutation()


def level_rep(g: Automorphism, n: int) -> np.ndarray:
    """Permutation of the level-n leaves induced by g."""
    if n < 1:
        raise ValueError("level must be >= 1")
    if n > depth_cap(g.p):
        raise DepthCapError(f"level {n} exceeds the depth cap {depth_cap(g.p)}")
    return g.portrait(n).leaf_permutation()


def restrict(x: np.ndarray, p: int) -> np.ndarray:
    """Image of a level-n permutation under the restriction to level n-1."""
    return x[:: p] // p


def section_perm(x: np.ndarray, v: Sequence[int], p: int) -> np.ndarray:
    """Section at v of a permutation fixing v, as a permutation of the leaves below v."""
    n = _degree_to_level(len(x), p)
    k = len(v)
    width = p ** (n - k)
    start = vertex_index(v, p) * width
    block = x[start:start + width]
    if not ((block >= start) & (block < start + width)).all():
        raise ValueError(f"permutation does not fix vertex {tuple(v)}")
    return block - start


def place_perm(d: np.ndarray, v: Sequence[int], p: int) -> np.ndarray:
    """Permutation acting as d below v and trivially elsewhere."""
    width = len(d)
    k = len(v)
    degree = width * p**k
    out = identity_perm(degree)
    start = vertex_index(v, p) * width
    out[start:start + width] = d + start
    return out


# BSGS ----------------------------------------------------------------------

DEFAULT_TABLE_BUDGET = 3_000_000
_table_budget = DEFAULT_TABLE_BUDGET


def set_table_budget(cells: int) -> None:
    """Cap on the worst-case table size (internal vertices times p times degree) of a group."""
    global _table_budget
    _table_budget = int(cells)


class PermGroup:
    """Subgroup of the level-n truncation, stored as a BSGS along the portrait labels."""

    def __init__(self, p: int, n: int, generators: Iterable[np.ndarray] = ()):
        self.p = p
        self.n = n
        self.degree = p**n
        self.npos = level_offset(p, n)
        if self.npos * p * self.degree > _table_budget:
            raise DepthCapError(f"level {n} for p={p} exceeds the quotient table budget {_table_budget}")
        self.generators: list[np.ndarray] = []
        self._table: list[np.ndarray | None] = [None] * self.npos
        self._inv_powers: list[list[np.ndarray] | None] = [None] * self.npos
        for g in generators:
            self.add_generator(g)

    # construction
    def _check(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        if x.shape != (self.degree,):
            raise DegreeError(f"expected degree {self.degree}, got {x.shape}")
        return x

    def _sift(self, x: np.ndarray) -> tuple[np.ndarray, int, int]:
        """Returns (residue, position, leading label); position -1 when x sifts to 1."""
        p = self.p
        while True:
            lab = perm_labels(x, p, self.n)
            nz = np.flatnonzero(lab)
            if nz.size == 0:
                return x, -1, 0
            pos = int(nz[0])
            e = int(lab[pos])
            if self._table[pos] is None:
                return x, pos, e
            x = perm_mul(x, self._inv_powers[pos][e])

    def _insert(self, x: np.ndarray) -> bool:
        """Add x and close under p-th powers and commutators; True if the group grew."""
        grew = False
        # pending work: a permutation, or a pair of table positions whose commutator is still unsifted
        queue: deque = deque([x])
        while queue:
            item = queue.popleft()
            if isinstance(item, tuple):
                y = perm_comm(self._table[item[0]], self._table[item[1]])
            else:
                y = item
            r, pos, e = self._sift(y)
            if pos < 0:
                continue
            r = perm_pow(r, pow(e, -1, self.p))
            self._table[pos] = r
            self._inv_powers[pos] = [None] + [perm_pow(r, -k) for k in range(1, self.p)]
            grew = True
            queue.append(perm_pow(r, self.p))
            queue.extend((pos, q) for q, u in enumerate(self._table) if u is not None and q != pos)
        return grew

    def add_generator(self, x: np.ndarray) -> bool:
        x = self._check(x)
        self.generators.append(x)
        return self._insert(x)

    @classmethod
    def from_strong_generators(cls, p: int, n: int, strong: Iterable[np.ndarray], generators=None) -> "PermGroup":
        """Rebuild from a stored strong generating set (leading labels must be 1)."""
        G = cls(p, n)
        for s in strong:
            s = G._check(s)
            lab = perm_labels(s, p, n)
            nz = np.flatnonzero(lab)
            if nz.size == 0 or lab[nz[0]] != 1 or G._table[int(nz[0])] is not None:
                raise ValueError("not a strong generating set in normal form")
            pos = int(nz[0])
            G._table[pos] = s
            G._inv_powers[pos] = [None] + [perm_pow(s, -k) for k in range(1, p)]
        G.generators = [G._check(g) for g in (generators if generators is not None else strong)]
        return G

    # queries
    @property
    def strong_generators(self) -> list[np.ndarray]:
        return [u for u in self._table if u is not None]

    @property
    def base(self) -> list[int]:
        """Breadth-first positions of the internal vertices carrying a nontrivial basic orbit."""
        return [i for i, u in enumerate(self._table) if u is not None]

    def order(self) -> int:
        return self.p ** len(self.base)

    def log_order(self) -> int:
        return len(self.base)

    def contains(self, x: np.ndarray) -> bool:
        return self._sift(self._check(x))[1] < 0

    def coset_equal(self, x: np.ndarray, y: np.ndarray) -> bool:
        """True iff x and y lie in the same right coset, i.e. x y^-1 is in the group."""
        return self.contains(perm_mul(self._check(x), perm_inv(self._check(y))))

    def is_subgroup_of(self, other: "PermGroup") -> bool:
        return all(other.contains(s) for s in self.strong_generators)

    def is_trivial(self) -> bool:
        return not self.base

    def stabilizer_tail(self, k: int) -> "PermGroup":
        """Elements fixing every vertex of level k (a prefix stabilizer of the chain)."""
        if k > self.n:
            raise ValueError(f"level {k} beyond the quotient depth {self.n}")
        off = level_offset(self.p, k)
        tail = [u for u in self._table[off:] if u is not None]
        return PermGroup.from_strong_generators(self.p, self.n, tail)

    def restricted(self) -> "PermGroup":
        """Image under the restriction map to level n-1."""
        return PermGroup(self.p, self.n - 1, [restrict(g, self.p) for g in self.generators])

    def elements(self, limit: int = 10**6) -> Iterable[np.ndarray]:
        if self.order() > limit:
            raise DepthCapError(f"group of order {self.order()} is too large to enumerate")
        items = [identity_perm(self.degree)]
        for u in reversed(self.strong_generators):
            pows = [perm_pow(u, k) for k in range(self.p)]
            items = [perm_mul(q, s) for q in pows for s in items]
        return items

    def random_element(self, rng) -> np.ndarray:
        x = identity_perm(self.degree)
        for u in self.strong_generators:
            x = perm_mul(x, perm_pow(u, int(rng.integers(self.p))))
        return x

    def to_record(self) -> dict:
        return {
            "version": CACHE_VERSION,
            "p": self.p,
            "n": self.n,
            "degree": self.degree,
            "base": self.base,
            "strong_generators": [s.tolist() for s in self.strong_generators],
            "generators": [g.tolist() for g in self.generators],
        }

    @classmethod
    def from_record(cls, rec: dict) -> "PermGroup":
        if rec.get("version") != CACHE_VERSION:
            raise ValueError("cache record version mismatch")
        G = cls.from_strong_generators(
            rec["p"], rec["n"],
            [np.array(s, dtype=np.int64) for s in rec["strong_generators"]],
            [np.array(g, dtype=np.int64) for g in rec["generators"]],
        )
        if G.base != rec["base"]:
            raise ValueError("cache record base does not match its strong generators")
        return G

    def __repr__(self):
        return f"PermGroup(p={self.p}, n={self.n}, order=p^{self.log_order()})"


# subgroup constructions ----------------------------------------------------

def normal_closure(G: PermGroup, S: Iterable[np.ndarray]) -> PermGroup:
    """Smallest subgroup containing S and normalized by G."""
    N = PermGroup(G.p, G.n)
    for s in S:
        if not N.contains(s):
            N.add_generator(s)
    changed = True
    while changed:
        changed = False
        for u in N.strong_generators:
            for g in G.generators:
                y = perm_mul(perm_mul(perm_inv(g), u), g)
                if not N.contains(y):
                    N.add_generator(y)
                    changed = True
    return N


def commutator_subgroup(G: PermGroup, H: PermGroup) -> PermGroup:
    """[H, G] for H normal in G: normal closure of commutators of generators."""
    gens_h = H.strong_generators
    comms = [perm_comm(h, g) for h in gens_h for g in G.generators]
    return normal_closure(G, comms)


def derived_subgroup(G: PermGroup) -> PermGroup:
    gens = G.generators
    comms = [perm_comm(gens[i], gens[j]) for i in range(len(gens)) for j in range(i + 1, len(gens))]
    return normal_closure(G, comms)


def lower_central(G: PermGroup, k: int) -> PermGroup:
    """gamma_k(G), with gamma_1 = G."""
    if k < 1:
        raise ValueError("k must be >= 1")
    term = G
    for _ in range(k - 1):
        term = commutator_subgroup(G, term)
    return term


# disk cache ----------------------------------------------------------------

def _cache_dir() -> Path | None:
    d = os.environ.get(CACHE_ENV)
    return Path(d) if d else None


def _cache_key(fam: GroupFamily, n: int, tag: str) -> str:
    raw = f"v{CACHE_VERSION}|{fam.kind}|{fam.p}|{fam.vector}|{n}|{tag}"
    return hashlib.sha256(raw.encode()).hexdigest()[:24]


def _cached(fam: GroupFamily, n: int, tag: str, build: Callable[[], PermGroup]) -> PermGroup:
    d = _cache_dir()
    if d is None:
        return build()
    path = d / f"{fam.kind.lower()}-p{fam.p}-n{n}-{tag}-{_cache_key(fam, n, tag)}.json"
    if path.exists():
        try:
            return PermGroup.from_record(json.loads(path.read_text()))
        except (ValueError, KeyError, json.JSONDecodeError):
            pass
    G = build()
    d.mkdir(parents=True, exist_ok=True)
    rec = G.to_record()
    rec["key"] = {"family": fam.kind, "p": fam.p, "alpha": list(fam.vector.values), "n": n, "tag": tag}
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        json.dump(rec, fh, separators=(",", ":"), sort_keys=True)
    os.replace(tmp, path)
    return G


# family quotients ----------------------------------------------------------

@lru_cache(maxsize=None)
def quotient_group(fam: GroupFamily, n: int) -> PermGroup:
    """Image of the family's group acting on level n."""
    if n < 1:
        raise ValueError("level must be >= 1")
    if n > depth_cap(fam.p):
        raise DepthCapError(f"level {n} exceeds the depth cap for p={fam.p}")

    def build():
        gens = [level_rep(generator(fam, g), n) for g in fam.generator_names]
        return PermGroup(fam.p, n, gens)

    return _cached(fam, n, "full", build)


@lru_cache(maxsize=None)
def family_derived(fam: GroupFamily, n: int) -> PermGroup:
    return _cached(fam, n, "derived", lambda: derived_subgroup(quotient_group(fam, n)))


@lru_cache(maxsize=None)
def family_lower_central(fam: GroupFamily, n: int, k: int) -> PermGroup:
    return _cached(fam, n, f"gamma{k}", lambda: lower_central(quotient_group(fam, n), k))


def stab_image(fam: GroupFamily, k: int, n: int) -> PermGroup:
    """Image of the level-k stabilizer in the level-n quotient (k <= n)."""
    if k > n:
        raise ValueError(f"k={k} exceeds n={n}")
    return quotient_group(fam, n).stabilizer_tail(k)


def _trivial_perm_group(p: int, n: int) -> PermGroup:
    return PermGroup(p, n)


def section_membership(fam: GroupFamily, n: int, m: int, x: np.ndarray) -> bool:
    """x is level-n trivial and each level-n section lies in the derived subgroup of the level-(m-n) quotient."""
    p = fam.p
    if n >= m:
        raise ValueError("need n < m")
    x = np.asarray(x, dtype=np.int64)
    if len(x) != p**m:
        raise DegreeError(f"expected degree {p ** m}")
    if perm_labels(x, p, m)[: level_offset(p, n)].any():
        return False
    D = family_derived(fam, m - n)
    width = p ** (m - n)
    for i in range(p**n):
        block = x[i * width:(i + 1) * width] - i * width
        if not D.contains(block):
            return False
    return True


def hn_image_membership(fam: GroupFamily, n: int, m: int, x: np.ndarray) -> bool:
    return section_membership(fam.with_kind("EGS"), n, m, x)


def tn_image_membership(fam: GroupFamily, n: int, m: int, x: np.ndarray) -> bool:
    return section_membership(fam.with_kind("GGS"), n, m, x)


def rn_image_membership(fam: GroupFamily, n: int, m: int, x: np.ndarray) -> bool:
    return section_membership(fam.with_kind("F"), n, m, x)


@lru_cache(maxsize=None)
def section_product_group(fam: GroupFamily, n: int, m: int) -> PermGroup:
    """Subgroup of level-n-trivial elements whose level-n sections lie in the derived subgroup of the level-(m-n) quotient."""
    if n >= m:
        raise ValueError("need n < m")
    D = family_derived(fam, m - n)
    from .tree import level_vertices

    gens = [place_perm(d, v, fam.p) for v in level_vertices(fam.p, n) for d in D.strong_generators]
    return PermGroup(fam.p, m, gens)


def h_image(fam: GroupFamily, n: int, m: int) -> PermGroup:
    return section_product_group(fam.with_kind("EGS"), n, m)


def t_image(fam: GroupFamily, n: int, m: int) -> PermGroup:
    return section_product_group(fam.with_kind("GGS"), n, m)


def r_image(fam: GroupFamily, n: int, m: int) -> PermGroup:
    return section_product_group(fam.with_kind("F"), n, m)


@lru_cache(maxsize=None)
def ch_subgroup(fam: GroupFamily, n: int, m: int) -> PermGroup:
    """Level-m image of the group generated by c^-1 b placed at every level-n vertex."""
    from .groups import GroupWord, word_to_aut
    from .tree import level_vertices, rist_place

    if n >= m:
        raise ValueError("need n < m")
    E = fam.with_kind("EGS")
    cb = word_to_aut(GroupWord((("c", -1), ("b", 1)), E))
    gens = [level_rep(rist_place(cb, v), m) for v in level_vertices(fam.p, n)]
    return PermGroup(fam.p, m, gens)


@dataclass(frozen=True)
class SubgroupHandle:
    """A named subgroup of a level-m quotient."""

    family: GroupFamily
    tag: str
    m: int
    param: int | None = None

    def resolve(self) -> PermGroup:
        fam, m, k = self.family, self.m, self.param
        if self.tag == "full":
            return quotient_group(fam, m)
        if self.tag == "stab":
            return stab_image(fam, k, m)
        if self.tag == "derived":
            return family_derived(fam, m)
        if self.tag == "gamma":
            return family_lower_central(fam, m, k)
        if self.tag == "H":
            return h_image(fam, k, m)
        if self.tag == "T":
            return t_image(fam, k, m)
        if self.tag == "R":
            return r_image(fam, k, m)
        if self.tag == "CH":
            return ch_subgroup(fam, k, m)
        raise ValueError(f"unknown subgroup tag {self.tag!r}")

    def contains(self, x: np.ndarray) -> bool:
        return self.resolve().contains(x)


def enumerate_closure(gens: Sequence[np.ndarray], limit: int = 10**5) -> set[tuple[int, ...]]:
    """Brute-force BFS over products of generators (test oracle, independent of the BSGS code)."""
    if not gens:
        return set()
    e = tuple(range(len(gens[0])))
    seen = {e}
    frontier = [e]
    gl = [tuple(int(v) for v in g) for g in gens]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gl:
                y = tuple(g[i] for i in x)
                if y not in seen:
                    seen.add(y)
                    if len(seen) > limit:
                        raise DepthCapError("enumeration limit exceeded")
                    nxt.append(y)
        frontier = nxt
    return seen


def measured_abelianization_index(fam: GroupFamily, n: int) -> int:
    """|Q_n : [Q_n, Q_n]| as a power of p (the exponent is returned)."""
    return quotient_group(fam, n).log_order() - family_derived(fam, n).log_order()
