"""Rooted p-ary trees, finite portraits and lazily expanded automorphisms.

Conventions
-----------
Vertices are tuples of letters in ``range(p)``; the root is ``()``.
Automorphisms act on the right: ``v^(gh) = (v^g)^h``.  Every activity is a
power of the cycle ``i -> i + 1 mod p``, so a vertex label is a single
residue.  Sections compose as ``(gh)@v = g@v * h@(v^g)``; with this rule
``a^-1 b a`` has sections ``(b, a^alpha_1, ..., a^alpha_{p-1})``.

Vertices of one level are indexed breadth-first with the first letter most
significant, i.e. ``(x1, ..., xk)`` has index ``x1 p^(k-1) + ... + xk``.
"""

from __future__ import annotations

import json
from functools import lru_cache
from itertools import product as iproduct
from typing import Iterable, Sequence

import numpy as np

DEFAULT_MAX_LEAVES = 3**12

_max_leaves = DEFAULT_MAX_LEAVES


class DepthCapError(RuntimeError):
    """Expansion requested beyond the configured depth cap."""


class AlphabetError(ValueError):
    pass


def set_max_leaves(n: int) -> None:
    """Set the leaf budget; the depth cap for degree p is the largest d with p**d <= n."""
    global _max_leaves
    _max_leaves = int(n)


def depth_cap(p: int) -> int:
    d = 0
    while p ** (d + 1) <= _max_leaves:
        d += 1
    return d


def _check_depth(p: int, n: int) -> None:
    if n < 0:
        raise ValueError(f"depth must be >= 0, got {n}")
    if n > depth_cap(p):
        raise DepthCapError(f"depth {n} exceeds the cap {depth_cap(p)} for p={p}")


def level_offset(p: int, k: int) -> int:
    """Number of vertices of depth < k."""
    return (p**k - 1) // (p - 1)


def vertex_index(v: Sequence[int], p: int) -> int:
    idx = 0
    for x in v:
        idx = idx * p + x
    return idx


def index_vertex(idx: int, k: int, p: int) -> tuple[int, ...]:
    out = []
    for _ in range(k):
        idx, r = divmod(idx, p)
        out.append(r)
    return tuple(reversed(out))


def level_vertices(p: int, k: int) -> list[tuple[int, ...]]:
    return list(iproduct(range(p), repeat=k))


def check_vertex(v: Sequence[int], p: int) -> tuple[int, ...]:
    v = tuple(v)
    for x in v:
        if not 0 <= x < p:
            raise AlphabetError(f"letter {x} outside alphabet of size {p}")
    return v


@lru_cache(maxsize=None)
def _level_structure(p: int, n: int):
    offsets = [level_offset(p, k) for k in range(n + 1)]
    return offsets


class Portrait:
    """Activity labels of all vertices of depth < ``depth``.

    ``labels`` is a flat read-only array in breadth-first order: the root,
    then level 1, and so on.  A portrait is an element of the finite group of
    level-``depth`` truncations, so it composes and inverts exactly.
    """

    __slots__ = ("p", "depth", "labels", "_images")

    def __init__(self, p: int, depth: int, labels):
        labels = np.asarray(labels, dtype=np.int64) % p
        if labels.shape != (level_offset(p, depth),):
            raise ValueError(f"expected {level_offset(p, depth)} labels, got {labels.shape}")
        labels.setflags(write=False)
        self.p = p
        self.depth = depth
        self.labels = labels
        self._images = None

    @classmethod
    def identity(cls, p: int, depth: int) -> "Portrait":
        return cls(p, depth, np.zeros(level_offset(p, depth), dtype=np.int64))

    def level(self, k: int) -> np.ndarray:
        off = _level_structure(self.p, self.depth)
        return self.labels[off[k]:off[k + 1]]

    def label(self, v: Sequence[int]) -> int:
        v = tuple(v)
        return int(self.labels[level_offset(self.p, len(v)) + vertex_index(v, self.p)])

    def level_images(self) -> list[np.ndarray]:
        """``images[k][i]`` is the index of the image of the i-th level-k vertex, k <= depth."""
        if self._images is None:
            p = self.p
            imgs = [np.zeros(1, dtype=np.int64)]
            shift = np.arange(p, dtype=np.int64)
            for k in range(self.depth):
                prev = imgs[-1]
                lab = self.level(k)
                nxt = (prev[:, None] * p + (shift[None, :] + lab[:, None]) % p).ravel()
                imgs.append(nxt)
            self._images = imgs
        return self._images

    def leaf_permutation(self) -> np.ndarray:
        """Images of the ``p**depth`` leaves as an int array."""
        return self.level_images()[self.depth]

    def _flat_images(self) -> np.ndarray:
        imgs = self.level_images()
        off = _level_structure(self.p, self.depth)
        return np.concatenate([imgs[k] + off[k] for k in range(self.depth)]) if self.depth else np.zeros(0, np.int64)

    def __mul__(self, other: "Portrait") -> "Portrait":
        self._check_compatible(other)
        if self.depth == 0:
            return self
        flat = self._flat_images()
        return Portrait(self.p, self.depth, self.labels + other.labels[flat])

    def inverse(self) -> "Portrait":
        if self.depth == 0:
            return self
        flat = self._flat_images()
        out = np.empty_like(self.labels)
        out[flat] = -self.labels
        return Portrait(self.p, self.depth, out)

    def act(self, v: Sequence[int]) -> tuple[int, ...]:
        v = tuple(v)
        if len(v) > self.depth:
            raise ValueError("vertex deeper than the portrait")
        img = self.level_images()[len(v)][vertex_index(v, self.p)]
        return index_vertex(int(img), len(v), self.p)

    def section(self, v: Sequence[int]) -> "Portrait":
        v = tuple(v)
        k = len(v)
        if k > self.depth:
            raise ValueError("vertex deeper than the portrait")
        i = vertex_index(v, self.p)
        parts = []
        for j in range(self.depth - k):
            width = self.p**j
            lvl = self.level(k + j)
            parts.append(lvl[i * width:(i + 1) * width])
        labels = np.concatenate(parts) if parts else np.zeros(0, np.int64)
        return Portrait(self.p, self.depth - k, labels)

    def truncate(self, n: int) -> "Portrait":
        if n > self.depth:
            raise ValueError("cannot extend a portrait")
        return Portrait(self.p, n, self.labels[: level_offset(self.p, n)])

    def is_trivial(self) -> bool:
        return not self.labels.any()

    def _check_compatible(self, other: "Portrait") -> None:
        if self.p != other.p or self.depth != other.depth:
            raise ValueError("portraits of different shape")

    def __eq__(self, other):
        if not isinstance(other, Portrait):
            return NotImplemented
        return self.p == other.p and self.depth == other.depth and np.array_equal(self.labels, other.labels)

    def __hash__(self):
        return hash((self.p, self.depth, self.labels.tobytes()))

    def __repr__(self):
        return f"Portrait(p={self.p}, depth={self.depth}, labels={self.labels.tolist()})"

    def to_json(self) -> str:
        return json.dumps({"p": self.p, "depth": self.depth, "labels": self.labels.tolist()}, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "Portrait":
        d = json.loads(text)
        return cls(d["p"], d["depth"], d["labels"])

    def to_dot(self, name: str = "portrait") -> str:
        """GraphViz digraph, one node per vertex of depth < ``depth``, labelled by activity."""
        lines = [f'digraph "{name}" {{', "  node [shape=circle];"]
        for k in range(self.depth):
            for v in level_vertices(self.p, k):
                vid = "r" + "".join(map(str, v))
                lines.append(f'  {vid} [label="{self.label(v)}"];')
        for k in range(1, self.depth):
            for v in level_vertices(self.p, k):
                parent = "r" + "".join(map(str, v[:-1]))
                vid = "r" + "".join(map(str, v))
                lines.append(f'  {parent} -> {vid} [label="{v[-1]}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


class Automorphism:
    """A tree automorphism with cyclic activities, expanded on demand.

    Subclasses provide ``activity`` and ``_make_child``.  Equality is only
    decidable to a finite depth; compare via :meth:`portrait`.
    """

    p: int

    def __init__(self, p: int):
        self.p = p
        self._children: dict[int, Automorphism] = {}
        self._portraits: dict[int, Portrait] = {}

    @property
    def activity(self) -> int:
        raise NotImplementedError

    def _make_child(self, i: int) -> "Automorphism":
        raise NotImplementedError

    def _make_portrait(self, n: int) -> Portrait:
        # generic assembly from the root activity and the child portraits
        kids = [self.child(i).portrait(n - 1) for i in range(self.p)]
        parts = [np.array([self.activity], dtype=np.int64)]
        for j in range(n - 1):
            parts.extend(k.level(j) for k in kids)
        return Portrait(self.p, n, np.concatenate(parts))

    def child(self, i: int) -> "Automorphism":
        c = self._children.get(i)
        if c is None:
            if not 0 <= i < self.p:
                raise AlphabetError(f"letter {i} outside alphabet of size {self.p}")
            c = self._children.setdefault(i, self._make_child(i))
        return c

    def portrait(self, n: int) -> Portrait:
        _check_depth(self.p, n)
        cached = self._portraits.get(n)
        if cached is not None:
            return cached
        if n == 0:
            port = Portrait.identity(self.p, 0)
        else:
            # reuse a deeper expansion when one exists
            deeper = [d for d in tuple(self._portraits) if d > n]
            port = self._portraits[min(deeper)].truncate(n) if deeper else self._make_portrait(n)
        return self._portraits.setdefault(n, port)

    def section(self, v: Sequence[int]) -> "Automorphism":
        g = self
        for x in check_vertex(v, self.p):
            g = g.child(x)
        return g

    def act(self, v: Sequence[int]) -> tuple[int, ...]:
        out = []
        g = self
        for x in check_vertex(v, self.p):
            out.append((x + g.activity) % self.p)
            g = g.child(x)
        return tuple(out)

    def __mul__(self, other: "Automorphism") -> "Automorphism":
        return compose(self, other)

    def inverse(self) -> "Automorphism":
        return invert(self)

    def __pow__(self, e: int) -> "Automorphism":
        return power(self, e)

    def __repr__(self):
        return f"<{type(self).__name__} p={self.p} activity={self.activity}>"


class Recursive(Automorphism):
    """Automorphism given by its root activity and p child automorphisms.

    Children may be assigned after construction (``define``) so that
    self-referential recursions such as ``b = (a^alpha_1, ..., b)`` can be tied.
    """

    def __init__(self, p: int, activity: int = 0, children: Sequence[Automorphism] | None = None, name: str | None = None):
        super().__init__(p)
        self._activity = activity % p
        self._kids: list[Automorphism] | None = None
        self.name = name
        if children is not None:
            self.define(children)

    def define(self, children: Sequence[Automorphism]) -> "Recursive":
        children = list(children)
        if len(children) != self.p:
            raise ValueError(f"need {self.p} children, got {len(children)}")
        for c in children:
            if c.p != self.p:
                raise AlphabetError("children over a different alphabet")
        self._kids = children
        return self

    @property
    def activity(self) -> int:
        return self._activity

    def _make_child(self, i: int) -> Automorphism:
        if self._kids is None:
            raise RuntimeError("recursion used before its children were defined")
        return self._kids[i]

    def __repr__(self):
        if self.name:
            return f"<{self.name} p={self.p}>"
        return super().__repr__()


class _Product(Automorphism):
    def __init__(self, factors: list[Automorphism]):
        super().__init__(factors[0].p)
        self.factors = factors
        self._act = sum(f.activity for f in factors) % self.p

    @property
    def activity(self) -> int:
        return self._act

    def _make_child(self, i: int) -> Automorphism:
        secs = []
        cur = i
        for f in self.factors:
            secs.append(f.child(cur))
            cur = (cur + f.activity) % self.p
        return compose(*secs)

    def _make_portrait(self, n: int) -> Portrait:
        port = self.factors[0].portrait(n)
        for f in self.factors[1:]:
            port = port * f.portrait(n)
        return port


class _Inverse(Automorphism):
    def __init__(self, g: Automorphism):
        super().__init__(g.p)
        self.base = g

    @property
    def activity(self) -> int:
        return (-self.base.activity) % self.p

    def _make_child(self, i: int) -> Automorphism:
        return invert(self.base.child((i - self.base.activity) % self.p))

    def _make_portrait(self, n: int) -> Portrait:
        return self.base.portrait(n).inverse()


@lru_cache(maxsize=None)
def identity(p: int) -> Recursive:
    e = Recursive(p, 0, name="1")
    e.define([e] * p)
    return e


def is_identity_node(g: Automorphism) -> bool:
    return g is identity(g.p)


def compose(*gs: Automorphism) -> Automorphism:
    """Product ``g1 g2 ... gk`` (apply g1 first)."""
    if not gs:
        raise ValueError("compose needs at least one factor")
    p = gs[0].p
    flat: list[Automorphism] = []
    for g in gs:
        if g.p != p:
            raise AlphabetError("automorphisms over different alphabets")
        if isinstance(g, _Product):
            flat.extend(g.factors)
        elif not is_identity_node(g):
            flat.append(g)
    if not flat:
        return identity(p)
    if len(flat) == 1:
        return flat[0]
    return _Product(flat)


def invert(g: Automorphism) -> Automorphism:
    if is_identity_node(g):
        return g
    if isinstance(g, _Inverse):
        return g.base
    if isinstance(g, _Product):
        return compose(*[invert(f) for f in reversed(g.factors)])
    return _Inverse(g)


def power(g: Automorphism, e: int) -> Automorphism:
    if e == 0:
        return identity(g.p)
    if e < 0:
        return power(invert(g), -e)
    return compose(*([g] * e))


def conjugate(g: Automorphism, h: Automorphism) -> Automorphism:
    """``g^h = h^-1 g h``."""
    return compose(invert(h), g, h)


def section_at(g: Automorphism, v: Sequence[int]) -> Automorphism:
    return g.section(v)


def act_on_vertex(g: Automorphism, v: Sequence[int]) -> tuple[int, ...]:
    return g.act(v)


def portrait(g: Automorphism, n: int) -> Portrait:
    return g.portrait(n)


def is_level_trivial(g: Automorphism, n: int) -> bool:
    """True iff g fixes every vertex of level n."""
    return g.portrait(n).is_trivial()


def portrait_equal(g: Automorphism, h: Automorphism, n: int) -> bool:
    return g.portrait(n) == h.portrait(n)


def rist_place(g: Automorphism, v: Sequence[int]) -> Automorphism:
    """The automorphism acting as g on the subtree at v and trivially elsewhere."""
    v = check_vertex(v, g.p)
    e = identity(g.p)
    node = g
    for x in reversed(v):
        kids = [e] * g.p
        kids[x] = node
        node = Recursive(g.p, 0, kids)
    return node


def from_portrait(port: Portrait) -> Automorphism:
    """Finitary automorphism agreeing with ``port`` and trivial below its depth."""
    p = port.p
    if port.is_trivial():
        return identity(p)
    kids = [from_portrait(port.section((i,))) for i in range(p)]
    return Recursive(p, int(port.labels[0]), kids)


def cyclic(p: int, e: int) -> Automorphism:
    """``a^e``: rooted automorphism with activity e and trivial sections."""
    e %= p
    if e == 0:
        return identity(p)
    return _rooted(p, e)


@lru_cache(maxsize=None)
def _rooted(p: int, e: int) -> Recursive:
    return Recursive(p, e, [identity(p)] * p, name=f"a^{e}")


def leaves(p: int, n: int) -> Iterable[tuple[int, ...]]:
    return iproduct(range(p), repeat=n)
