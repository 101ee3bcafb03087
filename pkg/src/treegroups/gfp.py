"""Arithmetic and linear algebra over the prime field GF(p).

Values are small (p stays below a hundred in every intended use), so
everything is stored densely as Python ints and row reduction is plain
Gauss-Jordan elimination.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

MAX_PRIME = 97


class ParameterError(ValueError):
    """Raised for invalid field, vector or matrix parameters."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def check_modulus(p: int, max_prime: int = MAX_PRIME) -> int:
    if not isinstance(p, int) or isinstance(p, bool):
        raise ParameterError(f"modulus must be an int, got {p!r}")
    if p < 3 or not is_prime(p):
        raise ParameterError(f"modulus must be an odd prime, got {p}")
    if p > max_prime:
        raise ParameterError(f"modulus {p} exceeds the configured cap {max_prime}")
    return p


@dataclass(frozen=True)
class FpScalar:
    value: int
    p: int

    def __post_init__(self):
        check_modulus(self.p)
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other) -> int:
        if isinstance(other, FpScalar):
            if other.p != self.p:
                raise ParameterError("mixed moduli")
            return other.value
        return int(other)

    def __add__(self, other):
        return FpScalar(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return FpScalar(self.value - self._coerce(other), self.p)

    def __rsub__(self, other):
        return FpScalar(self._coerce(other) - self.value, self.p)

    def __mul__(self, other):
        return FpScalar(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FpScalar(-self.value, self.p)

    def inverse(self) -> "FpScalar":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse in GF(p)")
        return FpScalar(pow(self.value, -1, self.p), self.p)

    def __int__(self):
        return self.value

    def __eq__(self, other):
        if isinstance(other, FpScalar):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __repr__(self):
        return f"{self.value} (mod {self.p})"


class FpVector(tuple):
    """Immutable vector over GF(p); behaves like a tuple of reduced ints."""

    p: int

    def __new__(cls, entries: Iterable[int], p: int):
        check_modulus(p)
        vals = [int(e) % p for e in entries]
        if not vals:
            raise ParameterError("vector must have length >= 1")
        obj = super().__new__(cls, vals)
        obj.p = p
        return obj

    def scalar(self, i: int) -> FpScalar:
        return FpScalar(self[i], self.p)

    def __add__(self, other):
        if len(other) != len(self):
            raise ParameterError("length mismatch")
        return FpVector((x + y for x, y in zip(self, other)), self.p)

    def scale(self, k: int) -> "FpVector":
        return FpVector((k * x for x in self), self.p)

    def is_zero(self) -> bool:
        return not any(self)

    def __repr__(self):
        return f"FpVector({list(self)}, p={self.p})"


def coordinate_sum(v: FpVector) -> FpScalar:
    return FpScalar(sum(v), v.p)


@dataclass(frozen=True)
class CirculantMatrix:
    """p x p matrix whose i-th row is the i-step cyclic right shift of row 0."""

    first_row: FpVector

    @property
    def order(self) -> int:
        return len(self.first_row)

    @property
    def p(self) -> int:
        return self.first_row.p

    def rows(self) -> list[list[int]]:
        r = list(self.first_row)
        n = len(r)
        return [[r[(j - i) % n] for j in range(n)] for i in range(n)]

    def entry(self, i: int, j: int) -> int:
        return self.first_row[(j - i) % self.order]

    def apply(self, v: Sequence[int]) -> FpVector:
        if len(v) != self.order:
            raise ParameterError("length mismatch")
        return FpVector((sum(a * b for a, b in zip(row, v)) for row in self.rows()), self.p)

    def rank(self) -> int:
        return len(rref(self.rows(), self.p)[1])


def circulant_from_alpha(alpha) -> CirculantMatrix:
    """The matrix relating ``b``-exponents of sections to their ``a``-exponents.

    ``alpha`` is anything with ``p`` and ``values`` (an
    :class:`~treegroups.groups.AccompanyingVector`) or a pair ``(p, values)``.
    Entry ``(i, j)`` is ``alpha_{(i - j) mod p}`` with ``alpha_0 = 0``, so the
    first row reads ``(0, alpha_{p-1}, ..., alpha_1)``.
    """
    if isinstance(alpha, tuple) and len(alpha) == 2 and isinstance(alpha[0], int):
        p, values = alpha
    else:
        p, values = alpha.p, alpha.values
    check_modulus(p)
    values = [int(x) % p for x in values]
    if len(values) != p - 1:
        raise ParameterError(f"accompanying vector must have length {p - 1}, got {len(values)}")
    full = [0] + values
    return CirculantMatrix(FpVector((full[-j % p] for j in range(p)), p))


def rref(rows: Sequence[Sequence[int]], p: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form over GF(p); returns (matrix, pivot columns)."""
    m = [[int(x) % p for x in row] for row in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [(x * inv) % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def nullspace(rows: Sequence[Sequence[int]], p: int) -> list[FpVector]:
    """Basis of {v : M v = 0}, one vector per free column, in echelon order."""
    m, pivots = rref(rows, p)
    ncols = len(rows[0])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for r, c in enumerate(pivots):
            v[c] = (-m[r][f]) % p
        basis.append(FpVector(v, p))
    return basis


def kernel_basis(m: CirculantMatrix) -> list[FpVector]:
    return nullspace(m.rows(), m.p)


def is_independent(vectors: Sequence[Sequence[int]], p: int) -> bool:
    if not vectors:
        return True
    return len(rref(vectors, p)[1]) == len(vectors)
