"""Evolution algebras in a natural basis and element-level multiplication."""
from __future__ import annotations

from dataclasses import dataclass
from dataclasses import field as dc_field
from typing import Iterable, Sequence

from .scalars import RATIONAL, BackendMismatchError, Field


class DimensionMismatchError(ValueError):
    pass


def _check_same(f1: Field, f2: Field) -> None:
    if not f1.same_backend(f2):
        raise BackendMismatchError(f"backend mismatch: {f1.name} vs {f2.name}")


@dataclass(frozen=True)
class Vector:
    coords: tuple
    field: Field = RATIONAL

    def __post_init__(self):
        for c in self.coords:
            self.field.check(c)

    @classmethod
    def of(cls, values: Iterable, field: Field = RATIONAL) -> Vector:
        return cls(tuple(field.coerce(v) for v in values), field)

    @classmethod
    def unit(cls, n: int, i: int, field: Field = RATIONAL) -> Vector:
        """Basis vector e_i, 0-based."""
        return cls(tuple(field.one if k == i else field.zero for k in range(n)), field)

    @classmethod
    def zeros(cls, n: int, field: Field = RATIONAL) -> Vector:
        return cls((field.zero,) * n, field)

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def _other(self, other: Vector) -> None:
        if not isinstance(other, Vector):
            raise TypeError("expected Vector")
        _check_same(self.field, other.field)
        if len(other) != len(self):
            raise DimensionMismatchError(f"vector lengths {len(self)} and {len(other)}")

    def __add__(self, other):
        self._other(other)
        return Vector(tuple(a + b for a, b in zip(self.coords, other.coords)), self.field)

    def __sub__(self, other):
        self._other(other)
        return Vector(tuple(a - b for a, b in zip(self.coords, other.coords)), self.field)

    def __neg__(self):
        return Vector(tuple(-a for a in self.coords), self.field)

    def scale(self, c) -> Vector:
        c = self.field.coerce(c)
        return Vector(tuple(c * a for a in self.coords), self.field)

    def __rmul__(self, c):
        return self.scale(c)

    def is_zero(self) -> bool:
        return all(self.field.is_zero(a) for a in self.coords)

    def approx_eq(self, other: Vector) -> bool:
        self._other(other)
        return all(self.field.eq(a, b) for a, b in zip(self.coords, other.coords))


@dataclass(frozen=True)
class EvolutionAlgebra:
    """Algebra with natural basis e_1..e_n where e_i e_i = sum_k a_ik e_k."""

    matrix: tuple
    field: Field = RATIONAL
    label: str | None = dc_field(default=None, compare=False)

    def __post_init__(self):
        n = len(self.matrix)
        if n < 1:
            raise ValueError("an evolution algebra needs dim >= 1")
        for row in self.matrix:
            if len(row) != n:
                raise DimensionMismatchError("structural-constants matrix must be square")
            for a in row:
                self.field.check(a)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], field: Field = RATIONAL, label: str | None = None):
        matrix = tuple(tuple(field.coerce(a) for a in row) for row in rows)
        return cls(matrix, field, label)

    @classmethod
    def zero(cls, n: int, field: Field = RATIONAL) -> EvolutionAlgebra:
        return cls(tuple((field.zero,) * n for _ in range(n)), field)

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def row(self, i: int) -> tuple:
        return self.matrix[i]

    def basis_product(self, i: int, j: int) -> tuple:
        """Coordinates of e_i e_j (0-based indices)."""
        if i != j:
            return (self.field.zero,) * self.dim
        return self.matrix[i]

    def permuted(self, perm: Sequence[int]) -> EvolutionAlgebra:
        """Algebra in the reordered basis f_k = e_{perm[k]}."""
        if sorted(perm) != list(range(self.dim)):
            raise ValueError(f"not a permutation of 0..{self.dim - 1}: {perm}")
        m = self.matrix
        return EvolutionAlgebra(
            tuple(tuple(m[p][q] for q in perm) for p in perm), self.field, self.label
        )

    def converted(self, target: Field) -> EvolutionAlgebra:
        """Explicit backend conversion (the only sanctioned way to change fields)."""
        return EvolutionAlgebra(
            tuple(tuple(target.coerce(a) for a in row) for row in self.matrix), target, self.label
        )

    def is_strictly_upper(self) -> bool:
        f = self.field
        return all(
            f.is_zero(self.matrix[i][j]) for i in range(self.dim) for j in range(i + 1)
        )

    def is_real(self) -> bool:
        return all(self.field.is_real(a) for row in self.matrix for a in row)

    def magnitude(self) -> float:
        return max((abs(a) for row in self.matrix for a in row), default=0.0)


def _check_operands(alg: EvolutionAlgebra, *vectors: Vector) -> None:
    for v in vectors:
        _check_same(alg.field, v.field)
        if len(v) != alg.dim:
            raise DimensionMismatchError(f"vector of length {len(v)} in algebra of dim {alg.dim}")


def multiply(alg: EvolutionAlgebra, x: Vector, y: Vector) -> Vector:
    """x y = sum_i x_i y_i (e_i e_i)."""
    _check_operands(alg, x, y)
    f = alg.field
    out = [f.zero] * alg.dim
    for i, (xi, yi) in enumerate(zip(x.coords, y.coords)):
        c = xi * yi
        if c == 0:
            continue
        for k, a in enumerate(alg.matrix[i]):
            if a != 0:
                out[k] += c * a
    return Vector(tuple(out), f)


def plus_power(alg: EvolutionAlgebra, x: Vector, m: int) -> Vector:
    """Left-normed power ((x x) x) ... x with m factors."""
    if m < 1:
        raise ValueError("power must be >= 1")
    _check_operands(alg, x)
    p = x
    for _ in range(m - 1):
        p = multiply(alg, p, x)
    return p
