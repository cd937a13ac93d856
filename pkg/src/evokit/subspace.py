"""Linear subspaces stored as canonical reduced row-echelon bases."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import DimensionMismatchError, EvolutionAlgebra, Vector, _check_same
from .scalars import RATIONAL, Field


def _rref_exact(rows: list[list], ncols: int) -> tuple[tuple, ...]:
    m = [list(r) for r in rows if any(x != 0 for x in r)]
    piv_r = 0
    for c in range(ncols):
        if piv_r == len(m):
            break
        for i in range(piv_r, len(m)):
            if m[i][c] != 0:
                break
        else:
            continue
        m[piv_r], m[i] = m[i], m[piv_r]
        prow = m[piv_r]
        inv = 1 / prow[c]
        if prow[c] != 1:
            prow = [x * inv for x in prow]
            m[piv_r] = prow
        for r in range(len(m)):
            if r != piv_r:
                fr = m[r][c]
                if fr != 0:
                    row = m[r]
                    m[r] = [a - fr * b for a, b in zip(row, prow)]
        piv_r += 1
    return tuple(tuple(r) for r in m[:piv_r])


def _rref_float(rows: list[list], ncols: int, eps: float) -> tuple[tuple, ...]:
    # scaled partial pivoting; entries below eps * row scale are flushed to zero
    m = []
    scale = []
    for r in rows:
        s = max((abs(x) for x in r), default=0.0)
        if s > 0:
            m.append([complex(x) for x in r])
            scale.append(s)
    piv_r = 0
    for c in range(ncols):
        if piv_r == len(m):
            break
        best, best_val = -1, 0.0
        for i in range(piv_r, len(m)):
            v = abs(m[i][c]) / scale[i]
            if v > best_val:
                best, best_val = i, v
        if best < 0 or best_val <= eps:
            for i in range(piv_r, len(m)):
                m[i][c] = 0j
            continue
        m[piv_r], m[best] = m[best], m[piv_r]
        scale[piv_r], scale[best] = scale[best], scale[piv_r]
        prow = m[piv_r]
        p = prow[c]
        prow = [x / p for x in prow]
        prow[c] = 1 + 0j
        m[piv_r] = prow
        for r in range(len(m)):
            if r != piv_r:
                fr = m[r][c]
                if fr != 0:
                    row = [a - fr * b for a, b in zip(m[r], prow)]
                    row[c] = 0j
                    lim = eps * scale[r]
                    m[r] = [0j if abs(x) <= lim else x for x in row]
        piv_r += 1
    out = []
    for r in m[:piv_r]:
        out.append(tuple(0j if abs(x) <= eps else x for x in r))
    return tuple(out)


def rref(rows: Iterable[Sequence], ncols: int, field: Field = RATIONAL) -> tuple[tuple, ...]:
    rows = [list(r) for r in rows]
    for r in rows:
        if len(r) != ncols:
            raise DimensionMismatchError(f"row of length {len(r)}, expected {ncols}")
    if field.exact:
        return _rref_exact(rows, ncols)
    return _rref_float(rows, ncols, field.eps)


@dataclass(frozen=True, eq=False)
class Subspace:
    ambient_dim: int
    basis: tuple
    field: Field = RATIONAL

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def pivots(self) -> tuple[int, ...]:
        f = self.field
        return tuple(next(c for c, x in enumerate(row) if not f.is_zero(x)) for row in self.basis)

    def vectors(self) -> list[Vector]:
        return [Vector(row, self.field) for row in self.basis]

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return equals(self, other)

    def __hash__(self):
        if self.field.exact:
            return hash((self.ambient_dim, self.basis))
        return hash((self.ambient_dim, self.dim))

    def __add__(self, other):
        return subspace_sum(self, other)

    def __repr__(self):
        rows = ", ".join("(" + ", ".join(str(self.field.format(x)) for x in r) + ")" for r in self.basis)
        return f"Subspace(dim={self.dim}/{self.ambient_dim}, <{rows}>)"


def _check_pair(U: Subspace, V: Subspace) -> None:
    _check_same(U.field, V.field)
    if U.ambient_dim != V.ambient_dim:
        raise DimensionMismatchError(f"ambient dims {U.ambient_dim} and {V.ambient_dim}")


def zero_space(n: int, field: Field = RATIONAL) -> Subspace:
    return Subspace(n, (), field)


def full_space(n: int, field: Field = RATIONAL) -> Subspace:
    one, zero = field.one, field.zero
    return Subspace(n, tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)), field)


def span(vectors: Iterable, ambient_dim: int, field: Field | None = None) -> Subspace:
    """Span of vectors (``Vector`` objects or raw coordinate sequences)."""
    rows = []
    for v in vectors:
        if isinstance(v, Vector):
            if field is None:
                field = v.field
            _check_same(field, v.field)
            rows.append(v.coords)
        else:
            rows.append(tuple(v) if field is None else tuple(field.coerce(x) for x in v))
    if field is None:
        field = RATIONAL
        rows = [tuple(field.coerce(x) for x in r) for r in rows]
    return Subspace(ambient_dim, rref(rows, ambient_dim, field), field)


def subspace_sum(U: Subspace, V: Subspace) -> Subspace:
    _check_pair(U, V)
    if not V.basis:
        return U
    if not U.basis:
        return V
    return Subspace(U.ambient_dim, rref(U.basis + V.basis, U.ambient_dim, U.field), U.field)


def sum_all(spaces: Iterable[Subspace], ambient_dim: int, field: Field) -> Subspace:
    rows: list = []
    for S in spaces:
        _check_same(field, S.field)
        rows.extend(S.basis)
    return Subspace(ambient_dim, rref(rows, ambient_dim, field), field)


def product(alg: EvolutionAlgebra, U: Subspace, V: Subspace) -> Subspace:
    """Span of all products u v with u in U, v in V.

    Since u v = (u * v) A with * the coordinatewise product, this is the image
    under A of the span of pairwise coordinatewise products of basis rows.
    """
    _check_pair(U, V)
    _check_same(alg.field, U.field)
    n = alg.dim
    if U.ambient_dim != n:
        raise DimensionMismatchError(f"subspace in dim {U.ambient_dim}, algebra of dim {n}")
    if not U.basis or not V.basis:
        return zero_space(n, alg.field)
    f = alg.field
    hadamard = rref(
        [tuple(a * b for a, b in zip(u, v)) for u in U.basis for v in V.basis], n, f
    )
    A = alg.matrix
    images = []
    for h in hadamard:
        out = [f.zero] * n
        for i, hi in enumerate(h):
            if hi != 0:
                for k, a in enumerate(A[i]):
                    if a != 0:
                        out[k] += hi * a
        images.append(out)
    return Subspace(n, rref(images, n, f), f)


def reduce_vector(U: Subspace, v: Sequence) -> list:
    """Remainder of v after elimination against the echelon basis of U."""
    f = U.field
    v = list(v)
    for row, p in zip(U.basis, U.pivots()):
        c = v[p]
        if not f.is_zero(c):
            v = [a - c * b for a, b in zip(v, row)]
    return v


def equals(U: Subspace, V: Subspace) -> bool:
    _check_pair(U, V)
    if U.dim != V.dim:
        return False
    if U.field.exact:
        return U.basis == V.basis
    eq = U.field.eq
    return all(eq(a, b) for r, s in zip(U.basis, V.basis) for a, b in zip(r, s))


def contains(U: Subspace, V: Subspace) -> bool:
    """True iff V is a subspace of U."""
    _check_pair(U, V)
    if V.dim > U.dim:
        return False
    f = U.field
    for row in V.basis:
        scale = max((abs(x) for x in row), default=1.0)
        if not all(f.is_zero(x, scale) for x in reduce_vector(U, row)):
            return False
    return True


def contains_vector(U: Subspace, v: Vector | Sequence) -> bool:
    coords = v.coords if isinstance(v, Vector) else tuple(v)
    return contains(U, span([coords], U.ambient_dim, U.field))


def dim(U: Subspace) -> int:
    return U.dim


def rank(rows: Sequence[Sequence], field: Field = RATIONAL) -> int:
    rows = list(rows)
    if not rows:
        return 0
    return len(rref(rows, len(rows[0]), field))


def inverse(matrix: Sequence[Sequence], field: Field = RATIONAL) -> tuple[tuple, ...] | None:
    """Inverse of a square matrix by Gauss-Jordan on [M | I]; None if singular."""
    n = len(matrix)
    one, zero = field.one, field.zero
    aug = [list(matrix[i]) + [one if i == j else zero for j in range(n)] for i in range(n)]
    red = rref(aug, 2 * n, field)
    if len(red) < n:
        return None
    for i, row in enumerate(red):
        if not field.eq(row[i], one) or not all(field.is_zero(row[j]) for j in range(n) if j != i):
            return None
    return tuple(tuple(row[n:]) for row in red)


def mat_mul(X: Sequence[Sequence], Y: Sequence[Sequence], field: Field = RATIONAL) -> tuple[tuple, ...]:
    cols = len(Y[0])
    out = []
    for row in X:
        acc = [field.zero] * cols
        for x, yrow in zip(row, Y):
            if x != 0:
                for j, y in enumerate(yrow):
                    acc[j] += x * y
        out.append(tuple(acc))
    return tuple(out)
