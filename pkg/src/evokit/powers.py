"""Power chains (principal, right, derived) and nilpotency decisions."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Literal

from .core import EvolutionAlgebra
from .subspace import Subspace, contains, full_space, product, sum_all

ChainKind = Literal["principal", "right", "derived"]


class NotNilpotentPresentationError(ValueError):
    pass


class ChainInvariantError(AssertionError):
    """An internal consistency check on computed chains failed."""


@dataclass(frozen=True)
class PowerChainReport:
    """A computed chain. ``subspaces[k - 1]`` holds the exponent-k term."""

    chain_kind: ChainKind
    subspaces: tuple[Subspace, ...]
    stabilized_at: int | None
    index: int | None
    tolerance_dependent: bool = False

    def __post_init__(self):
        if (self.index is None) == (self.stabilized_at is None):
            raise ChainInvariantError("exactly one of index / stabilized_at must be set")
        if self.index is not None:
            if not self.at(self.index).is_zero() or (
                self.index > 1 and self.at(self.index - 1).is_zero()
            ):
                raise ChainInvariantError("index does not mark the first zero term")
        elif self.limit.is_zero():
            raise ChainInvariantError("stabilized chain must have a nonzero limit")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(S.dim for S in self.subspaces)

    @property
    def last_exponent(self) -> int:
        return len(self.subspaces)

    @property
    def limit(self) -> Subspace:
        return self.subspaces[-1]

    def at(self, k: int) -> Subspace:
        """Term of exponent k; exponents past the computed range use the limit."""
        if k < 1:
            raise ValueError("exponents start at 1")
        if k <= len(self.subspaces):
            return self.subspaces[k - 1]
        return self.subspaces[-1]


def principal_powers(alg: EvolutionAlgebra) -> PowerChainReport:
    """E^1 = E, E^k = sum_{i <= k/2} E^i E^{k-i}.

    Equal terms are shared, so every distinct product E^i E^j is computed once.
    The chain is non-increasing; once a value has held on exponents p..2p-1
    (p >= 1, at least two terms) it holds for every later exponent, which is
    the stopping rule. The exponent loop is capped at 2^n + 1.
    """
    n = alg.dim
    f = alg.field
    E = full_space(n, f)
    chain: list[Subspace] = [E]
    run_of: list[int] = [0]  # run id of each exponent (0-based list)
    run_value: list[Subspace] = [E]
    run_start: list[int] = [1]
    cache: dict[tuple[int, int], Subspace] = {}
    cap = 2**n + 1
    k = 2
    while True:
        if k > cap:
            raise ChainInvariantError(f"principal chain did not settle by exponent {cap}")
        pairs = set()
        for i in range(1, k // 2 + 1):
            a, b = run_of[i - 1], run_of[k - i - 1]
            pairs.add((min(a, b), max(a, b)))
        terms = []
        for a, b in pairs:
            P = cache.get((a, b))
            if P is None:
                P = product(alg, run_value[a], run_value[b])
                cache[(a, b)] = P
            terms.append(P)
        S = sum_all(terms, n, f)
        prev_run = run_of[-1]
        prev = run_value[prev_run]
        if S == prev:
            chain.append(prev)
            run_of.append(prev_run)
            p = run_start[prev_run]
            if k >= 2 * p - 1 and k > p:
                return PowerChainReport("principal", tuple(chain), p, None, not f.exact)
        else:
            if not contains(prev, S):
                raise ChainInvariantError(f"E^{k} is not contained in E^{k - 1}")
            chain.append(S)
            run_value.append(S)
            run_start.append(k)
            run_of.append(len(run_value) - 1)
            if S.is_zero():
                return PowerChainReport("principal", tuple(chain), None, k, not f.exact)
        k += 1


def _iterated(alg: EvolutionAlgebra, kind: ChainKind) -> PowerChainReport:
    n = alg.dim
    f = alg.field
    E = full_space(n, f)
    chain = [E]
    # each step loses a dimension or repeats, so n + 2 terms always suffice
    for k in range(2, n + 3):
        cur = chain[-1]
        nxt = product(alg, cur, E) if kind == "right" else product(alg, cur, cur)
        if nxt == cur:
            return PowerChainReport(kind, tuple(chain), k - 1, None, not f.exact)
        chain.append(nxt)
        if nxt.is_zero():
            return PowerChainReport(kind, tuple(chain), None, k, not f.exact)
    raise ChainInvariantError(f"{kind} chain failed to settle")


def right_powers(alg: EvolutionAlgebra) -> PowerChainReport:
    """E^<1> = E, E^<k+1> = E^<k> E."""
    return _iterated(alg, "right")


def derived_powers(alg: EvolutionAlgebra) -> PowerChainReport:
    """E^[1] = E, E^[k+1] = E^[k] E^[k]."""
    return _iterated(alg, "derived")


def inclusion_violations(
    principal: PowerChainReport, right: PowerChainReport | None = None, derived: PowerChainReport | None = None
) -> list[str]:
    """Check E^<k> in E^k and E^[k+1] in E^(2^k) over all computed exponents."""
    bad = []
    if right is not None:
        top = max(right.last_exponent, 2)
        for k in range(1, top + 1):
            if not contains(principal.at(k), right.at(k)):
                bad.append(f"E^<{k}> not in E^{k}")
    if derived is not None:
        for k in range(1, derived.last_exponent + 1):
            if not contains(principal.at(2**k), derived.at(k + 1)):
                bad.append(f"E^[{k + 1}] not in E^{2**k}")
    return bad


def assert_inclusions(principal, right=None, derived=None) -> None:
    bad = inclusion_violations(principal, right, derived)
    if bad:
        raise ChainInvariantError("; ".join(bad))


def _dim_at(dims: tuple[int, ...], k: int) -> int:
    return dims[k - 1] if k <= len(dims) else dims[-1]


def plateau_violations_dims(dims: tuple[int, ...]) -> list[tuple[int, int]]:
    """Pairs (k, i) with dim E^(2^k + i) != dim E^(2^(k+1)), 1 <= i <= 2^k,
    over the computed range. The principal chain is nested, so equal
    dimensions mean equal terms."""
    out = []
    top = len(dims)
    k = 0
    while 2 ** (k + 1) <= top:
        target = _dim_at(dims, 2 ** (k + 1))
        for i in range(1, 2**k + 1):
            if _dim_at(dims, 2**k + i) != target:
                out.append((k, i))
        k += 1
    return out


def stabilization_violations_dims(dims: tuple[int, ...]) -> list[tuple[int, int]]:
    """Pairs (s, k): E^(2^s+1) = E^(2^(s+1)+1) holds but E^k != E^(2^s+1) for
    some computed k >= 2^s + 1."""
    out = []
    top = len(dims)
    s = 0
    while 2 ** (s + 1) + 1 <= top:
        base = _dim_at(dims, 2**s + 1)
        if base == _dim_at(dims, 2 ** (s + 1) + 1):
            out.extend((s, k) for k in range(2**s + 1, top + 1) if dims[k - 1] != base)
        s += 1
    return out


def plateau_violations(report: PowerChainReport) -> list[tuple[int, int]]:
    """Pairs (k, i) with E^(2^k + i) != E^(2^(k+1)), 1 <= i <= 2^k, in the computed range."""
    if report.chain_kind != "principal":
        raise ValueError("plateau law concerns the principal chain")
    return plateau_violations_dims(report.dims)


def stabilization_violations(report: PowerChainReport) -> list[tuple[int, int]]:
    if report.chain_kind != "principal":
        raise ValueError("stabilization law concerns the principal chain")
    return stabilization_violations_dims(report.dims)


@dataclass(frozen=True)
class NilpotencyVerdict:
    """Nil decision from the support digraph (0-based basis indices)."""

    is_nil: bool
    witness_cycle: tuple[int, ...] | None = None
    triangularizing_permutation: tuple[int, ...] | None = None
    tolerance_dependent: bool = False


def support_graph(alg: EvolutionAlgebra) -> list[list[int]]:
    """Successor lists: i -> j iff a_ij is nonzero (self-loops included)."""
    f = alg.field
    return [[j for j, a in enumerate(row) if not f.is_zero(a)] for row in alg.matrix]


def nil_check(alg: EvolutionAlgebra) -> NilpotencyVerdict:
    """Nil iff the support digraph is acyclic.

    A product a_{i1 i2} ... a_{ik i1} of nonzero field entries is nonzero, so
    nil-ness is exactly the absence of directed cycles. Returns the
    lexicographically smallest topological order when acyclic, otherwise one
    directed cycle.
    """
    n = alg.dim
    succ = support_graph(alg)
    indeg = [0] * n
    for i in range(n):
        for j in succ[i]:
            indeg[j] += 1
    heap = [i for i in range(n) if indeg[i] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        i = heapq.heappop(heap)
        order.append(i)
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(heap, j)
    tol = not alg.field.exact
    if len(order) == n:
        return NilpotencyVerdict(True, None, tuple(order), tol)
    # every leftover node has a predecessor among the leftovers; walk back until repeat
    left = set(range(n)) - set(order)
    pred = {j: i for i in left for j in succ[i] if j in left}
    node = min(left)
    seen: dict[int, int] = {}
    path = []
    while node not in seen:
        seen[node] = len(path)
        path.append(node)
        node = pred[node]
    cycle = path[seen[node]:]
    cycle.reverse()
    # rotate so the smallest index comes first
    s = cycle.index(min(cycle))
    cycle = cycle[s:] + cycle[:s]
    return NilpotencyVerdict(False, tuple(cycle), None, tol)


def cycle_product(alg: EvolutionAlgebra, cycle) -> object:
    m = alg.matrix
    p = alg.field.one
    for a, b in zip(cycle, cycle[1:] + type(cycle)(cycle[:1])):
        p = p * m[a][b]
    return p


def triangularize(alg: EvolutionAlgebra) -> tuple[EvolutionAlgebra, tuple[int, ...]]:
    """Reorder the basis so the matrix is strictly upper triangular."""
    if alg.is_strictly_upper():
        return alg, tuple(range(alg.dim))
    v = nil_check(alg)
    if not v.is_nil:
        raise NotNilpotentPresentationError("not a nilpotent algebra presentation")
    out = alg.permuted(v.triangularizing_permutation)
    if not out.is_strictly_upper():
        raise NotNilpotentPresentationError("not a nilpotent algebra presentation")
    return out, v.triangularizing_permutation


def is_nilpotent(alg: EvolutionAlgebra) -> bool:
    return principal_powers(alg).index is not None


def nilpotent_index(alg: EvolutionAlgebra) -> int | None:
    return principal_powers(alg).index


def right_nilpotency_index(alg: EvolutionAlgebra) -> int | None:
    return right_powers(alg).index


def solvability_index(alg: EvolutionAlgebra) -> int | None:
    return derived_powers(alg).index


def max_nilpotent_index(n: int) -> int:
    return 2 ** (n - 1) + 1


def superdiagonal_product(alg: EvolutionAlgebra):
    m = alg.matrix
    p = alg.field.one
    for i in range(alg.dim - 1):
        p = p * m[i][i + 1]
    return p


def max_index_criterion(alg: EvolutionAlgebra) -> bool:
    """a_12 a_23 ... a_{n-1,n} != 0 in a strictly upper triangular presentation."""
    tri, _ = triangularize(alg)
    return not alg.field.is_zero(superdiagonal_product(tri))
