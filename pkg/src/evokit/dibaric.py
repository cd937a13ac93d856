"""Dibaricity: bq-homomorphisms, exact obstructions, the 2-dimensional
criterion and a numeric homomorphism search.

An algebra is dibaric when it maps onto the sex differentiation algebra
<m, w> (m^2 = w^2 = 0, mw = (m + w)/2). Writing such a map as
phi(x) = f(x) m + g(x) w, the pair of linear forms (f, g) must satisfy

    f(xy) = g(xy) = (f(x) g(y) + f(y) g(x)) / 2,

and phi is onto exactly when f and g are linearly independent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Literal, Sequence

import numpy as np

from . import kernels
from .core import DimensionMismatchError, EvolutionAlgebra, Vector, plus_power
from .powers import derived_powers, nil_check
from .scalars import RATIONAL, default_eps
from .subspace import rank

Decision = Literal["dibaric", "not_dibaric", "undecided"]


class NotRealError(ValueError):
    """Dibaricity is a question about real algebras."""


class NotBqHomomorphismError(ValueError):
    pass


class SexDiffAlgebra:
    """The 2-dimensional algebra with basis (m, w): m^2 = w^2 = 0, mw = (m + w)/2."""

    basis = ("m", "w")
    table = {
        ("m", "m"): (Fraction(0), Fraction(0)),
        ("w", "w"): (Fraction(0), Fraction(0)),
        ("m", "w"): (Fraction(1, 2), Fraction(1, 2)),
        ("w", "m"): (Fraction(1, 2), Fraction(1, 2)),
    }

    @classmethod
    def multiply(cls, x: Sequence, y: Sequence) -> tuple:
        """Product of x = x0 m + x1 w and y = y0 m + y1 w, in (m, w) coordinates."""
        c = (x[0] * y[1] + x[1] * y[0]) / 2
        return (c, c)

    @classmethod
    def check_table(cls) -> bool:
        for (p, q), val in cls.table.items():
            x = (1, 0) if p == "m" else (0, 1)
            y = (1, 0) if q == "m" else (0, 1)
            if tuple(Fraction(v) for v in cls.multiply(x, y)) != val:
                return False
        return True

    @classmethod
    def is_bq(cls, f: Sequence, g: Sequence) -> bool:
        """Checks the bq equations for forms on (m, w) against the table itself."""
        units = {"m": (1, 0), "w": (0, 1)}
        for (p, q), xy in cls.table.items():
            x, y = units[p], units[q]
            fx, fy = f[0] * x[0] + f[1] * x[1], f[0] * y[0] + f[1] * y[1]
            gx, gy = g[0] * x[0] + g[1] * x[1], g[0] * y[0] + g[1] * y[1]
            rhs = Fraction(fx * gy + fy * gx) / 2
            if f[0] * xy[0] + f[1] * xy[1] != rhs or g[0] * xy[0] + g[1] * xy[1] != rhs:
                return False
        return True

    @classmethod
    def as_evolution_algebra(cls) -> EvolutionAlgebra:
        """Natural basis u = m + w, v = m - w: u^2 = u, v^2 = -u, uv = 0."""
        return EvolutionAlgebra.from_rows([[1, 0], [-1, 0]], RATIONAL, label="sex differentiation")


@dataclass(frozen=True)
class BqPair:
    """Linear forms f, g by their values on the natural basis."""

    f: tuple
    g: tuple

    def __post_init__(self):
        if len(self.f) != len(self.g):
            raise DimensionMismatchError("f and g have different lengths")

    @property
    def dim(self) -> int:
        return len(self.f)

    @property
    def exact(self) -> bool:
        return all(isinstance(x, Rational) for x in self.f + self.g)

    def is_nonzero(self) -> bool:
        return any(x != 0 for x in self.f) and any(x != 0 for x in self.g)

    def is_independent(self, eps: float | None = None, scale: float = 1.0) -> bool:
        """f and g linearly independent, i.e. the induced map is onto.

        For float pairs both forms must have norm above sqrt(eps) * scale and
        the squared sine of their angle must exceed sqrt(eps); ``scale`` is
        the magnitude of the structure constants (bq pairs scale with them).
        """
        if self.exact:
            return rank([self.f, self.g], RATIONAL) == 2
        f = np.array(self.f, dtype=float)
        g = np.array(self.g, dtype=float)
        eps = default_eps() if eps is None else eps
        floor = math.sqrt(eps) * max(scale, 1e-300)
        nf, ng = np.linalg.norm(f), np.linalg.norm(g)
        if nf <= floor or ng <= floor:
            return False
        cos = abs(f @ g) / (nf * ng)
        return 1 - cos * cos > math.sqrt(eps)

    def value(self, x: Sequence) -> tuple:
        """(f(x), g(x))."""
        return sum(a * b for a, b in zip(self.f, x)), sum(a * b for a, b in zip(self.g, x))


@dataclass(frozen=True)
class DibaricityVerdict:
    decision: Decision
    rule: str
    witness: BqPair | None = None
    tolerance_dependent: bool = False
    rules_fired: tuple[str, ...] = ()

    @property
    def is_dibaric(self) -> bool:
        return self.decision == "dibaric"


# ---------------------------------------------------------------- residuals

def _gauss_real(alg: EvolutionAlgebra):
    # exact real entries of a gaussian_rational algebra, as Fractions
    return [[a.re if hasattr(a, "re") else Fraction(a) for a in row] for row in alg.matrix]


def bq_residuals(alg: EvolutionAlgebra, pair: BqPair) -> list:
    """All residuals of the bq equations on basis pairs.

    For each i: f(e_i^2) - f_i g_i and g(e_i^2) - f_i g_i; for i < j:
    (f_i g_j + f_j g_i)/2 (since e_i e_j = 0). Exact when both inputs are.
    """
    n = alg.dim
    if pair.dim != n:
        raise DimensionMismatchError(f"pair of length {pair.dim} for algebra of dim {n}")
    exact = alg.field.exact and pair.exact
    if exact:
        A = _gauss_real(alg) if alg.field.name == "gaussian_rational" else alg.matrix
        f = [Fraction(x) for x in pair.f]
        g = [Fraction(x) for x in pair.g]
    else:
        A = [[complex(a).real for a in row] for row in alg.matrix]
        f = [float(x) for x in pair.f]
        g = [float(x) for x in pair.g]
    out = []
    for i in range(n):
        fi = sum(A[i][k] * f[k] for k in range(n))
        gi = sum(A[i][k] * g[k] for k in range(n))
        out.append(fi - f[i] * g[i])
        out.append(gi - f[i] * g[i])
    for i in range(n):
        for j in range(i + 1, n):
            out.append((f[i] * g[j] + f[j] * g[i]) / 2)
    return out


def is_bq_homomorphism(alg: EvolutionAlgebra, pair: BqPair, eps: float | None = None) -> bool:
    """Checks the bq equations on all basis pairs (enough by bilinearity).

    Exact inputs are compared exactly; otherwise the residual max-norm must be
    below eps.
    """
    if not alg.is_real():
        raise NotRealError("dibaricity is defined for real algebras; input has non-real entries")
    res = bq_residuals(alg, pair)
    if alg.field.exact and pair.exact:
        return all(r == 0 for r in res)
    eps = default_eps() if eps is None else eps
    return max((abs(r) for r in res), default=0.0) < eps


def relative_residual(alg: EvolutionAlgebra, pair: BqPair) -> float:
    """Residual max-norm divided by sigma^2, sigma = the largest |f_i|, |g_i|.

    Rescaling (A, f, g) -> (t A, t f, t g) multiplies every residual by t^2,
    so this is the scale-free size of the residual. It separates true roots
    from the near-roots that accumulate at the trivial pair f = g = 0, whose
    absolute residuals are small only because the pair itself is small.
    """
    sigma = max((abs(float(x)) for x in pair.f + pair.g), default=0.0)
    if sigma == 0:
        return math.inf
    res = max((abs(float(r)) for r in bq_residuals(alg, pair)), default=0.0)
    return res / sigma**2


# ---------------------------------------------------------------- 2D criterion

def _sqrt_exact(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    p, q = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if p * p == x.numerator and q * q == x.denominator:
        return Fraction(p, q)
    return None


def _sqrt(x):
    if isinstance(x, Fraction):
        r = _sqrt_exact(x)
        if r is not None:
            return r
    return math.sqrt(float(x))


def _as_real(x):
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, complex):
        if x.imag != 0:
            raise NotRealError("dibaricity is defined for real algebras")
        x = x.real
    if isinstance(x, str):
        return RATIONAL.parse(x)
    return float(x)


def witness_2d(a, b, c, d) -> BqPair | None:
    """Closed-form bq pair for a dibaric 2-dimensional algebra, else None.

    e_1^2 = a e_1 + b e_2, e_2^2 = c e_1 + d e_2. Witnesses:
      b = d = 0, ac < 0:      f = (a, r), g = (a, -r),  r = sqrt(-ac);
      b != 0, ad = bc, bd < 0: f = (a + s, (p - a(a + s))/b),
                               g = (a - s, (p - a(a - s))/b),  s = sqrt(-bd), p = a^2 + bd.
    """
    a, b, c, d = (_as_real(x) for x in (a, b, c, d))
    if b == 0:
        if d == 0 and a * c < 0:
            r = _sqrt(-a * c)
            return BqPair((a, r), (a, -r))
        return None
    if a * d == b * c and b * d < 0 and a * a + b * d != 0:
        s = _sqrt(-b * d)
        p = a * a + b * d
        al, be = a + s, a - s
        return BqPair((al, (p - a * al) / b), (be, (p - a * be) / b))
    return None


def dbc_conditions_2d(a, b, c, d) -> bool:
    """The textbook closed form: (1) b = d = 0 and ac < 0, or (2) b != 0, ad = bc,
    D >= 0 and B^2 + C^2 != 0, with D = (8a - 1)^2 - 32(bd + a^2),
    B, C = 4a^2 + 4bd - a +/- a sqrt(D).

    Kept for comparison only: condition (2) disagrees with the bq system
    (see ``dibaric_2d``); e.g. (0, 1, 0, 1/32) satisfies it but admits no
    real bq pair.
    """
    a, b, c, d = (_as_real(x) for x in (a, b, c, d))
    if b == 0 and d == 0 and a * c < 0:
        return True
    if b != 0 and a * d == b * c:
        D = (8 * a - 1) ** 2 - 32 * (b * d + a * a)
        if D < 0:
            return False
        r = _sqrt(D)
        B = 4 * a * a + 4 * b * d - a + a * r
        C = 4 * a * a + 4 * b * d - a - a * r
        return B * B + C * C != 0
    return False


def dibaric_2d(a, b, c, d, eps: float | None = None) -> DibaricityVerdict:
    """Decide dibaricity of e_1^2 = a e_1 + b e_2, e_2^2 = c e_1 + d e_2 over the reals.

    Dibaric iff
      b = 0:  d = 0 and ac < 0;
      b != 0: ad = bc, bd < 0 and a^2 + bd != 0.
    Derivation: with f = (alpha, gamma), g = (beta, delta) the bq system is
    a alpha + b gamma = alpha beta = a beta + b delta, c alpha + d gamma =
    gamma delta = c beta + d delta, alpha delta + beta gamma = 0, and
    onto-ness needs alpha delta != beta gamma. When b != 0 and ad != bc the
    matrix is invertible and no pair exists; otherwise eliminating gamma,
    delta leaves alpha + beta = 2a, alpha beta = a^2 + bd != 0 with
    alpha != beta, which has real roots iff bd < 0.

    A dibaric verdict carries the closed-form witness. Float inputs mark the
    verdict tolerance-dependent when a deciding quantity is within eps of 0.
    """
    vals = [_as_real(x) for x in (a, b, c, d)]
    if all(isinstance(x, Fraction) for x in vals):
        w = witness_2d(*vals)
        tol_dep = False
    else:
        eps = default_eps() if eps is None else eps
        a, b, c, d = (float(x) for x in vals)
        z = eps * max(1.0, abs(a), abs(b), abs(c), abs(d)) ** 2
        w = _witness_float(a, b, c, d, z)
        crit = (b, d, a * c, a * d - b * c, b * d, a * a + b * d)
        tol_dep = any(0 < abs(q) <= 10 * z for q in crit)
    if w is None:
        return DibaricityVerdict("not_dibaric", "2d_criterion", None, tol_dep, ("2d_criterion",))
    return DibaricityVerdict("dibaric", "2d_criterion", w, tol_dep, ("2d_criterion",))


def _witness_float(a, b, c, d, z):
    # float version of witness_2d; quantities within z of zero count as zero
    if abs(b) <= z ** 0.5:
        if abs(d) <= z ** 0.5 and a * c < -z:
            r = math.sqrt(-a * c)
            return BqPair((a, r), (a, -r))
        return None
    if abs(a * d - b * c) <= z and b * d < -z and abs(a * a + b * d) > z:
        s = math.sqrt(-b * d)
        p = a * a + b * d
        al, be = a + s, a - s
        return BqPair((al, (p - a * al) / b), (be, (p - a * be) / b))
    return None


# ---------------------------------------------------------------- obstructions

def not_dibaric_obstructions(alg: EvolutionAlgebra) -> DibaricityVerdict:
    """Exact sufficient conditions for non-dibaricity.

    det(A) != 0, nilpotency (acyclic support graph) and solvability (derived
    chain reaches 0) each rule dibaricity out. All firing rules are recorded in
    ``rules_fired``; ``rule`` is the first in that order.
    """
    if not alg.is_real():
        raise NotRealError("dibaricity is defined for real algebras; input has non-real entries")
    fired = []
    if rank(alg.matrix, alg.field) == alg.dim:
        fired.append("det_obstruction")
    if nil_check(alg).is_nil:
        fired.append("nilpotent_obstruction")
    if derived_powers(alg).index is not None:
        fired.append("solvable_obstruction")
    tol = not alg.field.exact
    if fired:
        return DibaricityVerdict("not_dibaric", fired[0], None, tol, tuple(fired))
    return DibaricityVerdict("undecided", "none", None, tol, ())


# ---------------------------------------------------------------- numeric search

def _starts(n: int, attempts: int, seed: int, scale: float) -> np.ndarray:
    # one generator per start: the batch is identical however it is split
    return np.stack(
        [np.random.default_rng([seed, k]).normal(0.0, scale, 2 * n) for k in range(attempts)]
    )


def _snap(alg: EvolutionAlgebra, f, g) -> BqPair | None:
    """Try to read a float witness as an exact rational one."""
    if not alg.field.exact:
        return None
    for den in (10**3, 10**6):
        pair = BqPair(
            tuple(Fraction(float(x)).limit_denominator(den) for x in f),
            tuple(Fraction(float(x)).limit_denominator(den) for x in g),
        )
        if is_bq_homomorphism(alg, pair) and pair.is_independent():
            return pair
    return None


def numeric_bq_search(
    alg: EvolutionAlgebra,
    attempts: int = 200,
    eps: float | None = None,
    seed: int = 0,
    mu: float = 1e-2,
    iters: int = 80,
    workers: int = 1,
) -> BqPair | None:
    """Multi-start Levenberg-Marquardt search for an onto bq pair.

    Each start first minimizes the bq residuals plus a small barrier that
    keeps f and g nonzero and non-parallel, then polishes without the
    barrier. Among polished pairs with residual max-norm below eps, independent
    forms and scale-free residual (``relative_residual``) below eps, the one
    with the smallest residual is returned, re-verified from scratch (and as an exact pair when a small-denominator rational reading
    of it verifies exactly). None is evidence of absence, not proof.
    """
    if not alg.is_real():
        raise NotRealError("dibaricity is defined for real algebras; input has non-real entries")
    eps = default_eps() if eps is None else eps
    n = alg.dim
    A = np.array([[complex(a).real for a in row] for row in alg.matrix], dtype=float)
    scale = max(1.0, float(np.abs(A).max()))
    Z0 = _starts(n, attempts, seed, scale)
    if workers > 1 and attempts > 1:
        from concurrent.futures import ProcessPoolExecutor

        chunks = np.array_split(Z0, workers)
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_solve_chunk, [A] * len(chunks), chunks, [mu] * len(chunks), [iters] * len(chunks)))
        Z = np.concatenate([p[0] for p in parts])
        res = np.concatenate([p[1] for p in parts])
    else:
        Z, res = _solve_chunk(A, Z0, mu, iters)
    for k in np.argsort(res, kind="stable"):
        if not res[k] < eps:
            break
        f, g = tuple(float(x) for x in Z[k, :n]), tuple(float(x) for x in Z[k, n:])
        pair = BqPair(f, g)
        if not pair.is_independent(eps, scale):
            continue
        exact = _snap(alg, f, g)
        if exact is not None:
            return exact
        if is_bq_homomorphism(alg, pair, eps) and relative_residual(alg, pair) < eps:
            return pair
    return None


def _solve_chunk(A, Z0, mu, iters):
    Z, _ = kernels.lm_bq_batch(A, Z0, mu, iters)
    return kernels.lm_bq_batch(A, Z, 0.0, iters)


# ---------------------------------------------------------------- V_n

def phi_power_closed_form(u, v, n: int):
    """f(x^n) = g(x^n) for x with f(x) = u, g(x) = v and n >= 2:
    u v ((u + v)/2)^(n-2)."""
    return u * v * ((u + v) / 2) ** (n - 2)


def vn_membership(
    alg: EvolutionAlgebra,
    x: Vector | Sequence,
    pair: BqPair,
    n: int,
    debug: bool = False,
    eps: float | None = None,
) -> bool:
    """Whether phi(x^n) = 0 (left-normed power), which for n >= 3 is
    f(x) g(x) (f(x) + g(x)) = 0 and so does not depend on n.

    ``debug`` also evaluates phi on ``plus_power(x, n)`` directly and checks
    it against the closed form.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    eps = default_eps() if eps is None else eps
    if not is_bq_homomorphism(alg, pair, eps):
        raise NotBqHomomorphismError("pair is not a bq-homomorphism of this algebra")
    coords = x.coords if isinstance(x, Vector) else tuple(alg.field.coerce(c) for c in x)
    if len(coords) != alg.dim:
        raise DimensionMismatchError("vector length does not match the algebra")
    exact = alg.field.exact and pair.exact
    if exact:
        xs = [Fraction(c.re) if hasattr(c, "re") else Fraction(c) for c in coords]
    else:
        xs = [complex(c).real for c in coords]
    u, v = pair.value(xs)
    w = u * v * (u + v)
    if exact:
        member = w == 0
    else:
        member = abs(w) <= eps * max(1.0, abs(u), abs(v)) ** 3
    if debug:
        vec = x if isinstance(x, Vector) else Vector(coords, alg.field)
        p = plus_power(alg, vec, n)
        pc = [Fraction(c.re) if hasattr(c, "re") else c for c in p.coords] if exact else [complex(c).real for c in p.coords]
        fu, gu = pair.value(pc)
        want = phi_power_closed_form(u, v, n)
        if exact:
            ok = fu == want and gu == want
        else:
            tol = 1e3 * eps * max(1.0, abs(u), abs(v)) ** n
            ok = abs(fu - want) <= tol and abs(gu - want) <= tol
        if not ok:
            raise AssertionError(f"phi(x^{n}) = ({fu}, {gu}) disagrees with closed form {want}")
    return member


# ---------------------------------------------------------------- decision

def decide_dibaricity(
    alg: EvolutionAlgebra,
    attempts: int = 200,
    eps: float | None = None,
    seed: int = 0,
    workers: int = 1,
) -> DibaricityVerdict:
    """Exact obstructions, then the 2D criterion (n = 2), then numeric search.

    A failed search is reported as undecided, never as not dibaric.
    """
    obs = not_dibaric_obstructions(alg)
    if obs.decision == "not_dibaric":
        return obs
    if alg.dim == 2:
        (a, b), (c, d) = [[_scalar_real(x) for x in row] for row in alg.matrix]
        v = dibaric_2d(a, b, c, d, eps)
        return DibaricityVerdict(v.decision, v.rule, v.witness, v.tolerance_dependent or obs.tolerance_dependent, v.rules_fired)
    w = numeric_bq_search(alg, attempts=attempts, eps=eps, seed=seed, workers=workers)
    if w is not None:
        return DibaricityVerdict("dibaric", "numeric_search", w, not w.exact, ("numeric_search",))
    return DibaricityVerdict("undecided", "numeric_search", None, True, ())


def _scalar_real(x):
    if hasattr(x, "re"):
        return x.re
    if isinstance(x, complex):
        return x.real
    return x
