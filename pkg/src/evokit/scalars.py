"""Scalar backends: exact rationals, exact Gaussian rationals, complex floats.

Elements are plain Python objects (``Fraction``, :class:`GaussianRational`,
``complex``); a :class:`Field` instance carries the backend identity and the
operations that differ between backends (zero tests, parsing, formatting).
Containers (vectors, algebras, subspaces) record their field and refuse to
combine values from different ones.
"""
from __future__ import annotations

import cmath
import math
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

DEFAULT_EPS = 1e-9


class BackendMismatchError(TypeError):
    """Raised when values from two scalar backends meet."""


class ScalarParseError(ValueError):
    def __init__(self, literal, reason):
        super().__init__(f"invalid scalar literal {literal!r}: {reason}")
        self.literal = literal
        self.reason = reason


def default_eps() -> float:
    raw = os.environ.get("EVOKIT_EPS")
    if not raw:
        return DEFAULT_EPS
    try:
        eps = float(raw)
    except ValueError:
        raise ValueError(f"EVOKIT_EPS must be a float, got {raw!r}") from None
    if not eps > 0:
        raise ValueError("EVOKIT_EPS must be positive")
    return eps


class GaussianRational:
    """Exact element of Q(i), stored as two ``Fraction`` parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            re, im = re.re, re.im + im
        if not isinstance(re, (int, Rational)) or not isinstance(im, (int, Rational)):
            raise BackendMismatchError("GaussianRational parts must be rational")
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @staticmethod
    def _lift(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Rational)):
            return GaussianRational(other)
        if isinstance(other, (float, complex)):
            raise BackendMismatchError("cannot mix GaussianRational with floating values")
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("GaussianRational division by zero")
        q = self * o.conjugate()
        return GaussianRational(q.re / n, q.im / n)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return GaussianRational(1) / (self ** (-k))
        result, base = GaussianRational(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __eq__(self, other):
        if isinstance(other, (float, complex)):
            return False
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return math.sqrt(float(self.norm()))

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __repr__(self):
        return f"GaussianRational({self.re!s}, {self.im!s})"

    def __str__(self):
        return GAUSSIAN.format(self)


_RAT_RE = re.compile(r"^[+-]?\d+(/\d+)?$")
_GAUSS_RE = re.compile(
    r"^(?P<re>[+-]?\d+(?:/\d+)?)?"
    r"(?:(?P<sign>[+-])(?P<im>\d+(?:/\d+)?)?i)?$"
)


def _parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not _RAT_RE.match(text):
        raise ScalarParseError(text, "expected [sign]digits[/digits]")
    if "/" in text:
        num, den = text.split("/")
        if int(den) == 0:
            raise ScalarParseError(text, "zero denominator")
        return Fraction(int(num), int(den))
    return Fraction(int(text))


def _format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Field:
    """Backend descriptor; subclasses implement the per-backend behaviour."""

    name = "abstract"
    exact = True

    @property
    def zero(self):
        raise NotImplementedError

    @property
    def one(self):
        raise NotImplementedError

    def coerce(self, value):
        raise NotImplementedError

    def check(self, value) -> None:
        raise NotImplementedError

    def is_zero(self, x, scale: float = 1.0) -> bool:
        return x == 0

    def eq(self, x, y) -> bool:
        return x == y

    def is_real(self, x) -> bool:
        raise NotImplementedError

    def to_complex(self, x) -> complex:
        return complex(x)

    def roots(self, x, k: int) -> list:
        """All k-th roots of ``x`` that lie in this field."""
        raise NotImplementedError

    def parse(self, literal):
        raise NotImplementedError

    def format(self, x):
        raise NotImplementedError

    def same_backend(self, other: Field) -> bool:
        return self.name == other.name


def _int_root(n: int, k: int) -> int | None:
    if n < 0:
        if k % 2 == 0:
            return None
        r = _int_root(-n, k)
        return None if r is None else -r
    r = round(n ** (1.0 / k)) if n else 0
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**k == n:
            return cand
    # large values: fall back to integer Newton iteration
    lo, hi = 0, 1 << (n.bit_length() // k + 1)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**k < n:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo**k == n else None


@dataclass(frozen=True)
class RationalField(Field):
    name = "rational"
    exact = True

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def coerce(self, value):
        if isinstance(value, bool):
            raise BackendMismatchError("bool is not a scalar")
        if isinstance(value, (int, Rational)):
            return Fraction(value)
        if isinstance(value, str):
            return _parse_rational(value)
        raise BackendMismatchError(f"rational backend cannot take {type(value).__name__}")

    def check(self, value):
        if type(value) is not Fraction:
            raise BackendMismatchError(f"expected Fraction, got {type(value).__name__}")

    def is_real(self, x):
        return True

    def roots(self, x, k):
        if x == 0:
            return [Fraction(0)]
        num = _int_root(x.numerator, k)
        den = _int_root(x.denominator, k)
        if num is None or den is None:
            return []
        r = Fraction(num, den)
        if k % 2 == 0:
            return [r, -r]
        return [r]

    def parse(self, literal):
        if isinstance(literal, bool):
            raise ScalarParseError(literal, "boolean is not a rational")
        if isinstance(literal, int):
            return Fraction(literal)
        if isinstance(literal, str):
            return _parse_rational(literal)
        raise ScalarParseError(literal, "rational literals are integers or 'p/q' strings")

    def format(self, x):
        return _format_rational(x)


@dataclass(frozen=True)
class GaussianRationalField(Field):
    name = "gaussian_rational"
    exact = True

    @property
    def zero(self):
        return GaussianRational(0)

    @property
    def one(self):
        return GaussianRational(1)

    def coerce(self, value):
        if isinstance(value, bool):
            raise BackendMismatchError("bool is not a scalar")
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Rational)):
            return GaussianRational(value)
        if isinstance(value, str):
            return self.parse(value)
        raise BackendMismatchError(f"gaussian backend cannot take {type(value).__name__}")

    def check(self, value):
        if type(value) is not GaussianRational:
            raise BackendMismatchError(f"expected GaussianRational, got {type(value).__name__}")

    def is_real(self, x):
        return x.im == 0

    def roots(self, x, k):
        if x == 0:
            return [GaussianRational(0)]
        # candidate roots from floating point, confirmed exactly
        z = complex(x)
        r = abs(z) ** (1.0 / k)
        theta = cmath.phase(z) / k
        found = []
        for m in range(k):
            w = cmath.rect(r, theta + 2 * math.pi * m / k)
            cand = GaussianRational(
                Fraction(w.real).limit_denominator(10**6),
                Fraction(w.imag).limit_denominator(10**6),
            )
            if cand**k == x and cand not in found:
                found.append(cand)
        return found

    def parse(self, literal):
        if isinstance(literal, bool):
            raise ScalarParseError(literal, "boolean is not a scalar")
        if isinstance(literal, int):
            return GaussianRational(literal)
        if not isinstance(literal, str):
            raise ScalarParseError(literal, "gaussian literals are '<rat>' or '<rat>+<rat>i'")
        text = literal.replace(" ", "")
        m = _GAUSS_RE.match(text)
        if not text or not m or (m.group("re") is None and m.group("sign") is None):
            raise ScalarParseError(literal, "expected <rat>, <rat>+<rat>i or <rat>-<rat>i")
        re_part = _parse_rational(m.group("re")) if m.group("re") else Fraction(0)
        im_part = Fraction(0)
        if m.group("sign"):
            im_part = _parse_rational(m.group("im")) if m.group("im") else Fraction(1)
            if m.group("sign") == "-":
                im_part = -im_part
        return GaussianRational(re_part, im_part)

    def format(self, x):
        if x.im == 0:
            return _format_rational(x.re)
        sign = "-" if x.im < 0 else "+"
        return f"{_format_rational(x.re)}{sign}{_format_rational(abs(x.im))}i"


@dataclass(frozen=True)
class ComplexFloatField(Field):
    """Complex doubles compared with a relative tolerance."""

    eps: float = DEFAULT_EPS
    name = "complex_float"
    exact = False

    @property
    def zero(self):
        return 0j

    @property
    def one(self):
        return 1 + 0j

    def coerce(self, value):
        if isinstance(value, bool):
            raise BackendMismatchError("bool is not a scalar")
        if isinstance(value, GaussianRational):
            return complex(value)
        if isinstance(value, (int, float, complex, Rational)):
            return complex(value)
        if isinstance(value, (list, tuple)) and len(value) == 2:
            return self.parse(value)
        raise BackendMismatchError(f"float backend cannot take {type(value).__name__}")

    def check(self, value):
        if type(value) is not complex:
            raise BackendMismatchError(f"expected complex, got {type(value).__name__}")

    def is_zero(self, x, scale=1.0):
        return abs(x) <= self.eps * max(1.0, scale)

    def eq(self, x, y):
        return abs(x - y) <= self.eps * max(1.0, abs(x), abs(y))

    def is_real(self, x):
        return abs(x.imag) <= self.eps * max(1.0, abs(x.real))

    def roots(self, x, k):
        if x == 0:
            return [0j]
        r = abs(x) ** (1.0 / k)
        theta = cmath.phase(x) / k
        return [cmath.rect(r, theta + 2 * math.pi * m / k) for m in range(k)]

    def parse(self, literal):
        if (
            isinstance(literal, (list, tuple))
            and len(literal) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in literal)
        ):
            return complex(float(literal[0]), float(literal[1]))
        raise ScalarParseError(literal, "complex_float literals are [re, im] decimal pairs")

    def format(self, x):
        return [float(f"{x.real:.17g}"), float(f"{x.imag:.17g}")]


RATIONAL = RationalField()
GAUSSIAN = GaussianRationalField()


def complex_float(eps: float | None = None) -> ComplexFloatField:
    return ComplexFloatField(default_eps() if eps is None else eps)


def field_by_name(name: str, eps: float | None = None) -> Field:
    if name == "rational":
        return RATIONAL
    if name == "gaussian_rational":
        return GAUSSIAN
    if name == "complex_float":
        return complex_float(eps)
    raise ValueError(f"unknown field {name!r}")


def principal_root(field: Field, x, k: int):
    """The in-field k-th root closest to the principal complex branch, or None."""
    cands = field.roots(x, k)
    if not cands:
        return None
    target = complex(x) ** (1.0 / k) if x != 0 else 0j
    return min(cands, key=lambda c: abs(complex(c) - target))
