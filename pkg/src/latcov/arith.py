"""Exact scalar arithmetic: rationals, real quadratic fields, and intervals.

Three backends cover every number the library needs:

* **Rational** — ``gmpy2.mpq``, used directly.  Always lowest terms with a
  positive denominator (``mpq`` guarantees both).
* **Quadratic** — :class:`Quad`, an element ``a + b*sqrt(d)`` of a real
  quadratic field Q(sqrt(d)) with ``a, b`` rational and ``d`` a fixed positive
  square-free integer.  Arithmetic is closed for a fixed ``d``; mixing two
  different ``d`` values is a :class:`TypeError`, never a coercion.  Ordering
  is decided exactly by a sign analysis of ``a^2 - b^2 d`` (no floating
  point).
* **Interval** — :class:`Interval`, a closed interval with rational
  endpoints.  Arithmetic produces enclosing intervals; endpoints are rounded
  *outward* to dyadics once their denominators outgrow the working precision,
  so enclosures stay cheap without ever shrinking.  A comparison whose truth
  value the interval cannot decide raises :class:`UndecidedComparison` —
  callers either widen precision (see :func:`interval_precision`) or report
  the query as undecided.  Nothing is ever resolved silently.

Values of every backend are immutable and all operations are pure, so scalars
may be shared freely across threads.

Scalar literals use the grammar ``"p/q"`` | ``"p/q+r/s*sqrt(d)"`` |
``"[lo,hi]"`` (see :func:`parse_scalar` / :func:`format_scalar`).
"""

from __future__ import annotations

import re
from contextlib import contextmanager
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Union

from gmpy2 import isqrt, mpq, mpz

__all__ = [
    "Field",
    "Interval",
    "Quad",
    "RATIONAL",
    "INTERVAL",
    "Scalar",
    "UndecidedComparison",
    "Vec3",
    "compare",
    "current_precision",
    "format_scalar",
    "infer_field",
    "interval_precision",
    "parse_scalar",
    "quadratic_field",
    "rational",
    "sign",
    "sqrt_enclosure",
    "to_float",
    "to_interval",
]


class UndecidedComparison(ArithmeticError):
    """An interval comparison whose answer the current enclosures cannot decide.

    Raised instead of guessing.  Pipelines catch this, rebuild their interval
    inputs at higher precision (:func:`interval_precision`), and retry; when
    the retry budget is exhausted the overall verdict is "undecided".
    """


_RationalLike = Union[int, mpz, mpq]


def _as_mpq(value: _RationalLike) -> mpq:
    if isinstance(value, (int, type(mpz(0)))):
        return mpq(value)
    if isinstance(value, type(mpq(0))):
        return value
    raise TypeError(f"not a rational value: {value!r}")


def _is_rational(value: object) -> bool:
    return isinstance(value, (int, type(mpz(0)), type(mpq(0))))


def is_square_free(d: int) -> bool:
    """True when no prime square divides ``d`` (d >= 1)."""
    if d < 1:
        return False
    n = int(d)
    if n % 4 == 0:
        return False
    p = 3
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 2
    return True


# --------------------------------------------------------------------------
# quadratic field elements
# --------------------------------------------------------------------------


class Quad:
    """``a + b*sqrt(d)`` with rational ``a, b`` and square-free integer d >= 2.

    Comparisons are exact: the sign of ``a + b*sqrt(d)`` is decided by the
    signs of ``a`` and ``b`` and, when they differ, by comparing ``a^2`` with
    ``b^2 d``.  Elements with ``b = 0`` compare (and hash) equal to the
    rational ``a``.
    """

    __slots__ = ("a", "b", "d")

    a: mpq
    b: mpq
    d: int

    def __init__(self, a: _RationalLike, b: _RationalLike, d: int) -> None:
        object.__setattr__(self, "a", _as_mpq(a))
        object.__setattr__(self, "b", _as_mpq(b))
        object.__setattr__(self, "d", int(d))

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Quad is immutable")

    # -- helpers ----------------------------------------------------------

    def _coerce(self, other: object) -> Optional["Quad"]:
        if isinstance(other, Quad):
            if other.d != self.d:
                raise TypeError(
                    f"cannot mix sqrt({self.d}) and sqrt({other.d}) values"
                )
            return other
        if _is_rational(other):
            return Quad(_as_mpq(other), 0, self.d)
        return None

    def _sign(self) -> int:
        sa = _mpq_sign(self.a)
        if self.b == 0:
            return sa
        sb = _mpq_sign(self.b)
        if sa == 0:
            return sb
        if sa == sb:
            return sa
        # a and b have opposite signs: compare a^2 with b^2 d.
        lhs = self.a * self.a
        rhs = self.b * self.b * self.d
        if lhs == rhs:
            return 0
        return sa if lhs > rhs else sb

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: object) -> "Quad":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Quad(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __sub__(self, other: object) -> "Quad":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Quad(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other: object) -> "Quad":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Quad(o.a - self.a, o.b - self.b, self.d)

    def __mul__(self, other: object) -> "Quad":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Quad(
            self.a * o.a + self.b * o.b * self.d,
            self.a * o.b + self.b * o.a,
            self.d,
        )

    __rmul__ = __mul__

    def _inverse(self) -> "Quad":
        norm = self.a * self.a - self.b * self.b * self.d
        if norm == 0:
            raise ZeroDivisionError("division by zero quadratic element")
        return Quad(self.a / norm, -self.b / norm, self.d)

    def __truediv__(self, other: object) -> "Quad":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o._inverse()

    def __rtruediv__(self, other: object) -> "Quad":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self._inverse()

    def __neg__(self) -> "Quad":
        return Quad(-self.a, -self.b, self.d)

    def __pos__(self) -> "Quad":
        return self

    def __abs__(self) -> "Quad":
        return -self if self._sign() < 0 else self

    # -- comparisons -------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __ne__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a != o.a or self.b != o.b

    def __lt__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o)._sign() < 0

    def __le__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o)._sign() <= 0

    def __gt__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o)._sign() > 0

    def __ge__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o)._sign() >= 0

    def __bool__(self) -> bool:
        return self.a != 0 or self.b != 0

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __repr__(self) -> str:
        return f"Quad({self.a!s}, {self.b!s}, {self.d})"


def _mpq_sign(q: mpq) -> int:
    if q > 0:
        return 1
    if q < 0:
        return -1
    return 0


# --------------------------------------------------------------------------
# intervals
# --------------------------------------------------------------------------

_DEFAULT_PRECISION = 128

_precision_bits = _DEFAULT_PRECISION


def current_precision() -> int:
    """Working precision (bits) for outward rounding and radical enclosures."""
    return _precision_bits


@contextmanager
def interval_precision(bits: int) -> Iterator[None]:
    """Temporarily run interval arithmetic at ``bits`` of working precision."""
    global _precision_bits
    if bits < 8:
        raise ValueError("precision must be at least 8 bits")
    saved = _precision_bits
    _precision_bits = bits
    try:
        yield
    finally:
        _precision_bits = saved


def _round_down(q: mpq, bits: int) -> mpq:
    # Largest multiple of 2^-bits that is <= q.
    return mpq((q.numerator << bits) // q.denominator, mpz(1) << bits)


def _round_up(q: mpq, bits: int) -> mpq:
    return mpq(-((-q.numerator << bits) // q.denominator), mpz(1) << bits)


def _outward(lo: mpq, hi: mpq) -> tuple:
    bits = _precision_bits
    if lo.denominator.bit_length() > bits:
        lo = _round_down(lo, bits)
    if hi.denominator.bit_length() > bits:
        hi = _round_up(hi, bits)
    return lo, hi


class Interval:
    """A closed interval ``[lo, hi]`` with exact rational endpoints.

    Every arithmetic result encloses all pointwise results; endpoints whose
    denominators exceed the working precision are rounded outward to dyadics.
    Comparisons are three-valued: decided ``True``/``False`` when the
    intervals force an answer for *every* contained pair of reals, and
    :class:`UndecidedComparison` otherwise.
    """

    __slots__ = ("lo", "hi")

    lo: mpq
    hi: mpq

    def __init__(self, lo: _RationalLike, hi: Optional[_RationalLike] = None) -> None:
        qlo = _as_mpq(lo)
        qhi = qlo if hi is None else _as_mpq(hi)
        if qlo > qhi:
            raise ValueError(f"interval endpoints out of order: [{qlo}, {qhi}]")
        object.__setattr__(self, "lo", qlo)
        object.__setattr__(self, "hi", qhi)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Interval is immutable")

    # -- helpers ----------------------------------------------------------

    @staticmethod
    def _make(lo: mpq, hi: mpq) -> "Interval":
        lo, hi = _outward(lo, hi)
        out = object.__new__(Interval)
        object.__setattr__(out, "lo", lo)
        object.__setattr__(out, "hi", hi)
        return out

    def _coerce(self, other: object) -> Optional["Interval"]:
        if isinstance(other, Interval):
            return other
        if _is_rational(other):
            q = _as_mpq(other)
            return Interval._make(q, q)
        if isinstance(other, Quad):
            return to_interval(other)
        return None

    @property
    def width(self) -> mpq:
        return self.hi - self.lo

    def midpoint(self) -> mpq:
        return (self.lo + self.hi) / 2

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains_rational(self, q: _RationalLike) -> bool:
        v = _as_mpq(q)
        return self.lo <= v <= self.hi

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: object) -> "Interval":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Interval._make(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __sub__(self, other: object) -> "Interval":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Interval._make(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other: object) -> "Interval":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: object) -> "Interval":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        products = (
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        )
        return Interval._make(min(products), max(products))

    __rmul__ = __mul__

    def _reciprocal(self) -> "Interval":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        return Interval._make(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other: object) -> "Interval":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o._reciprocal()

    def __rtruediv__(self, other: object) -> "Interval":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self._reciprocal()

    def __neg__(self) -> "Interval":
        return Interval._make(-self.hi, -self.lo)

    def __pos__(self) -> "Interval":
        return self

    def __abs__(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval._make(mpq(0), max(-self.lo, self.hi))

    # -- three-valued comparisons ------------------------------------------

    def _undecided(self, op: str, other: "Interval") -> UndecidedComparison:
        return UndecidedComparison(
            f"[{self.lo},{self.hi}] {op} [{other.lo},{other.hi}] is undecided "
            f"at {_precision_bits} bits"
        )

    def __lt__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.hi < o.lo:
            return True
        if self.lo >= o.hi:
            return False
        raise self._undecided("<", o)

    def __le__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.hi <= o.lo:
            return True
        if self.lo > o.hi:
            return False
        raise self._undecided("<=", o)

    def __gt__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.lo > o.hi:
            return True
        if self.hi <= o.lo:
            return False
        raise self._undecided(">", o)

    def __ge__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.lo >= o.hi:
            return True
        if self.hi < o.lo:
            return False
        raise self._undecided(">=", o)

    def __eq__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_point() and o.is_point() and self.lo == o.lo:
            return True
        if self.hi < o.lo or o.hi < self.lo:
            return False
        raise self._undecided("==", o)

    def __ne__(self, other: object) -> bool:
        eq = self.__eq__(other)
        if eq is NotImplemented:
            return NotImplemented
        return not eq

    def __bool__(self) -> bool:
        # bool(x) is "x != 0"
        return self.__ne__(Interval._make(mpq(0), mpq(0)))

    __hash__ = None  # type: ignore[assignment]  # equality is three-valued

    def __repr__(self) -> str:
        return f"Interval({self.lo!s}, {self.hi!s})"


Scalar = Union[mpq, Quad, Interval]


# --------------------------------------------------------------------------
# shared scalar helpers
# --------------------------------------------------------------------------


def rational(num: _RationalLike, den: _RationalLike = 1) -> mpq:
    """The exact rational num/den (lowest terms, positive denominator)."""
    return mpq(_as_mpq(num), _as_mpq(den))


def sign(value: Scalar) -> int:
    """Exact sign in {-1, 0, +1}; undecidable intervals raise."""
    if _is_rational(value):
        return _mpq_sign(_as_mpq(value))
    if isinstance(value, Quad):
        return value._sign()
    if isinstance(value, Interval):
        if value.lo > 0:
            return 1
        if value.hi < 0:
            return -1
        if value.lo == 0 == value.hi:
            return 0
        raise UndecidedComparison(
            f"sign of [{value.lo},{value.hi}] is undecided"
        )
    raise TypeError(f"not a scalar: {value!r}")


def compare(a: Scalar, b: Scalar) -> Optional[int]:
    """-1, 0, +1, or None when interval overlap leaves the order unknown.

    This is the non-raising comparison interface; the comparison operators on
    the scalar types raise :class:`UndecidedComparison` instead so that
    geometric predicates can never silently branch on an unknown.
    """
    try:
        if a == b:
            return 0
        return -1 if a < b else 1
    except UndecidedComparison:
        return None


@lru_cache(maxsize=None)
def _sqrt_enclosure_cached(num: int, den: int, bits: int) -> tuple:
    # sqrt(num/den) = sqrt(num*den) / den; enclose sqrt(N) by scaled isqrt.
    n = mpz(num) * mpz(den)
    scaled = isqrt(n << (2 * bits))
    lo = mpq(scaled, mpz(den) << bits)
    hi = mpq(scaled + 1, mpz(den) << bits)
    return lo, hi


def sqrt_enclosure(value: _RationalLike, bits: Optional[int] = None) -> Interval:
    """An interval of width < 2^-bits (relative to den) containing sqrt(value)."""
    q = _as_mpq(value)
    if q < 0:
        raise ValueError("square root of a negative value")
    if bits is None:
        bits = _precision_bits
    lo, hi = _sqrt_enclosure_cached(int(q.numerator), int(q.denominator), bits)
    out = object.__new__(Interval)
    object.__setattr__(out, "lo", lo)
    object.__setattr__(out, "hi", hi)
    return out


def to_interval(value: Scalar, bits: Optional[int] = None) -> Interval:
    """Enclose any scalar in an interval (degenerate for rationals)."""
    if _is_rational(value):
        q = _as_mpq(value)
        return Interval(q, q)
    if isinstance(value, Quad):
        if value.b == 0:
            return Interval(value.a, value.a)
        root = sqrt_enclosure(value.d, bits)
        return value.a + value.b * root
    if isinstance(value, Interval):
        return value
    raise TypeError(f"not a scalar: {value!r}")


def to_float(value: Scalar) -> float:
    """Non-certified float approximation, for reporting and export only."""
    if _is_rational(value):
        q = _as_mpq(value)
        return int(q.numerator) / int(q.denominator)
    enclosure = to_interval(value)
    mid = enclosure.midpoint()
    return int(mid.numerator) / int(mid.denominator)


# --------------------------------------------------------------------------
# field descriptors, parsing and formatting
# --------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Field:
    """Names one scalar backend: rational, quadratic with fixed d, or interval."""

    kind: str  # "rational" | "quadratic" | "interval"
    d: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind not in ("rational", "quadratic", "interval"):
            raise ValueError(f"unknown field kind: {self.kind}")
        if self.kind == "quadratic":
            if self.d is None or self.d < 2 or not is_square_free(self.d):
                raise ValueError(
                    f"quadratic field needs a square-free d >= 2, got {self.d}"
                )
        elif self.d is not None:
            raise ValueError(f"{self.kind} field takes no d")

    def __str__(self) -> str:
        if self.kind == "quadratic":
            return f"quadratic(sqrt({self.d}))"
        return self.kind


RATIONAL = Field("rational")
INTERVAL = Field("interval")


def quadratic_field(d: int) -> Field:
    return Field("quadratic", int(d))


_RAT_RE = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")
_QUAD_RE = re.compile(
    r"^(?:([+-]?\d+(?:/\d+)?)\s*([+-])\s*)?"  # rational part, sign-separated
    r"([+-]?\d+(?:/\d+)?)\s*\*\s*sqrt\(\s*(\d+)\s*\)$"
)
_INTERVAL_RE = re.compile(r"^\[\s*([^,\]]+)\s*,\s*([^,\]]+)\s*\]$")


def _parse_rational_literal(text: str) -> mpq:
    m = _RAT_RE.match(text.strip())
    if not m:
        raise ValueError(f"malformed rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in literal: {text!r}")
    return mpq(num, den)


def parse_scalar(text: str, field: Field) -> Scalar:
    """Parse a literal of the grammar "p/q" | "p/q+r/s*sqrt(d)" | "[lo,hi]".

    The literal must be expressible in ``field``: a quadratic literal needs a
    quadratic field with the same d (or the interval field, which encloses
    it); a rational literal is welcome in every field.  Round-trips with
    :func:`format_scalar`.
    """
    text = text.strip()
    m = _INTERVAL_RE.match(text)
    if m:
        if field.kind != "interval":
            raise ValueError(
                f"interval literal {text!r} needs the interval field, got {field}"
            )
        return Interval(
            _parse_rational_literal(m.group(1)),
            _parse_rational_literal(m.group(2)),
        )
    m = _QUAD_RE.match(text)
    if m:
        a = _parse_rational_literal(m.group(1)) if m.group(1) else mpq(0)
        b = _parse_rational_literal(m.group(3))
        if m.group(2) == "-":
            b = -b
        d = int(m.group(4))
        if not is_square_free(d) or d < 2:
            raise ValueError(f"sqrt argument must be square-free and >= 2: {d}")
        value = Quad(a, b, d)
        if field.kind == "quadratic":
            if field.d != d:
                raise ValueError(
                    f"literal {text!r} lives in sqrt({d}), field wants sqrt({field.d})"
                )
            return value
        if field.kind == "interval":
            return to_interval(value)
        raise ValueError(f"quadratic literal {text!r} does not fit field {field}")
    q = _parse_rational_literal(text)
    if field.kind == "rational":
        return q
    if field.kind == "quadratic":
        return Quad(q, 0, field.d)
    return Interval(q, q)


def format_scalar(value: Scalar) -> str:
    """Canonical literal: lowest-terms "p/q", "a+b*sqrt(d)", or "[lo,hi]"."""
    if _is_rational(value):
        return str(_as_mpq(value))
    if isinstance(value, Quad):
        if value.b < 0:
            return f"{value.a}-{-value.b}*sqrt({value.d})"
        return f"{value.a}+{value.b}*sqrt({value.d})"
    if isinstance(value, Interval):
        return f"[{value.lo},{value.hi}]"
    raise TypeError(f"not a scalar: {value!r}")


def infer_field(text: str) -> Field:
    """The narrowest field whose grammar matches ``text``."""
    text = text.strip()
    if _INTERVAL_RE.match(text):
        return INTERVAL
    m = _QUAD_RE.match(text)
    if m:
        return quadratic_field(int(m.group(4)))
    _parse_rational_literal(text)  # raises if malformed
    return RATIONAL


# --------------------------------------------------------------------------
# 3-vectors
# --------------------------------------------------------------------------


class Vec3:
    """An immutable 3-vector of scalars from one shared backend."""

    __slots__ = ("x", "y", "z")

    def __init__(self, x: Scalar, y: Scalar, z: Scalar) -> None:
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Vec3 is immutable")

    def __iter__(self):
        yield self.x
        yield self.y
        yield self.z

    def __getitem__(self, i: int) -> Scalar:
        return (self.x, self.y, self.z)[i]

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def scale(self, s: Scalar) -> "Vec3":
        return Vec3(s * self.x, s * self.y, s * self.z)

    def dot(self, other: "Vec3") -> Scalar:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def l1(self) -> Scalar:
        return abs(self.x) + abs(self.y) + abs(self.z)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Vec3):
            return NotImplemented
        return self.x == other.x and self.y == other.y and self.z == other.z

    def __ne__(self, other: object) -> bool:
        eq = self.__eq__(other)
        if eq is NotImplemented:
            return NotImplemented
        return not eq

    def __hash__(self) -> int:
        return hash((self.x, self.y, self.z))

    def __repr__(self) -> str:
        return f"Vec3({self.x!s}, {self.y!s}, {self.z!s})"


def vec(x: _RationalLike, y: _RationalLike, z: _RationalLike) -> Vec3:
    """Rational-backend vector from integer or rational components."""
    return Vec3(_as_mpq(x), _as_mpq(y), _as_mpq(z))
