"""Exact ground fields: the rationals and prime fields F_p.

A :class:`FieldSpec` names the field and knows how to coerce raw values into
its canonical representation.  Raw values are what the matrix layer stores:
``flint.fmpq`` for Q and plain ``int`` residues in ``[0, p)`` for F_p.
:class:`FieldScalar` is the checked value type for standalone arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import flint

RATIONALS = "Q"
PRIME_FIELD = "Fp"

_MAX_CHARACTERISTIC = 2**31


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class FieldError(ValueError):
    pass


@dataclass(frozen=True)
class FieldSpec:
    kind: str
    characteristic: int = 0

    def __post_init__(self):
        if self.kind == RATIONALS:
            if self.characteristic != 0:
                raise FieldError("Q has characteristic 0")
        elif self.kind == PRIME_FIELD:
            p = self.characteristic
            if not (2 <= p <= _MAX_CHARACTERISTIC and _is_prime(p)):
                raise FieldError(f"F_p needs a prime 2 <= p <= 2^31, got {p}")
        else:
            raise FieldError(f"unknown field kind {self.kind!r}")

    @property
    def is_rational(self) -> bool:
        return self.kind == RATIONALS

    @property
    def p(self) -> int:
        return self.characteristic

    def __str__(self):
        return "Q" if self.is_rational else f"Fp:{self.characteristic}"

    # raw value helpers -----------------------------------------------------

    def coerce(self, x):
        """Canonical raw value for ``x`` (int, Fraction, fmpq, FieldScalar or str)."""
        if isinstance(x, FieldScalar):
            if x.field != self:
                raise FieldError(f"scalar over {x.field} used in {self}")
            return x.value
        if isinstance(x, str):
            x = Fraction(x)
        if self.is_rational:
            if isinstance(x, Fraction):
                return flint.fmpq(x.numerator, x.denominator)
            return flint.fmpq(x)
        if isinstance(x, Fraction):
            num = x.numerator % self.p
            den = x.denominator % self.p
            if den == 0:
                raise ZeroDivisionError(f"denominator vanishes in F_{self.p}")
            return num * pow(den, -1, self.p) % self.p
        if isinstance(x, flint.fmpq):
            return self.coerce(Fraction(int(x.p), int(x.q)))
        return int(x) % self.p

    def scalar(self, x) -> "FieldScalar":
        return FieldScalar(self, self.coerce(x))

    @property
    def zero(self):
        return flint.fmpq(0) if self.is_rational else 0

    @property
    def one(self):
        return flint.fmpq(1) if self.is_rational else 1


QQ = FieldSpec(RATIONALS, 0)


def GF(p: int) -> FieldSpec:
    return FieldSpec(PRIME_FIELD, p)


def parse_field(text: str) -> FieldSpec:
    """Parse ``Q`` or ``Fp:<p>`` (``F<p>`` and ``GF(<p>)`` are accepted too)."""
    t = text.strip()
    if t in ("Q", "QQ"):
        return QQ
    for prefix in ("Fp:", "GF(", "F"):
        if t.startswith(prefix):
            body = t[len(prefix):].rstrip(")")
            try:
                return GF(int(body))
            except ValueError:
                break
    raise FieldError(f"cannot parse field {text!r}")


@dataclass(frozen=True)
class FieldScalar:
    field: FieldSpec
    value: object

    def _other(self, other):
        if isinstance(other, FieldScalar):
            if other.field != self.field:
                raise FieldError(f"mixed fields {self.field} and {other.field}")
            return other.value
        return self.field.coerce(other)

    def _wrap(self, v):
        if not self.field.is_rational:
            v %= self.field.p
        return FieldScalar(self.field, v)

    def __add__(self, other):
        return self._wrap(self.value + self._other(other))

    def __sub__(self, other):
        return self._wrap(self.value - self._other(other))

    def __mul__(self, other):
        return self._wrap(self.value * self._other(other))

    def __truediv__(self, other):
        b = self._other(other)
        if b == 0:
            raise ZeroDivisionError("division by zero in " + str(self.field))
        if self.field.is_rational:
            return FieldScalar(self.field, self.value / b)
        return self._wrap(self.value * pow(int(b), -1, self.field.p))

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return self._wrap(self._other(other) - self.value)

    def __rtruediv__(self, other):
        return self.field.scalar(other) / self

    def __neg__(self):
        return self._wrap(-self.value)

    def inverse(self):
        return self.field.scalar(1) / self

    def is_zero(self) -> bool:
        return self.value == 0

    def __eq__(self, other):
        if isinstance(other, FieldScalar):
            return self.field == other.field and self.value == other.value
        try:
            return self.value == self.field.coerce(other)
        except (FieldError, TypeError, ValueError, ZeroDivisionError):
            return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __repr__(self):
        return f"{self.value} in {self.field}"

    def __str__(self):
        return str(self.value)
