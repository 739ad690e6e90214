"""Exact complex scalars with rational real and imaginary parts.

Finite-rank traces and chain identities are exact rational computations;
this module provides the scalar type they run on.  Floating scalars are
ordinary Python/numpy complex numbers and need no wrapper.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        # every double is a dyadic rational, so this conversion is exact
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


@dataclass(frozen=True)
class QGauss:
    """A Gaussian rational re + im*i with Fraction components."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @staticmethod
    def of(value) -> "QGauss":
        """Coerce an int, Fraction, float, complex or QGauss to QGauss."""
        if isinstance(value, QGauss):
            return value
        if isinstance(value, complex):
            return QGauss(_as_fraction(value.real), _as_fraction(value.imag))
        return QGauss(_as_fraction(value))

    def __add__(self, other) -> "QGauss":
        other = QGauss.of(other)
        return QGauss(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other) -> "QGauss":
        other = QGauss.of(other)
        return QGauss(self.re - other.re, self.im - other.im)

    def __rsub__(self, other) -> "QGauss":
        return QGauss.of(other) - self

    def __mul__(self, other) -> "QGauss":
        other = QGauss.of(other)
        return QGauss(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __neg__(self) -> "QGauss":
        return QGauss(-self.re, -self.im)

    def conjugate(self) -> "QGauss":
        return QGauss(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __complex__(self) -> complex:
        return self.to_complex()

    def __bool__(self) -> bool:
        return not self.is_zero()


QG_ZERO = QGauss()
QG_ONE = QGauss(Fraction(1))
QG_I = QGauss(Fraction(0), Fraction(1))


def format_rational(x: Fraction) -> str:
    """Serialize a Fraction as `p` or `p/q`."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    return Fraction(text)
