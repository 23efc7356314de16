"""Exact polynomials and rational functions in one variable lambda over Q."""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Iterable, Sequence

from . import intpoly

Rational = Fraction


def as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.replace("−", "-"))
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a Fraction, int or 'p/q' string")
    return Fraction(value)


class Polynomial:
    """Polynomial in lambda with rational coefficients, immutable.

    Stored as integer coefficients over one positive common denominator so
    that products and gcds can run on the integer kernel.
    """

    __slots__ = ("_z", "_d", "_hash")

    def __init__(self, coefficients: Iterable = ()):
        coeffs = [as_rational(c) for c in coefficients]
        z, d = intpoly.from_fractions(coeffs)
        self._set(z, d)

    def _set(self, z, d) -> None:
        if not z:
            z, d = (), 1
        else:
            g = math.gcd(intpoly.content(z), d)
            if g != 1:
                z = tuple(v // g for v in z)
                d //= g
        self._z = z
        self._d = d
        self._hash = None

    @classmethod
    def _raw(cls, z, d: int = 1) -> "Polynomial":
        obj = cls.__new__(cls)
        if d < 0:
            z, d = intpoly.neg(z), -d
        obj._set(intpoly.trim(z), d)
        return obj

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls([c])

    @classmethod
    def lam(cls) -> "Polynomial":
        return cls._raw((0, 1))

    # -- views -------------------------------------------------------------

    @property
    def coefficients(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(v, self._d) for v in self._z)

    @property
    def integer_form(self) -> tuple[tuple[int, ...], int]:
        """(integer coefficients, denominator) with self == z / d."""
        return self._z, self._d

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self._z) - 1

    def is_zero(self) -> bool:
        return not self._z

    def is_constant(self) -> bool:
        return len(self._z) <= 1

    @property
    def leading_coefficient(self) -> Fraction:
        if not self._z:
            return Fraction(0)
        return Fraction(self._z[-1], self._d)

    def __getitem__(self, i: int) -> Fraction:
        if 0 <= i < len(self._z):
            return Fraction(self._z[i], self._d)
        return Fraction(0)

    def monic(self) -> "Polynomial":
        if not self._z:
            return self
        lc = self._z[-1]
        return Polynomial._raw(self._z, lc) if lc > 0 else Polynomial._raw(intpoly.neg(self._z), -lc)

    def primitive_part(self) -> tuple[tuple[int, ...], Fraction]:
        """Integer primitive part (positive leading coefficient) and rational scale."""
        c, p = intpoly.primitive(self._z)
        return p, Fraction(c, self._d)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return Polynomial([as_rational(other)])

    def __add__(self, other):
        if isinstance(other, RationalFunction):
            return NotImplemented
        o = self._coerce(other)
        if self._d == o._d:
            return Polynomial._raw(intpoly.add(self._z, o._z), self._d)
        return Polynomial._raw(
            intpoly.add(intpoly.scale(self._z, o._d), intpoly.scale(o._z, self._d)),
            self._d * o._d,
        )

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(intpoly.neg(self._z), self._d)

    def __sub__(self, other):
        if isinstance(other, RationalFunction):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, RationalFunction):
            return NotImplemented
        o = self._coerce(other)
        return Polynomial._raw(intpoly.mul(self._z, o._z), self._d * o._d)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a polynomial")
        return Polynomial._raw(intpoly.power(self._z, e), self._d**e)

    def __truediv__(self, other):
        if isinstance(other, (Polynomial, RationalFunction)):
            return RationalFunction(self) / other
        c = as_rational(other)
        if c == 0:
            raise ZeroDivisionError("division by zero")
        return Polynomial._raw(intpoly.scale(self._z, c.denominator), self._d * c.numerator)

    def __divmod__(self, other: "Polynomial"):
        return poly_divmod(self, other)

    def exact_div(self, other: "Polynomial") -> "Polynomial":
        """self / other when other divides self exactly; raises otherwise."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        q = intpoly.divexact(self._z, other._z)
        if q is None:
            # integer division can fail on content alone; retry with primitive parts
            pa, ca = self.primitive_part()
            pb, cb = other.primitive_part()
            q = intpoly.divexact(pa, pb)
            if q is None:
                raise ArithmeticError("polynomial division is not exact")
            return Polynomial._raw(q) * (ca / cb)
        return Polynomial._raw(q) * Fraction(other._d, self._d)

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self._z == other._z and self._d == other._d
        if isinstance(other, (int, Fraction)):
            return self == Polynomial([other])
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._z, self._d))
        return self._hash

    def __call__(self, x):
        """Evaluate at x (Fraction, int, complex, ComplexBall, ...)."""
        if isinstance(x, (int, Fraction)):
            return Fraction(intpoly.evaluate(self._z, Fraction(x)), self._d)
        coeffs = self.coefficients
        if not coeffs:
            return 0.0 * x
        acc = x * 0.0 + float(coeffs[-1])
        for v in reversed(coeffs[:-1]):
            acc = acc * x + float(v)
        return acc

    def eval_float(self, x: complex) -> complex:
        acc = 0j
        d = self._d
        for v in reversed(self._z):
            acc = acc * x + v / d
        return acc

    def derivative(self) -> "Polynomial":
        return Polynomial._raw(intpoly.derivative(self._z), self._d)

    def compose(self, inner: "Polynomial") -> "Polynomial":
        out = Polynomial()
        for c in reversed(self.coefficients):
            out = out * inner + c
        return out

    # -- I/O ---------------------------------------------------------------

    def to_json(self) -> list[str]:
        return [f"{c.numerator}/{c.denominator}" for c in self.coefficients]

    @classmethod
    def from_json(cls, data: Sequence) -> "Polynomial":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(as_rational(c) for c in data)

    def __repr__(self) -> str:
        return f"Polynomial({self.to_json()})"

    def __str__(self) -> str:
        if not self._z:
            return "0"
        terms = []
        for i, c in enumerate(self.coefficients):
            if c == 0:
                continue
            mono = "" if i == 0 else ("l" if i == 1 else f"l^{i}")
            if mono and abs(c) == 1:
                coef = "-" if c < 0 else ""
            else:
                coef = str(c)
            terms.append(coef + ("*" if coef not in ("", "-") and mono else "") + mono)
        return " + ".join(reversed(terms)).replace("+ -", "- ")


def poly_divmod(a: Polynomial, b: Polynomial) -> tuple[Polynomial, Polynomial]:
    if b.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    r = list(a.coefficients)
    bc = b.coefficients
    db = len(bc) - 1
    lc = bc[-1]
    q = [Fraction(0)] * max(len(r) - db, 0)
    for k in range(len(r) - 1 - db, -1, -1):
        t = r[k + db] / lc
        q[k] = t
        if t:
            for i, v in enumerate(bc):
                r[i + k] -= t * v
    return Polynomial(q), Polynomial(r[:db] if db else [])


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd; gcd(0, 0) is 0."""
    if a.is_zero() and b.is_zero():
        return Polynomial()
    g = intpoly.gcd(a.integer_form[0], b.integer_form[0])
    return Polynomial._raw(g).monic()


class RationalFunction:
    """Reduced quotient num/den in Q(lambda) with den monic."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if not isinstance(num, Polynomial):
            num = Polynomial([as_rational(num)])
        if den is None:
            den = Polynomial([1])
        elif not isinstance(den, Polynomial):
            den = Polynomial([as_rational(den)])
        n, d = _reduce(num, den)
        object.__setattr__(self, "num", n)
        object.__setattr__(self, "den", d)

    def __setattr__(self, key, value):
        raise AttributeError("RationalFunction is immutable")

    @classmethod
    def _trusted(cls, num: Polynomial, den: Polynomial) -> "RationalFunction":
        obj = cls.__new__(cls)
        object.__setattr__(obj, "num", num)
        object.__setattr__(obj, "den", den)
        return obj

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction._trusted(other, Polynomial([1]))
        return RationalFunction._trusted(Polynomial([as_rational(other)]), Polynomial([1]))

    def __add__(self, other):
        o = self._coerce(other)
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        g = poly_gcd(self.den, o.den)
        if g.degree == 0:
            return RationalFunction._trusted(*_canon(self.num * o.den + o.num * self.den, self.den * o.den))
        d1 = self.den.exact_div(g)
        d2 = o.den.exact_div(g)
        return RationalFunction(self.num * d2 + o.num * d1, d1 * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction._trusted(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        if self.is_zero() or o.is_zero():
            return RationalFunction(Polynomial())
        # cross-cancel first so the gcds stay small
        g1 = poly_gcd(self.num, o.den)
        g2 = poly_gcd(o.num, self.den)
        n1, d2 = (self.num.exact_div(g1), o.den.exact_div(g1)) if g1.degree > 0 else (self.num, o.den)
        n2, d1 = (o.num.exact_div(g2), self.den.exact_div(g2)) if g2.degree > 0 else (o.num, self.den)
        return RationalFunction._trusted(*_canon(n1 * n2, d1 * d2))

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        return RationalFunction._trusted(*_canon(self.den, self.num))

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return RationalFunction._trusted(self.num**e, self.den**e)

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalFunction):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (Polynomial, int, Fraction)):
            return self == self._coerce(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __call__(self, x):
        if isinstance(x, (int, Fraction)):
            d = self.den(x)
            if d == 0:
                raise ZeroDivisionError("pole of rational function")
            return self.num(x) / d
        return self.num.eval_float(x) / self.den.eval_float(x)

    def eval_float(self, x: complex) -> complex:
        return self.num.eval_float(x) / self.den.eval_float(x)

    def derivative(self) -> "RationalFunction":
        return RationalFunction(
            self.num.derivative() * self.den - self.num * self.den.derivative(), self.den * self.den
        )

    def height(self) -> int:
        """max(deg num, deg den) of the reduced form."""
        return max(self.num.degree, self.den.degree, 0)

    def __repr__(self) -> str:
        return f"RationalFunction({self.num}, {self.den})"

    def __str__(self) -> str:
        if self.den.degree == 0:
            return str(self.num)
        return f"({self.num})/({self.den})"


def _canon(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Make den monic for an already coprime pair."""
    lc = den.leading_coefficient
    if lc == 1:
        return num, den
    return num / lc, den / lc


def _reduce(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    if den.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if num.is_zero():
        return Polynomial(), Polynomial([1])
    g = poly_gcd(num, den)
    if g.degree > 0:
        num = num.exact_div(g)
        den = den.exact_div(g)
    return _canon(num, den)


def ratfunc_normalize(n: Polynomial, d: Polynomial) -> RationalFunction:
    """Coprime pair with monic denominator, equal to n/d as a function."""
    return RationalFunction(n, d)
