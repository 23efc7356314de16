"""Complex midpoint-radius balls in double precision.

Every operation returns a ball containing the exact result for any choice of
representatives of the inputs: first-order propagation of the input radii
plus one unit-in-last-place of slack for the rounding of the midpoint.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

_ULP = 2.0**-52
_TINY = 1e-300


def _slack(c: complex) -> float:
    return _ULP * abs(c) + _TINY


@dataclass(frozen=True, slots=True)
class ComplexBall:
    center: complex
    radius: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.radius) or self.radius < 0:
            raise ValueError(f"invalid ball radius {self.radius!r}")
        object.__setattr__(self, "center", complex(self.center))

    @classmethod
    def coerce(cls, value) -> "ComplexBall":
        if isinstance(value, ComplexBall):
            return value
        return cls(complex(value), 0.0)

    # -- predicates ----------------------------------------------------------

    def contains(self, z) -> bool:
        return abs(complex(z) - self.center) <= self.radius

    def contains_zero(self) -> bool:
        return abs(self.center) <= self.radius

    def mag(self) -> float:
        """Upper bound for |z| over the ball."""
        return abs(self.center) + self.radius

    def mig(self) -> float:
        """Lower bound for |z| over the ball."""
        return max(abs(self.center) - self.radius, 0.0)

    @property
    def real(self) -> float:
        return self.center.real

    @property
    def imag(self) -> float:
        return self.center.imag

    def conjugate(self) -> "ComplexBall":
        return ComplexBall(self.center.conjugate(), self.radius)

    def inflate(self, r: float) -> "ComplexBall":
        return ComplexBall(self.center, self.radius + r)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        o = ComplexBall.coerce(other)
        c = self.center + o.center
        return ComplexBall(c, self.radius + o.radius + _slack(c))

    __radd__ = __add__

    def __neg__(self):
        return ComplexBall(-self.center, self.radius)

    def __sub__(self, other):
        return self + (-ComplexBall.coerce(other))

    def __rsub__(self, other):
        return ComplexBall.coerce(other) - self

    def __mul__(self, other):
        o = ComplexBall.coerce(other)
        c = self.center * o.center
        r = abs(self.center) * o.radius + abs(o.center) * self.radius + self.radius * o.radius
        return ComplexBall(c, r + _slack(c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = ComplexBall.coerce(other)
        if o.contains_zero():
            raise ZeroDivisionError("indeterminate division")
        c = self.center / o.center
        r = (self.radius + abs(c) * o.radius) / (abs(o.center) - o.radius)
        return ComplexBall(c, r + _slack(c))

    def __rtruediv__(self, other):
        return ComplexBall.coerce(other) / self

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("only nonnegative integer powers")
        out = ComplexBall(1.0)
        for _ in range(e):
            out = out * self
        return out

    def __abs__(self) -> float:
        return abs(self.center)

    def sqrt(self, near: complex | None = None) -> "ComplexBall":
        """Square root; the branch is the principal one unless `near` picks the closer sign."""
        c = cmath.sqrt(self.center)
        if near is not None and abs(-c - near) < abs(c - near):
            c = -c
        m = abs(self.center)
        if self.radius == 0.0:
            r = 0.0
        elif self.radius < m:
            r = self.radius / math.sqrt(m - self.radius)
        else:
            r = math.sqrt(m + self.radius)
        return ComplexBall(c, r + _slack(c))

    def __complex__(self) -> complex:
        return self.center

    def __repr__(self) -> str:
        return f"ComplexBall({self.center!r} ± {self.radius:.3g})"


def ball_op(a, b, op: str, near: complex | None = None) -> ComplexBall:
    """Apply op in {"add", "sub", "mul", "div", "sqrt"}; b is ignored for sqrt."""
    a = ComplexBall.coerce(a)
    if op == "sqrt":
        return a.sqrt(near)
    b = ComplexBall.coerce(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown ball operation {op!r}")


def csqrt(z, near=None):
    """sqrt dispatching on ComplexBall / mpmath / builtin complex."""
    if isinstance(z, ComplexBall):
        return z.sqrt(near)
    if hasattr(z, "ae"):  # mpmath number
        import mpmath

        s = mpmath.sqrt(z)
    else:
        s = cmath.sqrt(z)
    if near is not None and abs(-s - near) < abs(s - near):
        s = -s
    return s


def center(z) -> complex:
    if isinstance(z, ComplexBall):
        return z.center
    return complex(z)


def radius(z) -> float:
    return z.radius if isinstance(z, ComplexBall) else 0.0
