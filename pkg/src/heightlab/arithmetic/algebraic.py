"""Algebraic numbers given by a minimal polynomial and an isolating ball."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from . import intpoly
from .ball import ComplexBall
from .polynomial import Polynomial

MAX_DEGREE = 24


class ReducibleError(ValueError):
    pass


def integer_roots(z: tuple[int, ...], dps: int = 30) -> list[complex]:
    """All complex roots of an integer polynomial (companion eigenvalues, polished)."""
    if len(z) <= 1:
        return []
    coeffs = [float(v) for v in reversed(z)]
    approx = np.roots(coeffs) if all(np.isfinite(coeffs)) else None
    with mpmath.workdps(dps):
        if approx is None or len(approx) != len(z) - 1:
            roots = mpmath.polyroots([int(v) for v in reversed(z)], maxsteps=200, extraprec=2 * dps)
            return [complex(r) for r in roots]
        try:
            roots = mpmath.polyroots(
                [int(v) for v in reversed(z)], maxsteps=100, extraprec=4 * dps, roots_init=list(approx)
            )
        except mpmath.libmp.NoConvergence:
            return [complex(r) for r in approx]
    return [complex(r) for r in roots]


def is_irreducible(z: tuple[int, ...]) -> bool:
    import sympy

    x = sympy.Symbol("x")
    return sympy.Poly(list(reversed(z)), x, domain="ZZ").is_irreducible


@dataclass(frozen=True)
class AlgebraicNumber:
    """One root of an irreducible primitive integer polynomial."""

    minimal_polynomial: Polynomial
    isolating_approximation: ComplexBall

    def __post_init__(self):
        z, scale = self.minimal_polynomial.primitive_part()
        if len(z) < 2:
            raise ValueError("minimal polynomial must have positive degree")
        if len(z) - 1 > MAX_DEGREE:
            raise ValueError(f"degree {len(z) - 1} exceeds supported maximum {MAX_DEGREE}")
        if not is_irreducible(z):
            raise ReducibleError("minimal polynomial is reducible over Q")
        object.__setattr__(self, "minimal_polynomial", Polynomial(z))
        ball = self.isolating_approximation
        inside = [r for r in integer_roots(z) if ball.contains(r)]
        if len(inside) != 1:
            raise ValueError(f"isolating ball contains {len(inside)} roots, expected exactly one")

    @classmethod
    def from_rational(cls, q) -> "AlgebraicNumber":
        q = Fraction(q)
        return cls(Polynomial([-q.numerator, q.denominator]), ComplexBall(complex(float(q)), 0.25 / q.denominator))

    @classmethod
    def root_near(cls, minpoly: Polynomial, guess: complex) -> "AlgebraicNumber":
        """Pick the root closest to guess; the ball is half the distance to the next root."""
        z, _ = minpoly.primitive_part()
        roots = integer_roots(z)
        roots.sort(key=lambda r: abs(r - guess))
        sep = abs(roots[1] - roots[0]) if len(roots) > 1 else 1.0
        return cls(minpoly, ComplexBall(roots[0], sep / 2.5))

    @property
    def degree(self) -> int:
        return self.minimal_polynomial.degree

    def integer_coefficients(self) -> tuple[int, ...]:
        return self.minimal_polynomial.primitive_part()[0]

    def conjugates(self) -> list[complex]:
        return integer_roots(self.integer_coefficients())

    @property
    def value(self) -> complex:
        z = self.integer_coefficients()
        for r in integer_roots(z):
            if self.isolating_approximation.contains(r):
                return r
        raise ArithmeticError("isolated root lost")  # excluded by construction

    def as_rational(self) -> Fraction | None:
        z = self.integer_coefficients()
        if len(z) == 2:
            return Fraction(-z[0], z[1])
        return None

    def is_root_of(self, p: Polynomial) -> bool:
        """Exact test: does the minimal polynomial divide p?"""
        if p.is_zero():
            return True
        pz, _ = p.primitive_part()
        # Gauss: a primitive factor over Q divides over Z
        return intpoly.divexact(pz, self.integer_coefficients()) is not None
