"""Weil heights over Q, over Qbar (Mahler measure) and over K = Q(lambda).

All real-valued heights are in natural-log units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .arithmetic import AlgebraicNumber, Polynomial, RationalFunction, as_rational
from .arithmetic import intpoly


@dataclass(frozen=True)
class ProjectivePointQ:
    coordinates: tuple

    def __init__(self, coordinates: Sequence):
        coords = tuple(as_rational(c) for c in coordinates)
        if not coords or all(c == 0 for c in coords):
            raise ValueError("projective point needs a nonzero coordinate")
        object.__setattr__(self, "coordinates", coords)

    def integral(self) -> tuple[int, ...]:
        """Coprime integer representative."""
        den = intpoly.lcm_list(c.denominator for c in self.coordinates)
        ints = [int(c * den) for c in self.coordinates]
        g = 0
        for v in ints:
            g = math.gcd(g, v)
        return tuple(v // g for v in ints)


@dataclass(frozen=True)
class ProjectivePointK:
    coordinates: tuple

    def __init__(self, coordinates: Sequence):
        coords = tuple(c if isinstance(c, RationalFunction) else RationalFunction(c) for c in coordinates)
        if not coords or all(c.is_zero() for c in coords):
            raise ValueError("projective point needs a nonzero coordinate")
        object.__setattr__(self, "coordinates", coords)

    def integral(self) -> tuple[Polynomial, ...]:
        """Coprime polynomial representative (common denominator cleared, common factor removed)."""
        from .arithmetic import poly_gcd

        den = Polynomial([1])
        for c in self.coordinates:
            g = poly_gcd(den, c.den)
            den = den * c.den.exact_div(g)
        polys = [c.num * den.exact_div(c.den) for c in self.coordinates]
        g = Polynomial()
        for p in polys:
            g = poly_gcd(g, p) if not p.is_zero() else g
        return tuple(p.exact_div(g) for p in polys)


def _log_int(n: int) -> float:
    return math.log(abs(n))


def weil_height_q(P) -> float:
    """h([p0:...:pn]) = log max |p_i| for coprime integers p_i."""
    if not isinstance(P, ProjectivePointQ):
        P = ProjectivePointQ(P)
    return _log_int(max(abs(v) for v in P.integral()))


def height_algebraic(alpha: AlgebraicNumber) -> float:
    """(1/d) log M(f) for the primitive minimal polynomial f of alpha."""
    z = alpha.integer_coefficients()
    d = len(z) - 1
    if d == 1:
        # exact path: the Mahler measure of b*x - a is max(|a|, |b|)
        return _log_int(max(abs(z[0]), abs(z[1])))
    log_m = _log_int(z[-1]) + sum(math.log(max(1.0, abs(r))) for r in alpha.conjugates())
    return max(log_m, 0.0) / d


def weil_height_k(P) -> int:
    """max deg p_i over coprime polynomial coordinates."""
    if not isinstance(P, ProjectivePointK):
        P = ProjectivePointK(P)
    return max(p.degree for p in P.integral())


def naive_total_height(fiber_point, base_point) -> float:
    """h(P) = h(P') + h(pi(P)); the Segre-additive height on the product."""
    return weil_height_q(fiber_point) + weil_height_q(base_point)


def base_height(lambda0, family=None) -> float:
    """h_S(lambda0) = h([lambda0 : 1]) / deg S with deg S = 1 for the lambda-line.

    When a family is given, lambda0 must avoid its singular values.
    """
    if family is not None and family.is_singular_value(lambda0):
        raise ValueError("point outside S")
    if isinstance(lambda0, AlgebraicNumber):
        return height_algebraic(lambda0)
    return weil_height_q([as_rational(lambda0), Fraction(1)])
