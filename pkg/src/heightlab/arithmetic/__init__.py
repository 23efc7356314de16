"""Exact arithmetic over Q and Q(lambda), plus error-tracked complex balls."""

from .algebraic import AlgebraicNumber
from .ball import ComplexBall, ball_op
from .polynomial import (
    Polynomial,
    Rational,
    RationalFunction,
    as_rational,
    poly_divmod,
    poly_gcd,
    ratfunc_normalize,
)

__all__ = [
    "AlgebraicNumber",
    "ComplexBall",
    "Polynomial",
    "Rational",
    "RationalFunction",
    "as_rational",
    "ball_op",
    "poly_divmod",
    "poly_gcd",
    "ratfunc_normalize",
]
