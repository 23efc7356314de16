"""Jacobians of the Betti map: degeneracy rank and the transversality determinant."""

from __future__ import annotations

import cmath
from typing import Callable, Union

import numpy as np

from ..family import FamilyPoint, specialize_complex
from .ellog import elliptic_log_raw
from .periods import PeriodFrame

Curve = Callable[[complex], FamilyPoint]


def as_curve(c: Union[FamilyPoint, Curve]) -> Curve:
    """A section becomes lambda -> P(lambda); callables pass through."""
    if isinstance(c, FamilyPoint):
        if c.fiber is not None:
            raise ValueError("expected a section or a callable curve")
        return lambda lam: specialize_complex(c, lam)
    return c


def lift_complex(P: FamilyPoint, frame: PeriodFrame) -> np.ndarray:
    """Double-precision b~(P) without error tracking (for differencing)."""
    if P.is_zero:
        return np.zeros(2)
    lam = complex(P.fiber)
    if not frame.contains(lam):
        raise ValueError("differencing leaves the frame disc")
    w1, w2 = frame.omega_complex(lam)
    a4, a6 = P.family.fiber_coefficients(lam)
    z = elliptic_log_raw(complex(P.x), complex(P.y), complex(a4), complex(a6))
    M = np.array([[w1.real, w2.real], [w1.imag, w2.imag]])
    return np.linalg.solve(M, np.array([z.real, z.imag]))


def unwrap(value: np.ndarray, near: np.ndarray) -> np.ndarray:
    """The representative of value + Z^2 closest to near."""
    return value - np.round(value - near)


def _central(f, x0: complex, direction: complex, h: float) -> np.ndarray:
    ref = f(x0)
    plus = unwrap(f(x0 + h * direction), ref)
    minus = unwrap(f(x0 - h * direction), ref)
    return (plus - minus) / (2 * h)


def _derivative(f, x0, direction, h: float) -> np.ndarray:
    # Richardson fallback when the two step sizes disagree
    d1 = _central(f, x0, direction, h)
    d2 = _central(f, x0, direction, h / 2)
    if not (np.all(np.isfinite(d1)) and np.all(np.isfinite(d2))):
        raise ArithmeticError("singular differencing (NaN)")
    scale = max(np.abs(d2).max(), 1.0)
    if np.abs(d1 - d2).max() > 1e-6 * scale:
        return (4 * d2 - d1) / 3
    return d2


def default_step(lam0: complex) -> float:
    return 1e-6 * max(1.0, abs(lam0))


def betti_jacobian(c, lam0: complex, frame: PeriodFrame, step: float = None) -> np.ndarray:
    """2x2 real Jacobian of (Re l, Im l) -> b~(P(l)) at lam0."""
    curve = as_curve(c)
    lam0 = complex(lam0)
    h = default_step(lam0) if step is None else step
    if abs(lam0 - frame.center) + h > frame.radius:
        raise ValueError("differencing leaves the frame disc")
    f = lambda lam: lift_complex(curve(lam), frame)
    return np.column_stack([_derivative(f, lam0, 1, h), _derivative(f, lam0, 1j, h)])


def degeneracy_rank(
    c, lam0: complex, frame: PeriodFrame, step: float = None, ratio: float = 1e-4, floor: float = 1e-6
) -> int:
    """Numeric rank of the Betti Jacobian: 2 nondegenerate, 0 locally constant.

    Singular values count when above max(floor, ratio * sigma_max).
    """
    sv = np.linalg.svd(betti_jacobian(c, lam0, frame, step), compute_uv=False)
    cut = max(floor, ratio * sv[0])
    return int(np.sum(sv > cut))


def section_curve(section: FamilyPoint, lam0: complex, direction: complex = 1) -> Callable[[float], FamilyPoint]:
    """t -> P(lam0 + t direction), a real curve through the section."""
    lam0, direction = complex(lam0), complex(direction)
    return lambda t: specialize_complex(section, lam0 + t * direction)


def fiber_arc(P: FamilyPoint, direction: complex = 1) -> Callable[[float], FamilyPoint]:
    """s -> the point of the fiber of P with x = x(P) + s direction, y by continuity."""
    lam = complex(P.fiber)
    a4, a6 = (complex(a) for a in P.family.fiber_coefficients(lam))
    x0, y0 = complex(P.x), complex(P.y)
    direction = complex(direction)

    def point(s: float) -> FamilyPoint:
        x = x0 + s * direction
        y = cmath.sqrt(x**3 + a4 * x + a6)
        if abs(y - y0) > abs(y + y0):
            y = -y
        return FamilyPoint(x, y, P.family, fiber=lam)

    return point


def transversality_delta0(c1, c2, point, frame: PeriodFrame, step: float = 1e-6) -> float:
    """|det(d/dt b~(c1), -d/ds b~(c2))| at point = (t0, s0).

    c1 and c2 are real one-parameter curves of fiber points meeting at the
    point; a positive value says their Betti images cross transversally.
    """
    t0, s0 = point
    P1, P2 = c1(t0), c2(s0)
    f1 = lambda t: lift_complex(c1(t.real), frame)
    f2 = lambda s: lift_complex(c2(s.real), frame)
    b1, b2 = lift_complex(P1, frame), lift_complex(P2, frame)
    if np.abs(unwrap(b1, b2) - b2).max() > 1e-6:
        raise ValueError("curves do not meet at the given point")
    J = np.column_stack([_derivative(f1, t0, 1, step), -_derivative(f2, s0, 1, step)])
    return float(abs(np.linalg.det(J)))
