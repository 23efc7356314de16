"""Elliptic logarithms and the Betti map.

For P = (x0, y0) on y^2 = x^3 + a4 x + a6 with roots e1, e2, e3,

    z(P) = integral from x0 to infinity of dx / (2y) = R_F(x0 - e1, x0 - e2, x0 - e3)

up to the sign fixed by y0, where R_F is Carlson's symmetric integral.  R_F
is evaluated by its duplication (Landen-type) descent: each step replaces
the three arguments by (x + mu)/4 with mu = sqrt(xy) + sqrt(yz) + sqrt(zx),
which quarters their spread; after a handful of steps a fifth-order Taylor
expansion about the mean finishes the job.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from ..arithmetic.ball import ComplexBall, center, csqrt
from .periods import PeriodFrame, _fiber_coefficients, cubic_roots


def _principal_sqrt(z):
    # negative reals count as lying just above the cut
    if isinstance(z, ComplexBall):
        return z.sqrt()
    return csqrt(z)


def carlson_rf(x, y, z, rtol: float = 1e-16):
    """R_F(x, y, z) by duplication; works on complex, ComplexBall and mpmath numbers."""
    is_mp = hasattr(x, "ae") or hasattr(y, "ae") or hasattr(z, "ae")
    if is_mp:
        rtol = float(mpmath.mpf(2) ** (-mpmath.mp.prec))
    for _ in range(60):
        A = (x + y + z) / 3
        cA = abs(complex(center(A)))
        spread = max(abs(complex(center(v)) - complex(center(A))) for v in (x, y, z))
        if cA == 0 and spread == 0:
            raise ZeroDivisionError("R_F with all arguments zero")
        eps = spread / cA if cA else float("inf")
        if eps**6 < rtol:
            break
        sx, sy, sz = _principal_sqrt(x), _principal_sqrt(y), _principal_sqrt(z)
        mu = sx * sy + sy * sz + sz * sx
        x, y, z = (x + mu) / 4, (y + mu) / 4, (z + mu) / 4
    X = 1 - x / A
    Y = 1 - y / A
    Z = -(X + Y)
    E2 = X * Y - Z * Z
    E3 = X * Y * Z
    series = 1 - E2 / 10 + E3 / 14 + E2 * E2 / 24 - 3 * E2 * E3 / 44
    out = series / _principal_sqrt(A)
    if isinstance(out, ComplexBall):
        # truncation error of the fifth-order expansion
        trunc = eps**6 / (4 * (1 - eps)) / math.sqrt(cA) if eps < 1 else float("inf")
        out = out.inflate(trunc)
    return out


def _as_ball(v) -> ComplexBall:
    return v if isinstance(v, ComplexBall) else ComplexBall(complex(v))


def elliptic_log_raw(x0, y0, a4, a6):
    """z with (wp(z), wp'(z)/2) = (x0, y0); generic numeric type."""
    roots = cubic_roots(a4, a6)
    if complex(center(y0)) == 0:
        # exact 2-torsion: R_F(0, e_i - e_j, e_i - e_k) is the half period, and
        # snapping the vanishing argument avoids the sqrt-sensitivity at 0
        i = min(range(3), key=lambda k: abs(complex(center(x0)) - complex(center(roots[k]))))
        d = [roots[i] - e for e in roots]
        d[i] = d[i] * 0
        return carlson_rf(*d)
    d = [x0 - e for e in roots]
    rf = carlson_rf(*d)
    w = _principal_sqrt(d[0]) * _principal_sqrt(d[1]) * _principal_sqrt(d[2])
    # y0 = +-w; large x0 on the principal branch has y = -w at z = R_F
    cw, cy = complex(center(w)), complex(center(y0))
    return -rf if abs(cy - cw) < abs(cy + cw) else rf


def elliptic_log(P, frame: PeriodFrame = None):
    """z(P) as a ComplexBall; O maps to 0."""
    if P.is_zero:
        return ComplexBall(0)
    lam = P.fiber
    if lam is None:
        raise ValueError("elliptic_log expects a fiber point")
    if frame is not None and not frame.contains(complex(lam)):
        raise ValueError("fiber outside the frame disc")
    lam_b = ComplexBall(complex(lam))
    a4, a6 = _fiber_coefficients(P.family, lam_b)
    x0, y0 = _as_ball(complex(P.x)), _as_ball(complex(P.y))
    if not abs(complex(P.x)) < 1e150:
        # z ~ x^(-1/2) is below what the ball arithmetic can separate from 0
        raise ArithmeticError("insufficient precision")
    return elliptic_log_raw(x0, y0, a4, a6)


def elliptic_log_mp(P, dps: int = 40):
    with mpmath.workdps(dps):
        lam = mpmath.mpc(complex(P.fiber)) if not hasattr(P.fiber, "denominator") else (
            mpmath.mpf(P.fiber.numerator) / P.fiber.denominator
        )
        a4, a6 = _fiber_coefficients(P.family, mpmath.mpc(lam))
        x0 = _mp(P.x)
        y0 = _mp(P.y)
        return elliptic_log_raw(x0, y0, a4, a6)


def _mp(v):
    if hasattr(v, "denominator") and hasattr(v, "numerator"):
        return mpmath.mpc(mpmath.mpf(v.numerator) / v.denominator)
    return mpmath.mpc(complex(v))


# -- Betti map -----------------------------------------------------------------


@dataclass(frozen=True)
class BettiPoint:
    """Point of the real torus R^2 / Z^2 in [0, 1)^2 with an error radius."""

    coords: tuple
    error: float = 0.0

    def __post_init__(self):
        u, v = self.coords
        object.__setattr__(self, "coords", (u % 1.0, v % 1.0))
        if not self.error < 0.5:
            raise ValueError("Betti point error too large to be meaningful")

    def __add__(self, other: "BettiPoint") -> "BettiPoint":
        return BettiPoint(
            (self.coords[0] + other.coords[0], self.coords[1] + other.coords[1]), self.error + other.error
        )

    def distance(self, other) -> float:
        """Distance on the torus (sup norm)."""
        if isinstance(other, BettiPoint):
            other = other.coords
        return max(torus_distance(a, b) for a, b in zip(self.coords, other))


def torus_distance(a: float, b: float) -> float:
    d = (a - b) % 1.0
    return min(d, 1.0 - d)


def distance_to_lattice(coords, N: int = 1) -> float:
    """sup-distance of coords to (1/N) Z^2."""
    return max(abs(N * c - round(N * c)) / N for c in coords)


def lattice_coordinates(z, basis) -> tuple[tuple[float, float], float]:
    """Real (u, v) with z = u w1 + v w2 and a propagated error bound."""
    w1, w2 = (_as_ball(w) for w in basis)
    zb = _as_ball(z)
    b1, b2, c = w1.center, w2.center, zb.center
    det = b1.real * b2.imag - b1.imag * b2.real
    u = (c.real * b2.imag - c.imag * b2.real) / det
    v = (b1.real * c.imag - b1.imag * c.real) / det
    # first-order sensitivity of the 2x2 solve to the radii
    inv_norm = (abs(b1) + abs(b2)) / abs(det)
    err = inv_norm * (zb.radius + (abs(u) + abs(v)) * max(w1.radius, w2.radius)) + 1e-15 * (abs(u) + abs(v) + 1)
    return (u, v), err


def betti_lift(P, frame: PeriodFrame) -> tuple[tuple[float, float], float]:
    """Unreduced lattice coordinates of the elliptic log (a lift of b(P))."""
    if P.is_zero:
        return (0.0, 0.0), 0.0
    basis = frame.omega(ComplexBall(complex(P.fiber)))
    return lattice_coordinates(elliptic_log(P, frame), basis)


def betti_map(P, frame: PeriodFrame) -> BettiPoint:
    """b(P) in [0, 1)^2: coordinates of z(P) in the frame's period basis."""
    if P.is_zero:
        return BettiPoint((0.0, 0.0), 0.0)
    if P.fiber is None:
        raise ValueError("betti_map expects a fiber point")
    (u, v), err = betti_lift(P, frame)
    return BettiPoint((u, v), err)
