"""Period lattices of y^2 = x^3 + a4 x + a6 and their continuation in lambda.

Periods are those of the invariant differential dx/(2y), so that
(x, y) = (wp(z), wp'(z)/2) with g2 = -4 a4, g3 = -4 a6.

The AGM kernels are written against the operations +, -, *, / and `csqrt`,
so the same code runs on builtin complex, on ComplexBall (error-tracked
double) and on mpmath mpc (the high-precision rerun used for certification).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import mpmath
import numpy as np

from ..arithmetic.ball import ComplexBall, center, csqrt, radius

AGM_MAX_STEPS = 60


class ContinuationError(ArithmeticError):
    pass


# -- cubic roots --------------------------------------------------------------


def cubic_roots(a4, a6) -> list:
    """Roots of x^3 + a4 x + a6, as balls when the coefficients are balls.

    Each approximate root r is polished by Newton and enclosed with the
    classical bound |r - root| <= 3 |f(r)| / |f'(r)| for a cubic.
    """
    if hasattr(a4, "ae") or hasattr(a6, "ae"):
        return list(mpmath.polyroots([1, 0, a4, a6], maxsteps=200, extraprec=60))
    c4, c6 = center(a4), center(a6)
    approx = np.roots([1.0, 0.0, c4, c6])
    out = []
    for r in approx:
        r = complex(r)
        for _ in range(3):
            fp = 3 * r * r + c4
            if fp == 0:
                break
            r -= (r**3 + c4 * r + c6) / fp
        if isinstance(a4, ComplexBall) or isinstance(a6, ComplexBall):
            rb = ComplexBall(r)
            f = rb * rb * rb + ComplexBall.coerce(a4) * rb + a6
            fp = 3 * rb * rb + a4
            if fp.mig() == 0:
                raise ContinuationError("too close to discriminant locus")
            rad = 3 * f.mag() / fp.mig()
            out.append(ComplexBall(r, rad + radius(a4) + 1e-300))
        else:
            out.append(r)
    return out


# -- AGM ---------------------------------------------------------------------


def agm(a, b):
    """Complex AGM with the optimal (right) choice of square root at every step."""
    for _ in range(AGM_MAX_STEPS):
        ca, cb = complex(center(a)), complex(center(b))
        if abs(ca - cb) <= 1e-15 * abs(ca) and not hasattr(a, "ae"):
            if isinstance(a, ComplexBall):
                return ComplexBall(a.center, a.radius + abs(ca - cb) + b.radius)
            return a
        if hasattr(a, "ae") and abs(a - b) <= abs(a) * mpmath.mpf(2) ** (-mpmath.mp.prec + 4):
            return a
        an = (a + b) / 2
        s = csqrt(a * b)
        cs = complex(center(s))
        can = complex(center(an))
        if abs(can - cs) > abs(can + cs):
            s = -s
        a, b = an, s
    raise ContinuationError("AGM did not converge")


def _period_candidates(roots) -> list:
    """pi / M(sqrt(e_i - e_j), sqrt(e_i - e_k)) for i = 1, 2, 3."""
    pi = mpmath.pi if hasattr(roots[0], "ae") else math.pi
    out = []
    for i in range(3):
        j, k = [m for m in range(3) if m != i]
        u = csqrt(roots[i] - roots[j])
        v = csqrt(roots[i] - roots[k])
        # the AGM only depends on the pair up to a common sign; align them
        if abs(complex(center(u)) - complex(center(v))) > abs(complex(center(u)) + complex(center(v))):
            v = -v
        out.append(pi / agm(u, v))
    return out


def _coords(w, basis) -> tuple[float, float]:
    """Real coordinates of complex w in the real basis (b1, b2)."""
    b1, b2 = complex(center(basis[0])), complex(center(basis[1]))
    w = complex(center(w))
    det = b1.real * b2.imag - b1.imag * b2.real
    u = (w.real * b2.imag - w.imag * b2.real) / det
    v = (b1.real * w.imag - b1.imag * w.real) / det
    return u, v


def reduce_basis(w1, w2):
    """Gauss-Lagrange reduction, oriented so Im(w2/w1) > 0."""
    for _ in range(200):
        if abs(complex(center(w2))) < abs(complex(center(w1))):
            w1, w2 = w2, w1
        c1, c2 = complex(center(w1)), complex(center(w2))
        mu = round(((c2 * c1.conjugate()).real) / abs(c1) ** 2)
        if mu == 0:
            break
        w2 = w2 - mu * w1
    if (complex(center(w2)) / complex(center(w1))).imag < 0:
        w2 = -w2
    return w1, w2


def lattice_basis(a4, a6):
    """A reduced basis of the period lattice of dx/(2y) at one fiber."""
    roots = cubic_roots(a4, a6)
    cands = _period_candidates(roots)
    # two candidates with non-real ratio span; the third is checked to lie in their span
    best = None
    for i in range(3):
        for j in range(i + 1, 3):
            ci, cj = complex(center(cands[i])), complex(center(cands[j]))
            area = abs((cj * ci.conjugate()).imag)
            if best is None or area > best[0]:
                best = (area, i, j)
    _, i, j = best
    w1, w2 = reduce_basis(cands[i], cands[j])
    k = 3 - i - j
    u, v = _coords(cands[k], (w1, w2))
    if abs(u - round(u)) > 1e-6 or abs(v - round(v)) > 1e-6:
        raise ContinuationError("period candidates are not commensurable")
    return w1, w2


# -- frames ------------------------------------------------------------------


def _fiber_coefficients(family, lam):
    if isinstance(lam, ComplexBall):
        a4 = _poly_ball(family.a4, lam)
        a6 = _poly_ball(family.a6, lam)
        return a4, a6
    if hasattr(lam, "ae"):
        return _poly_mp(family.a4, lam), _poly_mp(family.a6, lam)
    return family.a4.eval_float(complex(lam)), family.a6.eval_float(complex(lam))


def _poly_ball(p, lam: ComplexBall) -> ComplexBall:
    acc = ComplexBall(0)
    for c in reversed(p.coefficients):
        acc = acc * lam + ComplexBall(complex(float(c)), abs(float(c)) * 2**-53)
    return acc


def _poly_mp(p, lam):
    acc = mpmath.mpc(0)
    for c in reversed(p.coefficients):
        acc = acc * lam + mpmath.mpf(c.numerator) / c.denominator
    return acc


def raw_basis(family, lam):
    a4, a6 = _fiber_coefficients(family, lam)
    return lattice_basis(a4, a6)


def match_basis(old, new) -> tuple[list[list[int]], float]:
    """Integer matrix M with old ~ M new (rows), and the rounding residual."""
    M = []
    res = 0.0
    for w in old:
        u, v = _coords(w, new)
        ru, rv = round(u), round(v)
        res = max(res, abs(u - ru), abs(v - rv))
        M.append([ru, rv])
    return M, res


def apply_matrix(M, basis):
    return tuple(M[i][0] * basis[0] + M[i][1] * basis[1] for i in range(2))


def continue_basis(family, start_basis, path: Sequence[complex], max_residual: float = 0.05, min_step: float = 1e-9):
    """Carry a period basis along a polyline by small steps.

    At each step the raw (reduced) basis at the new point is matched to the
    current one by rounding; a step is halved when the rounding residual
    exceeds max_residual.  Returns the basis at the end of the path and the
    largest residual accepted.
    """
    basis = tuple(complex(center(w)) for w in start_basis)
    worst = 0.0
    for a, b in zip(path[:-1], path[1:]):
        a, b = complex(a), complex(b)
        t, step = 0.0, 1.0
        while t < 1.0:
            step = min(step, 1.0 - t)
            lam = a + (t + step) * (b - a)
            if family.distance_to_singular(lam) < 1e-9:
                raise ContinuationError("too close to discriminant locus")
            new = raw_basis(family, lam)
            M, res = match_basis(basis, new)
            det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
            if res > max_residual or abs(det) != 1:
                step /= 2
                if step * abs(b - a) < min_step:
                    raise ContinuationError("refine loop subdivision")
                continue
            basis = apply_matrix(M, new)
            worst = max(worst, res)
            t += step
            step = min(step * 2, 1.0)
    return basis, worst


@dataclass
class PeriodFrame:
    """A period basis carried from an anchor along a polyline to a disc.

    Inside the disc the frame is obtained by straight-line continuation from
    the disc center, which keeps it single-valued.
    """

    family: object
    center: complex
    radius: float
    anchor: complex
    path: tuple = ()
    anchor_basis: Optional[tuple] = None
    center_basis: tuple = field(init=False)
    continuation_residual: float = field(init=False, default=0.0)

    def __post_init__(self):
        self.center = complex(self.center)
        self.anchor = complex(self.anchor)
        pts = self.family.singular_points()
        for s in pts:
            if abs(s - self.center) <= self.radius:
                raise ValueError("disc contains a singular value")
        if self.anchor_basis is None:
            self.anchor_basis = raw_basis(self.family, self.anchor)
        self.anchor_basis = tuple(complex(center(w)) for w in self.anchor_basis)
        route = [self.anchor, *[complex(p) for p in self.path], self.center]
        self.center_basis, self.continuation_residual = continue_basis(self.family, self.anchor_basis, route)

    @property
    def continuation_path(self) -> tuple:
        return (self.anchor, *[complex(p) for p in self.path], self.center)

    def contains(self, lam) -> bool:
        return abs(complex(center(lam)) - self.center) <= self.radius * (1 + 1e-12)

    def omega(self, lam) -> tuple:
        """(w1, w2) at lam, as ComplexBalls, with Im(w2/w1) > 0."""
        lam_c = complex(center(lam))
        if not self.contains(lam_c):
            raise ValueError("lambda outside the frame disc")
        rad = self.radius_guard(lam_c)
        if rad < 10 * radius(lam) or rad < 1e-9:
            raise ContinuationError("too close to discriminant locus")
        if lam_c == self.center:
            matched = self.center_basis
        else:
            matched, _ = continue_basis(self.family, self.center_basis, [self.center, lam_c])
        lam_b = lam if isinstance(lam, ComplexBall) else ComplexBall(lam_c)
        balls = raw_basis(self.family, lam_b)
        M, res = match_basis(matched, balls)
        if res > 1e-6:
            raise ContinuationError("frame lost track of the period basis")
        w1, w2 = apply_matrix(M, balls)
        return w1, w2

    def omega_complex(self, lam: complex) -> tuple:
        """Fast double-precision omega without error tracking."""
        lam = complex(lam)
        if not self.contains(lam):
            raise ValueError("lambda outside the frame disc")
        if lam == self.center:
            return self.center_basis
        basis, _ = continue_basis(self.family, self.center_basis, [self.center, lam])
        return basis

    def omega_mp(self, lam, dps: int = 40) -> tuple:
        """High-precision rerun of omega for certification."""
        base = self.omega(complex(center(lam)))
        with mpmath.workdps(dps):
            raw = raw_basis(self.family, mpmath.mpc(complex(center(lam))))
            M, res = match_basis(base, raw)
            return apply_matrix(M, raw)

    def radius_guard(self, lam: complex) -> float:
        return self.family.distance_to_singular(lam)

    def describe(self) -> dict:
        return {
            "center": [self.center.real, self.center.imag],
            "radius": self.radius,
            "anchor": [self.anchor.real, self.anchor.imag],
            "path": [[complex(p).real, complex(p).imag] for p in self.path],
        }


def periods(family, lam0, frame: PeriodFrame) -> tuple:
    """(w1, w2) at lam0 chosen continuously within the frame."""
    if not frame.contains(lam0):
        raise ValueError("lambda outside the frame disc")
    return frame.omega(lam0)


# -- monodromy ----------------------------------------------------------------


@dataclass(frozen=True)
class MonodromyMatrix:
    entries: tuple
    residual: float

    @property
    def det(self) -> int:
        (a, b), (c, d) = self.entries
        return a * d - b * c

    @property
    def trace(self) -> int:
        return self.entries[0][0] + self.entries[1][1]

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)


def monodromy(family, loop: Sequence[complex], max_residual: float = 1e-4) -> MonodromyMatrix:
    """alpha with (end frame) = alpha (start frame) after continuing around the loop."""
    pts = [complex(p) for p in loop]
    if abs(pts[0] - pts[-1]) > 1e-12:
        pts.append(pts[0])
    start = raw_basis(family, pts[0])
    start = tuple(complex(center(w)) for w in start)
    end, _ = continue_basis(family, start, pts)
    M, res = match_basis(end, start)
    if res >= max_residual:
        raise ContinuationError("refine loop subdivision")
    return MonodromyMatrix(tuple(tuple(r) for r in M), res)


def circle_loop(center_pt: complex, r: float, n: int = 64, start_angle: float = 0.0) -> list[complex]:
    return [center_pt + r * cmath.exp(1j * (start_angle + 2 * math.pi * k / n)) for k in range(n + 1)]


def keyhole_loop(base: complex, around: complex, r: float, n: int = 64) -> list[complex]:
    """base -> circle of radius r about `around` (counterclockwise) -> base."""
    base, around = complex(base), complex(around)
    start = cmath.phase(base - around)
    circle = circle_loop(around, r, n, start)
    return [base, *circle, base]


def frame_transition(frame_a: PeriodFrame, frame_b: PeriodFrame, lam) -> tuple:
    """Integer M with omega_b(lam) = M omega_a(lam) (rows) and the rounding residual."""
    wa = frame_a.omega_complex(complex(center(lam)))
    wb = frame_b.omega_complex(complex(center(lam)))
    M, res = match_basis(wb, wa)
    return tuple(tuple(r) for r in M), res


def betti_transition(M) -> tuple:
    """alpha = M^-T: when omega' = M omega, Betti coordinates change by b' = alpha b."""
    (a, b), (c, d) = M
    det = a * d - b * c
    if abs(det) != 1:
        raise ValueError("transition matrix is not in GL2(Z)")
    return ((d * det, -c * det), (-b * det, a * det))
