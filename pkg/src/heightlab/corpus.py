"""Bundled families, sections and exact torsion points."""

from __future__ import annotations

from fractions import Fraction

from .arithmetic import Polynomial
from .family import FamilyPoint, WeierstrassFamily, fiber_order_upto


def bundled_family() -> WeierstrassFamily:
    """y^2 = x^3 + l^4 - l^3: j = 0, zero trace, singular fibers at 0, 1 and infinity."""
    lam = Polynomial.lam()
    return WeierstrassFamily(Polynomial(), lam**4 - lam**3, "bundled")


def bundled_section() -> FamilyPoint:
    lam = Polynomial.lam()
    return bundled_family().section(lam, lam**2)


def legendre_two_torsion() -> list[FamilyPoint]:
    """(0, 0), (1, 0), (l, 0) in Legendre coordinates, depressed."""
    fam = WeierstrassFamily.legendre()
    shift = fam.legendre_shift()
    lam = Polynomial.lam()
    return [fam.section(root - shift, 0) for root in (Polynomial(), Polynomial([1]), lam)]


def legendre_four_torsion(s) -> FamilyPoint:
    """On the fiber l = 1 - s^2 the point (1 + s, s(1 + s)) has order 4 (its double is (1, 0))."""
    s = Fraction(s)
    lam = 1 - s * s
    fam = WeierstrassFamily.legendre()
    x = 1 + s - (1 + lam) / 3
    return fam.point(x, s * (1 + s), lam)


def constant_family(a4, a6, label: str = "") -> WeierstrassFamily:
    return WeierstrassFamily(Polynomial([Fraction(a4)]), Polynomial([Fraction(a6)]), label)


def _tate_normal_form(b: Fraction, c: Fraction):
    """y^2 + (1 - c) xy - b y = x^3 - b x^2 with P = (0, 0), moved to short form.

    Returns (a4, a6, x, y) for X = 36 x + 3 b2, Y = 108 (2 y + a1 x + a3).
    """
    a1, a2, a3 = 1 - c, -b, -b
    b2 = a1 * a1 + 4 * a2
    b4 = a1 * a3
    b6 = a3 * a3
    c4 = b2 * b2 - 24 * b4
    c6 = -(b2**3) + 36 * b2 * b4 - 216 * b6
    x, y = Fraction(0), Fraction(0)
    X = 36 * x + 3 * b2
    Y = 108 * (2 * y + a1 * x + a3)
    return -27 * c4, -54 * c6, X, Y


def _kubert(N: int, t: Fraction):
    """(b, c) of the Tate normal form with a rational point of order N."""
    if N == 4:
        return t, Fraction(0)
    if N == 5:
        return t, t
    if N == 6:
        return t + t * t, t
    if N == 7:
        return t**3 - t**2, t**2 - t
    if N == 8:
        b = (2 * t - 1) * (t - 1)
        return b, b / t
    if N == 9:
        c = t * t * (t - 1)
        return c * (t * t - t + 1), c
    if N == 10:
        c = (2 * t**3 - 3 * t**2 + t) / (t - (t - 1) ** 2)
        return c * t * t / (t - (t - 1) ** 2), c
    if N == 12:
        m = (3 * t - 3 * t * t - 1) / (t - 1)
        f = m / (1 - t)
        d = m + t
        c = f * (d - 1)
        return c * d, c
    raise ValueError(f"no Kubert parametrization for N = {N}")


def rational_torsion_point(N: int, t=Fraction(3, 7)) -> FamilyPoint:
    """An exact point of order N (2 <= N <= 12, N != 11) on a curve over Q, certified."""
    t = Fraction(t)
    if N == 2:
        fam = constant_family(-1, 0, "y^2 = x^3 - x")
        P = fam.point(0, 0, 0)
    elif N == 3:
        fam = constant_family(0, 1, "y^2 = x^3 + 1")
        P = fam.point(0, 1, 0)
    else:
        a4, a6, x, y = _tate_normal_form(*_kubert(N, t))
        fam = constant_family(a4, a6, f"Kubert N={N} t={t}")
        P = fam.point(x, y, 0)
    order = fiber_order_upto(P, N)
    if order != N:
        raise ArithmeticError(f"torsion certification failed: order {order} != {N}")
    return P


TORSION_ORDERS = (2, 3, 4, 5, 6, 7, 8, 9, 10, 12)


def torsion_corpus(params=(Fraction(3, 7), Fraction(5, 2))) -> list[FamilyPoint]:
    """Certified points of every order in TORSION_ORDERS, over a few parameters."""
    out = []
    for N in TORSION_ORDERS:
        for t in params if N > 3 else params[:1]:
            P = rational_torsion_point(N, t)
            out.append(P)
    return out


def non_torsion_corpus() -> list[FamilyPoint]:
    """Sections with exact positive function-field height (1/6, 1/3 and 1/2)."""
    lam = Polynomial.lam()
    one = Polynomial([1])
    a = WeierstrassFamily(one, lam * lam, "y^2 = x^3 + x + l^2")
    b = WeierstrassFamily(-(lam * lam), one, "y^2 = x^3 - l^2 x + 1")
    return [bundled_section(), a.section(0, lam), b.section(0, 1)]


def torsion_sections() -> list[FamilyPoint]:
    """Legendre 2-torsion and the 3-torsion section (0, l) of y^2 = x^3 + l^2."""
    lam = Polynomial.lam()
    c = WeierstrassFamily(Polynomial(), lam * lam, "y^2 = x^3 + l^2")
    return [*legendre_two_torsion(), c.section(0, lam)]
