"""Weierstrass families y^2 = x^3 + a4(l) x + a6(l) over the lambda-line.

Points come in two flavours sharing one type: sections, with coordinates in
Q(lambda), and fiber points, with coordinates in Q (or approximate complex
coordinates for the analytic side) on a fixed fiber lambda = lambda0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Union

from .arithmetic import AlgebraicNumber, Polynomial, RationalFunction, as_rational
from .arithmetic.algebraic import integer_roots

Scalar = Union[Fraction, complex]


def _squarefree_factors(p: Polynomial) -> list[tuple[tuple[int, ...], int]]:
    """Irreducible factors over Q with multiplicities, as primitive integer tuples."""
    import sympy

    z, _ = p.primitive_part()
    lam = sympy.Symbol("l")
    _, factors = sympy.Poly(list(reversed(z)), lam, domain="ZZ").factor_list()
    out = []
    for f, mult in factors:
        coeffs = tuple(int(c) for c in reversed(f.all_coeffs()))
        if coeffs[-1] < 0:
            coeffs = tuple(-c for c in coeffs)
        out.append((coeffs, mult))
    return out


@dataclass(frozen=True, eq=False)
class WeierstrassFamily:
    """y^2 = x^3 + a4 x + a6 with a4, a6 in Q[lambda]."""

    a4: Polynomial
    a6: Polynomial
    label: str = ""
    singular_values: tuple = field(init=False)
    singular_at_infinity: bool = field(init=False)

    def __post_init__(self):
        a4 = self.a4 if isinstance(self.a4, Polynomial) else Polynomial(self.a4)
        a6 = self.a6 if isinstance(self.a6, Polynomial) else Polynomial(self.a6)
        object.__setattr__(self, "a4", a4)
        object.__setattr__(self, "a6", a6)
        disc = self.discriminant
        if disc.is_zero():
            raise ValueError("discriminant vanishes identically")
        values = []
        if disc.degree > 0:
            for f, _ in _squarefree_factors(disc):
                for r in integer_roots(f):
                    values.append(AlgebraicNumber.root_near(Polynomial(f), r))
        values.sort(key=lambda a: (a.value.real, a.value.imag))
        object.__setattr__(self, "singular_values", tuple(values))
        # weights: the model at infinity in mu = 1/lambda has discriminant mu^(12k) disc(1/mu)
        k = max(-(-max(a4.degree, 0) // 4), -(-max(a6.degree, 0) // 6), 0)
        object.__setattr__(self, "singular_at_infinity", disc.degree < 12 * k)

    @cached_property
    def discriminant(self) -> Polynomial:
        return (self.a4**3 * 4 + self.a6**2 * 27) * (-16)

    @cached_property
    def j_invariant(self) -> RationalFunction:
        num = self.a4**3 * 4
        return RationalFunction(num * 1728, num + self.a6**2 * 27)

    def singular_points(self) -> list[complex]:
        return [a.value for a in self.singular_values]

    def is_singular_value(self, lam) -> bool:
        if isinstance(lam, AlgebraicNumber):
            return lam.is_root_of(self.discriminant)
        if isinstance(lam, (int, Fraction, str)):
            return self.discriminant(as_rational(lam)) == 0
        return any(abs(complex(lam) - s) < 1e-12 for s in self.singular_points())

    def distance_to_singular(self, lam: complex) -> float:
        pts = self.singular_points()
        return min((abs(complex(lam) - s) for s in pts), default=float("inf"))

    def fiber_coefficients(self, lam):
        if isinstance(lam, (int, Fraction)):
            return self.a4(Fraction(lam)), self.a6(Fraction(lam))
        return self.a4.eval_float(lam), self.a6.eval_float(lam)

    # -- constructors / I/O ------------------------------------------------

    @classmethod
    def legendre(cls) -> "WeierstrassFamily":
        """y^2 = x(x-1)(x-l), depressed by x -> x + (1+l)/3."""
        a4 = Polynomial([Fraction(-1, 3), Fraction(1, 3), Fraction(-1, 3)])
        lam = Polynomial.lam()
        a6 = (lam + 1) * (lam * 2 - 1) * (lam - 2) * Fraction(-1, 27)
        return cls(a4, a6, "legendre")

    @staticmethod
    def legendre_shift() -> Polynomial:
        return Polynomial([Fraction(1, 3), Fraction(1, 3)])

    def to_json(self) -> dict:
        return {"label": self.label, "a4": self.a4.to_json(), "a6": self.a6.to_json()}

    @classmethod
    def from_json(cls, data) -> "WeierstrassFamily":
        if isinstance(data, str):
            data = json.loads(data)
        if data.get("legendre"):
            return cls.legendre()
        return cls(Polynomial.from_json(data["a4"]), Polynomial.from_json(data["a6"]), data.get("label", ""))

    def cache_key(self) -> str:
        return json.dumps([self.a4.to_json(), self.a6.to_json()])

    def __eq__(self, other):
        return isinstance(other, WeierstrassFamily) and self.a4 == other.a4 and self.a6 == other.a6

    def __hash__(self):
        return hash((self.a4, self.a6))

    def __repr__(self):
        return f"WeierstrassFamily({self.label or '?'}: a4={self.a4}, a6={self.a6})"

    # -- points ------------------------------------------------------------

    def zero(self, fiber=None) -> "FamilyPoint":
        return FamilyPoint(None, None, self, fiber, is_zero=True)

    def section(self, x, y) -> "FamilyPoint":
        return FamilyPoint(_as_rf(x), _as_rf(y), self)

    def point(self, x, y, fiber) -> "FamilyPoint":
        if isinstance(fiber, (int, Fraction, str)):
            return FamilyPoint(as_rational(x), as_rational(y), self, as_rational(fiber))
        return FamilyPoint(complex(x), complex(y), self, complex(fiber))


def _as_rf(v) -> RationalFunction:
    if isinstance(v, RationalFunction):
        return v
    if isinstance(v, Polynomial):
        return RationalFunction(v)
    return RationalFunction(Polynomial([as_rational(v)]))


@dataclass(frozen=True, eq=False)
class FamilyPoint:
    """A section (fiber is None) or a point on the fiber over `fiber`."""

    x: Optional[object]
    y: Optional[object]
    family: WeierstrassFamily
    fiber: Optional[object] = None
    is_zero: bool = False

    def __post_init__(self):
        if self.is_zero:
            if self.x is not None or self.y is not None:
                raise ValueError("the zero point carries no coordinates")
            return
        self.check_on_curve()

    @classmethod
    def _trusted(cls, x, y, family, fiber=None) -> "FamilyPoint":
        """Skip the curve check for results of the group law (correct by construction)."""
        obj = cls.__new__(cls)
        for k, v in (("x", x), ("y", y), ("family", family), ("fiber", fiber), ("is_zero", False)):
            object.__setattr__(obj, k, v)
        return obj

    def check_on_curve(self) -> None:
        if self.is_zero:
            return
        if self.fiber is None:
            if not isinstance(self.x, RationalFunction) or not isinstance(self.y, RationalFunction):
                raise TypeError("section coordinates must be rational functions")
            # cleared denominators: gcd-free, so cheap even for large multiples
            xn, xd, yn, yd = self.x.num, self.x.den, self.y.num, self.y.den
            xd2 = xd * xd
            rhs = (xn * xn * xn + self.family.a4 * xn * xd2 + self.family.a6 * xd2 * xd) * yd * yd
            if yn * yn * xd2 * xd != rhs:
                raise ValueError("point is not on the curve")
        elif isinstance(self.fiber, Fraction):
            a4, a6 = self.family.fiber_coefficients(self.fiber)
            if self.y * self.y != self.x**3 + a4 * self.x + a6:
                raise ValueError("point is not on the curve")
        else:
            a4, a6 = self.family.fiber_coefficients(self.fiber)
            lhs, rhs = self.y * self.y, self.x**3 + a4 * self.x + a6
            scale = max(1.0, abs(self.x) ** 3, abs(a6))
            if abs(lhs - rhs) > 1e-8 * scale:
                raise ValueError("point is not on the curve")

    @property
    def is_section(self) -> bool:
        return self.fiber is None

    @property
    def is_exact(self) -> bool:
        return self.fiber is None or isinstance(self.fiber, Fraction)

    def __neg__(self) -> "FamilyPoint":
        if self.is_zero:
            return self
        return FamilyPoint._trusted(self.x, -self.y, self.family, self.fiber)

    def __add__(self, other: "FamilyPoint") -> "FamilyPoint":
        return group_add(self, other)

    def __sub__(self, other: "FamilyPoint") -> "FamilyPoint":
        return group_add(self, -other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FamilyPoint):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero and self.fiber == other.fiber
        return self.fiber == other.fiber and self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.is_zero, self.fiber, None if self.is_zero else (self.x, self.y)))

    def __repr__(self) -> str:
        where = "section" if self.fiber is None else f"fiber {self.fiber}"
        if self.is_zero:
            return f"FamilyPoint(O, {where})"
        return f"FamilyPoint(x={self.x}, y={self.y}, {where})"

    def to_json(self) -> dict:
        if self.is_zero:
            return {"zero": True}
        if self.fiber is None:
            return {
                "x": {"num": self.x.num.to_json(), "den": self.x.den.to_json()},
                "y": {"num": self.y.num.to_json(), "den": self.y.den.to_json()},
            }
        return {"x": str(self.x), "y": str(self.y), "fiber": str(self.fiber)}


def section_from_json(family: WeierstrassFamily, data) -> FamilyPoint:
    """{"x": poly | {"num": poly, "den": poly}, "y": ...}; {"zero": true} for O."""
    if data.get("zero"):
        return family.zero()

    def coord(v):
        if isinstance(v, dict):
            return RationalFunction(Polynomial.from_json(v["num"]), Polynomial.from_json(v["den"]))
        return RationalFunction(Polynomial.from_json(v))

    x, y = coord(data["x"]), coord(data["y"])
    if data.get("legendre_coordinates"):
        x = x - family.legendre_shift()
    return family.section(x, y)


# -- group law --------------------------------------------------------------


def _check_context(P: FamilyPoint, Q: FamilyPoint) -> None:
    if P.family != Q.family:
        raise ValueError("points live on different families")
    if P.fiber != Q.fiber:
        raise ValueError("mixed fiber contexts")


def group_add(P: FamilyPoint, Q: FamilyPoint) -> FamilyPoint:
    """Chord-tangent law, exact over Q(lambda) and Q."""
    _check_context(P, Q)
    if P.is_zero:
        return Q
    if Q.is_zero:
        return P
    fam = P.family
    a4 = fam.a4 if P.fiber is None else fam.fiber_coefficients(P.fiber)[0]
    if P.is_exact:
        same_x = P.x == Q.x
    else:
        same_x = abs(P.x - Q.x) <= 1e-12 * max(1.0, abs(P.x))
    if same_x:
        if P.is_exact:
            opposite = P.y == -Q.y
        else:
            opposite = abs(P.y + Q.y) <= 1e-12 * max(1.0, abs(P.y))
        if opposite:
            return fam.zero(P.fiber)
        m = (P.x * P.x * 3 + a4) / (P.y * 2)
    else:
        m = (Q.y - P.y) / (Q.x - P.x)
    x3 = m * m - P.x - Q.x
    y3 = m * (P.x - x3) - P.y
    return FamilyPoint._trusted(x3, y3, fam, P.fiber)


# Jacobian coordinates (X : Y : Z) with x = X/Z^2, y = Y/Z^3.  No inversions,
# so sections stay in Q[lambda] until one final reduction.


def _jac_double(P, a4):
    X, Y, Z = P
    if Y == 0:
        return None
    ZZ = Z * Z
    m = X * X * 3
    if a4 != 0:
        m = m + a4 * ZZ * ZZ
    YY = Y * Y
    s = X * YY * 4
    X3 = m * m - s * 2
    Y3 = m * (s - X3) - YY * YY * 8
    return (X3, Y3, Y * Z * 2)


def _jac_add(P, Q, a4):
    if P is None:
        return Q
    if Q is None:
        return P
    X1, Y1, Z1 = P
    X2, Y2, Z2 = Q
    Z1s, Z2s = Z1 * Z1, Z2 * Z2
    U1, U2 = X1 * Z2s, X2 * Z1s
    S1, S2 = Y1 * Z2 * Z2s, Y2 * Z1 * Z1s
    H = U2 - U1
    R = S2 - S1
    if H == 0:
        return _jac_double(P, a4) if R == 0 else None
    HH = H * H
    HHH = H * HH
    V = U1 * HH
    X3 = R * R - HHH - V * 2
    Y3 = R * (V - X3) - S1 * HHH
    return (X3, Y3, Z1 * Z2 * H)


def _lambda_valuation(p: Polynomial) -> int:
    z = p.integer_form[0]
    return next((i for i, v in enumerate(z) if v), 0)


def _strip_lambda(J):
    """Remove the weighted power of lambda common to (X : Y : Z); cheap, and
    it keeps degrees down when lambda = 0 is a bad fiber."""
    if J is None or not isinstance(J[2], Polynomial):
        return J
    X, Y, Z = J
    k = _lambda_valuation(Z)
    if X != 0:
        k = min(k, _lambda_valuation(X) // 2)
    if Y != 0:
        k = min(k, _lambda_valuation(Y) // 3)
    if k <= 0:
        return J

    def down(p, e):
        z, d = p.integer_form
        return Polynomial._raw(z[e:], d) if z else p

    return (down(X, 2 * k), down(Y, 3 * k), down(Z, k))


def _jac_multiply(n: int, J, a4):
    acc = None
    for bit in bin(n)[2:]:
        if acc is not None:
            acc = _strip_lambda(_jac_double(acc, a4))
        if bit == "1":
            acc = _jac_add(acc, J, a4)
    return acc


def multiply(N: int, P: FamilyPoint) -> FamilyPoint:
    """[N]P by double-and-add."""
    if N < 0:
        return multiply(-N, -P)
    if N == 0 or P.is_zero:
        return P.family.zero(P.fiber)
    if N == 1:
        return P
    fam = P.family
    if P.fiber is None:
        # Jacobian chain over Q[lambda]; Z = den(x) * den(y) clears both denominators
        dx, dy = P.x.den, P.y.den
        Z = dx * dy
        X = P.x.num * dx * dy * dy
        Y = P.y.num * dx * dx * dx * dy * dy
        R = _jac_multiply(N, (X, Y, Z), fam.a4)
        if R is None:
            return fam.zero()
        X, Y, Z = R
        ZZ = Z * Z
        return FamilyPoint._trusted(RationalFunction(X, ZZ), RationalFunction(Y, ZZ * Z), fam)
    if P.is_exact:
        a4 = fam.fiber_coefficients(P.fiber)[0]
        R = _jac_multiply(N, (P.x, P.y, Fraction(1)), a4)
        if R is None:
            return fam.zero(P.fiber)
        X, Y, Z = R
        return FamilyPoint._trusted(X / (Z * Z), Y / (Z * Z * Z), fam, P.fiber)
    acc = fam.zero(P.fiber)
    base = P
    n = N
    while n:
        if n & 1:
            acc = group_add(acc, base)
        n >>= 1
        if n:
            base = group_add(base, base)
    return acc


def double_x(x, a4, a6):
    """x([2]P) = (x^4 - 2 a4 x^2 - 8 a6 x + a4^2) / (4 (x^3 + a4 x + a6))."""
    num = x**4 - a4 * x * x * 2 - a6 * x * 8 + a4 * a4
    return num / ((x**3 + a4 * x + a6) * 4)


# -- specialization and torsion ---------------------------------------------


def specialize(P: FamilyPoint, lambda0) -> FamilyPoint:
    """Fiber point P(lambda0) on E_lambda0."""
    if P.fiber is not None:
        raise ValueError("specialize expects a section")
    fam = P.family
    lam = as_rational(lambda0)
    if fam.is_singular_value(lam):
        raise ValueError("singular fiber: lambda0 is a root of the discriminant")
    if P.is_zero:
        return fam.zero(lam)
    if P.x.den(lam) == 0 or P.y.den(lam) == 0:
        raise ValueError("section undefined here")
    return FamilyPoint(P.x(lam), P.y(lam), fam, lam)


def specialize_complex(P: FamilyPoint, lam: complex) -> FamilyPoint:
    """Floating specialization for the analytic side."""
    if P.is_zero:
        return P.family.zero(complex(lam))
    x, y = P.x.eval_float(lam), P.y.eval_float(lam)
    return FamilyPoint(complex(x), complex(y), P.family, complex(lam))


def _good_specialization(P: FamilyPoint) -> Fraction:
    fam = P.family
    for k in range(2, 400):
        for lam in (Fraction(k), Fraction(-k), Fraction(k, k + 1), Fraction(1, k)):
            if fam.is_singular_value(lam):
                continue
            if P.x.den(lam) == 0 or P.y.den(lam) == 0:
                continue
            return lam
    raise ArithmeticError("no good specialization found")  # excluded: finitely many bad values


def fiber_order_upto(Q: FamilyPoint, Nmax: int) -> Optional[int]:
    """Least n <= Nmax with [n]Q = O for an exact fiber point, by repeated addition."""
    if Q.is_zero:
        return 1
    acc = Q
    for n in range(2, Nmax + 1):
        acc = group_add(acc, Q)
        if acc.is_zero:
            return n
    return None


def torsion_order_upto(P: FamilyPoint, Nmax: int = 64) -> Optional[int]:
    """Least N <= Nmax with [N]P = O over Q(lambda), or None.

    Specialization at a good rational fiber is injective on torsion sections,
    so the order of P(lambda0) is the only candidate; it is then confirmed by
    an exact multiplication over Q(lambda).
    """
    if P.fiber is not None:
        raise ValueError("torsion_order_upto expects a section")
    if P.is_zero:
        return 1
    if P.y.is_zero():
        return 2 if Nmax >= 2 else None
    lam0 = _good_specialization(P)
    m = fiber_order_upto(specialize(P, lam0), Nmax)
    if m is None:
        return None
    if multiply(m, P).is_zero:
        return m
    return None


# -- isotriviality and speciality -------------------------------------------


@dataclass(frozen=True)
class IsotrivialityCertificate:
    j_invariant: RationalFunction
    is_isotrivial: bool
    trace_nontrivial: bool = False


def _multiplicities_divisible(p: Polynomial, k: int) -> bool:
    if p.is_constant():
        return True
    return all(mult % k == 0 for _, mult in _squarefree_factors(p))


def isotriviality(family: WeierstrassFamily) -> IsotrivialityCertificate:
    """j constant?  If so, is the family geometrically constant (nonzero trace)?

    With j constant the family is a twist of one curve E0; it is constant over
    Qbar(lambda) exactly when the twisting cocycle is a constant times the
    appropriate power: a6 = c u^6 when j = 0, a4 = c u^4 when j = 1728, and
    a6/a4 = c u^2 otherwise.
    """
    j = family.j_invariant
    if not j.is_constant():
        return IsotrivialityCertificate(j, False, False)
    if family.a4.is_zero():
        trivial = _multiplicities_divisible(family.a6, 6)
    elif family.a6.is_zero():
        trivial = _multiplicities_divisible(family.a4, 4)
    else:
        ratio = RationalFunction(family.a6, family.a4)
        trivial = _multiplicities_divisible(ratio.num * ratio.den, 2)
    return IsotrivialityCertificate(j, True, trivial)


@dataclass(frozen=True)
class SpecialityCertificate:
    is_special: bool
    torsion_order: Optional[int]
    canonical_height: Optional[object]
    isotriviality: IsotrivialityCertificate

    def __bool__(self) -> bool:
        return self.is_special


def is_generically_special(P: FamilyPoint, bound: int = 64, max_doublings: int = 6) -> SpecialityCertificate:
    """At g = 1 with zero trace, a section is special iff it is torsion."""
    from .canonical import canonical_height_k

    iso = isotriviality(P.family)
    if iso.trace_nontrivial:
        raise ValueError("trace case unsupported")
    order = torsion_order_upto(P, bound)
    if order is not None:
        return SpecialityCertificate(True, order, None, iso)
    res = canonical_height_k(P, max_doublings)
    return SpecialityCertificate(res.exact and res.value == 0, None, res, iso)
