"""Canonical heights by Tate's limit process.

Normalization: hhat(P) = (1/2) lim h(x([2^n]P)) / 4^n, the canonical height
attached to 2(O).  Over Q the doubling runs on coprime integer pairs (X : Z);
over K = Q(lambda) on coprime polynomial pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import gmpy2
from gmpy2 import mpz

from .arithmetic import Polynomial, as_rational, poly_gcd
from .family import FamilyPoint, WeierstrassFamily, specialize
from .heights import base_height, naive_total_height


class ConvergenceError(ArithmeticError):
    def __init__(self, message: str, diagnostics: dict):
        super().__init__(f"{message}: {diagnostics}")
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class TateLimitResult:
    value: float
    iterations: int
    tail_bound: float
    estimates: tuple = field(default_factory=tuple)


@dataclass(frozen=True)
class FunctionFieldHeightResult:
    value: object  # Fraction when exact, float otherwise
    iterations: int
    exact: bool
    degrees: tuple = ()
    tail_bound: float = 0.0


def _log_big(n) -> float:
    """Natural log of a (possibly huge) positive integer."""
    n = mpz(n)
    bits = n.bit_length()
    if bits < 1000:
        return math.log(int(n))
    shift = bits - 64
    return math.log(int(n >> shift)) + shift * math.log(2.0)


class _IntegerDoubler:
    """x-only doubling on coprime integer pairs for y^2 = x^3 + (p4/q) x + (p6/q).

    gcd(F, G) divides Res(F, G) = 256 q^8 (4 p4^3 + 27 p6^2 q)^2 whenever
    gcd(X, Z) = 1, so the common factor is read off modulo that small
    constant instead of running a gcd on the full-size values.
    """

    def __init__(self, a4: Fraction, a6: Fraction):
        q = math.lcm(a4.denominator, a6.denominator)
        self.q = mpz(q)
        self.p4 = mpz(int(a4 * q))
        self.p6 = mpz(int(a6 * q))
        res = 256 * self.q**10 * (4 * self.p4**3 + 27 * self.p6**2 * self.q) ** 2
        if res == 0:
            raise ValueError("singular fiber")
        self.res = res

    def double(self, X: mpz, Z: mpz) -> tuple[mpz, mpz]:
        q, p4, p6 = self.q, self.p4, self.p6
        X2, Z2 = X * X, Z * Z
        XZ = X * Z
        F = q * q * X2 * X2 - 2 * p4 * q * X2 * Z2 - 8 * p6 * q * XZ * Z2 + p4 * p4 * Z2 * Z2
        G = 4 * q * Z * (q * X2 * X + p4 * XZ * Z + p6 * Z2 * Z)
        if G == 0:
            return mpz(1), mpz(0)
        g = gmpy2.gcd(self.res, gmpy2.gcd(F % self.res, G % self.res))
        if G < 0:
            g = -g
        return F // g, G // g


def _x_height(X: mpz, Z: mpz) -> float:
    return _log_big(max(abs(X), abs(Z)))


def tate_sequence(x: Fraction, a4: Fraction, a6: Fraction, n: int) -> list[tuple[int, float]]:
    """[(bits, h(x([2^k]P)))] for k = 0..n; h = 0 once the point is O."""
    d = _IntegerDoubler(a4, a6)
    X, Z = mpz(x.numerator), mpz(x.denominator)
    out = [(max(X.bit_length(), Z.bit_length()), _x_height(X, Z))]
    for _ in range(n):
        if Z == 0:
            out.append((0, 0.0))
            continue
        X, Z = d.double(X, Z)
        out.append((max(X.bit_length(), Z.bit_length()), 0.0 if Z == 0 else _x_height(X, Z)))
    return out


def tail_estimate(estimates: Sequence[float]) -> float:
    """Tail bound for the last estimate of a Tate sequence.

    e_k - hhat = c_k / (2 4^k) with c_k bounded.  The bound on |c_k| is read
    off the run itself, c_k ~ 2 4^k (e_k - e_n) for k < n, doubled for safety,
    and combined with the last-difference rule |e_n - e_(n-1)| / 3.
    """
    n = len(estimates) - 1
    if n < 1:
        return float("inf")
    last = estimates[-1]
    c_max = max(2 * 4**k * abs(estimates[k] - last) for k in range(n))
    return max(abs(last - estimates[-2]) / 3, c_max / 4**n)


def canonical_height_q(
    P: FamilyPoint,
    tol: float = 1e-8,
    max_iterations: int = 30,
    bit_budget: int = 1 << 28,
) -> TateLimitResult:
    """Fiberwise hhat(P) with tail_bound <= tol.

    Successive estimates e_n = h(x([2^n]P)) / (2 4^n) converge with error
    O(4^-n).  The tail bound is `tail_estimate`.  Decay guard: the scaled
    differences 4^n |e_n - e_(n-1)| must stay bounded; if one more than
    doubles the running maximum two steps in a row the contract is
    considered broken and the run stops with diagnostics.
    """
    if P.is_zero:
        return TateLimitResult(0.0, 0, 0.0, (0.0,))
    if P.fiber is None or not P.is_exact:
        raise ValueError("canonical_height_q expects a point on a rational fiber")
    if tol <= 0:
        raise ValueError("tol must be positive")
    a4, a6 = P.family.fiber_coefficients(P.fiber)
    d = _IntegerDoubler(a4, a6)
    X, Z = mpz(P.x.numerator), mpz(P.x.denominator)
    estimates = [_x_height(X, Z) / 2]
    scaled: list[float] = []
    strikes = 0
    reason = "iteration cap reached"
    for n in range(1, max_iterations + 1):
        if Z != 0:
            X, Z = d.double(X, Z)
        if Z == 0:
            # [2^n]P = O: torsion, the limit is exactly 0
            estimates.append(0.0)
            return TateLimitResult(0.0, n, 0.0, tuple(estimates))
        estimates.append(_x_height(X, Z) / (2 * 4**n))
        s = 4**n * abs(estimates[-1] - estimates[-2])
        if n >= 4 and scaled and s > 2 * max(scaled):
            strikes += 1
            if strikes >= 2:
                reason = "observed decay worse than 1/2 for two steps"
                break
        else:
            strikes = 0
        scaled.append(s)
        if n >= 3:
            tail = tail_estimate(estimates)
            if tail <= tol:
                return TateLimitResult(estimates[-1], n, tail, tuple(estimates))
        if max(X.bit_length(), Z.bit_length()) * 4 > bit_budget:
            reason = "bit budget exhausted"
            break
    raise ConvergenceError(
        "Tate limit did not reach tolerance",
        {
            "reason": reason,
            "iterations": len(estimates) - 1,
            "last_estimates": estimates[-4:],
            "tail": tail_estimate(estimates),
            "tol": tol,
        },
    )


# -- function field ---------------------------------------------------------


def _poly_double(X: Polynomial, Z: Polynomial, a4: Polynomial, a6: Polynomial):
    X2, Z2 = X * X, Z * Z
    XZ = X * Z
    F = X2 * X2 - a4 * X2 * Z2 * 2 - a6 * XZ * Z2 * 8 + a4 * a4 * Z2 * Z2
    G = Z * (X2 * X + a4 * XZ * Z + a6 * Z2 * Z) * 4
    if G.is_zero():
        return Polynomial([1]), Polynomial()
    g = poly_gcd(F, G)
    if g.degree > 0:
        F, G = F.exact_div(g), G.exact_div(g)
    return F, G


def _same_x(a, b) -> bool:
    (X1, Z1), (X2, Z2) = a, b
    if Z1.is_zero() or Z2.is_zero():
        return Z1.is_zero() and Z2.is_zero()
    return X1 * Z2 == X2 * Z1


def canonical_height_k(
    P: FamilyPoint, max_doublings: int = 6, degree_budget: int = 50_000
) -> FunctionFieldHeightResult:
    """Function-field hhat_K(P) = (1/2) lim h_K(x([2^n]P)) / 4^n.

    Exact when the defect h_{n+1} - 4 h_n has stayed at one value c for two
    consecutive steps: then h_n + c/3 is exactly 4-periodic in scale and the
    limit equals (h_n + c/3) / (2 4^n).  A repeated x-coordinate proves P
    torsion and gives 0 exactly.
    """
    if P.fiber is not None:
        raise ValueError("canonical_height_k expects a section")
    if max_doublings > 6:
        raise ValueError("max_doublings must be at most 6 (degrees grow like 4^n)")
    if P.is_zero:
        return FunctionFieldHeightResult(Fraction(0), 0, True, (0,))
    degs: list = [max(P.x.num.degree, P.x.den.degree, 0)]
    fam = P.family
    X, Z = P.x.num, P.x.den
    seen = [(X, Z)]
    for n in range(1, max_doublings + 1):
        X, Z = _poly_double(X, Z, fam.a4, fam.a6)
        if Z.is_zero():
            return FunctionFieldHeightResult(Fraction(0), n, True, tuple(degs) + (0,))
        deg = max(X.degree, Z.degree, 0)
        if deg > degree_budget:
            raise OverflowError("raise budget or lower max_doublings")
        degs.append(deg)
        cur = (X, Z)
        if any(_same_x(cur, s) for s in seen):
            # [2^n]P = +-[2^m]P for some m < n
            return FunctionFieldHeightResult(Fraction(0), n, True, tuple(degs))
        seen.append(cur)
        if n >= 4:
            d = [degs[k + 1] - 4 * degs[k] for k in range(n - 3, n)]
            if d[0] == d[1] == d[2]:
                value = Fraction(degs[n] - degs[n - 1], 6 * 4 ** (n - 1))
                return FunctionFieldHeightResult(value, n, True, tuple(degs))
    n = len(degs) - 1
    est = degs[-1] / (2 * 4**n)
    tail = abs(est - degs[-2] / (2 * 4 ** (n - 1))) / 3 if n >= 1 else float("inf")
    return FunctionFieldHeightResult(est, n, False, tuple(degs), tail)


# -- Silverman-Tate ---------------------------------------------------------


def silverman_tate_constant(
    family: WeierstrassFamily, section: FamilyPoint, samples: Sequence, tol: float = 1e-6
) -> float:
    """max |hhat(P(l)) - h_naive(P(l), l)| / (1 + h_S(l)) over the samples.

    h_naive uses the projective point [x : y : 1] on the fiber and [l : 1] on
    the base; hhat is in the x-normalization.
    """
    if not samples:
        raise ValueError("empty sample set")
    worst = 0.0
    for lam in samples:
        lam = as_rational(lam)
        Q = specialize(section, lam)
        hb = base_height(lam, family)
        if Q.is_zero:
            hn = naive_total_height([0, 1, 0], [lam, 1])
            nt = 0.0
        else:
            hn = naive_total_height([Q.x, Q.y, 1], [lam, 1])
            nt = canonical_height_q(Q, tol).value
        worst = max(worst, abs(nt - hn) / (1 + hb))
    return worst
