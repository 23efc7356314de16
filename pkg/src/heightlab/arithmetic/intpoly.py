"""Dense univariate polynomials over Z, stored as tuples of ints (ascending degree).

Multiplication goes through Kronecker substitution (pack the coefficients into
one big integer, multiply, unpack), and gcds use the heuristic GCDHEU method of
Char, Geddes and Gonnet with a primitive-remainder-sequence fallback.  Both lean
on GMP through gmpy2; this is what keeps function-field heights of sections
with degree ~10^3 tractable.
"""

from __future__ import annotations

import math
from functools import reduce

import gmpy2
from gmpy2 import mpz

IntPoly = tuple  # tuple[int, ...], no trailing zeros; () is the zero polynomial

_SCHOOLBOOK_CUTOFF = 12


def trim(coeffs) -> IntPoly:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(int(v) for v in c)


def degree(a: IntPoly) -> int:
    return len(a) - 1


def norm_inf(a: IntPoly) -> int:
    return max((abs(v) for v in a), default=0)


def add(a: IntPoly, b: IntPoly) -> IntPoly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, v in enumerate(b):
        out[i] += v
    return trim(out)


def neg(a: IntPoly) -> IntPoly:
    return tuple(-v for v in a)


def sub(a: IntPoly, b: IntPoly) -> IntPoly:
    return add(a, neg(b))


def scale(a: IntPoly, c: int) -> IntPoly:
    if c == 0:
        return ()
    return tuple(v * c for v in a)


def shift(a: IntPoly, k: int) -> IntPoly:
    """Multiply by lambda**k."""
    if not a:
        return ()
    return (0,) * k + a


def content(a: IntPoly) -> int:
    g = mpz(0)
    for v in a:
        g = gmpy2.gcd(g, v)
        if g == 1:
            break
    return int(g)


def primitive(a: IntPoly) -> tuple[int, IntPoly]:
    """Return (content, primitive part) with positive leading coefficient on the part."""
    if not a:
        return 0, ()
    c = content(a)
    if a[-1] < 0:
        c = -c
    if c == 1:
        return 1, a
    return c, tuple(v // c for v in a)


def evaluate(a: IntPoly, x):
    acc = 0
    for v in reversed(a):
        acc = acc * x + v
    return acc


def derivative(a: IntPoly) -> IntPoly:
    return trim(i * v for i, v in enumerate(a) if i)


# --- Kronecker packing -------------------------------------------------------


def _pack(a: IntPoly, bits: int) -> mpz:
    """Value of a at 2**bits; coefficients may be negative or wider than bits."""
    if norm_inf(a).bit_length() < bits:
        pos = [v if v > 0 else 0 for v in a]
        negs = [-v if v < 0 else 0 for v in a]
        return gmpy2.pack(pos, bits) - gmpy2.pack(negs, bits)
    if len(a) <= 4:
        acc = mpz(0)
        for v in reversed(a):
            acc = (acc << bits) + v
        return acc
    mid = len(a) // 2
    return _pack(a[:mid], bits) + (_pack(a[mid:], bits) << (bits * mid))


def _unpack_signed(value: mpz, bits: int, length: int) -> IntPoly:
    """Inverse of _pack when every coefficient lies in [-2**(bits-1), 2**(bits-1))."""
    half = mpz(1) << (bits - 1)
    bias = gmpy2.pack([half] * length, bits)
    digits = gmpy2.unpack(value + bias, bits)
    digits = list(digits) + [mpz(0)] * (length - len(digits))
    if len(digits) > length:
        raise ArithmeticError("Kronecker unpack overflow")
    return trim(d - half for d in digits)


def mul(a: IntPoly, b: IntPoly) -> IntPoly:
    if not a or not b:
        return ()
    if min(len(a), len(b)) <= _SCHOOLBOOK_CUTOFF:
        out = [0] * (len(a) + len(b) - 1)
        for i, u in enumerate(a):
            if u:
                for j, v in enumerate(b):
                    out[i + j] += u * v
        return trim(out)
    bound = norm_inf(a) * norm_inf(b) * min(len(a), len(b))
    bits = bound.bit_length() + 2
    prod = _pack(a, bits) * _pack(b, bits)
    return _unpack_signed(prod, bits, len(a) + len(b) - 1)


def square(a: IntPoly) -> IntPoly:
    return mul(a, a)


def power(a: IntPoly, e: int) -> IntPoly:
    out: IntPoly = (1,)
    base = a
    while e:
        if e & 1:
            out = mul(out, base)
        e >>= 1
        if e:
            base = mul(base, base)
    return out


# --- division ----------------------------------------------------------------


def pseudo_rem(a: IntPoly, b: IntPoly) -> IntPoly:
    """lc(b)**(deg a - deg b + 1) * a mod b, computed over Z."""
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    r = list(a)
    db = len(b) - 1
    lc = b[-1]
    while len(r) - 1 >= db and r:
        k = len(r) - 1 - db
        t = r[-1]
        r = [v * lc for v in r]
        for i, v in enumerate(b):
            r[i + k] -= t * v
        r = list(trim(r))
    return trim(r)


def _mignotte_bits(a: IntPoly) -> int:
    l2 = math.isqrt(sum(v * v for v in a)) + 1
    return l2.bit_length() + len(a) + 2


def divexact(a: IntPoly, b: IntPoly) -> IntPoly | None:
    """Return q with a == b*q over Z, or None when b does not divide a."""
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    if not a:
        return ()
    if len(b) > len(a):
        return None
    if len(b) == 1:
        c = b[0]
        if any(v % c for v in a):
            return None
        return tuple(v // c for v in a)
    if len(b) <= _SCHOOLBOOK_CUTOFF or len(a) - len(b) <= _SCHOOLBOOK_CUTOFF:
        r = list(a)
        lc = b[-1]
        q = [0] * (len(a) - len(b) + 1)
        for k in range(len(q) - 1, -1, -1):
            top = r[k + len(b) - 1]
            if top % lc:
                return None
            t = top // lc
            q[k] = t
            if t:
                for i, v in enumerate(b):
                    r[i + k] -= t * v
        if any(r):
            return None
        return trim(q)
    bits = _mignotte_bits(a) + 2
    qa, rem = gmpy2.f_divmod(_pack(a, bits), _pack(b, bits))
    if rem != 0:
        return None
    q = _unpack_signed(qa, bits, len(a) - len(b) + 1)
    return q if mul(b, q) == a else None


# --- gcd ---------------------------------------------------------------------


def _prs_gcd(a: IntPoly, b: IntPoly) -> IntPoly:
    _, a = primitive(a)
    _, b = primitive(b)
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = pseudo_rem(a, b)
        a, b = b, (primitive(r)[1] if r else ())
    return a


def gcd(a: IntPoly, b: IntPoly) -> IntPoly:
    """Primitive gcd over Z[x] with positive leading coefficient (content ignored)."""
    if not a:
        return primitive(b)[1]
    if not b:
        return primitive(a)[1]
    _, a = primitive(a)
    _, b = primitive(b)
    if len(a) == 1 or len(b) == 1:
        return (1,)
    # common power of lambda handled directly; it keeps the heuristic evaluation honest
    za = next(i for i, v in enumerate(a) if v)
    zb = next(i for i, v in enumerate(b) if v)
    z = min(za, zb)
    if z:
        return shift(gcd(a[za:], b[zb:]), z)
    if za or zb:
        return gcd(a[za:], b[zb:])
    bound = 2 * min(norm_inf(a), norm_inf(b)) + 29
    bits = bound.bit_length() + 1
    for _ in range(6):
        fa = _pack(a, bits)
        fb = _pack(b, bits)
        h = gmpy2.gcd(fa, fb)
        length = h.bit_length() // bits + 2
        cand = _unpack_signed(h, bits, length)
        if cand:
            _, cand = primitive(cand)
            if divexact(a, cand) is not None and divexact(b, cand) is not None:
                return cand
        bits = bits * 2 + 7
    return _prs_gcd(a, b)


def from_fractions(coeffs) -> tuple[IntPoly, int]:
    """Clear denominators: returns (integer poly, positive denominator)."""
    den = 1
    for c in coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    z = trim(int(c * den) for c in coeffs)
    return z, den


def lcm_list(values) -> int:
    return reduce(lambda x, y: x * y // math.gcd(x, y), values, 1)
