import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from heightlab.canonical import (
    ConvergenceError,
    canonical_height_k,
    canonical_height_q,
    silverman_tate_constant,
    tail_estimate,
    tate_sequence,
)
from heightlab.corpus import (
    bundled_family,
    bundled_section,
    constant_family,
    legendre_two_torsion,
    non_torsion_corpus,
    torsion_corpus,
    torsion_sections,
)
from heightlab.family import WeierstrassFamily, multiply, specialize

E = constant_family(-1, 1, "y^2 = x^3 - x + 1")
P11 = E.point(1, 1, 0)

# Frozen from the affine chord-tangent oracle below (n = 11) and the
# integer x-only Tate route; the two agree to 3e-10.
HHAT_P11 = 0.0249041986


def proj_height(coords):
    """log max |integral coordinates| after clearing denominators and gcd."""
    coords = [Fraction(c) for c in coords]
    den = math.lcm(*(c.denominator for c in coords))
    ints = [int(c * den) for c in coords]
    g = math.gcd(*ints)
    return math.log(max(abs(v) for v in ints) // g)


def affine_oracle(x, y, a4, n):
    """h(x([2^n]P)) / (2 4^n) by the textbook tangent law on Fractions."""
    x, y = Fraction(x), Fraction(y)
    for _ in range(n):
        m = (3 * x * x + a4) / (2 * y)
        x3 = m * m - 2 * x
        x, y = x3, m * (x - x3) - y
    return math.log(max(abs(x.numerator), x.denominator)) / (2 * 4**n)


def test_hhat_p11_two_routes():
    oracle = affine_oracle(1, 1, -1, 11)
    assert abs(oracle - HHAT_P11) < 1e-6
    R = canonical_height_q(P11, 1e-8)
    assert R.tail_bound <= 1e-8
    assert abs(R.value - HHAT_P11) < 1e-6
    assert abs(R.value - oracle) < 1e-6


def test_zero_and_torsion():
    assert canonical_height_q(E.zero(Fraction(0))).value == 0.0
    T = specialize(legendre_two_torsion()[0], Fraction(1, 2))
    R = canonical_height_q(T, 1e-6)
    assert R.value == 0.0 and R.tail_bound == 0.0


def test_torsion_corpus_vanishes():
    for P in torsion_corpus():
        assert canonical_height_q(P, 1e-6).value <= 1e-6


def test_argument_errors():
    with pytest.raises(ValueError):
        canonical_height_q(bundled_section(), 1e-6)
    with pytest.raises(ValueError):
        canonical_height_q(P11, 0)


def test_convergence_error_diagnostics():
    with pytest.raises(ConvergenceError) as err:
        canonical_height_q(P11, 1e-30, max_iterations=6)
    diag = err.value.diagnostics
    assert diag["iterations"] == 6 and diag["tol"] == 1e-30
    assert "reason" in diag and len(diag["last_estimates"]) == 4


def test_bit_budget_stops():
    with pytest.raises(ConvergenceError, match="bit budget"):
        canonical_height_q(P11, 1e-30, bit_budget=4096)


@pytest.mark.parametrize("N", [2, 3, 5])
def test_quadraticity(N):
    tol = 1e-7
    h1 = canonical_height_q(P11, tol).value
    hN = canonical_height_q(multiply(N, P11), tol).value
    assert abs(hN - N * N * h1) <= N * N * 1e-6


def test_tate_sequence_matches_oracle():
    seq = tate_sequence(Fraction(1), Fraction(-1), Fraction(1), 6)
    assert len(seq) == 7
    for n, (bits, h) in enumerate(seq):
        assert bits > 0
        assert h / (2 * 4**n) == pytest.approx(affine_oracle(1, 1, -1, n), abs=1e-12)


@given(st.lists(st.floats(-1, 1), min_size=2, max_size=12))
def test_tail_estimate_dominates_last_difference(es):
    assert tail_estimate(es) >= abs(es[-1] - es[-2]) / 3


def test_tail_estimate_single():
    assert tail_estimate([0.3]) == float("inf")


def test_function_field_bundled():
    R = canonical_height_k(bundled_section())
    assert R.exact and R.value == Fraction(1, 6)
    R2 = canonical_height_k(multiply(2, bundled_section()))
    assert R2.exact and R2.value == 4 * R.value


def test_function_field_corpus():
    expect = [Fraction(1, 6), Fraction(1, 3), Fraction(1, 2)]
    for P, v in zip(non_torsion_corpus(), expect):
        R = canonical_height_k(P)
        assert R.exact and R.value == v


def test_function_field_torsion_is_exact_zero():
    for P in torsion_sections():
        R = canonical_height_k(P)
        assert R.exact and R.value == 0
    R = canonical_height_k(bundled_family().zero())
    assert R.exact and R.value == 0


def test_function_field_errors():
    with pytest.raises(ValueError, match="at most 6"):
        canonical_height_k(bundled_section(), max_doublings=7)
    with pytest.raises(OverflowError, match="raise budget or lower max_doublings"):
        canonical_height_k(bundled_section(), degree_budget=20)
    with pytest.raises(ValueError):
        canonical_height_k(P11)


def test_function_field_inexact_estimate():
    R = canonical_height_k(bundled_section(), max_doublings=2)
    assert not R.exact and R.value > 0 and R.tail_bound >= 0


def test_silverman_tate_constant_examples():
    with pytest.raises(ValueError, match="empty"):
        silverman_tate_constant(E, E.section(1, 1), [])
    c = silverman_tate_constant(E, E.section(1, 1), [Fraction(k, 3) for k in range(1, 6)])
    # h(1 : 1 : 1) = 0, so the total naive height is the base height
    hs = [math.log(max(k, 3)) for k in range(1, 6)]
    assert c == pytest.approx(max(abs(HHAT_P11 - h) / (1 + h) for h in hs), abs=1e-6)
    assert c < 1
    rng = random.Random(5)
    leg = WeierstrassFamily.legendre()
    T = legendre_two_torsion()[0]
    lams = set()
    while len(lams) < 50:
        lam = Fraction(rng.randint(-99, 99), rng.randint(1, 99))
        if lam not in (0, 1):
            lams.add(lam)
    c = silverman_tate_constant(leg, T, sorted(lams))
    # hhat = 0, so the statistic is (h(P(l)) + h(l)) / (1 + h(l)), evaluated directly
    ref = 0.0
    for lam in lams:
        Q = specialize(T, lam)
        hl = proj_height([lam, 1])
        ref = max(ref, (proj_height([Q.x, Q.y, 1]) + hl) / (1 + hl))
    assert c == pytest.approx(ref, rel=1e-9)
    assert c < 4


def test_silverman_tate_bundled_bounded():
    P = bundled_section()
    small = silverman_tate_constant(P.family, P, [Fraction(k, 7) for k in range(2, 12) if k != 7])
    large = silverman_tate_constant(P.family, P, [Fraction(2**k + 1) for k in (8, 12, 16)])
    assert 0 <= large <= max(small, 1.0) + 1.0
