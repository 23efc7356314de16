import cmath
import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from heightlab.arithmetic import ComplexBall
from heightlab.betti import (
    BettiPoint,
    ContinuationError,
    PeriodFrame,
    agm,
    betti_jacobian,
    betti_lift,
    betti_map,
    betti_transition,
    carlson_rf,
    circle_loop,
    degeneracy_rank,
    distance_to_lattice,
    elliptic_log,
    elliptic_log_mp,
    fiber_arc,
    frame_transition,
    keyhole_loop,
    lattice_basis,
    monodromy,
    periods,
    section_curve,
    torus_distance,
    transversality_delta0,
)
from heightlab.corpus import (
    bundled_section,
    constant_family,
    legendre_four_torsion,
    legendre_two_torsion,
    torsion_corpus,
)
from heightlab.family import FamilyPoint, WeierstrassFamily, multiply, specialize, specialize_complex

LEG = WeierstrassFamily.legendre()


def random_point(family, lam, rng):
    a4, a6 = (complex(a) for a in family.fiber_coefficients(lam))
    x = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
    return FamilyPoint(x, cmath.sqrt(x**3 + a4 * x + a6), family, fiber=lam)


def lattice_gap(u, v):
    return distance_to_lattice([u, v])


def test_agm_and_rf_against_mpmath():
    assert complex(agm(1, 2)) == pytest.approx(complex(mpmath.agm(1, 2)), rel=1e-14)
    for args in [(1, 2, 3), (0.5 + 1j, 2 - 0.3j, 1.7)]:
        assert complex(carlson_rf(*args)) == pytest.approx(complex(mpmath.elliprf(*args)), rel=1e-13)
    with pytest.raises(ZeroDivisionError):
        carlson_rf(0, 0, 0)


def test_lattice_basis_upper_half_plane():
    for lam in (0.3, 0.5 + 0.5j, -2 + 1j, 4.0):
        a4, a6 = LEG.fiber_coefficients(lam)
        w1, w2 = lattice_basis(complex(a4), complex(a6))
        assert (complex(w2) / complex(w1)).imag > 0


def test_lemniscatic_symmetry():
    fr = PeriodFrame(LEG, 0.5, 0.3, anchor=0.5)
    w1, w2 = periods(LEG, 0.5, fr)
    assert abs(complex(w2.center) / complex(w1.center) - 1j) < 1e-8
    with pytest.raises(ValueError):
        periods(LEG, 0.9, fr)


def test_frame_rejects_singular_disc():
    with pytest.raises(ValueError, match="singular value"):
        PeriodFrame(LEG, 0.8, 0.3, anchor=0.8)


def test_too_close_to_discriminant():
    fr = PeriodFrame(LEG, 0.5, 0.5 - 1e-12, anchor=0.5)
    with pytest.raises(ContinuationError, match="too close to discriminant locus"):
        fr.omega(1 - 1e-11)


def test_periods_continuous_and_conjugate():
    fr = PeriodFrame(LEG, 0.5, 0.3, anchor=0.5)
    h = 1e-4
    for lam in (0.4 + 0.1j, 0.6 - 0.2j, 0.35):
        a = fr.omega_complex(lam)
        b = fr.omega_complex(lam + h)
        assert max(abs(x - y) for x, y in zip(a, b)) < 100 * h
        c = fr.omega_complex(complex(lam).conjugate())
        # reflection reverses orientation: (w1, w2) -> (conj w1, -conj w2)
        assert abs(c[0] - a[0].conjugate()) < 1e-10
        assert abs(c[1] + a[1].conjugate()) < 1e-10


def test_elliptic_log_basics():
    rng = random.Random(2)
    lam = 0.3 + 0.4j
    fr = PeriodFrame(LEG, lam, 0.2, anchor=lam)
    assert complex(elliptic_log(LEG.zero(lam)).center) == 0
    basis = fr.omega_complex(lam)
    for _ in range(20):
        P = random_point(LEG, lam, rng)
        (u, v), _ = betti_lift(P, fr)
        (un, vn), _ = betti_lift(-P, fr)
        assert lattice_gap(u + un, v + vn) < 1e-10
        (u2, v2), _ = betti_lift(P + P, fr)
        assert lattice_gap(2 * u - u2, 2 * v - v2) < 1e-10
        z_mp = complex(elliptic_log_mp(P))
        z = complex(elliptic_log(P).center)
        # same branch in both precisions
        assert abs(z - z_mp) < 1e-10 * max(1, abs(z))
    assert basis


def test_elliptic_log_near_origin():
    x, y = 10**160, 10**240 + 1
    # y^2 = x^3 + a6 with a6 chosen to pass through (x, y)
    E = constant_family(0, y * y - x**3)
    P = E.point(x, y, 0)
    with pytest.raises(ArithmeticError, match="insufficient precision"):
        elliptic_log(P)


def test_betti_point_type():
    b = BettiPoint((1.25, -0.25), 0.1)
    assert b.coords == (0.25, 0.75)
    assert (b + BettiPoint((0.75, 0.25))).coords == (0.0, 0.0)
    assert b.distance((0.3, 0.7)) == pytest.approx(0.05)
    with pytest.raises(ValueError):
        BettiPoint((0, 0), 0.5)
    assert torus_distance(0.95, 0.05) == pytest.approx(0.1)


def test_betti_zero_and_two_torsion():
    lam = Fraction(1, 3)
    fr = PeriodFrame(LEG, complex(lam), 0.2, anchor=complex(lam))
    assert betti_map(LEG.zero(lam), fr).coords == (0.0, 0.0)
    for T in legendre_two_torsion():
        b = betti_map(specialize(T, lam), fr)
        assert distance_to_lattice(b.coords, 2) < 1e-10
        assert distance_to_lattice(b.coords, 1) > 0.4


def test_fiberwise_homomorphism():
    rng = random.Random(7)
    fibers = [complex(rng.uniform(-1, 2), rng.uniform(0.2, 1.5)) for _ in range(10)]
    for lam in fibers:
        r = 0.5 * LEG.distance_to_singular(lam)
        fr = PeriodFrame(LEG, lam, r, anchor=lam)
        for _ in range(20):
            P, Q = random_point(LEG, lam, rng), random_point(LEG, lam, rng)
            bp, bq, bs = betti_map(P, fr), betti_map(Q, fr), betti_map(P + Q, fr)
            gap = distance_to_lattice([s - p - q for s, p, q in zip(bs.coords, bp.coords, bq.coords)])
            assert gap <= max(3 * (bp.error + bq.error + bs.error), 1e-12)


def test_torsion_placement():
    pts = list(torsion_corpus()) + [legendre_four_torsion(s) for s in (Fraction(1, 2), Fraction(-1, 3))]
    seen = set()
    for P in pts:
        N = next(n for n in range(1, 13) if multiply(n, P).is_zero)
        seen.add(N)
        lam = complex(P.fiber)
        fr = PeriodFrame(P.family, lam, 0.1, anchor=lam)
        b = betti_map(P, fr)
        assert distance_to_lattice(b.coords, N) < 1e-8
        if N > 1:
            assert distance_to_lattice(b.coords, N // min(p for p in range(2, N + 1) if N % p == 0)) > 1e-3
    assert seen >= {2, 3, 4, 5, 6, 7, 8, 9, 10, 12}


def test_monodromy_legendre():
    base = 0.5 - 1j
    A0 = monodromy(LEG, keyhole_loop(base, 0, 0.3))
    A1 = monodromy(LEG, keyhole_loop(base, 1, 0.3))
    I = np.eye(2, dtype=np.int64)
    for A in (A0, A1):
        assert A.residual < 1e-4 and abs(A.det) == 1 and A.trace == 2
        assert not np.any((A.as_array() - I) @ (A.as_array() - I))
        assert not np.array_equal(A.as_array(), I)
    # a loop around both finite points is the inverse of the loop around infinity;
    # with the common basepoint the product relation reads big = A1 A0
    big = monodromy(LEG, keyhole_loop(base, 0.5, 2))
    assert np.array_equal(big.as_array(), A1.as_array() @ A0.as_array())
    assert big.trace == -2


def test_monodromy_inverse_and_trivial():
    base = 0.5 - 1j
    loop = keyhole_loop(base, 0, 0.3)
    A = monodromy(LEG, loop).as_array()
    B = monodromy(LEG, list(reversed(loop))).as_array()
    assert np.array_equal(A @ B, np.eye(2, dtype=np.int64))
    assert monodromy(LEG, keyhole_loop(base, 3, 0.3)).entries == ((1, 0), (0, 1))
    assert monodromy(LEG, circle_loop(2 + 1j, 0.5)).entries == ((1, 0), (0, 1))


def test_monodromy_refine_error():
    through_zero = [-1 - 1j, 1 + 1j, 1 - 1j]
    with pytest.raises(ContinuationError):
        monodromy(LEG, through_zero)
    loop = keyhole_loop(0.5 - 1j, 1, 0.3)
    res = monodromy(LEG, loop).residual
    assert res < 1e-4
    with pytest.raises(ContinuationError, match="refine loop subdivision"):
        monodromy(LEG, loop, max_residual=res / 2 if res else 0.0)


def test_frame_ambiguity():
    rng = random.Random(4)
    c = 0.5 + 0.4j
    fa = PeriodFrame(LEG, c, 0.3, anchor=c)
    fb = PeriodFrame(LEG, c, 0.3, anchor=-1 + 0.5j, path=(-1 + 2j, 1 + 2j))
    mats = set()
    for _ in range(50):
        lam = c + 0.28 * math.sqrt(rng.random()) * cmath.exp(2j * math.pi * rng.random())
        M, res = frame_transition(fa, fb, lam)
        assert res < 1e-6
        mats.add(M)
        alpha = np.array(betti_transition(M))
        P = random_point(LEG, lam, rng)
        ba, bb = betti_map(P, fa), betti_map(P, fb)
        assert distance_to_lattice(alpha @ np.array(ba.coords) - np.array(bb.coords)) < 1e-9
    assert len(mats) == 1
    (M,) = mats
    assert M != ((1, 0), (0, 1))


def test_betti_transition_rejects():
    with pytest.raises(ValueError):
        betti_transition(((2, 0), (0, 1)))
    assert betti_transition(((1, 0), (0, 1))) == ((1, 0), (0, 1))


def test_degeneracy_ranks():
    P = bundled_section()
    lam = 0.5 + 0.2j
    fr = PeriodFrame(P.family, lam, 0.3, anchor=lam)
    assert degeneracy_rank(P, lam, fr) == 2
    assert degeneracy_rank(P, 0.45 + 0.1j, fr) == 2
    frl = PeriodFrame(LEG, lam, 0.3, anchor=lam)
    for T in legendre_two_torsion():
        assert degeneracy_rank(T, lam, frl) == 0
    E = constant_family(-1, 1)
    fe = PeriodFrame(E, lam, 0.3, anchor=lam)
    assert degeneracy_rank(E.section(1, 1), lam, fe) == 0
    with pytest.raises(ValueError, match="leaves the frame disc"):
        betti_jacobian(P, lam + 0.3, fr)


def test_delta0():
    P = bundled_section()
    lam = 0.5 + 0.2j
    fr = PeriodFrame(P.family, lam, 0.3, anchor=lam)
    c1 = section_curve(P, lam)
    arc = fiber_arc(specialize_complex(P, lam))
    d = transversality_delta0(c1, arc, (0.0, 0.0), fr)
    assert d > 1e-3
    assert transversality_delta0(c1, c1, (0.0, 0.0), fr) < 1e-6
    # reparametrizing c1 by t -> 2t scales the determinant by 2
    c2 = section_curve(P, lam, 2)
    assert transversality_delta0(c2, arc, (0.0, 0.0), fr) == pytest.approx(2 * d, rel=1e-4)
    with pytest.raises(ValueError, match="do not meet"):
        transversality_delta0(c1, arc, (0.05, 0.0), fr)


def test_betti_needs_fiber_point():
    fr = PeriodFrame(LEG, 0.5, 0.3, anchor=0.5)
    with pytest.raises(ValueError):
        betti_map(legendre_two_torsion()[0], fr)
    assert isinstance(elliptic_log(LEG.zero(0.5)), ComplexBall)
