import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from heightlab.betti import PeriodFrame
from heightlab.corpus import bundled_section, legendre_two_torsion
from heightlab.family import WeierstrassFamily
from heightlab.lattice import (
    BettiGrid,
    CountReport,
    SmoothMap,
    count_lattice_points,
    delta0,
    linear_map,
    psi_eval,
    psi_jacobian,
    torsion_specialization_count,
    volume_growth,
    zero_map,
)

UNIT = [(0.0, 1.0), (0.0, 1.0)]


def brute_count(A, N, N0, offset=(0, 0)):
    """#{q in N0^-1 Z^2 : q = N (A w + offset), w in (0, 1)^2}, exact in Fractions."""
    A = [[Fraction(v) for v in row] for row in A]
    off = [Fraction(v) for v in offset]
    det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
    inv = [[A[1][1] / det, -A[0][1] / det], [-A[1][0] / det, A[0][0] / det]]
    corners = [[N * (A[i][0] * s + A[i][1] * t + off[i]) for i in range(2)] for s in (0, 1) for t in (0, 1)]
    lo = [min(c[i] for c in corners) for i in range(2)]
    hi = [max(c[i] for c in corners) for i in range(2)]
    n = 0
    for a in range(math.floor(lo[0] * N0), math.ceil(hi[0] * N0) + 1):
        for b in range(math.floor(lo[1] * N0), math.ceil(hi[1] * N0) + 1):
            q = [Fraction(a, N0) / N - off[0], Fraction(b, N0) / N - off[1]]
            w = [inv[i][0] * q[0] + inv[i][1] * q[1] for i in range(2)]
            n += all(0 < t < 1 for t in w)
    return n


def test_psi_identities():
    rng = np.random.default_rng(0)
    box1, box2 = [(0, 1)] * 3, [(0, 1)] * 3
    A, B = rng.normal(size=(4, 3)), rng.normal(size=(4, 3))
    phi1, phi2 = linear_map(A, box1), linear_map(B, box2)
    for _ in range(20):
        z = rng.random(4)
        p1, p2 = z[[0, 1, 2]], z[[0, 1, 3]]
        assert np.allclose(psi_eval(phi1, phi2, 0, z), -phi2(p2))
        assert np.allclose(psi_eval(phi1, phi2, 5, z) + phi2(p2), 5 * phi1(p1), atol=1e-12)
        assert np.allclose(psi_eval(phi1, phi2, 4, z) - psi_eval(phi1, phi2, 3, z), phi1(p1), atol=1e-12)
    z = rng.random(2)
    assert np.allclose(psi_eval(linear_map(np.eye(2), UNIT), zero_map(2, UNIT), 1, z), z)
    with pytest.raises(ValueError):
        psi_eval(phi1, phi2, 1, np.ones(3))
    with pytest.raises(ValueError, match="outside the domain"):
        psi_eval(phi1, phi2, 1, np.full(4, 2.0))


def test_delta0_closed_forms():
    eye = linear_map(np.eye(2), UNIT)
    assert delta0(eye, zero_map(2, UNIT), [0.3, 0.4]) == pytest.approx(1.0, abs=1e-10)
    rng = np.random.default_rng(1)
    A = rng.normal(size=(3, 2))
    B = rng.normal(size=(3, 3))
    phi1, phi2 = linear_map(A, UNIT), linear_map(B, [(0, 1)] * 3)
    expect = np.linalg.det(np.column_stack([A, -B[:, 2]]))
    z = rng.random(3)
    assert delta0(phi1, phi2, z) == pytest.approx(expect, abs=1e-10)
    # det D psi_N = N^2 delta0 + lower order; for m2 = 1 the leading power is N^(m0 + m1) = N^2
    Jn = [np.linalg.det(psi_jacobian(phi1, phi2, N, z)) for N in (1e3, 2e3)]
    assert Jn[1] / Jn[0] == pytest.approx(4, rel=1e-2)
    assert Jn[0] / 1e6 == pytest.approx(expect, rel=1e-2)
    # phi2 constant with m2 >= 1 makes the y-column vanish
    assert delta0(phi1, zero_map(3, [(0, 1)] * 3), z) == 0.0
    # finite-difference jacobians agree with the exact ones
    fd1 = SmoothMap(UNIT, lambda p: A @ p)
    fd2 = SmoothMap([(0, 1)] * 3, lambda p: B @ p)
    assert delta0(fd1, fd2, z) == pytest.approx(expect, abs=1e-6)
    with pytest.raises(ValueError, match="square"):
        delta0(linear_map(np.ones((3, 2)), UNIT), zero_map(3, UNIT), [0.5, 0.5])


def test_nan_differencing():
    bad = SmoothMap(UNIT, lambda p: np.array([p[0], np.nan if p[1] > 0.5 else p[1]]), c1_bound=1.0)
    with pytest.raises(ArithmeticError, match="NaN"):
        delta0(bad, zero_map(2, UNIT), [0.5, 0.7])


def test_smooth_map_validation():
    with pytest.raises(ValueError, match="empty"):
        SmoothMap([(1, 0), (0, 1)], lambda p: p)
    with pytest.raises(ValueError, match="m0"):
        SmoothMap([(0, 1)], lambda p: p)
    with pytest.raises(ValueError, match="finite"):
        SmoothMap(UNIT, lambda p: p, c1_bound=float("inf"))
    f = SmoothMap(UNIT, lambda p: 3 * p)
    assert f.c1_bound == pytest.approx(3.0, rel=1e-6)


def test_volume_linear():
    A = np.array([[2.0, 1.0], [0.5, 3.0]])
    phi1, phi2 = linear_map(A, UNIT), zero_map(2, UNIT)
    v = volume_growth(phi1, phi2, UNIT, 1.0, samples=64)
    assert v.value == pytest.approx(abs(np.linalg.det(A)), rel=1e-12) and v.stderr < 1e-12
    assert float(volume_growth(phi1, phi2, UNIT, 2.0, samples=64)) == pytest.approx(4 * v.value)


def test_volume_scaling_with_x_variable():
    box = [(0, 1)] * 3
    A = np.array([[1.0, 0.2, 0.0], [0.0, 1.0, 0.3], [0.1, 0.0, 2.0]])
    phi1, phi2 = linear_map(A, box), zero_map(3, UNIT)
    v1 = volume_growth(phi1, phi2, box, 3.0, samples=32).value
    v2 = volume_growth(phi1, phi2, box, 6.0, samples=32).value
    assert v2 / v1 == pytest.approx(2 ** (2 + 1))


def test_volume_sign_change():
    phi1 = SmoothMap(UNIT, lambda p: np.array([p[0] ** 2 - 0.25, p[1]]), lambda p: np.array([[2 * p[0], 0], [0, 1]]), 2.0)
    with pytest.raises(ValueError, match="shrink U''"):
        volume_growth(phi1, zero_map(2, UNIT), [(-1, 1), (0, 1)], 1.0, samples=200)


@pytest.mark.parametrize("N", [1, 2, 5, 10, 17])
def test_identity_counts(N):
    phi1, phi2 = linear_map(np.eye(2), UNIT), zero_map(2, UNIT)
    rep = count_lattice_points(phi1, phi2, UNIT, N, 1)
    assert rep.count == (N - 1) ** 2 == brute_count(np.eye(2), N, 1)
    rep2 = count_lattice_points(phi1, phi2, UNIT, N, 2)
    assert rep2.count == (2 * N - 1) ** 2 == brute_count(np.eye(2), N, 2)


@pytest.mark.parametrize(
    "A,offset,N,N0",
    [
        ([[1, 1], [0, 1]], (0, 0), 10, 1),
        ([[2, 1], [1, 3]], (0, 0), 7, 1),
        ([[1, -2], [3, 1]], (0.25, 0.5), 6, 2),
        ([[0.5, 0], [0.25, 1.5]], (0.1, -0.3), 9, 3),
    ],
)
def test_linear_counts_match_brute_force(A, offset, N, N0):
    phi1 = linear_map(A, UNIT, offset)
    rep = count_lattice_points(phi1, zero_map(2, UNIT), UNIT, N, N0)
    assert rep.count == brute_count(A, N, N0, offset)
    assert rep.collisions == 0


def test_count_three_dimensional():
    # m1 = 1: psi_N(w, x) = N (w1, w2, w1 + 2 x) on (0, 1)^3
    box = [(0, 1)] * 3
    A = np.array([[1.0, 0, 0], [0, 1, 0], [1, 0, 2]])
    phi1 = linear_map(A, box)
    N = 4
    rep = count_lattice_points(phi1, zero_map(3, UNIT), box, N, 1)
    inv = np.linalg.inv(A)
    brute = 0
    for q in itertools.product(range(0, N + 1), range(0, N + 1), range(0, 3 * N + 1)):
        w = inv @ (np.array(q) / N)
        brute += bool(np.all(w > 1e-12) and np.all(w < 1 - 1e-12))
    assert rep.count == brute


def test_certified_points_recheck():
    A = [[2, 1], [1, 3]]
    phi1, phi2 = linear_map(A, UNIT), zero_map(2, UNIT)
    rep = count_lattice_points(phi1, phi2, UNIT, 7, 1)
    for q, z, res in rep.certified_points:
        assert np.abs(psi_eval(phi1, phi2, 7, np.array(z)) - np.array(q)).max() < rep.tol
        assert res < rep.tol


def test_count_errors():
    phi1, phi2 = linear_map(np.eye(2), UNIT), zero_map(2, UNIT)
    with pytest.raises(ValueError):
        count_lattice_points(phi1, phi2, UNIT, 0)
    with pytest.raises(ValueError, match="delta0 vanishes"):
        count_lattice_points(zero_map(2, UNIT), phi2, UNIT, 3)
    with pytest.raises(ValueError, match="count must equal"):
        CountReport(3, 1, 2, 0.0, [])
    with pytest.raises(ValueError, match="residual"):
        CountReport(3, 1, 1, 0.0, [((0, 0), (0.5, 0.5), 1.0)])


# -- Betti instantiation -----------------------------------------------------

LAM = sp.Symbol("l")


def division_polynomials(a, b, x, y, n):
    """Classical psi_k for y^2 = x^3 + a x + b, with x, y already substituted."""
    psi = {
        0: sp.Integer(0),
        1: sp.Integer(1),
        2: 2 * y,
        3: 3 * x**4 + 6 * a * x**2 + 12 * b * x - a**2,
        4: 4 * y * (x**6 + 5 * a * x**4 + 20 * b * x**3 - 5 * a**2 * x**2 - 4 * a * b * x - 8 * b**2 - a**3),
    }
    for k in range(5, n + 1):
        m = k // 2
        if k % 2:
            psi[k] = sp.expand(psi[m + 2] * psi[m] ** 3 - psi[m - 1] * psi[m + 1] ** 3)
        else:
            psi[k] = sp.cancel(psi[m] / (2 * y) * (psi[m + 2] * psi[m - 1] ** 2 - psi[m - 2] * psi[m + 1] ** 2))
    return psi


@pytest.fixture(scope="module")
def bundled_grid():
    P = bundled_section()
    frame = PeriodFrame(P.family, 0.5, 0.45, anchor=0.5)
    return P, frame, BettiGrid(P, frame, frame.center, frame.radius * (1 - 1e-9), 48)


def test_torsion_specializations_match_division_polynomials(bundled_grid):
    # P = (l, l^2) on y^2 = x^3 + l^4 - l^3: [N] P(l) = O iff psi_N(l) = 0
    P, frame, G = bundled_grid
    psi = division_polynomials(sp.Integer(0), LAM**4 - LAM**3, LAM, LAM**2, 8)
    for N in range(1, 9):
        roots = [] if N == 1 else [complex(z) for z in sp.Poly(sp.sqf_part(psi[N]), LAM).nroots(n=30)]
        inside = [z for z in roots if abs(z - 0.5) < 0.45]
        rep = torsion_specialization_count(P, frame, N, grid=G)
        assert rep.count == len(inside), N
        for _, (re, im), res in rep.certified_points:
            assert min(abs(complex(re, im) - z) for z in inside) < 1e-8
            assert res < rep.tol
    # psi_3 = 3 l^4 (4 l - 3): the only 3-torsion specialization in the disc is l = 3/4
    rep = torsion_specialization_count(P, frame, 3, grid=G)
    assert rep.certified_points[0][1] == pytest.approx((0.75, 0.0), abs=1e-9)


def test_torsion_count_recheck(bundled_grid):
    P, frame, G = bundled_grid
    rep = torsion_specialization_count(P, frame, 12, grid=G)
    for (a, b), (re, im), _ in rep.certified_points:
        val = 12 * G.lift(complex(re, im))
        assert np.abs(val - np.round(val)).max() < 1e-9


def test_torsion_count_refuses_degenerate():
    leg = WeierstrassFamily.legendre()
    frame = PeriodFrame(leg, 0.5 + 0.5j, 0.3, anchor=0.5 + 0.5j)
    with pytest.raises(ValueError, match="Betti image not open"):
        torsion_specialization_count(legendre_two_torsion()[0], frame, 2, grid=16)


def test_torsion_count_argument_checks(bundled_grid):
    P, frame, G = bundled_grid
    with pytest.raises(ValueError):
        torsion_specialization_count(P, frame, 0, grid=G)
    with pytest.raises(ValueError, match="inside the frame disc"):
        torsion_specialization_count(P, frame, 2, disc=(0.5, 0.5), grid=8)
    with pytest.raises(ValueError, match="prebuilt grid"):
        torsion_specialization_count(P, frame, 2, disc=(0.5, 0.2), grid=G)
