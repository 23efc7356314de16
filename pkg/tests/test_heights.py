import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heightlab.arithmetic import AlgebraicNumber, Polynomial, RationalFunction
from heightlab.corpus import bundled_family
from heightlab.heights import (
    ProjectivePointK,
    ProjectivePointQ,
    base_height,
    height_algebraic,
    naive_total_height,
    weil_height_k,
    weil_height_q,
)

L = Polynomial.lam()
nonzero_q = st.fractions(min_value=-1000, max_value=1000, max_denominator=1000).filter(lambda q: q != 0)
coords = st.lists(st.fractions(min_value=-1000, max_value=1000, max_denominator=1000), min_size=2, max_size=5).filter(
    lambda c: any(c)
)


def test_weil_q_examples():
    assert weil_height_q([1, 0, 0]) == 0
    assert weil_height_q([2, 3]) == math.log(3)
    assert weil_height_q([Fraction(4, 6), 1]) == math.log(3)
    with pytest.raises(ValueError):
        weil_height_q([0, 0])


def test_height_algebraic_examples():
    assert height_algebraic(AlgebraicNumber.from_rational(2)) == weil_height_q([2, 1])
    phi = AlgebraicNumber.root_near(L**2 - L - 1, 1.6)
    assert height_algebraic(phi) == pytest.approx(0.5 * math.log((1 + math.sqrt(5)) / 2), abs=1e-12)
    zeta = AlgebraicNumber.root_near(L**4 + L**3 + L**2 + L + 1, complex(math.cos(2 * math.pi / 5), math.sin(2 * math.pi / 5)))
    assert height_algebraic(zeta) == pytest.approx(0.0, abs=1e-12)


def test_height_algebraic_companion_matrix_oracle():
    # Mahler measure from companion-matrix eigenvalues (numpy), independent of mpmath roots
    f = [3, -7, 0, 2, 5]  # 5 x^4 + 2 x^3 - 7 x + 3, irreducible
    alpha = AlgebraicNumber.root_near(Polynomial(f), 1)
    C = np.zeros((4, 4))
    C[1:, :-1] = np.eye(3)
    C[:, -1] = [-c / f[-1] for c in f[:-1]]
    eig = np.linalg.eigvals(C)
    expect = (math.log(f[-1]) + sum(math.log(max(1, abs(r))) for r in eig)) / 4
    assert height_algebraic(alpha) == pytest.approx(expect, abs=1e-10)


def test_height_algebraic_reducible():
    with pytest.raises(ValueError):
        AlgebraicNumber(L**2 - 4, None)


def test_weil_k_examples():
    assert weil_height_k([L, 1]) == 1
    assert weil_height_k([L**2 + 1, L]) == 2
    assert weil_height_k([RationalFunction(L, L - 1), 1]) == 1
    with pytest.raises(ValueError):
        weil_height_k([Polynomial(), Polynomial()])


def test_naive_total_examples():
    assert naive_total_height([1, 0, 0], [1, 0]) == 0
    assert naive_total_height([2, 3], [5, 1]) == pytest.approx(math.log(3) + math.log(5))
    assert naive_total_height([1, 1], [7, 2]) == math.log(7)


def test_base_height_examples():
    assert base_height(Fraction(7, 2)) == math.log(7)
    assert base_height(2) == math.log(2)
    phi = AlgebraicNumber.root_near(L**2 - L - 1, 1.6)
    assert base_height(phi) == pytest.approx(0.5 * math.log((1 + math.sqrt(5)) / 2))
    with pytest.raises(ValueError, match="point outside S"):
        base_height(1, bundled_family())


@given(coords, nonzero_q)
def test_scaling_invariance(c, s):
    assert weil_height_q([s * v for v in c]) == weil_height_q(c)


@given(coords)
def test_nonnegative(c):
    assert weil_height_q(c) >= 0


@given(st.integers(-10**6, 10**6), st.integers(1, 10**6))
def test_algebraic_agrees_on_rationals(p, q):
    a = AlgebraicNumber.from_rational(Fraction(p, q))
    assert height_algebraic(a) == weil_height_q([p, q])


def test_segre_additivity():
    rng = random.Random(7)
    for _ in range(50):
        P = [Fraction(rng.randint(-99, 99), rng.randint(1, 30)) for _ in range(3)]
        Q = [Fraction(rng.randint(-99, 99), rng.randint(1, 30)) for _ in range(2)]
        if not any(P) or not any(Q):
            continue
        segre = [a * b for a in P for b in Q]
        assert naive_total_height(P, Q) == pytest.approx(weil_height_q(segre), abs=1e-12)


@given(st.lists(st.integers(-20, 20), min_size=1, max_size=12).filter(lambda c: c[-1] != 0))
def test_weil_k_degree_law(c):
    f = Polynomial(c)
    assert weil_height_k([f, 1]) == f.degree


@given(st.lists(st.integers(-9, 9), min_size=1, max_size=6).filter(any), st.lists(st.integers(-9, 9), min_size=1, max_size=6).filter(any))
def test_weil_k_representative_independent(a, b):
    f, g = Polynomial(a), Polynomial(b)
    base = weil_height_k([f, g])
    assert weil_height_k([RationalFunction(f, L + 3), RationalFunction(g, L + 3)]) == base
    assert weil_height_k([f * (L**2 + 1), g * (L**2 + 1)]) == base


def test_projective_point_types():
    P = ProjectivePointQ([Fraction(1, 2), Fraction(1, 3)])
    assert P.integral() == (3, 2)
    K = ProjectivePointK([RationalFunction(L, L - 1), Polynomial([1])])
    assert [p.degree for p in K.integral()] == [1, 1]
