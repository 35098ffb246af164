import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from steinlab.errors import DegenerateDegreeZero, DegreeTooLarge, NotUnimodular, ZeroConstantTerm
from steinlab.intcore import IntMatrix, IntPolynomial, char_poly, inverse_unimodular
from steinlab.spectra import (IRREDUCIBILITY_MAX_DEGREE, cyclotomic, enclose_roots,
                              is_cyclotomic_product, is_irreducible, root_radius,
                              spectral_profile)
from steinlab.szenum import companion_matrix

from .strategies import unimodular


def X(*coeffs_high):
    return IntPolynomial(tuple(reversed(coeffs_high)))


def test_root_radius_examples():
    lo, hi = root_radius(X(1, 0, 1), 1e-12)
    assert lo <= 1 <= hi and hi - lo <= 1e-12
    phi = (1 + math.sqrt(5)) / 2
    lo, hi = root_radius(X(1, -1, -1), 1e-12)
    assert lo <= phi <= hi
    assert abs(lo - 1.6180339887) < 1e-10


@pytest.mark.parametrize("d", range(1, 13))
def test_root_radius_x_d_minus_2(d):
    lo, hi = root_radius(IntPolynomial((-2,) + (0,) * (d - 1) + (1,)), 1e-10)
    assert lo <= 2 ** (1 / d) <= hi
    assert hi - lo <= 1e-10


def test_root_radius_degree_zero():
    with pytest.raises(DegenerateDegreeZero):
        root_radius(IntPolynomial((1,)), 1e-9)


def test_enclosures_hold_mp_roots():
    """Each disc must contain a root computed independently by mpmath.polyroots."""
    import mpmath
    rng = random.Random(7)
    for _ in range(20):
        d = rng.randint(2, 7)
        P = IntPolynomial(tuple(rng.randint(-5, 5) for _ in range(d)) + (1,))
        if P.coeffs[0] == 0:
            continue
        with mpmath.workdps(50):
            roots = mpmath.polyroots(list(reversed(P.coeffs)), maxsteps=200, extraprec=200)
        discs = enclose_roots(P, 1e-10)
        for r in roots:
            assert any(abs(complex(r) - D.center) <= D.radius + 1e-15 for D in discs)


def test_cyclotomic_examples():
    assert is_cyclotomic_product(X(1, -2, 1))
    assert not is_cyclotomic_product(X(1, -1, -1))
    assert is_cyclotomic_product(cyclotomic(5))
    assert cyclotomic(5).coeffs == (1, 1, 1, 1, 1)
    assert cyclotomic(12).coeffs == (1, 0, -1, 0, 1)
    with pytest.raises(ZeroConstantTerm):
        is_cyclotomic_product(X(1, 1, 0))


@given(st.lists(st.sampled_from([1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12]), min_size=1, max_size=4))
def test_cyclotomic_products_detected(idx):
    P = IntPolynomial((1,))
    for n in idx:
        P = P * cyclotomic(n)
    assert is_cyclotomic_product(P)
    lo, hi = root_radius(P, 1e-9)
    assert lo <= 1 <= hi


def test_profile_examples(fib, builtin_n):
    p = spectral_profile(IntMatrix.identity(3))
    assert p.exact_one and p.rho == (1.0, 1.0) and p.mu == (0.0, 0.0)
    p = spectral_profile(fib)
    phi = (1 + math.sqrt(5)) / 2
    assert p.rho[0] <= phi <= p.rho[1]
    assert p.mu_plus[0] <= math.log(phi) <= p.mu_plus[1]
    assert p.mu_minus[0] <= math.log(phi) <= p.mu_minus[1]
    p = spectral_profile(builtin_n)
    assert round(p.rho[0], 2) == 6.23
    with pytest.raises(NotUnimodular):
        spectral_profile(IntMatrix(((2, 0), (0, 1))))


@given(unimodular())
def test_profile_against_numpy(M):
    """Float eigenvalues (independent oracle) sit inside the certified enclosure up to rounding."""
    p = spectral_profile(M, 1e-10)
    A = np.array(M.rows, dtype=float)
    ev = np.abs(np.linalg.eigvals(A))
    rho = max(ev.max(), 1 / ev.min())
    # float eigenvalues of a root of multiplicity r are only good to about eps^(1/r)
    slack = 10 * np.finfo(float).eps ** (1 / M.dim) * rho
    assert p.rho[0] >= 1.0 and p.rho[0] <= p.rho[1]
    assert p.rho[0] - slack <= rho <= p.rho[1] + slack
    assert p.exact_one == is_cyclotomic_product(char_poly(M))
    if p.exact_one:
        assert p.rho == (1.0, 1.0)
    else:
        assert p.rho[0] > 1.0
    top = max(p.mu_plus[1], p.mu_minus[1])
    assert p.mu[0] <= top + 1e-15 and max(p.mu_plus[0], p.mu_minus[0]) <= p.mu[1] + 1e-15


@given(unimodular())
def test_profile_inverse_symmetric(M):
    a = spectral_profile(M, 1e-10)
    b = spectral_profile(inverse_unimodular(M), 1e-10)
    assert a.exact_one == b.exact_one
    assert abs(a.rho[0] - b.rho[0]) <= 2e-10 * a.rho[0] and abs(a.rho[1] - b.rho[1]) <= 2e-10 * a.rho[1]


def test_reciprocal_char_poly_same_enclosure():
    M = companion_matrix(X(1, -3, 1))
    a = spectral_profile(M, 1e-12)
    b = spectral_profile(inverse_unimodular(M), 1e-12)
    assert abs(a.rho[0] - b.rho[0]) <= 2e-12 and abs(a.rho[1] - b.rho[1]) <= 2e-12


def test_irreducibility_examples(builtin_n):
    assert not is_irreducible(X(1, 0, -1))
    assert is_irreducible(cyclotomic(5))
    assert is_irreducible(X(1, -1, -1))
    assert is_irreducible(char_poly(builtin_n))
    assert not is_irreducible(cyclotomic(3) * X(1, -1, -1))
    assert not is_irreducible(X(1, 0, -2) * X(1, 0, 0, -3))
    assert is_irreducible(X(1, 0, 0, 0, 0, 0, 0, 0, -2))
    with pytest.raises(DegreeTooLarge):
        is_irreducible(IntPolynomial((1,) + (0,) * IRREDUCIBILITY_MAX_DEGREE + (1,)))


@given(st.lists(st.integers(-3, 3), min_size=2, max_size=3), st.lists(st.integers(-3, 3), min_size=2, max_size=4))
def test_products_are_reducible(a, b):
    P = IntPolynomial(tuple(a) + (1,))
    Q = IntPolynomial(tuple(b) + (1,))
    assert not is_irreducible(P * Q)
