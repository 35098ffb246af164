import cmath

import numpy as np
import pytest

from steinlab.analytic.laurent import laurent_coefficient, laurent_coefficients, resolved_band
from steinlab.analytic.series import MonomialSection, build_series_spec, delta_factor, log_omega
from steinlab.errors import AliasingSuspected, InputError
from steinlab.intcore import ComplexPoint, IntMatrix, LatticeVector
from steinlab.steinness import ModulusSpec

FIB = IntMatrix(((1, 1), (1, 0)))


def test_monomial_orthogonality():
    f = lambda w, z: z.coords[0] ** 2 * z.coords[1] ** -1
    band = resolved_band(8, 2)
    g = laurent_coefficients(f, band, 0j, (1.0, 1.0), 8)
    for k, v in zip(band, g):
        assert abs(v - (1 if k == (2, -1) else 0)) < 1e-12


def test_constant_function():
    g = laurent_coefficients(lambda w, z: 1.0, resolved_band(8, 2), 0j, (0.7, 1.4), 8)
    assert abs(g[resolved_band(8, 2).index((0, 0))] - 1) < 1e-12
    assert sum(abs(x) for x in g) - 1 < 1e-10


def test_radius_rescaling():
    f = lambda w, z: 3 * z.coords[0] ** -2
    assert abs(laurent_coefficient(f, (-2, 0), 0j, (0.5, 2.0), 8) - 3) < 1e-12


def test_aliasing_detected():
    f = lambda w, z: z.coords[0] ** 9
    with pytest.raises(AliasingSuspected):
        laurent_coefficient(f, (1, 0), 0j, (1.0, 1.0), 8)


def test_input_checks():
    f = lambda w, z: 1.0
    with pytest.raises(InputError):
        laurent_coefficient(f, (0, 0), 0j, (1.0, 1.0), 12)
    with pytest.raises(InputError):
        laurent_coefficient(f, (5, 0), 0j, (1.0, 1.0), 8)
    with pytest.raises(InputError):
        laurent_coefficient(f, (0, 0), 0j, (1.0, -1.0), 8)


@pytest.fixture(scope="module")
def section():
    return MonomialSection(build_series_spec(FIB, ModulusSpec.finite(10), (1, 0), 0j), 1e-13)


def covector(j):
    return (LatticeVector((1, 0)) @ FIB.pow(j)).entries


def test_coefficients_match_series_terms(section):
    spec = section.spec
    w = 0j
    ks = [covector(j) for j in range(-2, 3)]
    g = laurent_coefficients(section, ks, w, (1.0, 1.0), 16)
    for j, v in zip(range(-2, 3), g):
        expected = cmath.exp(log_omega(w + j, spec) - log_omega(spec.anchor, spec)) * delta_factor(w + j, spec.anchor)
        assert abs(v - expected) < 1e-9


@pytest.mark.parametrize("w", [0.3 + 0.2j, -0.45 - 0.1j])
def test_shift_relation(section, w):
    k = (1, 0)
    for j in range(-2, 3):
        lhs = laurent_coefficient(section, covector(j), w, (1.0, 1.0), 16)
        rhs = laurent_coefficient(section, k, w + j, (1.0, 1.0), 16)
        assert abs(lhs - rhs) < 1e-6
