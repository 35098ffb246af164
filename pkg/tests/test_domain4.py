import json
from pathlib import Path

import numpy as np
import pytest

from steinlab import domain4 as D
from steinlab.errors import CertificationFailed, SpectrumShapeMismatch
from steinlab.intcore import IntMatrix, integer_rank, inverse_unimodular

GOLDEN = json.loads((Path(__file__).parent / "golden" / "domain4_J.json").read_text())
NEG_CONTROL = (-5, -18, -27, -30)  # u pushed along -v2 until a2 < 0


@pytest.fixture(scope="module")
def frame():
    return D.eigen_frame(D.BUILTIN_N)


@pytest.fixture(scope="module")
def cert(frame):
    return D.find_J(D.BUILTIN_N, D.BUILTIN_U, frame)


def test_frame_values(frame):
    assert abs(frame.alpha1[0] - 6.23) < 0.01 and abs(frame.alpha2[0] - 0.27) < 0.01
    assert abs(frame.omega - complex(-0.25, 0.73)) < 0.01
    assert all(x < 0 for x in frame.v1) and all(x < 0 for x in frame.v2)
    assert max(frame.residuals) < 1e-9


def test_frame_against_numpy(frame):
    ev = np.linalg.eigvals(np.array(D.BUILTIN_N.rows, dtype=float))
    real = sorted(e.real for e in ev if abs(e.imag) < 1e-9)
    assert real[1] == pytest.approx(frame.alpha1[0], rel=1e-12)
    assert real[0] == pytest.approx(frame.alpha2[0], rel=1e-12)
    N = np.array(D.BUILTIN_N.rows, dtype=float)
    v1 = np.array([float(x) for x in frame.v1])
    assert np.linalg.norm(N @ v1 - frame.alpha1[0] * v1) < 1e-12


def test_frame_shape_mismatch():
    with pytest.raises(SpectrumShapeMismatch):
        D.eigen_frame(IntMatrix(((1, 1, 0, 0), (1, 0, 0, 0), (0, 0, 2, 1), (0, 0, 1, 1))))


def test_decomposition(frame):
    s = D.decompose_seed(D.BUILTIN_U, frame)
    assert s.positive and s.a1 > 0 and s.a2 > 0
    assert s.residual < 1e-9
    basis = np.column_stack([np.array([float(x) for x in v]) for v in (frame.v1, frame.v2, frame.w1, frame.w2)])
    rebuilt = basis @ np.array([s.a1, s.a2, s.a_prime, s.a_second])
    assert np.allclose(rebuilt, D.BUILTIN_U, atol=1e-9)


def test_decompose_basis_vector(frame):
    s = D.decompose_seed(tuple(float(x) for x in frame.v1), frame)
    assert np.allclose([s.a1, s.a2, s.a_prime, s.a_second], [1, 0, 0, 0], atol=1e-9)


def test_golden_J(cert):
    assert cert.J == GOLDEN["J"]
    assert cert.bad_indices == ()


def test_J_reproducible_at_double_precision(cert):
    again = D.find_J(D.BUILTIN_N, D.BUILTIN_U, precision=2 * cert.precision)
    assert again.J == cert.J and again.bad_indices == cert.bad_indices


def test_orthant_condition_exact_wide_range(cert):
    """Independent of the tail certificate: exact iteration over the golden range."""
    N = D.BUILTIN_N
    Ni = inverse_unimodular(N)
    R = GOLDEN["exact_range"]
    for A in (N, Ni):
        u = D.BUILTIN_U
        for j in range(R + 1):
            if j >= cert.J - 4:
                assert all(x < 0 for x in u)
            u = A.apply(u)


def test_negative_control_fails_loudly(frame):
    s = D.decompose_seed(NEG_CONTROL, frame)
    assert s.a1 > 0 and s.a2 < 0 and not s.positive
    with pytest.raises(CertificationFailed):
        D.find_J(D.BUILTIN_N, NEG_CONTROL, frame)


def test_polytope(cert):
    N = D.BUILTIN_N
    poly, rep = D.build_polytope(N, D.BUILTIN_U, cert.J, 4, cert)
    assert rep["passed"]
    assert rep["invariance"]["passed"] and rep["negative_orthant"]["passed"]
    assert rep["affine_rank"]["rank_B"] == 4 and rep["affine_rank"]["rank_NJ_B"] == 4
    M = poly.M
    assert M == N.pow(2 * cert.J)
    for idx, v in poly.vertices.items():
        assert all(x < 0 for x in v)
        if idx + 2 * cert.J in poly.vertices:
            assert M.apply(v) == poly.vertices[idx + 2 * cert.J]
    B = [D.iterates(N, D.BUILTIN_U, 0, 4)[k] for k in range(5)]
    assert integer_rank([tuple(b - a for a, b in zip(B[0], x)) for x in B[1:]]) == 4


def test_reinhardt_instance(cert):
    poly, _ = D.build_polytope(D.BUILTIN_N, D.BUILTIN_U, cert.J, 4, cert)
    rep = D.verify_reinhardt_instance(poly, samples=6, seed=3)
    assert rep["bounded"] and rep["rho_gt_1"]
    assert rep["images_checked"] > 0
    assert rep["rho_M"] == pytest.approx(rep["alpha1_pow_2J"], rel=1e-9)
    lo, hi = zip(*rep["bounding_box"])
    assert all(h < 0 for h in hi)


def test_exact_convex_weights():
    from fractions import Fraction
    pts = [(0, 0), (4, 0), (0, 4)]
    w = D.exact_convex_weights(pts, (1, 1))
    assert w is not None and sum(w) == 1 and all(x >= 0 for x in w)
    assert tuple(sum(wi * p[i] for wi, p in zip(w, pts)) for i in range(2)) == (Fraction(1), Fraction(1))
    assert D.exact_convex_weights(pts, (3, 3)) is None
