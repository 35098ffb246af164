import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from steinlab.errors import DegreeTooLarge, InputError, NonUnitConstantTerm
from steinlab.intcore import IntMatrix, IntPolynomial, char_poly, determinant, is_unimodular
from steinlab.spectra import cyclotomic, is_cyclotomic_product
from steinlab.szenum import (SZ_MAX_DEGREE, companion_matrix, enumerate_bounded_house,
                             is_reciprocal, sz_margin, voutier_lower_bound, x_d_minus_2_bound)

from .oracles import box_houses, brute_margin


def collect(d, a, **kw):
    out = []
    n = enumerate_bounded_house(d, a, out.append, **kw)
    assert n == len(out)
    return out


def test_degree_one():
    recs = collect(1, 1.5)
    assert [str(r.poly) for r in recs] == ["x - 1", "x", "x + 1"]


def test_degree_two_contains_x2_minus_2():
    recs = collect(2, math.sqrt(2) * (1 + 1e-12))
    assert "x^2 - 2" in {str(r.poly) for r in recs}


def test_degree_two_small_ceiling_all_cyclotomic():
    for r in collect(2, 1.2):
        if r.flagged:
            continue
        _, Q = r.poly.strip_x()
        assert Q.degree == 0 or r.is_cyclotomic_product


@pytest.mark.parametrize("d,a", [(2, 1.2), (2, 1.5), (2, 2.0), (3, 1.2), (3, 1.3), (3, 1.6)])
def test_complete_against_brute_force(d, a):
    grid, house = box_houses(d, a)
    got = {tuple(reversed(r.poly.coeffs[:-1])) for r in collect(d, a)}
    # float houses of repeated roots are off by up to ~eps^(1/3), hence the slack
    must = {tuple(int(x) for x in g) for g, h in zip(grid, house) if h <= a - 1e-4}
    may = {tuple(int(x) for x in g) for g, h in zip(grid, house) if h <= a + 1e-4}
    assert must <= got <= may


def test_records_consistent():
    for r in collect(3, 1.4):
        assert r.house[0] <= r.house[1]
        if r.is_cyclotomic_product:
            assert r.house == (1.0, 1.0)
        assert r.is_reciprocal == is_reciprocal(r.poly)


def test_monotone_ceiling():
    counts = [len(collect(3, a)) for a in (1.0, 1.1, 1.2, 1.3, 1.5)]
    assert counts == sorted(counts)


def test_shard_independence_and_order():
    base = collect(4, 1.2)
    for shards in (2, 3, 7):
        assert [r.poly for r in collect(4, 1.2, shards=shards)] == [r.poly for r in base]
    keys = [tuple(reversed(r.poly.coeffs[:-1])) for r in base]
    assert keys == sorted(keys)


def test_parallel_workers_deterministic():
    a = sz_margin(4, shards=4, workers=2)
    b = sz_margin(4, shards=1, workers=1)
    assert (a.count, a.argmin, a.mu_prime) == (b.count, b.argmin, b.mu_prime)


def test_checkpoint_resume(tmp_path):
    full = sz_margin(4, shards=3, checkpoint_dir=str(tmp_path))
    files = sorted(tmp_path.glob("shard_*.json"))
    assert len(files) == 3
    # resuming from completed checkpoints redoes nothing and gives the same answer
    again = sz_margin(4, shards=3, checkpoint_dir=str(tmp_path))
    assert (again.count, again.argmin, again.nodes) == (full.count, full.argmin, full.nodes)
    # a checkpoint truncated mid-shard resumes to the same result
    import json
    state = json.loads(files[1].read_text())
    state["last_prefix"] = None
    state["records"], state["nodes"], state["leaves"] = [], 0, 0
    files[1].write_text(json.dumps(state))
    resumed = sz_margin(4, shards=3, checkpoint_dir=str(tmp_path))
    assert (resumed.count, resumed.argmin, resumed.nodes) == (full.count, full.argmin, full.nodes)


def test_margin_d2():
    r = sz_margin(2)
    assert str(r.argmin) == "x^2 - 2"
    assert r.mu_prime[0] <= math.sqrt(2) - 1 <= r.mu_prime[1]
    assert r.mu_prime[1] - r.mu_prime[0] <= 1e-9


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_margin_matches_brute_force(d):
    r = sz_margin(d)
    val, _ = brute_margin(d)
    assert abs(r.mu_prime[0] - val) < 1e-7
    assert not is_cyclotomic_product(r.argmin.strip_x()[1])


@pytest.mark.parametrize("d", range(1, 7))
def test_margin_between_known_bounds(d):
    r = sz_margin(d)
    assert r.mu_prime[0] <= x_d_minus_2_bound(d) + 1e-12
    if d >= 3:
        assert r.mu_prime[1] >= voutier_lower_bound(d)


def test_margin_errors():
    with pytest.raises(DegreeTooLarge):
        sz_margin(SZ_MAX_DEGREE + 1)
    with pytest.raises(DegreeTooLarge):
        sz_margin(0)
    with pytest.raises(InputError):
        voutier_lower_bound(2)


def test_companion_examples():
    assert companion_matrix(IntPolynomial((-1, 1))) == IntMatrix(((1,),))
    C = companion_matrix(IntPolynomial((1, -3, 1)))
    assert C == IntMatrix(((0, -1), (1, 3)))
    assert determinant(C) == 1
    with pytest.raises(NonUnitConstantTerm):
        companion_matrix(IntPolynomial((-2, 0, 1)))


@st.composite
def reciprocal_polys(draw):
    d = draw(st.integers(1, 6))
    half = draw(st.lists(st.integers(-4, 4), min_size=(d + 1) // 2 - 1, max_size=(d + 1) // 2 - 1))
    mid = [draw(st.integers(-4, 4))] if d % 2 == 0 else []
    low = [1] + half
    return IntPolynomial(tuple(low + mid + list(reversed(low))))


@given(reciprocal_polys())
def test_companion_round_trip(P):
    assert is_reciprocal(P)
    C = companion_matrix(P)
    assert is_unimodular(C)
    assert char_poly(C) == P


def test_is_reciprocal_examples():
    assert is_reciprocal(IntPolynomial((1, -3, 1)))
    assert not is_reciprocal(IntPolynomial((-2, 0, 1)))
    assert is_reciprocal(IntPolynomial((-1, 1)))  # anti-palindromic
    for n in range(3, 21):
        assert is_reciprocal(cyclotomic(n))
