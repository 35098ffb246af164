import math

import pytest
from hypothesis import given, strategies as st

from steinlab.analytic.gaps import gap_set, three_gap_check
from steinlab.errors import InputError
from steinlab.intcore import TorusPoint


def test_root_of_unity():
    q = 7
    gs = gap_set([1 / q], 0.5, 100)
    assert gs.members == tuple(range(0, 101, q))
    assert gs.max_gap == q


def test_torus_point_input():
    import cmath
    gs = gap_set(TorusPoint((cmath.exp(2j * math.pi / 5), 1 + 0j)), 0.5, 40)
    assert gs.members == tuple(range(0, 41, 5))


def test_large_epsilon_everything():
    gs = gap_set([0.123, 0.456, 0.789], 2 * math.sqrt(3), 50)
    assert gs.members == tuple(range(51)) and gs.max_gap == 1


def test_irrational_rotation():
    theta = math.sqrt(2) % 1
    gs = gap_set([theta], 0.1, 10_000)
    assert gs.nonempty and gs.exhaustive
    # brute-force scan as the oracle
    ref = [j for j in range(10_001) if abs(1 - complex(math.cos(2 * math.pi * j * theta),
                                                       math.sin(2 * math.pi * j * theta))) < 0.1]
    assert list(gs.members) == ref
    assert three_gap_check(gs)
    assert gs.max_gap <= 100


def test_invalid():
    with pytest.raises(InputError):
        gap_set([0.1], 0, 10)
    with pytest.raises(InputError):
        gap_set([0.1], 0.1, 0)


@given(st.lists(st.floats(0, 1, exclude_max=True), min_size=1, max_size=3),
       st.floats(0.01, 1), st.floats(0.01, 1), st.integers(1, 500))
def test_monotone_in_epsilon(theta, e1, e2, horizon):
    lo, hi = sorted((e1, e2))
    a, b = gap_set(theta, lo, horizon), gap_set(theta, hi, horizon)
    assert set(a.members) <= set(b.members)
    assert all(0 <= m <= horizon for m in b.members)
    assert 0 in a.members
    if a.max_gap is not None:
        assert all(g <= a.max_gap for g in a.gaps())


@given(st.floats(0.001, 0.999), st.floats(0.05, 1.5), st.integers(50, 2000))
def test_three_gap_property(theta, eps, horizon):
    assert three_gap_check(gap_set([theta], eps, horizon))
