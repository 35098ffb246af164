"""Hypothesis strategies shared by the property tests."""
from hypothesis import strategies as st

from steinlab.intcore import IntMatrix


def elementary(d, i, j, c):
    rows = [[int(r == s) for s in range(d)] for r in range(d)]
    rows[i][j] += c
    return IntMatrix(tuple(tuple(r) for r in rows))


@st.composite
def unimodular(draw, min_dim=2, max_dim=4, steps=6):
    """Products of elementary shears and a sign flip: always in GL_d(Z)."""
    d = draw(st.integers(min_dim, max_dim))
    M = IntMatrix.identity(d)
    for _ in range(draw(st.integers(1, steps))):
        i = draw(st.integers(0, d - 1))
        j = draw(st.integers(0, d - 1).filter(lambda x: x != i))
        c = draw(st.integers(-2, 2))
        M = M @ elementary(d, i, j, c)
    if draw(st.booleans()):
        rows = [list(r) for r in M.rows]
        rows[0] = [-x for x in rows[0]]
        M = IntMatrix(tuple(tuple(r) for r in rows))
    return M


def int_vectors(d, bound=5):
    return st.lists(st.integers(-bound, bound), min_size=d, max_size=d).map(tuple)
