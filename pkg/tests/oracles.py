"""Independent brute-force oracles: no pruning, plain float eigenvalues."""
import itertools
import math

import numpy as np


def coefficient_box(d, a):
    cb = [math.floor(math.comb(d, k) * a ** k * (1 + 1e-12)) for k in range(1, d + 1)]
    return np.array(list(itertools.product(*[range(-b, b + 1) for b in cb])), dtype=np.int64)


def box_houses(d, a):
    """Every ``(c_1..c_d)`` in the coefficient box with the float house of ``x^d + c_1 x^(d-1) + ...``."""
    grid = coefficient_box(d, a)
    C = np.zeros((len(grid), d, d))
    for i in range(1, d):
        C[:, i, i - 1] = 1
    for i in range(d):
        C[:, i, d - 1] = -grid[:, d - 1 - i]
    house = np.abs(np.linalg.eigvals(C)).max(axis=1)
    return grid, house


def brute_margin(d):
    """Smallest house - 1 over the box, skipping houses within 1e-2 of 1 (cyclotomic in floats)."""
    a = 2 ** (1 / d)
    grid, house = box_houses(d, a)
    mask = (house > 1 + 1e-2) & (house <= a * (1 + 1e-9))
    i = int(np.argmin(np.where(mask, house, np.inf)))
    return float(house[i] - 1), tuple(int(x) for x in grid[i])
