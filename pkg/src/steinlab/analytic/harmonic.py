"""Harmonic measure of the vertical sides of ``[-a, a] x [-h, h]`` seen from 0.

Second-order five-point Laplacian, boundary value 1 on ``x = +-a`` and 0 on
``y = +-h``.  A sine transform in y decouples the grid into one tridiagonal
system per mode, all solved at once with a vectorized Thomas sweep.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.fft import dst

from ..errors import InputError, NonConvergedSolve


@dataclass(frozen=True)
class HarmonicMeasure:
    alpha: float
    height: float
    grid: int
    omega0: float
    residual: float
    nx: int


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    expected: float
    alphas: tuple[float, ...]
    omegas: tuple[float, ...]

    @property
    def relative_error(self) -> float:
        return abs(self.slope / self.expected - 1)


def _thomas(lower, diag, upper, rhs):
    """Solve many tridiagonal systems; arrays are (n, modes)."""
    n = diag.shape[0]
    c = np.empty_like(diag)
    d = np.empty_like(rhs)
    c[0] = upper[0] / diag[0]
    d[0] = rhs[0] / diag[0]
    for i in range(1, n):
        den = diag[i] - lower[i] * c[i - 1]
        c[i] = upper[i] / den
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / den
    x = np.empty_like(rhs)
    x[-1] = d[-1]
    for i in range(n - 2, -1, -1):
        x[i] = d[i] - c[i] * x[i + 1]
    return x


def rectangle_harmonic_measure(alpha: float, h: float, grid: int = 128,
                               residual_tol: float = 1e-9) -> HarmonicMeasure:
    """``omega(0)`` on ``[-alpha, alpha] x [-h, h]``; ``grid`` intervals across the height."""
    if not (alpha > 0 and h > 0):
        raise InputError("alpha and h must be positive")
    if grid < 64 or grid % 2:
        raise InputError("grid must be an even integer >= 64")
    dy = 2 * h / grid
    nx = max(2, 2 * int(math.ceil(alpha / dy)))
    dx = 2 * alpha / nx
    ny = grid - 1  # interior rows
    kk = np.arange(1, ny + 1)
    # eigenvalues of the 1D Dirichlet second difference in y
    lam = (2 - 2 * np.cos(np.pi * kk / grid)) / dy ** 2
    # the boundary value 1 at x = +-alpha, transformed along y
    ones_hat = dst(np.ones(ny), type=1)
    m = nx - 1  # interior columns
    r = dx ** 2
    diag = np.broadcast_to(-(2 + r * lam), (m, ny)).copy()
    off = np.ones((m, ny))
    rhs = np.zeros((m, ny))
    rhs[0] -= ones_hat
    rhs[-1] -= ones_hat
    sol_hat = _thomas(off, diag, off, rhs)
    u = dst(sol_hat, type=1, axis=1) / (2 * (ny + 1))
    full = np.zeros((nx + 1, grid + 1))
    full[0, 1:-1] = 1.0
    full[-1, 1:-1] = 1.0
    full[1:-1, 1:-1] = u
    lap = ((full[2:, 1:-1] - 2 * full[1:-1, 1:-1] + full[:-2, 1:-1]) / dx ** 2
           + (full[1:-1, 2:] - 2 * full[1:-1, 1:-1] + full[1:-1, :-2]) / dy ** 2)
    residual = float(np.max(np.abs(lap)) * min(dx, dy) ** 2)
    if not residual <= residual_tol:
        raise NonConvergedSolve(f"five-point residual {residual:.3g} exceeds {residual_tol:.3g}")
    omega0 = float(full[nx // 2, grid // 2])
    return HarmonicMeasure(alpha, h, grid, omega0, residual, nx)


def fit_decay_rate(h: float, alphas: Sequence[float] = (2, 2.5, 3, 3.5, 4, 4.5, 5, 5.5, 6),
                   grid: int = 128) -> DecayFit:
    """Least-squares slope of ``log omega(0)`` against alpha; expected ``-pi/(2h)``."""
    om = [rectangle_harmonic_measure(a, h, grid).omega0 for a in alphas]
    slope, intercept = np.polyfit(np.asarray(alphas, dtype=float), np.log(om), 1)
    return DecayFit(float(slope), float(intercept), -math.pi / (2 * h), tuple(alphas), tuple(om))


def series_omega0(alpha: float, h: float, terms: int = 200) -> float:
    """Separation-of-variables value of the continuous problem, for comparison."""
    s = 0.0
    for n in range(terms):
        k = 2 * n + 1
        if k * math.pi * alpha / (2 * h) > 700:
            break
        s += (-1) ** n * 4 / (k * math.pi) / math.cosh(k * math.pi * alpha / (2 * h))
    return s
