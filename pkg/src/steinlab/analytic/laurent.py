"""Hartogs-Laurent coefficients by discrete integration over a torus.

With ``N`` samples per axis the discrete sum returns
``sum_{k' = k mod N} g_{k'}(w) r^{k'-k}``: the aliasing error is the mass of
coefficients congruent to ``k`` modulo ``N``.  Doubling ``N`` and comparing is
the practical test; for the series sections the coefficients fall off doubly
exponentially so one doubling settles it.
"""
from __future__ import annotations

import itertools
from typing import Callable, Sequence, Union

import numpy as np

from ..errors import AliasingSuspected, InputError
from ..intcore import ComplexPoint


def _grid(radii: Sequence[float], n: int) -> np.ndarray:
    d = len(radii)
    phases = np.exp(2j * np.pi * np.arange(n) / n)
    axes = [r * phases for r in radii]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1).reshape((n,) * d + (d,))


def _sample(f: Callable, w: complex, pts: np.ndarray) -> np.ndarray:
    shape = pts.shape[:-1]
    flat = pts.reshape(-1, pts.shape[-1])
    if hasattr(f, "values"):
        vals = np.asarray(f.values(w, flat), dtype=complex)
    else:
        vals = np.array([f(w, ComplexPoint(tuple(p))) for p in flat], dtype=complex)
    return vals.reshape(shape)


def _extract(vals: np.ndarray, ks: Sequence[Sequence[int]], radii: Sequence[float]) -> list[complex]:
    n = vals.shape[0]
    F = np.fft.fftn(vals) / vals.size
    out = []
    for k in ks:
        idx = tuple(int(x) % n for x in k)
        scale = np.prod([r ** float(x) for r, x in zip(radii, k)])
        out.append(complex(F[idx] / scale))
    return out


def laurent_coefficients(f: Callable, ks: Sequence[Sequence[int]], w: complex,
                         radii: Sequence[float], samples_per_axis: int,
                         tol: float = 1e-9) -> list[complex]:
    """Several ``g_k(w)`` from one pair of sample grids (N and 2N)."""
    n = samples_per_axis
    if n < 2 or n & (n - 1):
        raise InputError("samples_per_axis must be a power of two")
    if any(r <= 0 for r in radii):
        raise InputError("radii must be positive")
    need = 2 * (1 + max(abs(x) for k in ks for x in k))
    if n < need:
        raise InputError(f"samples_per_axis must be >= {need}")
    w = complex(w.w if hasattr(w, "w") else w)
    coarse = _extract(_sample(f, w, _grid(radii, n)), ks, radii)
    fine = _extract(_sample(f, w, _grid(radii, 2 * n)), ks, radii)
    for k, a, b in zip(ks, coarse, fine):
        if abs(a - b) > tol * max(1.0, abs(b)):
            raise AliasingSuspected(f"coefficient {tuple(k)} moved by {abs(a - b):.3g} between N={n} and {2 * n}")
    return fine


def laurent_coefficient(f: Callable, k: Sequence[int], w: Union[complex, object],
                        radii: Sequence[float], samples_per_axis: int,
                        tol: float = 1e-9) -> complex:
    return laurent_coefficients(f, [k], w, radii, samples_per_axis, tol)[0]


def resolved_band(samples_per_axis: int, d: int) -> list[tuple[int, ...]]:
    """Exponents with ``|k_i| < N/2``, the band the grid separates."""
    h = samples_per_axis // 2
    return list(itertools.product(range(-h + 1, h), repeat=d))
