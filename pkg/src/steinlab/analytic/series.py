"""Z-invariant extension of a fiber monomial across the strip.

``f(w, z) = (1/Omega(w~)) sum_j Omega(w+j) Delta(w+j) z^(j.k)`` with a
certified bound on the omitted terms.  ``j.k = k M^j`` is iterated exactly.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np
from mpmath import iv

from ..errors import (HypothesisViolated, InputError, OutsideStrip,
                      TailNotCertifiable, ZeroCoordinate)
from ..intcore import (ComplexPoint, IntMatrix, LatticeVector, finite_orbit_exponent,
                       inverse_unimodular)
from ..spectra import spectral_profile
from ..steinness import ModulusSpec, _boundary_precision, _endpoints

COSH = "cosh"
POLYNOMIAL = "polynomial"

#: below this distance to the anchor, Delta switches to its Taylor polynomial
DELTA_TAYLOR_RADIUS = 1e-3
_MAX_NORM_POWER = 1 << 12


@dataclass(frozen=True)
class StripPoint:
    w: complex
    modulus: ModulusSpec

    def __post_init__(self):
        object.__setattr__(self, "w", complex(self.w))
        check_strip(self.w, self.modulus)


def check_strip(w: complex, modulus: ModulusSpec) -> None:
    if modulus.kind == "finite":
        half = float(modulus.m) / (4 * math.pi)
        if not abs(w.imag) < half:
            raise OutsideStrip(f"|Im w| = {abs(w.imag):.6g} must be < m/(4 pi) = {half:.6g}")
    elif modulus.kind == "inf" and not w.imag > 0:
        raise OutsideStrip("half-plane base needs Im w > 0")


@dataclass(frozen=True)
class GrowthBound:
    """``||k M^j||_1 <= K * r^|j|`` (cosh) or ``<= K * poly(|j|)`` (polynomial) for j of one sign."""
    K: float
    rate: float
    power: int
    nil_norm: float = 0.0
    nil_index: int = 0
    period: int = 1

    def to_json(self) -> dict:
        return {"K": self.K, "rate": self.rate, "power": self.power, "nil_norm": self.nil_norm,
                "nil_index": self.nil_index, "period": self.period}


@dataclass(frozen=True)
class SeriesSpec:
    M: IntMatrix
    modulus: ModulusSpec
    k: tuple[int, ...]
    anchor: complex
    variant: str
    p: Optional[int]
    c: Optional[float]  # 2 pi^2 / m for the cosh variant
    forward: GrowthBound
    backward: GrowthBound
    rho: tuple[float, float]
    epsilon: Optional[float]

    def to_json(self) -> dict:
        return {"matrix": self.M.to_json(), "modulus": str(self.modulus), "k": list(self.k),
                "anchor": [self.anchor.real, self.anchor.imag], "variant": self.variant,
                "p": self.p, "c": self.c, "rho": list(self.rho), "epsilon": self.epsilon,
                "forward": self.forward.to_json(), "backward": self.backward.to_json()}


def _norm_rate(M: IntMatrix, c: float) -> GrowthBound:
    """Smallest power P (doubling) with ``log ||M^P||^(1/P) < c``.

    For ``j = qP + r``: ``||M^j|| <= ||M^P||^q ||M^r|| <= K r0^j`` with
    ``K = max_{r<P} ||M^r||`` and ``r0 = ||M^P||^(1/P) >= 1``.
    """
    P = 1
    while P <= _MAX_NORM_POWER:
        MP = M.pow(P)
        r0 = MP.inf_norm() ** (1.0 / P) * (1 + 1e-12)
        if math.log(r0) < c:
            K, cur = 1, IntMatrix.identity(M.dim)
            for _ in range(P):
                K = max(K, cur.inf_norm())
                cur = cur @ M
            return GrowthBound(K=float(K), rate=r0, power=P)
        P *= 2
    raise TailNotCertifiable("norm growth rate does not drop below 2 pi^2 / m")


def _unipotent_growth(M: IntMatrix, q: int) -> GrowthBound:
    """``||M^j|| <= K sum_{i<s} C(n, i) nu^i`` with ``n = ceil(|j|/q)`` and ``M^q = I + Nil``."""
    Mq = M.pow(q)
    nil = Mq - IntMatrix.identity(M.dim)
    s, cur = 0, IntMatrix.identity(M.dim)
    while not cur.is_zero():
        cur = cur @ nil
        s += 1
        if s > M.dim:
            raise HypothesisViolated("M^q - I is not nilpotent")
    K, cur = 1, IntMatrix.identity(M.dim)
    for _ in range(q):
        K = max(K, cur.inf_norm())
        cur = cur @ M
    return GrowthBound(K=float(K), rate=1.0, power=q, nil_norm=float(nil.inf_norm()),
                       nil_index=s, period=q)


def _certified_below(m: Fraction, rho_hi: float) -> bool:
    with _boundary_precision():
        prod = (iv.mpf(m.numerator) / m.denominator) * iv.log(iv.mpf(rho_hi))
        return _endpoints(prod)[1] < _endpoints(2 * iv.pi ** 2)[0]


def build_series_spec(M: IntMatrix, modulus: ModulusSpec, k: Sequence[int],
                      anchor: complex = 0j, variant: Optional[str] = None) -> SeriesSpec:
    if len(k) != M.dim:
        raise InputError("k has the wrong dimension")
    prof = spectral_profile(M, 1e-12)
    anchor = complex(anchor)
    check_strip(anchor, modulus)
    if variant is None:
        variant = POLYNOMIAL if prof.exact_one else COSH
    if variant == POLYNOMIAL:
        if not prof.exact_one:
            raise HypothesisViolated("polynomial weight needs every eigenvalue on the unit circle")
        q = finite_orbit_exponent(M)
        fwd = _unipotent_growth(M, q)
        bwd = _unipotent_growth(inverse_unimodular(M), q)
        p_prime = max(fwd.nil_index, bwd.nil_index) - 1
        p = p_prime // 2 + 1
        return SeriesSpec(M, modulus, tuple(k), anchor, POLYNOMIAL, p, None, fwd, bwd,
                          prof.rho, None)
    if variant != COSH:
        raise InputError(f"unknown variant {variant!r}")
    if modulus.kind != "finite":
        raise HypothesisViolated("cosh weight needs a finite modulus")
    if not prof.exact_one and not _certified_below(modulus.m, prof.rho[1]):
        raise HypothesisViolated("m log rho(M) < 2 pi^2 is not certified")
    c = 2 * math.pi ** 2 / float(modulus.m)
    fwd = _norm_rate(M, c)
    bwd = _norm_rate(inverse_unimodular(M), c)
    eps = max(fwd.rate, bwd.rate) - prof.rho[0]
    return SeriesSpec(M, modulus, tuple(k), anchor, COSH, None, c, fwd, bwd, prof.rho, eps)


# ---------------------------------------------------------------------------
# Weights
# ---------------------------------------------------------------------------

def omega_factor(w: Union[complex, StripPoint], spec: SeriesSpec) -> complex:
    return cmath.exp(log_omega(w, spec))


def log_omega(w: Union[complex, StripPoint], spec: SeriesSpec) -> complex:
    w = w.w if isinstance(w, StripPoint) else complex(w)
    if spec.variant == POLYNOMIAL:
        return -(w ** (2 * spec.p))
    check_strip(w, spec.modulus)
    return -2 * cmath.cosh(spec.c * w)


_TAYLOR = [(-1) ** n / math.factorial(2 * n + 1) for n in range(5)]


def delta_factor(w: complex, anchor: complex) -> complex:
    """``sin(pi t) / (pi t)`` with ``t = w - anchor``; 1 at t = 0."""
    t = complex(w) - complex(anchor)
    if abs(t) < DELTA_TAYLOR_RADIUS:
        x2 = (math.pi * t) ** 2
        acc = 0j
        for a in reversed(_TAYLOR):
            acc = acc * x2 + a
        return acc
    return cmath.sin(math.pi * t) / (math.pi * t)


# ---------------------------------------------------------------------------
# Tail
# ---------------------------------------------------------------------------

def _cosh_tail_start(spec: SeriesSpec, g: GrowthBound, A: float, beta: float,
                     const: float, tol: float) -> int:
    """Smallest n with ``sum_{|j| >= n, one side} |term_j| <= tol``.

    ``log|term_j| <= const - beta e^{c n} + A e^{lam n}`` for ``n = |j|``.
    Once ``beta e^{cn}(e^c - 1) >= 2 A e^{lam n}(e^lam - 1)`` (kept for larger n
    since c > lam) and ``beta e^{cn}(e^c - 1)/2 >= log 2``, consecutive terms at
    least halve, so the tail is at most twice its first term.
    """
    c, lam = spec.c, math.log(g.rate)
    ec, el = math.expm1(c), math.expm1(lam)
    n = 0
    while True:
        if n > 10_000:
            raise TailNotCertifiable("tail horizon exceeds 10000 terms")
        Bn = beta * math.exp(c * n) * ec
        if Bn >= 2 * A * math.exp(lam * n) * el and Bn / 2 >= math.log(2):
            g_n = const - beta * math.exp(c * n) + A * math.exp(lam * n)
            if g_n + math.log(2) <= math.log(tol):
                return n
        n += 1


def _poly_tail_start(spec: SeriesSpec, g: GrowthBound, A: float, re_w: float, im_w: float,
                     const: float, tol: float) -> int:
    """Same for ``Omega = exp(-w^{2p})``.

    With ``s = |Re(w + j)| >= 8p(|Im w|+1)``, ``Re (s+iy)^{2p} >= 2 s^{2p} - (s+|y|)^{2p}
    >= 0.7 s^{2p}``; with ``|j| >= 2(|Re w|+1)``, ``s >= |j|/2``.  The covector
    grows at most like ``K s_nil max(1,nu)^{s_nil} |j|^{p'}``.
    """
    p2 = 2 * spec.p
    a = 0.7 / 2 ** p2
    pp = max(g.nil_index - 1, 0)
    Ap = A * g.K * max(g.nil_index, 1) * max(1.0, g.nil_norm) ** max(g.nil_index, 1)
    n = max(int(math.ceil(2 * (abs(re_w) + 1))), int(math.ceil(2 * (8 * spec.p * (abs(im_w) + 1) + abs(re_w)))), 1)
    while True:
        if n > 10_000:
            raise TailNotCertifiable("tail horizon exceeds 10000 terms")
        if a * n ** p2 >= 2 * Ap * n ** pp:
            lead = -(a / 2) * n ** p2 + const
            ratio = math.exp(-(a / 2) * n ** (p2 - 1))
            if ratio < 1 and lead - math.log1p(-ratio) <= math.log(tol):
                return n
        n += 1


@dataclass(frozen=True)
class SectionValue:
    value: complex
    tail_bound: float
    window: tuple[int, int]
    terms: int


class MonomialSection:
    """Callable ``f(w, z)`` for a fixed :class:`SeriesSpec`."""

    def __init__(self, spec: SeriesSpec, tol: float = 1e-12, extra_terms: int = 0):
        if tol <= 0:
            raise InputError("tol must be positive")
        self.spec = spec
        self.tol = tol
        self.extra_terms = extra_terms
        self._log_omega_anchor = log_omega(spec.anchor, spec)
        self._Minv = inverse_unimodular(spec.M)

    def _covectors(self, center: int, lo: int, hi: int) -> dict[int, tuple[int, ...]]:
        """Exact ``k M^j`` for ``center + lo <= j <= center + hi``."""
        k0 = LatticeVector(self.spec.k) @ self.spec.M.pow(center)
        out = {center: k0.entries}
        cur = k0
        for j in range(center + 1, center + hi + 1):
            cur = cur @ self.spec.M
            out[j] = cur.entries
        cur = k0
        for j in range(center - 1, center + lo - 1, -1):
            cur = cur @ self._Minv
            out[j] = cur.entries
        return out

    def _tail_start(self, wc: complex, kc: tuple[int, ...], logz_max: float, tol: float,
                    g: GrowthBound) -> int:
        spec = self.spec
        # ||k_c M^i||_1 <= ||k_c||_1 ||M^i||_inf on row vectors
        A = logz_max * sum(abs(x) for x in kc)
        # |sin(pi t)/(pi t)| = |int_0^1 cos(pi t s) ds| <= cosh(pi |Im t|)
        d_bound = math.log(math.cosh(math.pi * abs((wc - spec.anchor).imag)))
        const = d_bound - self._log_omega_anchor.real
        if spec.variant == COSH:
            # |Omega(x+iy)| = exp(-2 cos(cy) cosh(cx)) <= exp(-cos(cy) e^{c|x|})
            beta = math.cos(spec.c * wc.imag) * math.exp(-spec.c * abs(wc.real))
            return _cosh_tail_start(spec, g, A * g.K, beta, const, tol)
        return _poly_tail_start(spec, g, A, wc.real, wc.imag, const, tol)

    def evaluate(self, w: Union[complex, StripPoint], z: ComplexPoint) -> SectionValue:
        w = w.w if isinstance(w, StripPoint) else complex(w)
        if self.spec.variant == COSH:
            check_strip(w, self.spec.modulus)
        if z.dim != self.spec.M.dim:
            raise InputError("point has the wrong dimension")
        center = -int(round(w.real))
        wc = w + center
        logs = [cmath.log(x) for x in z.coords]
        logz_max = max(abs(x.real) for x in logs)
        kc = (LatticeVector(self.spec.k) @ self.spec.M.pow(center)).entries
        half = self.tol / 2
        n_fwd = self._tail_start(wc, kc, logz_max, half, self.spec.forward)
        n_bwd = self._tail_start(wc, kc, logz_max, half, self.spec.backward)
        n_fwd += self.extra_terms
        n_bwd += self.extra_terms
        covs = self._covectors(center, -(n_bwd - 1), n_fwd - 1)
        lo_j, hi_j = center - (n_bwd - 1), center + (n_fwd - 1)
        total = 0j
        for j in range(lo_j, hi_j + 1):
            kv = covs[j]
            lw = log_omega(w + j, self.spec) - self._log_omega_anchor
            lz = sum(e * l for e, l in zip(kv, logs))
            expo = lw + lz
            if expo.real < -745:
                continue
            dlt = delta_factor(w + j, self.spec.anchor)
            if dlt == 0:
                continue
            total += dlt * cmath.exp(expo)
        return SectionValue(total, self.tol, (lo_j, hi_j), hi_j - lo_j + 1)

    def __call__(self, w, z: ComplexPoint) -> complex:
        return self.evaluate(w, z).value

    def values(self, w: complex, Z: np.ndarray) -> np.ndarray:
        """Vectorized values over an ``(n, d)`` array of points (same window for all)."""
        Z = np.asarray(Z, dtype=complex)
        if np.any(Z == 0):
            raise ZeroCoordinate("points of (C*)^d have nonzero coordinates")
        logs = np.log(Z)
        worst = np.argmax(np.max(np.abs(logs.real), axis=1))
        ref = self.evaluate(w, ComplexPoint(tuple(Z[worst])))
        lo_j, hi_j = ref.window
        center = -int(round(complex(w).real))
        covs = self._covectors(center, lo_j - center, hi_j - center)
        out = np.zeros(len(Z), dtype=complex)
        for j in range(lo_j, hi_j + 1):
            lw = log_omega(complex(w) + j, self.spec) - self._log_omega_anchor
            dlt = delta_factor(complex(w) + j, self.spec.anchor)
            if dlt == 0:
                continue
            expo = lw + logs @ np.array(covs[j], dtype=float)
            keep = expo.real > -745
            out[keep] += dlt * np.exp(expo[keep])
        return out


def monomial_section(spec: SeriesSpec, w: Union[complex, StripPoint], z: ComplexPoint,
                     tol: float = 1e-12) -> SectionValue:
    return MonomialSection(spec, tol).evaluate(w, z)


def term_magnitudes(spec: SeriesSpec, w: complex, z: ComplexPoint, lo: int, hi: int) -> list[float]:
    """``log|term_j|`` for ``lo <= j <= hi`` (omitting Delta), used to watch the decay."""
    sec = MonomialSection(spec)
    covs = sec._covectors(0, lo, hi)
    logs = z.log_abs()
    out = []
    for j in range(lo, hi + 1):
        lw = (log_omega(complex(w) + j, spec) - sec._log_omega_anchor).real
        out.append(lw + math.fsum(e * l for e, l in zip(covs[j], logs)))
    return out


__all__ = ["COSH", "POLYNOMIAL", "StripPoint", "SeriesSpec", "GrowthBound", "SectionValue",
           "MonomialSection", "build_series_spec", "check_strip", "omega_factor", "log_omega",
           "delta_factor", "monomial_section", "term_magnitudes"]
