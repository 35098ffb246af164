"""Certified root enclosures, the rho = 1 dichotomy and spectral profiles.

Root moduli are enclosed with Weierstrass inclusion discs: for distinct
approximations ``z_i`` of the roots of a monic square-free ``P`` of degree
``n``, every root lies in the union of the discs ``D(z_i, n |W_i|)`` with
``W_i = P(z_i) / prod_{j != i} (z_i - z_j)``, and a connected component made
of ``m`` discs holds exactly ``m`` roots.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

from .errors import (DegenerateDegreeZero, DegreeTooLarge, InputError,
                     NotUnimodular, ZeroConstantTerm)
from .intcore import (IntMatrix, IntPolynomial, char_poly, is_unimodular,
                      poly_gcd)

IRREDUCIBILITY_MAX_DEGREE = 16


def _down(x: float, n: int = 2) -> float:
    for _ in range(n):
        x = math.nextafter(x, -math.inf)
    return x


def _up(x: float, n: int = 2) -> float:
    for _ in range(n):
        x = math.nextafter(x, math.inf)
    return x


# ---------------------------------------------------------------------------
# Cyclotomic polynomials
# ---------------------------------------------------------------------------

def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> IntPolynomial:
    """Phi_n by exact division of x^n - 1 by the Phi_d, d | n, d < n."""
    if n < 1:
        raise InputError("cyclotomic index must be >= 1")
    p = IntPolynomial((-1,) + (0,) * (n - 1) + (1,))
    for d in range(1, n):
        if n % d == 0:
            p, r = p.divmod_monic(cyclotomic(d))
            assert r.is_zero()
    return p


def cyclotomic_indices(max_degree: int) -> list[int]:
    """All n with phi(n) <= max_degree (phi(n) >= sqrt(n/2) bounds the search)."""
    return [n for n in range(1, 2 * max_degree * max_degree + 3) if euler_phi(n) <= max_degree]


def cyclotomic_factorization(P: IntPolynomial) -> tuple[list[int], IntPolynomial]:
    """Strip every cyclotomic factor from a monic P with P(0) != 0.

    Returns the indices n (with multiplicity, ascending) and the cofactor.
    """
    if P.coeffs[0] == 0:
        raise ZeroConstantTerm("cyclotomic test needs P(0) != 0")
    if not P.monic:
        raise InputError("polynomial must be monic")
    found = []
    rest = P
    for n in cyclotomic_indices(P.degree):
        phi = cyclotomic(n)
        while rest.degree >= phi.degree:
            q, r = rest.divmod_monic(phi)
            if not r.is_zero():
                break
            found.append(n)
            rest = q
    return found, rest


def is_cyclotomic_product(P: IntPolynomial) -> bool:
    _, rest = cyclotomic_factorization(P)
    return rest.coeffs == (1,)


# ---------------------------------------------------------------------------
# Root enclosures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RootDisc:
    center: complex
    radius: float
    multiplicity: int = 1


def yun_decomposition(P: IntPolynomial) -> list[tuple[IntPolynomial, int]]:
    """Square-free factorization ``P = prod f_i^i`` (monic P)."""
    out = []
    a0 = P
    b = poly_gcd(a0, a0.derivative())
    if b.degree == 0:
        return [(P, 1)]
    c, _ = a0.divmod_monic(b)
    i = 1
    while c.degree > 0:
        y = poly_gcd(b, c)
        z, _ = c.divmod_monic(y)
        if z.degree > 0:
            out.append((z, i))
        b, _ = b.divmod_monic(y)
        c = y
        i += 1
    return out


def _aberth_float(coeffs_high: np.ndarray, z: np.ndarray, iters: int = 60) -> np.ndarray:
    dp = np.polyder(coeffs_high)
    for _ in range(iters):
        pv = np.polyval(coeffs_high, z)
        dv = np.polyval(dp, z)
        with np.errstate(all="ignore"):
            ratio = pv / dv
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            s = (1.0 / diff).sum(axis=1) - 1.0
            w = ratio / (1.0 - ratio * s)
        if not np.all(np.isfinite(w)):
            break
        z = z - w
        if np.max(np.abs(w)) <= 1e-15 * max(1.0, float(np.max(np.abs(z)))):
            break
    return z


def _mp_eval(coeffs_low, x):
    acc = mpmath.mpc(0)
    for c in reversed(coeffs_low):
        acc = acc * x + c
    return acc


def _weierstrass_discs(coeffs_low, zs) -> list[tuple]:
    n = len(zs)
    out = []
    for i in range(n):
        den = mpmath.mpc(1)
        for j in range(n):
            if j != i:
                den *= zs[i] - zs[j]
        if den == 0:
            return []
        w = _mp_eval(coeffs_low, zs[i]) / den
        out.append((zs[i], n * abs(w)))
    return out


def _aberth_mp(coeffs_low, zs, iters):
    dcoeffs = [i * c for i, c in enumerate(coeffs_low)][1:]
    zs = list(zs)
    n = len(zs)
    for _ in range(iters):
        biggest = mpmath.mpf(0)
        for i in range(n):
            pv = _mp_eval(coeffs_low, zs[i])
            dv = _mp_eval(dcoeffs, zs[i])
            if dv == 0:
                continue
            ratio = pv / dv
            s = mpmath.fsum(1 / (zs[i] - zs[j]) for j in range(n) if j != i)
            w = ratio / (1 - ratio * s)
            zs[i] -= w
            biggest = max(biggest, abs(w))
        if biggest < mpmath.mpf(2) ** (-mpmath.mp.prec + 8) * (1 + max(abs(z) for z in zs)):
            break
    return zs


def _enclose_squarefree(P: IntPolynomial, tol: float) -> list[RootDisc]:
    """Disjoint-or-merged inclusion discs of radius <= tol/2 for square-free monic P."""
    n = P.degree
    if n == 1:
        return [RootDisc(complex(-P.coeffs[0]), 0.0)]
    high = np.array([float(c) for c in reversed(P.coeffs)])
    scale = max(1.0, max(abs(c) for c in P.coeffs)) ** (1.0 / n)
    init = np.roots(high) if np.all(np.isfinite(high)) else np.array([])
    if len(init) != n or not np.all(np.isfinite(init)):
        init = scale * np.exp(2j * np.pi * (np.arange(n) + 0.25) / n)
    init = _aberth_float(high, init.astype(complex))
    need_digits = max(0, -math.log10(tol)) + 4
    dps = int(max(30, need_digits + 10, math.log10(scale + 1) * n + 20))
    zs = None
    for attempt in range(8):
        with mpmath.workdps(dps):
            if zs is None:
                zs = [mpmath.mpc(complex(z)) for z in init]
            else:
                zs = [mpmath.mpc(z) for z in zs]
            zs = _aberth_mp(P.coeffs, zs, iters=8 + 4 * attempt)
            discs = _weierstrass_discs(P.coeffs, zs)
            if discs:
                slack = mpmath.mpf(10) ** (-(dps - 8))
                rad = [r * (1 + slack) + slack * (1 + abs(c)) for c, r in discs]
                if max(rad) <= tol / 2:
                    out = []
                    for (c, _), r in zip(discs, rad):
                        cf = complex(c)
                        # rounding the center to double widens the disc
                        out.append(RootDisc(cf, _up(float(r + abs(mpmath.mpc(cf) - c)))))
                    return out
        dps *= 2
    raise ArithmeticError(f"root enclosure did not reach tol={tol} for {P}")


def enclose_roots(P: IntPolynomial, tol: float = 1e-12) -> list[RootDisc]:
    """Certified discs for every root of monic P (multiplicities attached)."""
    if P.degree < 1:
        raise DegenerateDegreeZero("constant polynomial has no roots")
    if not P.monic:
        raise InputError("polynomial must be monic")
    v, Q = P.strip_x()
    out = [RootDisc(0j, 0.0, v)] if v else []
    if Q.degree == 0:
        return out
    for factor, mult in yun_decomposition(Q):
        for disc in _enclose_squarefree(factor, tol):
            out.append(RootDisc(disc.center, disc.radius, mult))
    return out


def _components(discs: list[RootDisc]) -> list[list[RootDisc]]:
    parent = list(range(len(discs)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in itertools.combinations(range(len(discs)), 2):
        if abs(discs[i].center - discs[j].center) <= discs[i].radius + discs[j].radius:
            parent[find(i)] = find(j)
    groups: dict[int, list[RootDisc]] = {}
    for i, d in enumerate(discs):
        groups.setdefault(find(i), []).append(d)
    return list(groups.values())


def _house_from_discs(discs: list[RootDisc]) -> tuple[float, float]:
    hi = max(_up(abs(d.center) + d.radius) for d in discs)
    lo = max(min(_down(abs(d.center) - d.radius) for d in comp) for comp in _components(discs))
    return max(lo, 0.0), hi


def root_radius(P: IntPolynomial, tol: float = 1e-12) -> tuple[float, float]:
    """Enclosure ``[lo, hi]`` of the largest root modulus with ``hi - lo <= tol``."""
    if P.degree < 1:
        raise DegenerateDegreeZero("constant polynomial has no roots")
    if tol <= 0:
        raise InputError("tol must be positive")
    t = tol
    for _ in range(6):
        lo, hi = _house_from_discs(enclose_roots(P, t))
        if hi - lo <= tol:
            return lo, hi
        t /= 16
    raise ArithmeticError(f"could not reach width {tol}")


# ---------------------------------------------------------------------------
# Spectral profile
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralProfile:
    rho: tuple[float, float]
    exact_one: bool
    mu: tuple[float, float]
    mu_plus: tuple[float, float]
    mu_minus: tuple[float, float]
    roots: tuple[RootDisc, ...] = field(default=())
    cyclotomic_indices: tuple[int, ...] = field(default=())

    def to_json(self) -> dict:
        roots = []
        for r in self.roots:
            for _ in range(r.multiplicity):
                roots.append({"re": r.center.real, "im": r.center.imag, "rad": r.radius})
        return {"rho": list(self.rho), "exact_one": self.exact_one, "mu": list(self.mu),
                "mu_plus": list(self.mu_plus), "mu_minus": list(self.mu_minus), "roots": roots}


def _log_enclosure(lo: float, hi: float) -> tuple[float, float]:
    return (max(0.0, _down(math.log(lo))) if lo > 0 else -math.inf, _up(math.log(hi)))


def spectral_profile(M: IntMatrix, tol: float = 1e-12) -> SpectralProfile:
    if not is_unimodular(M):
        raise NotUnimodular("spectral profile needs M in GL_d(Z)")
    P = char_poly(M)
    factors, rest = cyclotomic_factorization(P)
    roots = tuple(enclose_roots(P, min(tol, 1e-12)))
    if rest.coeffs == (1,):
        one = (1.0, 1.0)
        return SpectralProfile(one, True, (0.0, 0.0), (0.0, 0.0), (0.0, 0.0), roots, tuple(factors))
    # P(0) = +-1, so the reversed polynomial is monic up to sign
    R = P.reversed()
    if R.coeffs[-1] == -1:
        R = -R
    t = tol
    while True:
        top = root_radius(P, t)
        inv = root_radius(R, t)
        rho = (max(top[0], inv[0], 1.0), max(top[1], inv[1]))
        if rho[0] > 1.0:
            break
        t /= 1e3
        if t < 1e-60:  # pragma: no cover - Kronecker guarantees rho > 1
            raise ArithmeticError("could not separate rho from 1")
    return SpectralProfile(rho=rho, exact_one=False, mu=_log_enclosure(*rho),
                           mu_plus=_log_enclosure(max(top[0], 1.0), top[1]),
                           mu_minus=_log_enclosure(max(inv[0], 1.0), inv[1]),
                           roots=roots, cyclotomic_indices=tuple(factors))


# ---------------------------------------------------------------------------
# Irreducibility
# ---------------------------------------------------------------------------

def is_irreducible(P: IntPolynomial) -> bool:
    """Exact irreducibility of a monic integer polynomial over Z.

    Candidate monic factors are the products over subsets of the certified
    roots; a subset product is integral only if rounding its enclosed
    coefficients gives an exact divisor.
    """
    if not P.monic:
        raise InputError("polynomial must be monic")
    n = P.degree
    if n > IRREDUCIBILITY_MAX_DEGREE:
        raise DegreeTooLarge(f"irreducibility implemented up to degree {IRREDUCIBILITY_MAX_DEGREE}")
    if n < 1:
        return False
    if n == 1:
        return True
    if P.coeffs[0] == 0:
        return False
    if poly_gcd(P, P.derivative()).degree > 0:
        return False
    house = root_radius(P, 1e-6)[1]
    # digits needed to round coefficients of any sub-product
    digits = int(n * math.log10(2 + house)) + 25
    tol = 10.0 ** -12
    discs = enclose_roots(P, tol)
    with mpmath.workdps(digits + 20):
        zs = [mpmath.mpc(d.center) for d in discs]
        zs = _aberth_mp(P.coeffs, zs, iters=20)
        wd = _weierstrass_discs(P.coeffs, zs)
        rads = [r for _, r in wd]
        for k in range(1, n // 2 + 1):
            for subset in itertools.combinations(range(n), k):
                prod_abs = mpmath.mpf(1)
                prod_pert = mpmath.mpf(1)
                for i in subset:
                    prod_abs *= 1 + abs(zs[i])
                    prod_pert *= 1 + abs(zs[i]) + rads[i]
                err = prod_pert - prod_abs + mpmath.mpf(10) ** (-digits)
                if err > 0.25:  # pragma: no cover - precision is sized to avoid this
                    raise ArithmeticError("insufficient precision for factor rounding")
                poly = [mpmath.mpc(1)]
                for i in subset:
                    nxt = [mpmath.mpc(0)] * (len(poly) + 1)
                    for t, c in enumerate(poly):
                        nxt[t + 1] += c
                        nxt[t] -= c * zs[i]
                    poly = nxt
                rounded = []
                ok = True
                for c in poly:
                    if abs(c.imag) > err + 0.25:
                        ok = False
                        break
                    r = int(mpmath.nint(c.real))
                    if abs(c.real - r) > err + 0.25:
                        ok = False
                        break
                    rounded.append(r)
                if not ok:
                    continue
                cand = IntPolynomial(tuple(rounded))
                if cand.coeffs[0] == 0 or P.coeffs[0] % cand.coeffs[0]:
                    continue
                _, rem = P.divmod_monic(cand)
                if rem.is_zero():
                    return False
    return True
