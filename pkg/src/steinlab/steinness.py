"""Certified decision of ``m log rho(M) <= 2 pi^2`` and its refinements."""
from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import mpmath
from mpmath import iv

from .errors import CertificationFailed, InputError, NonPositiveMargin
from .intcore import IntMatrix, char_poly
from .spectra import SpectralProfile, is_irreducible, spectral_profile

#: working precision for boundary comparisons (binary64 mantissa plus a guard word)
BOUNDARY_PREC = 53 + 64

STEIN = "Stein"
NOT_STEIN = "NotStein"
NOT_STEIN_BASE_ONLY = "NotSteinBaseOnly"
INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class ModulusSpec:
    kind: str  # "finite" | "inf" | "2inf"
    m: Optional[Fraction] = None

    def __post_init__(self):
        if self.kind not in ("finite", "inf", "2inf"):
            raise InputError(f"unknown modulus kind {self.kind!r}")
        if self.kind == "finite":
            if self.m is None or self.m <= 0:
                raise InputError("finite modulus must be > 0")
            object.__setattr__(self, "m", Fraction(self.m))

    @classmethod
    def finite(cls, m: Union[int, float, str, Fraction]) -> "ModulusSpec":
        return cls("finite", Fraction(m))

    @classmethod
    def parse(cls, text: str) -> "ModulusSpec":
        t = str(text).strip().lower()
        if t in ("inf", "infinity", "∞"):
            return cls("inf")
        if t in ("2inf", "2infinity", "2∞"):
            return cls("2inf")
        try:
            return cls.finite(Fraction(t))
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse modulus {text!r}") from exc

    def __str__(self) -> str:
        return str(self.m) if self.kind == "finite" else self.kind


@dataclass(frozen=True)
class SteinVerdict:
    kind: str
    certified: bool
    critical_modulus: Optional[tuple[float, float]]  # None means infinite
    m_log_rho: Optional[tuple[float, float]]
    width: Optional[float]
    matrix: IntMatrix
    modulus: ModulusSpec
    tol: float
    profile: SpectralProfile

    @property
    def definite(self) -> bool:
        return self.kind != INDETERMINATE

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "certified": self.certified,
            "critical_modulus": "inf" if self.critical_modulus is None else list(self.critical_modulus),
            "m_log_rho": None if self.m_log_rho is None else list(self.m_log_rho),
            "width": self.width,
            "inputs": {"matrix": self.matrix.to_json(), "modulus": str(self.modulus), "tol": self.tol},
            "profile": self.profile.to_json(),
        }


@contextmanager
def _boundary_precision():
    """Interval and point contexts both at BOUNDARY_PREC so endpoints convert exactly."""
    old = iv.prec
    iv.prec = BOUNDARY_PREC
    try:
        with mpmath.workprec(BOUNDARY_PREC):
            yield
    finally:
        iv.prec = old


def _two_pi_sq():
    return 2 * iv.pi ** 2


def _endpoints(x):
    return tuple(mpmath.mpf(v) for v in x._mpi_)


def _enclosure(x) -> tuple[float, float]:
    """Outward-rounded float enclosure of an mpmath interval."""
    lo, hi = _endpoints(x)
    flo, fhi = float(lo), float(hi)
    if flo > lo:
        flo = math.nextafter(flo, -math.inf)
    if fhi < hi:
        fhi = math.nextafter(fhi, math.inf)
    return flo, fhi


def _critical_iv(profile: SpectralProfile):
    mu = iv.log(iv.mpf([profile.rho[0], profile.rho[1]]))
    return _two_pi_sq() / mu


def critical_modulus(M: IntMatrix, tol: float = 1e-12) -> Optional[tuple[float, float]]:
    """Enclosure of ``2 pi^2 / log rho(M)``; ``None`` when rho(M) = 1 (infinite)."""
    if tol <= 0:
        raise InputError("tol must be positive")
    t = tol
    with _boundary_precision():
        for _ in range(8):
            prof = spectral_profile(M, t)
            if prof.exact_one:
                return None
            enc = _enclosure(_critical_iv(prof))
            if enc[1] - enc[0] <= tol:
                return enc
            t /= 100
    raise CertificationFailed(f"critical modulus width {enc[1] - enc[0]:.3g} > tol={tol}")


def classify(M: IntMatrix, modulus: ModulusSpec, tol: float = 1e-12) -> SteinVerdict:
    if tol <= 0:
        raise InputError("tol must be positive")
    prof = spectral_profile(M, tol)
    if prof.exact_one:
        return SteinVerdict(STEIN, True, None, (0.0, 0.0), None, M, modulus, tol, prof)
    with _boundary_precision():
        crit = _enclosure(_critical_iv(prof))
        if modulus.kind != "finite":
            return SteinVerdict(NOT_STEIN, True, crit, None, None, M, modulus, tol, prof)
        mu = iv.log(iv.mpf([prof.rho[0], prof.rho[1]]))
        m = iv.mpf(modulus.m.numerator) / modulus.m.denominator
        prod = m * mu
        bound = _two_pi_sq()
        enc = _enclosure(prod)
        p_lo, p_hi = _endpoints(prod)
        b_lo, b_hi = _endpoints(bound)
        if p_hi <= b_lo:
            return SteinVerdict(STEIN, True, crit, enc, None, M, modulus, tol, prof)
        if p_lo > b_hi:
            kind = NOT_STEIN_BASE_ONLY if is_irreducible(char_poly(M)) else NOT_STEIN
            return SteinVerdict(kind, True, crit, enc, None, M, modulus, tol, prof)
        return SteinVerdict(INDETERMINATE, False, crit, enc, float(p_hi - p_lo), M, modulus, tol, prof)


def mu_threshold(mu_prime: float) -> float:
    """``2 pi^2 / log(1 + mu')``: above this modulus no degree-d bundle with rho > 1 is Stein."""
    if not mu_prime > 0:
        raise NonPositiveMargin("mu' must be positive")
    return 2 * math.pi ** 2 / math.log1p(mu_prime)
