"""Doubly exponential lower bounds ``|z^(j.k)| > exp(delta e^{|j| mu_+-})`` along
bounded-gap index sets, built constructively and re-checked independently.

``log|z^(j.k)| = <k M^j, log|z|>`` is evaluated exactly: ``log|z~|`` is chosen
dyadic and ``k M^j`` is an integer covector, so each value is a rational
number.  Only the right-hand side ``delta e^{|j| mu}`` is transcendental; it is
compared in the log domain with the upper end of the certified ``mu`` enclosure.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import numpy as np

from ..errors import CertificationFailed, InputError, SearchFailed
from ..intcore import ComplexPoint, IntMatrix, LatticeVector, inverse_unimodular, is_unimodular
from ..spectra import spectral_profile
from .gaps import GapSet, gap_set

_DYADIC = 1 << 20


@dataclass(frozen=True)
class WitnessCertificate:
    matrix: IntMatrix
    log_z: tuple[Fraction, ...]
    k: tuple[int, ...]
    delta: Fraction
    mu_plus: tuple[float, float]
    mu_minus: tuple[float, float]
    mu: tuple[float, float]
    j_plus: GapSet
    j_minus: GapSet  # members are |j| for j <= 0
    discard_plus: int
    discard_minus: int
    horizon: int
    seed: int
    margins_plus: tuple[tuple[int, float], ...]
    margins_minus: tuple[tuple[int, float], ...]

    @property
    def z(self) -> ComplexPoint:
        return ComplexPoint.from_log_moduli([float(x) for x in self.log_z])

    def to_json(self) -> dict:
        return {
            "matrix": self.matrix.to_json(),
            "log_z": [str(x) for x in self.log_z], "k": list(self.k), "delta": str(self.delta),
            "mu_plus": list(self.mu_plus), "mu_minus": list(self.mu_minus), "mu": list(self.mu),
            "j_plus": self.j_plus.to_json(), "j_minus": self.j_minus.to_json(),
            "discard_plus": self.discard_plus, "discard_minus": self.discard_minus,
            "horizon": self.horizon, "seed": self.seed,
            "margins_plus": [[j, m] for j, m in self.margins_plus],
            "margins_minus": [[j, m] for j, m in self.margins_minus],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "WitnessCertificate":
        def gs(o):
            return GapSet(o["epsilon"], o["horizon"], tuple(o["members"]), o["max_gap"], o["exhaustive"])

        return cls(IntMatrix.from_json(obj["matrix"]), tuple(Fraction(x) for x in obj["log_z"]),
                   tuple(obj["k"]), Fraction(obj["delta"]), tuple(obj["mu_plus"]),
                   tuple(obj["mu_minus"]), tuple(obj["mu"]), gs(obj["j_plus"]), gs(obj["j_minus"]),
                   obj["discard_plus"], obj["discard_minus"], obj["horizon"], obj["seed"],
                   tuple((j, m) for j, m in obj["margins_plus"]),
                   tuple((j, m) for j, m in obj["margins_minus"]))


def exact_log_monomial(M: IntMatrix, log_z: Sequence[Fraction], k: Sequence[int], j: int) -> Fraction:
    """``log|z^(j.k)| = <k M^j, log|z|>`` as an exact rational."""
    kj = LatticeVector(tuple(k)) @ M.pow(j)
    return sum((Fraction(a) * b for a, b in zip(kj.entries, log_z)), Fraction(0))


def _margin(value: Fraction, delta: Fraction, n: int, mu_hi: float) -> Optional[float]:
    """``log value - log delta - n mu_hi`` (None when value <= 0)."""
    if value <= 0:
        return None
    with mpmath.workdps(40):
        lv = mpmath.log(mpmath.mpf(value.numerator)) - mpmath.log(mpmath.mpf(value.denominator))
        ld = mpmath.log(mpmath.mpf(delta.numerator)) - mpmath.log(mpmath.mpf(delta.denominator))
        return float(lv - ld - n * mpmath.mpf(mu_hi))


def _peripheral(vals: np.ndarray, target: float, rtol: float = 1e-9) -> list[int]:
    mods = np.abs(vals)
    return [i for i in range(len(vals)) if abs(mods[i] - target) <= rtol * target]


def _tail_index(coef: np.ndarray, pair: np.ndarray, mods: np.ndarray, lead: float,
                idx: list[int], delta: float) -> int:
    """Smallest n with ``sum_{i not peripheral} |c_i <b_i,k>| (|lambda_i|/lead)^n < delta``."""
    rest = [i for i in range(len(coef)) if i not in idx]
    if not rest:
        return 0
    w = np.array([abs(coef[i] * pair[i]) for i in rest])
    r = np.array([mods[i] / lead for i in rest])
    n = 0
    while float(np.sum(w * r ** n)) >= delta * 0.5:
        n += 1
        if n > 10_000:
            raise SearchFailed("dominant part never separates")
    return n


def witness_search(M: IntMatrix, tol: float = 1e-9, horizon: int = 30, seed: int = 0,
                   k_bound: int = 3, k_bound_cap: int = 24, draws: int = 64) -> WitnessCertificate:
    if not is_unimodular(M):
        raise InputError("witness search needs M in GL_d(Z)")
    if horizon < 1:
        raise InputError("horizon must be >= 1")
    prof = spectral_profile(M, min(tol, 1e-12))
    if prof.exact_one:
        raise InputError("rho(M) = 1: there is nothing to witness")
    d = M.dim
    A = np.array(M.rows, dtype=float)
    vals, vecs = np.linalg.eig(A)
    if np.linalg.cond(vecs) > 1e10:
        raise SearchFailed("matrix is not (numerically) diagonalizable")
    mods = np.abs(vals)
    top, bottom = mods.max(), mods.min()
    S_plus, S_minus = _peripheral(vals, top), _peripheral(vals, bottom)
    rng = np.random.default_rng(seed)
    Binv = np.linalg.inv(vecs)
    last: Optional[Exception] = None
    admissible = 0
    for _ in range(draws):
        u = np.round(rng.uniform(-1, 1, d) * _DYADIC) / _DYADIC
        coef = Binv @ u
        if min(abs(coef[i]) for i in S_plus + S_minus) <= 1e-3:
            continue
        admissible += 1
        try:
            return _attempt(M, prof, vals, vecs, coef, u, S_plus, S_minus, horizon, seed,
                            k_bound, k_bound_cap)
        except SearchFailed as exc:
            # a small margin makes the return times sparse; try another z
            last = exc
    if not admissible:
        raise SearchFailed("no admissible log|z| drawn")
    raise SearchFailed(f"{admissible} draws tried, last failure: {last}")


def _attempt(M, prof, vals, vecs, coef, u, S_plus, S_minus, horizon, seed, k_bound, k_bound_cap):
    d = M.dim
    mods = np.abs(vals)
    top, bottom = mods.max(), mods.min()
    # u'_+ and u'_- are real because the peripheral sets are closed under conjugation
    up = np.real(vecs[:, S_plus] @ coef[S_plus])
    um = np.real(vecs[:, S_minus] @ coef[S_minus])
    bound = k_bound
    best = None
    while bound <= k_bound_cap:
        for kk in itertools.product(range(-bound, bound + 1), repeat=d):
            s = min(float(up @ kk), float(um @ kk))
            if best is None or s > best[0]:
                best = (s, kk)
        if best[0] > 0:
            break
        bound *= 2
    if best is None or best[0] <= 0:
        raise SearchFailed(f"no k with <u'_+,k> > 0 and <u'_-,k> > 0 for |k_i| <= {k_bound_cap}")
    k = best[1]
    # <u'_+-, k> > 3 delta, delta dyadic
    delta = Fraction(math.floor(best[0] / 3.5 * _DYADIC), _DYADIC)
    if delta <= 0:
        raise SearchFailed("margin too small for a dyadic delta")
    pair = np.array([complex(vecs[:, i] @ np.array(k, dtype=float)) for i in range(d)])

    def side(S, lead, inverse):
        # <u'_{+,j} - u'_+, k> is at most eps * sum |c_i <b_i,k>| on the peripheral set
        weight = float(np.sum(np.abs(coef[S] * pair[S])))
        eps = float(delta) / weight * 0.99
        theta = np.angle(vals[S]) / (2 * math.pi)
        if inverse:
            theta = -theta
        gs = gap_set(theta, eps, horizon)
        start = _tail_index(coef, pair, mods if not inverse else 1 / mods,
                            lead if not inverse else 1 / lead, S, float(delta))
        return gs, start

    gs_plus, start_plus = side(S_plus, top, False)
    gs_minus, start_minus = side(S_minus, bottom, True)
    log_z = tuple(Fraction(int(round(x * _DYADIC)), _DYADIC) for x in u)
    Minv = inverse_unimodular(M)
    margins_plus, margins_minus = [], []
    kept_plus = [j for j in gs_plus.members if j >= start_plus]
    kept_minus = [n for n in gs_minus.members if n >= start_minus]
    cur = LatticeVector(k)
    covs = {0: cur}
    for j in range(1, horizon + 1):
        cur = cur @ M
        covs[j] = cur
    cur = LatticeVector(k)
    for j in range(1, horizon + 1):
        cur = cur @ Minv
        covs[-j] = cur

    def value(j):
        return sum((Fraction(a) * b for a, b in zip(covs[j].entries, log_z)), Fraction(0))

    for j in kept_plus:
        mg = _margin(value(j), delta, j, prof.mu_plus[1])
        if mg is None or mg <= 0:
            raise CertificationFailed(f"forward inequality fails at j={j}")
        margins_plus.append((j, mg))
    for n in kept_minus:
        mg = _margin(value(-n), delta, n, prof.mu_minus[1])
        if mg is None or mg <= 0:
            raise CertificationFailed(f"backward inequality fails at j={-n}")
        margins_minus.append((-n, mg))
    if not margins_plus or not margins_minus:
        raise SearchFailed("horizon too short: an index set is empty after the discarded prefix")
    return WitnessCertificate(
        matrix=M, log_z=log_z, k=tuple(int(x) for x in k), delta=delta,
        mu_plus=prof.mu_plus, mu_minus=prof.mu_minus, mu=prof.mu,
        j_plus=gs_plus, j_minus=gs_minus, discard_plus=start_plus, discard_minus=start_minus,
        horizon=horizon, seed=seed, margins_plus=tuple(margins_plus),
        margins_minus=tuple(margins_minus))


def check_witness(cert: WitnessCertificate) -> list[str]:
    """Re-verify every recorded inequality from raw data; returns the failures (empty = valid).

    Uses only exact integer matrix powers, rational arithmetic and a fresh
    spectral profile; nothing from the search is trusted except the claims.
    """
    failures = []
    M = cert.matrix
    prof = spectral_profile(M, 1e-12)
    if not (prof.mu_plus[0] <= cert.mu_plus[1] and cert.mu_plus[0] <= prof.mu_plus[1]):
        failures.append("mu_plus enclosure does not match the matrix")
    if not (prof.mu_minus[0] <= cert.mu_minus[1] and cert.mu_minus[0] <= prof.mu_minus[1]):
        failures.append("mu_minus enclosure does not match the matrix")
    top = max(cert.mu_plus[1], cert.mu_minus[1])
    low = max(cert.mu_plus[0], cert.mu_minus[0])
    if not (low <= prof.mu[1] and top >= prof.mu[0]):
        failures.append("max(mu_plus, mu_minus) is outside the mu enclosure")
    if cert.delta <= 0:
        failures.append("delta must be positive")
    for label, margins, mu_hi, gs, start in (
            ("+", cert.margins_plus, prof.mu_plus[1], cert.j_plus, cert.discard_plus),
            ("-", cert.margins_minus, prof.mu_minus[1], cert.j_minus, cert.discard_minus)):
        if not margins:
            failures.append(f"J{label} is empty")
        expected = [m for m in gs.members if m >= start]
        if [abs(j) for j, _ in margins] != expected:
            failures.append(f"J{label} margins do not cover the recorded members")
        gaps = [b - a for a, b in zip(gs.members, gs.members[1:])]
        if gaps and max(gaps) != gs.max_gap:
            failures.append(f"J{label} max gap mismatch")
        for j, _ in margins:
            v = exact_log_monomial(M, cert.log_z, cert.k, j)
            mg = _margin(v, cert.delta, abs(j), max(mu_hi, cert.mu_plus[1] if label == "+" else cert.mu_minus[1]))
            if mg is None or mg <= 0:
                failures.append(f"inequality fails at j={j}")
    return failures
