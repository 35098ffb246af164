"""Exhaustive enumeration of monic integer polynomials of bounded house.

The search tree fixes coefficients outer to inner (``c_1`` first for
``x^d + c_1 x^(d-1) + ... + c_d``) and prunes with the power-sum bounds of the
compiled kernel; only leaves reach the certified root enclosure.  Work is
split into shards over ``c_1``; each shard checkpoints after every
``(c_1, c_2)`` prefix and the final reduction is independent of sharding.
"""
from __future__ import annotations

import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional

from . import kernels
from .errors import DegreeTooLarge, InputError, NonUnitConstantTerm
from .intcore import IntMatrix, IntPolynomial
from .spectra import _down, _up, is_cyclotomic_product, root_radius

log = logging.getLogger(__name__)

SZ_MAX_DEGREE = 10
#: extra power sums s_{d+1} .. s_{K} checked at the leaves
POWER_SUM_HORIZON_FACTOR = 3


@dataclass(frozen=True)
class HouseRecord:
    poly: IntPolynomial
    house: tuple[float, float]
    is_cyclotomic_product: bool
    is_reciprocal: bool
    flagged: bool = False

    def to_row(self) -> dict:
        return {"poly": str(self.poly), "house_lo": self.house[0], "house_hi": self.house[1],
                "reciprocal": self.is_reciprocal, "cyclotomic": self.is_cyclotomic_product}

    def to_json(self) -> dict:
        return {"coeffs_low_to_high": list(self.poly.coeffs), "house": list(self.house),
                "cyclotomic": self.is_cyclotomic_product, "reciprocal": self.is_reciprocal,
                "flagged": self.flagged}

    @classmethod
    def from_json(cls, obj: dict) -> "HouseRecord":
        return cls(IntPolynomial(tuple(obj["coeffs_low_to_high"])), tuple(obj["house"]),
                   obj["cyclotomic"], obj["reciprocal"], obj["flagged"])


@dataclass
class MarginResult:
    d: int
    mu_prime: tuple[float, float]
    argmin: IntPolynomial
    ceiling: float
    count: int
    nodes: int
    leaves: int
    wall_time: float
    stragglers: list[HouseRecord] = field(default_factory=list)
    records: list[HouseRecord] = field(default_factory=list)

    def to_json(self, include_timing: bool = False) -> dict:
        out = {"d": self.d, "mu_prime": list(self.mu_prime),
               "argmin": self.argmin.to_json(), "argmin_str": str(self.argmin),
               "ceiling": self.ceiling, "count": self.count, "nodes": self.nodes,
               "leaves": self.leaves,
               "stragglers": [r.to_json() for r in self.stragglers]}
        if include_timing:
            out["wall_time"] = self.wall_time
        return out


# ---------------------------------------------------------------------------
# Polynomial helpers
# ---------------------------------------------------------------------------

def is_reciprocal(P: IntPolynomial) -> bool:
    """``x^d P(1/x) = +-P(x)``."""
    c = P.coeffs
    r = tuple(reversed(c))
    return c == r or c == tuple(-x for x in r)


def companion_matrix(P: IntPolynomial) -> IntMatrix:
    """Companion matrix with ones on the subdiagonal and ``-a_i`` in the last column."""
    if not P.monic or P.degree < 1:
        raise InputError("companion matrix needs a monic polynomial of degree >= 1")
    if abs(P.coeffs[0]) != 1:
        raise NonUnitConstantTerm("|P(0)| must be 1 for a GL_d(Z) companion matrix")
    d = P.degree
    rows = []
    for i in range(d):
        row = [0] * d
        if i > 0:
            row[i - 1] = 1
        row[d - 1] -= P.coeffs[i]
        rows.append(tuple(row))
    return IntMatrix(tuple(rows))


def _bounds(d: int, a: float) -> tuple[list[int], list[int]]:
    K = max(d, POWER_SUM_HORIZON_FACTOR * d)
    slack = 1 + 1e-12
    sum_bounds = [math.floor(d * a ** k * slack) for k in range(1, K + 1)]
    coeff_bounds = [math.floor(math.comb(d, k) * a ** k * slack) for k in range(1, d + 1)]
    return sum_bounds, coeff_bounds


def _poly_from_tail(c: Iterable[int]) -> IntPolynomial:
    return IntPolynomial(tuple(reversed(tuple(c))) + (1,))


def certify_house(P: IntPolynomial, a: float, tol: float) -> Optional[HouseRecord]:
    """Certified record if ``house(P) <= a`` (flagged when undecidable), else None."""
    _, Q = P.strip_x()
    if Q.degree == 0:
        return HouseRecord(P, (0.0, 0.0), False, is_reciprocal(P))
    if is_cyclotomic_product(Q):
        return HouseRecord(P, (1.0, 1.0), True, is_reciprocal(P))
    lo, hi = root_radius(Q, tol)
    if lo > a:
        return None
    if hi <= a:
        return HouseRecord(P, (lo, hi), False, is_reciprocal(P))
    # straddles the ceiling: re-certify at 4x precision, floored at a few ulps of a
    lo, hi = root_radius(Q, max(tol / 4, 16 * math.ulp(a)))
    if lo > a:
        return None
    return HouseRecord(P, (lo, hi), False, is_reciprocal(P), flagged=hi > a)


# ---------------------------------------------------------------------------
# Shards
# ---------------------------------------------------------------------------

@dataclass
class _ShardResult:
    records: list[HouseRecord]
    nodes: int
    leaves: int


def _prefixes(d: int, coeff_bounds: list[int], shard: int, shards: int) -> list[tuple[int, ...]]:
    c1 = list(range(-coeff_bounds[0], coeff_bounds[0] + 1))
    size = -(-len(c1) // shards)
    mine = c1[shard * size:(shard + 1) * size]
    if d == 1:
        return [(x,) for x in mine]
    return [(x, y) for x in mine for y in range(-coeff_bounds[1], coeff_bounds[1] + 1)]


def _checkpoint_path(directory: Path, d: int, a: float, shard: int, shards: int) -> Path:
    return directory / f"shard_d{d}_a{a!r}_{shard:03d}of{shards:03d}.json"


def _run_shard(d: int, a: float, tol: float, shard: int, shards: int,
               checkpoint_dir: Optional[str], backend: Optional[str]) -> _ShardResult:
    sum_bounds, coeff_bounds = _bounds(d, a)
    prefixes = _prefixes(d, coeff_bounds, shard, shards)
    records: list[HouseRecord] = []
    nodes = leaves = 0
    last: Optional[tuple[int, ...]] = None
    path = None
    if checkpoint_dir is not None:
        path = _checkpoint_path(Path(checkpoint_dir), d, a, shard, shards)
        if path.exists():
            state = json.loads(path.read_text())
            last = tuple(state["last_prefix"]) if state["last_prefix"] is not None else None
            records = [HouseRecord.from_json(r) for r in state["records"]]
            nodes, leaves = state["nodes"], state["leaves"]
            log.info("shard %d resumed after prefix %s", shard, last)
    for prefix in prefixes:
        if last is not None and prefix <= last:
            continue
        found, n = kernels.enumerate_prefix(d, sum_bounds, coeff_bounds, prefix, backend)
        nodes += n + 1  # the prefix node itself
        leaves += len(found)
        for tail in found:
            rec = certify_house(_poly_from_tail(tail), a, tol)
            if rec is not None:
                records.append(rec)
        if path is not None:
            state = {"shard": shard, "shards": shards, "d": d, "a": a,
                     "last_prefix": list(prefix), "nodes": nodes, "leaves": leaves,
                     "records": [r.to_json() for r in records]}
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps(state, sort_keys=True))
            os.replace(tmp, path)
    return _ShardResult(records, nodes, leaves)


def _default_workers() -> int:
    return max(1, int(os.environ.get("STEINLAB_THREADS", "1")))


def _run_all(d: int, a: float, tol: float, shards: int, workers: Optional[int],
             checkpoint_dir: Optional[str], backend: Optional[str]) -> list[_ShardResult]:
    if d < 1 or a < 1:
        raise InputError("need d >= 1 and a >= 1")
    if shards < 1:
        raise InputError("shards must be >= 1")
    if checkpoint_dir is not None:
        Path(checkpoint_dir).mkdir(parents=True, exist_ok=True)
    workers = workers or _default_workers()
    args = [(d, a, tol, s, shards, checkpoint_dir, backend) for s in range(shards)]
    if workers == 1 or shards == 1:
        return [_run_shard(*x) for x in args]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_shard, *x) for x in args]
        return [f.result() for f in futures]


def enumerate_bounded_house(d: int, a: float, sink: Callable[[HouseRecord], None],
                            tol: float = 1e-12, shards: int = 1, workers: Optional[int] = None,
                            checkpoint_dir: Optional[str] = None,
                            backend: Optional[str] = None) -> int:
    """Feed ``sink`` every monic degree-d polynomial with certified house <= a.

    Records arrive in lexicographic order of ``(c_1, ..., c_d)`` regardless of
    the shard count; records whose enclosure straddles ``a`` arrive flagged.
    """
    count = 0
    for res in _run_all(d, a, tol, shards, workers, checkpoint_dir, backend):
        for rec in res.records:
            sink(rec)
            count += 1
    return count


def _argmin_key(rec: HouseRecord):
    return (sum(abs(c) for c in rec.poly.coeffs), rec.poly.coeffs)


def sz_margin(d: int, tol: float = 1e-9, shards: int = 1, workers: Optional[int] = None,
              checkpoint_dir: Optional[str] = None, backend: Optional[str] = None,
              keep_records: bool = False) -> MarginResult:
    """Smallest ``house(P) - 1`` over monic degree-d P with house > 1."""
    if not 1 <= d <= SZ_MAX_DEGREE:
        raise DegreeTooLarge(f"sz_margin is implemented for 1 <= d <= {SZ_MAX_DEGREE}")
    t0 = time.perf_counter()
    # x^d - 2 always qualifies, so this ceiling cannot lose the minimum
    a = 2.0 ** (1.0 / d) * (1 + 1e-9)
    results = _run_all(d, a, tol, shards, workers, checkpoint_dir, backend)
    records = [r for res in results for r in res.records]
    above = [r for r in records if not r.is_cyclotomic_product and r.house[1] > 0]
    best_hi = min(r.house[1] for r in above)
    best_lo = min(r.house[0] for r in above)
    tied = [r for r in above if r.house[0] <= best_hi]
    argmin = min(tied, key=_argmin_key)
    return MarginResult(
        d=d, mu_prime=(_down(best_lo - 1.0), _up(best_hi - 1.0)), argmin=argmin.poly,
        ceiling=a, count=len(records), nodes=sum(r.nodes for r in results),
        leaves=sum(r.leaves for r in results), wall_time=time.perf_counter() - t0,
        stragglers=[r for r in records if r.flagged],
        records=records if keep_records else [])


def voutier_lower_bound(d: int) -> float:
    """``(1/4d) (log log d / log d)^3`` for d >= 3."""
    if d < 3:
        raise InputError("bound is stated for d >= 3")
    return (math.log(math.log(d)) / math.log(d)) ** 3 / (4 * d)


def x_d_minus_2_bound(d: int) -> float:
    return 2.0 ** (1.0 / d) - 1.0
