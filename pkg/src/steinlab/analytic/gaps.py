"""Return times of a torus rotation to a neighbourhood of the identity."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from ..errors import InputError
from ..intcore import TorusPoint


@dataclass(frozen=True)
class GapSet:
    epsilon: float
    horizon: int
    members: tuple[int, ...]
    max_gap: Optional[int]
    exhaustive: bool = True

    @property
    def nonempty(self) -> bool:
        return bool(self.members)

    def gaps(self) -> list[int]:
        return [b - a for a, b in zip(self.members, self.members[1:])]

    def to_json(self) -> dict:
        return {"epsilon": self.epsilon, "horizon": self.horizon, "members": list(self.members),
                "max_gap": self.max_gap, "exhaustive": self.exhaustive}


def _turns(theta: Union[TorusPoint, Sequence[float]]) -> np.ndarray:
    if isinstance(theta, TorusPoint):
        return np.array([cmath.phase(c) / (2 * math.pi) for c in theta.coords])
    return np.asarray(theta, dtype=float)


def gap_set(theta: Union[TorusPoint, Sequence[float]], epsilon: float, horizon: int) -> GapSet:
    """``{0 <= j <= horizon : ||(1,..,1) - theta^j||_inf < epsilon}``.

    ``theta`` is a torus point or its angles in turns.
    """
    if not epsilon > 0:
        raise InputError("epsilon must be positive")
    if horizon < 1:
        raise InputError("horizon must be >= 1")
    t = _turns(theta)
    j = np.arange(horizon + 1)
    frac = np.mod(np.outer(j, t), 1.0)
    # |1 - e^{2 pi i x}| = 2 |sin(pi x)|
    dist = np.max(2 * np.abs(np.sin(np.pi * frac)), axis=1) if len(t) else np.zeros(len(j))
    members = tuple(int(x) for x in j[dist < epsilon])
    gaps = [b - a for a, b in zip(members, members[1:])]
    return GapSet(epsilon, horizon, members, max(gaps) if gaps else None)


def three_gap_check(gs: GapSet) -> bool:
    """For a single rotation the return times to an interval take at most three
    distinct gap values, the largest being the sum of the other two when three occur."""
    vals = sorted(set(gs.gaps()))
    if len(vals) <= 2:
        return True
    return len(vals) == 3 and vals[2] == vals[0] + vals[1]
