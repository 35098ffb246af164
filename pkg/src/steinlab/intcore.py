"""Exact integer matrices, monic integer polynomials and the two Z-actions.

Covectors are row vectors acted on from the right, ``k -> k M^j``.  Points of
``(C*)^d`` are acted on through the rows of ``M``: the i-th coordinate of
``1.z`` is ``prod_l z_l ** M[i][l]``.  With these conventions
``(j.z)^k == z^(j.k)`` holds for every ``j``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import InputError, NotUnimodular, OutOfRange, ZeroCoordinate


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntMatrix:
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise InputError("IntMatrix must be a non-empty square array")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def identity(cls, d: int) -> "IntMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(d)) for i in range(d)))

    @classmethod
    def from_json(cls, obj: dict) -> "IntMatrix":
        m = cls(tuple(tuple(r) for r in obj["rows"]))
        if "dim" in obj and int(obj["dim"]) != m.dim:
            raise InputError(f"declared dim {obj['dim']} != {m.dim}")
        return m

    def to_json(self) -> dict:
        return {"dim": self.dim, "rows": [list(r) for r in self.rows]}

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        cols = list(zip(*other.rows))
        return IntMatrix(tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols)
                               for r in self.rows))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(tuple(tuple(a - b for a, b in zip(r, s))
                               for r, s in zip(self.rows, other.rows)))

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        """Column action ``M v``."""
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.rows)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.rows)))

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def pow(self, n: int) -> "IntMatrix":
        if n < 0:
            return inverse_unimodular(self).pow(-n)
        result = IntMatrix.identity(self.dim)
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def inf_norm(self) -> int:
        """Max absolute row sum; bounds ``||k A||_1 <= ||k||_1 * inf_norm(A)``."""
        return max(sum(abs(x) for x in r) for r in self.rows)


def determinant(M: IntMatrix) -> int:
    """Bareiss fraction-free elimination."""
    a = [list(r) for r in M.rows]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def is_unimodular(M: IntMatrix) -> bool:
    return determinant(M) in (1, -1)


def inverse_unimodular(M: IntMatrix) -> IntMatrix:
    if not is_unimodular(M):
        raise NotUnimodular("matrix determinant is not +-1")
    n = M.dim
    a = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
         for i, r in enumerate(M.rows)]
    for c in range(n):
        p = next(i for i in range(c, n) if a[i][c] != 0)
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    inv = []
    for r in a:
        row = r[n:]
        if any(x.denominator != 1 for x in row):  # pragma: no cover - det is +-1
            raise NotUnimodular("inverse is not integral")
        inv.append(tuple(int(x) for x in row))
    return IntMatrix(tuple(inv))


def integer_rank(vectors: Sequence[Sequence[int]]) -> int:
    """Exact rank of a list of integer vectors (fraction-free elimination)."""
    a = [list(v) for v in vectors]
    if not a:
        return 0
    rank = 0
    ncols = len(a[0])
    for c in range(ncols):
        p = next((i for i in range(rank, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[rank], a[p] = a[p], a[rank]
        for i in range(rank + 1, len(a)):
            if a[i][c]:
                f, g = a[i][c], a[rank][c]
                a[i] = [x * g - y * f for x, y in zip(a[i], a[rank])]
                # keep entries small
                cont = math.gcd(*a[i])
                if cont > 1:
                    a[i] = [x // cont for x in a[i]]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, coefficients lowest degree first."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = [int(x) for x in self.coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if not c:
            c = [0]
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_json(cls, obj: dict) -> "IntPolynomial":
        return cls(tuple(obj["coeffs_low_to_high"]))

    def to_json(self) -> dict:
        return {"coeffs_low_to_high": list(self.coeffs)}

    @classmethod
    def x_power(cls, n: int) -> "IntPolynomial":
        return cls((0,) * n + (1,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def monic(self) -> bool:
        return self.coeffs[-1] == 1

    def is_zero(self) -> bool:
        return self.coeffs == (0,)

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(tuple(out))

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPolynomial(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return self + (-other)

    def divmod_monic(self, divisor: "IntPolynomial") -> tuple["IntPolynomial", "IntPolynomial"]:
        if divisor.coeffs[-1] not in (1, -1):
            raise InputError("divisor must have unit leading coefficient")
        lead = divisor.coeffs[-1]
        rem = list(self.coeffs)
        dd = divisor.degree
        if len(rem) - 1 < dd:
            return IntPolynomial((0,)), self
        quot = [0] * (len(rem) - dd)
        for i in range(len(rem) - 1, dd - 1, -1):
            q = rem[i] * lead
            quot[i - dd] = q
            if q:
                for j, c in enumerate(divisor.coeffs):
                    rem[i - dd + j] -= q * c
        return IntPolynomial(tuple(quot)), IntPolynomial(tuple(rem[:dd] or [0]))

    def derivative(self) -> "IntPolynomial":
        if self.degree == 0:
            return IntPolynomial((0,))
        return IntPolynomial(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def reversed(self) -> "IntPolynomial":
        """``x^deg * P(1/x)``; drops the factor x^v when P(0) = 0."""
        c = list(self.coeffs)
        while len(c) > 1 and c[0] == 0:
            c.pop(0)
        return IntPolynomial(tuple(reversed(c)))

    def content(self) -> int:
        return math.gcd(*self.coeffs)

    def primitive(self) -> "IntPolynomial":
        g = self.content()
        if g == 0:
            return self
        p = IntPolynomial(tuple(c // g for c in self.coeffs))
        return -p if p.coeffs[-1] < 0 else p

    def strip_x(self) -> tuple[int, "IntPolynomial"]:
        """Return (v, Q) with P = x^v Q and Q(0) != 0."""
        v = 0
        while v < self.degree and self.coeffs[v] == 0:
            v += 1
        return v, IntPolynomial(self.coeffs[v:])

    def __str__(self) -> str:
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0 and self.degree > 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and abs(c) == 1:
                s = mono
            else:
                s = f"{abs(c)}{'*' + mono if mono else ''}"
            terms.append(("-" if c < 0 else "+", s))
        out = "".join(f" {sg} {s}" for sg, s in terms).strip()
        return out[2:] if out.startswith("+ ") else "-" + out[2:]


def _frac_divmod(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    """Remainder of a by b over Q (lists low-to-high, b nonzero lead)."""
    a = a[:]
    while len(a) >= len(b) and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        f = a[-1] / b[-1]
        off = len(a) - len(b)
        for j, c in enumerate(b):
            a[off + j] -= f * c
        a.pop()
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def poly_gcd(p: IntPolynomial, q: IntPolynomial) -> IntPolynomial:
    """Monic-up-to-content gcd over Q, returned primitive with positive lead."""
    a = [Fraction(c) for c in p.coeffs]
    b = [Fraction(c) for c in q.coeffs]
    if not any(b):
        return p.primitive()
    while any(b):
        a, b = b, _frac_divmod(a, b)
        if not any(b):
            break
    den = math.lcm(*(x.denominator for x in a))
    return IntPolynomial(tuple(int(x * den) for x in a)).primitive()


def squarefree_part(p: IntPolynomial) -> IntPolynomial:
    """P / gcd(P, P'); same root set as P, every root simple."""
    if p.degree <= 1:
        return p
    g = poly_gcd(p, p.derivative())
    if g.degree == 0:
        return p
    q, r = p.divmod_monic(g)  # g is primitive with lead 1 when p is monic
    if not r.is_zero():  # pragma: no cover - defensive
        raise ArithmeticError("inexact square-free division")
    return q


# ---------------------------------------------------------------------------
# Characteristic polynomial
# ---------------------------------------------------------------------------

def char_poly(M: IntMatrix) -> IntPolynomial:
    """Faddeev-LeVerrier recursion; every division is exact over Z."""
    n = M.dim
    A = [list(r) for r in M.rows]
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    Mk = [[0] * n for _ in range(n)]
    for k in range(1, n + 1):
        # Mk <- A Mk_prev + c_{n-k+1} I
        prod = [[sum(A[i][l] * Mk[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        c_prev = coeffs[n - k + 1]
        for i in range(n):
            prod[i][i] += c_prev
        Mk = prod
        tr = sum(sum(A[i][l] * Mk[l][i] for l in range(n)) for i in range(n))
        if tr % k:  # pragma: no cover - impossible for integer matrices
            raise ArithmeticError("non-integral Faddeev-LeVerrier step")
        coeffs[n - k] = -tr // k
    return IntPolynomial(tuple(coeffs))


# ---------------------------------------------------------------------------
# Lattice vectors, points and actions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LatticeVector:
    entries: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(x) for x in self.entries))

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __matmul__(self, M: IntMatrix) -> "LatticeVector":
        cols = zip(*M.rows)
        return LatticeVector(tuple(sum(a * b for a, b in zip(self.entries, c)) for c in cols))

    def is_zero(self) -> bool:
        return not any(self.entries)

    def l1(self) -> int:
        return sum(abs(x) for x in self.entries)


@dataclass(frozen=True)
class TorusPoint:
    coords: tuple[complex, ...]
    tol: float = 1e-12

    def __post_init__(self):
        c = tuple(complex(x) for x in self.coords)
        if any(abs(abs(x) - 1.0) > self.tol for x in c):
            raise InputError("torus coordinates must have unit modulus")
        object.__setattr__(self, "coords", c)

    @classmethod
    def from_turns(cls, turns: Iterable[float]) -> "TorusPoint":
        return cls(tuple(cmath.exp(2j * math.pi * t) for t in turns))

    @property
    def dim(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class ComplexPoint:
    coords: tuple[complex, ...]

    def __post_init__(self):
        c = tuple(complex(x) for x in self.coords)
        if any(x == 0 for x in c):
            raise ZeroCoordinate("points of (C*)^d have nonzero coordinates")
        object.__setattr__(self, "coords", c)

    @classmethod
    def from_log_moduli(cls, logs: Sequence[float], args: Sequence[float] | None = None):
        args = args or [0.0] * len(logs)
        return cls(tuple(cmath.exp(complex(x, t)) for x, t in zip(logs, args)))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def log_abs(self) -> list[float]:
        return [math.log(abs(x)) for x in self.coords]

    def monomial(self, k: Union[LatticeVector, Sequence[int]]) -> complex:
        """``z^k`` evaluated as ``exp(sum k_i Log z_i)``."""
        ks = k.entries if isinstance(k, LatticeVector) else k
        return cmath.exp(sum(n * cmath.log(x) for n, x in zip(ks, self.coords)))


def _check_dims(*dims: int) -> None:
    if len(set(dims)) != 1:
        raise InputError(f"dimension mismatch: {dims}")


def covector_action(k: LatticeVector, M: IntMatrix, j: int) -> LatticeVector:
    _check_dims(k.dim, M.dim)
    if j == 0:
        return k
    return k @ M.pow(j)


def point_action(z: ComplexPoint, M: IntMatrix, j: int) -> ComplexPoint:
    _check_dims(z.dim, M.dim)
    if j == 0:
        return z
    P = M.pow(j)
    logs = [cmath.log(x) for x in z.coords]
    expos = [sum(e * l for e, l in zip(row, logs)) for row in P.rows]
    if any(abs(x.real) > 700 for x in expos):
        raise OutOfRange("image modulus leaves double range; use log_abs_monomial on covectors")
    return ComplexPoint(tuple(cmath.exp(x) for x in expos))


def log_abs_monomial(z: ComplexPoint, k: LatticeVector) -> float:
    _check_dims(z.dim, k.dim)
    return math.fsum(n * x for n, x in zip(k.entries, z.log_abs()))


@dataclass(frozen=True)
class OrbitClass:
    kind: str  # "Finite" | "Free" | "Unknown"
    period: int | None = None


def finite_orbit_exponent(M: IntMatrix) -> int:
    """Smallest q with ``M^q - I`` nilpotent restricted to the cyclotomic part.

    Precisely: the lcm of all n with Phi_n dividing char_poly(M).  A covector
    has a finite orbit iff it is fixed by ``M^q``.
    """
    from .spectra import cyclotomic_factorization

    factors, _ = cyclotomic_factorization(char_poly(M))
    q = 1
    for n in factors:
        q = math.lcm(q, n)
    return q


def orbit_classify(k: LatticeVector, M: IntMatrix, cap: int) -> OrbitClass:
    """Classify the Z-orbit of ``k`` under ``k -> k M``.

    Decided exactly: a finite orbit is fixed by ``M^q`` with q from
    :func:`finite_orbit_exponent`; anything not fixed by ``M^q`` is free.
    ``Unknown`` is returned only when the period exceeds ``cap``.
    """
    if not is_unimodular(M):
        raise NotUnimodular("orbit classification needs M in GL_d(Z)")
    if cap < 1:
        raise InputError("cap must be >= 1")
    _check_dims(k.dim, M.dim)
    cur = k
    for p in range(1, cap + 1):
        cur = cur @ M
        if cur == k:
            return OrbitClass("Finite", p)
    q = finite_orbit_exponent(M)
    if k @ M.pow(q) != k:
        return OrbitClass("Free")
    return OrbitClass("Unknown")
