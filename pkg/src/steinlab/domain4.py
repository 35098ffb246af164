"""A bounded Stein Reinhardt domain in (C*)^4 acted on by a matrix with
non-real spectrum, rebuilt from its log-polytope and machine-checked.

All lattice iterates ``u_j = N^j u`` are exact integers.  Floating point only
enters the eigenframe, and there only to certify the tail ``|j| >= j*`` where
exact iteration stops.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import numpy as np

from .errors import (CertificationFailed, IllConditionedFrame, InputError,
                     MembershipFailure, RankDeficient, SpectrumShapeMismatch)
from .intcore import (IntMatrix, char_poly, integer_rank, inverse_unimodular,
                      is_unimodular)
from .spectra import enclose_roots, spectral_profile

BUILTIN_N = IntMatrix((
    (0, -2, -7, 9),
    (0, -10, -20, 29),
    (0, -13, -31, 43),
    (-1, -11, -36, 47),
))
BUILTIN_U = (-14, -43, -62, -63)


@dataclass(frozen=True)
class EigenFrame:
    alpha1: tuple[float, float]
    alpha2: tuple[float, float]
    omega: complex
    omega_radius: float
    v1: np.ndarray
    v2: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    residuals: tuple[float, float, float]
    precision: int
    # high-precision copies used by the certificates
    _mp: dict = field(default_factory=dict, repr=False, compare=False)

    def to_json(self) -> dict:
        return {"alpha1": list(self.alpha1), "alpha2": list(self.alpha2),
                "omega": [self.omega.real, self.omega.imag], "omega_radius": self.omega_radius,
                "v1": self.v1.tolist(), "v2": self.v2.tolist(),
                "w1": self.w1.tolist(), "w2": self.w2.tolist(),
                "residuals": list(self.residuals), "precision": self.precision}


def _null_vector(A, dps: int):
    """Kernel direction of a numerically singular mp matrix by inverse iteration."""
    n = A.rows
    x = mpmath.matrix([1 + mpmath.mpf(i) / 7 for i in range(n)])
    shift = mpmath.mpf(10) ** (-(dps // 2))
    B = A + shift * mpmath.eye(n)
    for _ in range(4):
        x = mpmath.lu_solve(B, x)
        x = x / mpmath.norm(x, mpmath.inf)
    return x


def eigen_frame(N: IntMatrix, tol: float = 1e-9, precision: int = 40) -> EigenFrame:
    if N.dim != 4:
        raise SpectrumShapeMismatch("eigen_frame expects a 4x4 matrix")
    if not is_unimodular(N):
        raise SpectrumShapeMismatch("matrix is not in GL_4(Z)")
    discs = enclose_roots(char_poly(N), 1e-14)
    real = [d for d in discs if abs(d.center.imag) <= d.radius and d.multiplicity == 1]
    cplx = [d for d in discs if d.center.imag > d.radius and d.multiplicity == 1]
    if len(real) != 2 or len(cplx) != 1:
        raise SpectrumShapeMismatch("need two simple real eigenvalues and one complex pair")
    real.sort(key=lambda d: -abs(d.center))
    with mpmath.workdps(precision):
        A = mpmath.matrix([[mpmath.mpf(x) for x in r] for r in N.rows])
        P = char_poly(N)
        from .spectra import _aberth_mp  # high-precision polish of the certified roots
        roots = _aberth_mp(P.coeffs, [mpmath.mpc(real[0].center), mpmath.mpc(real[1].center),
                                      mpmath.mpc(cplx[0].center), mpmath.mpc(cplx[0].center.conjugate())],
                           iters=30)
        lam1, lam2, om = mpmath.re(roots[0]), mpmath.re(roots[1]), roots[2]
        vecs = []
        for lam in (lam1, lam2):
            v = _null_vector(A - lam * mpmath.eye(4), precision)
            if all(x > 0 for x in v):
                v = -v
            vecs.append(v)
        Ac = mpmath.matrix(A)
        vc = _null_vector(Ac - om * mpmath.eye(4), precision)
        wp = mpmath.matrix([mpmath.re(x) for x in vc])
        wpp = mpmath.matrix([mpmath.im(x) for x in vc])
        res = (float(mpmath.norm(A * vecs[0] - lam1 * vecs[0], mpmath.inf)),
               float(mpmath.norm(A * vecs[1] - lam2 * vecs[1], mpmath.inf)),
               float(mpmath.norm(A * vc - om * vc, mpmath.inf)))
        mp_data = {"lam1": lam1, "lam2": lam2, "omega": om, "v1": vecs[0], "v2": vecs[1],
                   "w1": wp, "w2": wpp}
        to_np = lambda v: np.array([float(x) for x in v])  # noqa: E731
        frame = EigenFrame(
            alpha1=(real[0].center.real - real[0].radius, real[0].center.real + real[0].radius),
            alpha2=(real[1].center.real - real[1].radius, real[1].center.real + real[1].radius),
            omega=complex(cplx[0].center), omega_radius=cplx[0].radius,
            v1=to_np(vecs[0]), v2=to_np(vecs[1]), w1=to_np(wp), w2=to_np(wpp),
            residuals=res, precision=precision, _mp=mp_data)
    if max(res) > tol:
        raise CertificationFailed(f"eigen residual {max(res):.3g} exceeds {tol}")
    for name, v in (("v1", frame.v1), ("v2", frame.v2)):
        if not np.all(v < 0):
            raise CertificationFailed(f"{name} cannot be sign-normalized into the negative orthant")
    return frame


@dataclass(frozen=True)
class SeedDecomposition:
    a1: float
    a2: float
    a_prime: float
    a_second: float
    residual: float
    condition: float

    @property
    def positive(self) -> bool:
        return self.a1 > 0 and self.a2 > 0

    def to_json(self) -> dict:
        return {"a1": self.a1, "a2": self.a2, "a_prime": self.a_prime, "a_second": self.a_second,
                "residual": self.residual, "condition": self.condition,
                "a1_positive": self.a1 > 0, "a2_positive": self.a2 > 0}


def _frame_basis(frame: EigenFrame):
    m = frame._mp
    return mpmath.matrix([[m["v1"][i], m["v2"][i], m["w1"][i], m["w2"][i]] for i in range(4)])


def decompose_seed(u: Sequence[float], frame: EigenFrame, tol: float = 1e-9,
                   max_condition: float = 1e10) -> SeedDecomposition:
    basis = np.column_stack([frame.v1, frame.v2, frame.w1, frame.w2])
    cond = float(np.linalg.cond(basis))
    if not math.isfinite(cond) or cond > max_condition:
        raise IllConditionedFrame(f"frame condition number {cond:.3g}")
    with mpmath.workdps(frame.precision):
        B = _frame_basis(frame)
        rhs = mpmath.matrix([mpmath.mpf(x) for x in u])
        a = mpmath.lu_solve(B, rhs)
        resid = float(mpmath.norm(B * a - rhs, mpmath.inf))
        coeffs = [float(x) for x in a]
    if resid > tol:
        raise CertificationFailed(f"reconstruction residual {resid:.3g}")
    return SeedDecomposition(*coeffs, residual=resid, condition=cond)


# ---------------------------------------------------------------------------
# Index bound J
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JCertificate:
    J: int
    bad_indices: tuple[int, ...]
    exact_range: tuple[int, int]
    forward_tail_start: int
    backward_tail_start: int
    plane_constant: float
    precision: int

    def to_json(self) -> dict:
        return {"J": self.J, "bad_indices": list(self.bad_indices),
                "exact_range": list(self.exact_range),
                "forward_tail_start": self.forward_tail_start,
                "backward_tail_start": self.backward_tail_start,
                "plane_constant": self.plane_constant, "precision": self.precision}


def iterates(N: IntMatrix, u: Sequence[int], lo: int, hi: int) -> dict[int, tuple[int, ...]]:
    """Exact ``N^j u`` for ``lo <= j <= hi`` (lo <= 0 <= hi)."""
    out = {0: tuple(int(x) for x in u)}
    Ninv = inverse_unimodular(N)
    for j in range(1, hi + 1):
        out[j] = N.apply(out[j - 1])
    for j in range(-1, lo - 1, -1):
        out[j] = Ninv.apply(out[j + 1])
    return out


def _negative(v: Sequence[int]) -> bool:
    return all(x < 0 for x in v)


def find_J(N: IntMatrix, u: Sequence[int], frame: Optional[EigenFrame] = None,
           precision: int = 40, min_exact: int = 50) -> JCertificate:
    """Smallest J > 0 with ``N^j u`` strictly negative whenever ``|j| >= J - 4``."""
    frame = frame or eigen_frame(N, precision=precision)
    dec = decompose_seed(u, frame)
    if not dec.positive:
        raise CertificationFailed(f"seed has a1={dec.a1:.4g}, a2={dec.a2:.4g}; both must be > 0")
    if not (frame.alpha1[0] > 1 and 0 < frame.alpha2[0] and frame.alpha2[1] < 1):
        raise CertificationFailed("tail certificate needs alpha1 > 1 > alpha2 > 0")
    with mpmath.workdps(frame.precision):
        m = frame._mp
        B = _frame_basis(frame)
        a = mpmath.lu_solve(B, mpmath.matrix([mpmath.mpf(x) for x in u]))
        a1, a2, ap, app = a[0], a[1], a[2], a[3]
        om = abs(m["omega"])
        # N acts on span(w1, w2) as |omega| times a rotation in these coordinates,
        # so ||w_j||_inf <= |omega|^j * ||(a', a'')||_2 * max_i ||(w1_i, w2_i)||_2
        C = mpmath.sqrt(ap ** 2 + app ** 2) * max(mpmath.sqrt(m["w1"][i] ** 2 + m["w2"][i] ** 2)
                                                 for i in range(4))
        C_cert = 2 * C + mpmath.mpf(10) ** (-(frame.precision // 2))
        lead1 = a1 * min(-m["v1"][i] for i in range(4))
        lead2 = a2 * min(-m["v2"][i] for i in range(4))
        # forward: a1 m1 (alpha1/|omega|)^j > C ; backward: a2 m2 (|omega|/alpha2)^n > C
        jf = max(0, int(mpmath.ceil(mpmath.log(C_cert / lead1) / mpmath.log(m["lam1"] / om))) + 1)
        jb = max(0, int(mpmath.ceil(mpmath.log(C_cert / lead2) / mpmath.log(om / m["lam2"]))) + 1)
    reach = max(jf, jb, min_exact)
    it = iterates(N, u, -reach, reach)
    bad = tuple(sorted(j for j, v in it.items() if not _negative(v)))
    J = max(abs(b) for b in bad) + 5 if bad else 1
    return JCertificate(J=J, bad_indices=bad, exact_range=(-reach, reach),
                        forward_tail_start=jf, backward_tail_start=jb,
                        plane_constant=float(C), precision=frame.precision)


# ---------------------------------------------------------------------------
# Polytope
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogPolytope:
    N: IntMatrix
    u: tuple[int, ...]
    J: int
    horizon: int
    vertices: dict[int, tuple[int, ...]]  # index (2j+1)J+k -> u_index
    M: IntMatrix

    def vertex_indices(self, horizon: Optional[int] = None) -> list[int]:
        H = self.horizon if horizon is None else horizon
        return sorted({(2 * j + 1) * self.J + k for j in range(-H, H + 1) for k in range(5)})

    def to_json(self) -> dict:
        return {"N": self.N.to_json(), "u": list(self.u), "J": self.J, "horizon": self.horizon,
                "M": self.M.to_json(),
                "vertices": [{"index": i, "u": list(self.vertices[i])} for i in self.vertex_indices()]}


def build_polytope(N: IntMatrix, u: Sequence[int], J: int, horizon: int,
                   cert: Optional[JCertificate] = None) -> tuple[LogPolytope, dict]:
    if horizon < 1:
        raise InputError("horizon must be >= 1")
    if J < 1:
        raise InputError("J must be positive")
    H = horizon
    lo, hi = (-2 * (H + 1) + 1) * J, (2 * (H + 1) + 1) * J + 4
    it = iterates(N, u, min(lo, 0), max(hi, 4))
    M = N.pow(2 * J)
    poly = LogPolytope(N, tuple(u), J, H, it, M)
    idx = poly.vertex_indices()

    # (i) A is N^{2J}-invariant: the index shift (2j+1)J+k -> (2j+3)J+k
    shift_ok = all(M.apply(it[(2 * j + 1) * J + k]) == it[(2 * j + 3) * J + k]
                   for j in range(-H - 1, H + 1) for k in range(5))
    # (ii) negative orthant; |(2j+1)J + k| >= J - 4 for every j in Z and k = 0..4
    listed_negative = all(_negative(it[i]) for i in idx)
    index_bound_ok = all(abs((2 * j + 1) * J + k) >= J - 4 for j in range(-H - 1, H + 2) for k in range(5))
    tail_ok = cert is not None and cert.J <= J
    # (iii) affine rank of B = {u_0..u_4} and of N^J B
    def affine_rank(pts):
        return integer_rank([tuple(p - q for p, q in zip(x, pts[0])) for x in pts[1:]])

    rank_B = affine_rank([it[k] for k in range(5)])
    rank_NJB = affine_rank([it[J + k] for k in range(5)])
    report = {
        "invariance": {"passed": shift_ok, "matrix_power": 2 * J,
                       "checked_pairs": 5 * (2 * H + 2)},
        "negative_orthant": {"passed": listed_negative and index_bound_ok and tail_ok,
                             "listed_vertices": len(idx), "listed_negative": listed_negative,
                             "index_bound": index_bound_ok, "tail_certificate": tail_ok},
        "affine_rank": {"passed": rank_B == 4 and rank_NJB == 4, "rank_B": rank_B,
                        "rank_NJ_B": rank_NJB},
    }
    report["passed"] = all(report[k]["passed"] for k in ("invariance", "negative_orthant", "affine_rank"))
    if rank_NJB < 4:
        raise RankDeficient(f"N^J B spans an affine space of dimension {rank_NJB} < 4")
    return poly, report


# ---------------------------------------------------------------------------
# Exact hull membership
# ---------------------------------------------------------------------------

def exact_convex_weights(points: Sequence[Sequence[int]], target: Sequence[Fraction]):
    """Nonnegative weights summing to 1 with ``sum w_i p_i = target``, or None.

    Phase-one simplex over the rationals with Bland's rule.
    """
    n = len(points)
    dim = len(target)
    rows = [[Fraction(p[r]) for p in points] + [Fraction(target[r])] for r in range(dim)]
    rows.append([Fraction(1)] * n + [Fraction(1)])
    m = len(rows)
    for r in rows:
        if r[-1] < 0:
            for c in range(len(r)):
                r[c] = -r[c]
    # tableau: original vars 0..n-1, artificials n..n+m-1, rhs last
    tab = [r[:n] + [Fraction(int(i == k)) for k in range(m)] + [r[-1]] for i, r in enumerate(rows)]
    basis = [n + i for i in range(m)]
    ncols = n + m
    obj = [-sum(tab[i][c] for i in range(m)) if c < n else Fraction(0) for c in range(ncols)]
    obj.append(-sum(tab[i][-1] for i in range(m)))
    while True:
        enter = next((c for c in range(ncols) if obj[c] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][-1] / tab[i][enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:  # pragma: no cover - phase one is bounded
            return None
        r = best[1]
        piv = tab[r][enter]
        tab[r] = [x / piv for x in tab[r]]
        for i in range(m):
            if i != r and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [x - f * y for x, y in zip(tab[i], tab[r])]
        f = obj[enter]
        obj = [x - f * y for x, y in zip(obj, tab[r])]
        basis[r] = enter
    if obj[-1] != 0:
        return None
    w = [Fraction(0)] * n
    for i, b in enumerate(basis):
        if b < n:
            w[b] = tab[i][-1]
    return w


def _point_action_agrees(x, A: IntMatrix, img) -> bool:
    """``log|w_i|`` for ``w_i = prod z_l^{A_il}``, ``z = exp(x)``, against the exact ``A x``.

    Done in mpmath, whose unbounded exponent range holds ``exp(-1e18)``.
    """
    with mpmath.workdps(30):
        z = [mpmath.exp(mpmath.mpf(t.numerator) / t.denominator) for t in x]
        for row, target in zip(A.rows, img):
            w = mpmath.fprod(mpmath.power(zl, e) for zl, e in zip(z, row))
            exact = mpmath.mpf(target.numerator) / target.denominator
            if abs(mpmath.log(w) - exact) > mpmath.mpf(10) ** -12 * (1 + abs(exact)):
                return False
    return True


def verify_reinhardt_instance(poly: LogPolytope, samples: int = 8, seed: int = 0,
                              horizon: Optional[int] = None) -> dict:
    """Sample interior log-points, act by M^{+-1}, check hull membership exactly.

    Images of points of the H-truncated hull must land in the (H+1)-truncated
    hull.  Log-moduli transform linearly (``log|1.z| = M log|z|``); each image
    is also recomputed multiplicatively and compared.
    """
    H = poly.horizon if horizon is None else min(horizon, poly.horizon)
    rng = random.Random(seed)
    inner = [poly.vertices[i] for i in poly.vertex_indices(H)]
    outer_idx = sorted({(2 * j + 1) * poly.J + k for j in range(-H - 1, H + 2) for k in range(5)})
    outer = [poly.vertices[i] for i in outer_idx]
    Minv = inverse_unimodular(poly.M)
    bary = tuple(Fraction(sum(v[c] for v in inner), len(inner)) for c in range(4))
    points = [bary]
    for _ in range(samples - 1):
        w = [rng.randint(1, 1000) for _ in inner]
        s = sum(w)
        points.append(tuple(Fraction(sum(wi * v[c] for wi, v in zip(w, inner)), s) for c in range(4)))
    checked = 0
    via_point_action = 0
    for x in points:
        for A in (poly.M, Minv):
            img = tuple(sum(A.rows[r][c] * x[c] for c in range(4)) for r in range(4))
            if not _point_action_agrees(x, A, img):
                raise MembershipFailure("multiplicative action disagrees with the log-linear image")
            via_point_action += 1
            if exact_convex_weights(outer, img) is None:
                raise MembershipFailure(f"image of sample {checked} leaves the truncated hull")
            checked += 1
    coords = list(zip(*inner))
    bbox = [[min(c), max(c)] for c in coords]
    rho = spectral_profile(poly.M, 1e-9).rho
    alpha1 = spectral_profile(poly.N, 1e-12).rho
    return {
        "samples": len(points), "images_checked": checked,
        "images_via_point_action": via_point_action,
        "bounded": all(hi < 0 for _, hi in bbox), "bounding_box": bbox,
        "rho_M": list(rho), "alpha1_pow_2J": [alpha1[0] ** (2 * poly.J), alpha1[1] ** (2 * poly.J)],
        "rho_gt_1": rho[0] > 1,
    }
