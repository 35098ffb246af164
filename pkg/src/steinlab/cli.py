"""``steinlab`` command line.

Exit codes: 0 success or definite verdict, 2 input/usage error, 3 Indeterminate
verdict, 4 certification failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .errors import InputError, SteinlabError
from .intcore import ComplexPoint, IntMatrix
from .report import Report, canonical_json, inputs_digest, render_report

EXIT_OK, EXIT_INPUT, EXIT_INDETERMINATE, EXIT_CERT = 0, 2, 3, 4

log = logging.getLogger("steinlab")


# ---------------------------------------------------------------------------
# Input helpers
# ---------------------------------------------------------------------------

class _Inputs:
    """Collects every byte that determines the payload, for the provenance hash."""

    def __init__(self):
        self.parts: list[bytes] = []

    def file(self, path: str) -> bytes:
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from exc
        self.parts.append(data)
        return data

    def json_arg(self, text: str):
        """A JSON file path, or an inline JSON literal."""
        if os.path.exists(text):
            data = self.file(text)
        else:
            data = text.encode()
            self.parts.append(data)
        try:
            return json.loads(data)
        except ValueError as exc:
            raise InputError(f"not valid JSON: {text!r}") from exc

    def value(self, **kw) -> None:
        self.parts.append(canonical_json(kw).encode())

    def digest(self) -> str:
        return inputs_digest(self.parts)


def _matrix(inputs: _Inputs, text: str) -> IntMatrix:
    obj = inputs.json_arg(text)
    try:
        return IntMatrix.from_json(obj) if isinstance(obj, dict) else IntMatrix(tuple(tuple(r) for r in obj))
    except (TypeError, KeyError) as exc:
        raise InputError(f"bad matrix JSON: {exc}") from exc


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise InputError(f"expected comma-separated integers, got {text!r}") from exc


def _complex(obj) -> complex:
    if isinstance(obj, (int, float)):
        return complex(obj)
    if isinstance(obj, (list, tuple)) and len(obj) == 2:
        return complex(float(obj[0]), float(obj[1]))
    if isinstance(obj, dict) and "re" in obj:
        return complex(obj["re"], obj.get("im", 0.0))
    if isinstance(obj, str):
        return complex(obj.replace(" ", ""))
    raise InputError(f"cannot read a complex number from {obj!r}")


def _depth(obj) -> int:
    return 1 + _depth(obj[0]) if isinstance(obj, list) and obj else 0


def _positive(kind):
    def parse(text):
        x = kind(text)
        if not x > 0:
            raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
        return x
    return parse


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_classify(args, inputs: _Inputs) -> tuple[Report, int]:
    from .steinness import INDETERMINATE, ModulusSpec, classify

    M = _matrix(inputs, args.matrix)
    mod = ModulusSpec.parse(args.modulus)
    inputs.value(modulus=str(mod), tol=args.tol)
    v = classify(M, mod, args.tol)
    text = [f"verdict: {v.kind}", f"modulus: {mod}",
            f"rho(M) in [{v.profile.rho[0]!r}, {v.profile.rho[1]!r}]",
            "critical modulus: " + ("inf" if v.critical_modulus is None else
                                    f"[{v.critical_modulus[0]!r}, {v.critical_modulus[1]!r}]")]
    code = EXIT_INDETERMINATE if v.kind == INDETERMINATE else EXIT_OK
    return Report("classify", v.to_json(), "", "", 0, text=text), code


def cmd_critical(args, inputs: _Inputs) -> tuple[Report, int]:
    from .steinness import critical_modulus

    M = _matrix(inputs, args.matrix)
    inputs.value(tol=args.tol)
    c = critical_modulus(M, args.tol)
    payload = {"matrix": M.to_json(), "critical_modulus": "inf" if c is None else list(c), "tol": args.tol}
    text = ["critical modulus: " + ("inf (rho = 1)" if c is None else f"[{c[0]!r}, {c[1]!r}]")]
    return Report("critical-modulus", payload, "", "", 0, text=text), EXIT_OK


def cmd_sz(args, inputs: _Inputs) -> tuple[Report, int]:
    from .szenum import sz_margin

    inputs.value(d=args.d, tol=args.tol)
    res = sz_margin(args.d, tol=args.tol, shards=args.shards, workers=args.threads,
                    checkpoint_dir=args.checkpoint, keep_records=args.records or args.format == "csv")
    payload = res.to_json()
    if args.records:
        payload["records"] = [r.to_json() for r in res.records]
    text = [f"d = {res.d}", f"mu'(d) in [{res.mu_prime[0]!r}, {res.mu_prime[1]!r}]",
            f"argmin: {res.argmin}", f"polynomials with house <= {res.ceiling!r}: {res.count}",
            f"search nodes: {res.nodes}, leaves: {res.leaves}, stragglers: {len(res.stragglers)}"]
    rep = Report("sz-margin", payload, "", "", 0, text=text, rows=[r.to_row() for r in res.records])
    if args.timing:
        rep.wall_time = res.wall_time
    return rep, EXIT_OK


def cmd_domain4(args, inputs: _Inputs) -> tuple[Report, int]:
    from .domain4 import (BUILTIN_N, BUILTIN_U, build_polytope, decompose_seed, eigen_frame, find_J,
                          verify_reinhardt_instance)

    N = _matrix(inputs, args.matrix) if args.matrix else BUILTIN_N
    if args.seed:
        u = inputs.json_arg(args.seed)
        if not (isinstance(u, list) and all(isinstance(x, int) for x in u)):
            raise InputError("seed vector must be a JSON list of integers")
    else:
        u = list(BUILTIN_U)
    inputs.value(N=N.to_json(), u=u, horizon=args.horizon, samples=args.samples)
    frame = eigen_frame(N)
    dec = decompose_seed(u, frame)
    cert = find_J(N, u, frame)
    poly, checks = build_polytope(N, u, cert.J, args.horizon, cert)
    ver = verify_reinhardt_instance(poly, samples=args.samples, seed=args.rng_seed)
    payload = {"frame": frame.to_json(), "decomposition": dec.to_json(), "certificate": cert.to_json(),
               "polytope": poly.to_json(), "checks": checks, "verification": ver}
    ok = lambda b: "PASS" if b else "FAIL"  # noqa: E731
    text = [
        f"seed u = {u}: a1 = {dec.a1:.6g} ({ok(dec.a1 > 0)}), a2 = {dec.a2:.6g} ({ok(dec.a2 > 0)})",
        f"J = {cert.J} (exact range |j| <= {cert.exact_range[1]}, tail from j >= {cert.forward_tail_start}"
        f" and j <= -{cert.backward_tail_start})",
        f"(i) invariance under N^{2 * cert.J}: {ok(checks['invariance']['passed'])}",
        f"(ii) negative orthant: {ok(checks['negative_orthant']['passed'])}",
        f"(iii) affine rank of N^J B = {checks['affine_rank']['rank_NJ_B']}: {ok(checks['affine_rank']['passed'])}",
        f"hull membership of {ver['images_checked']} images: PASS",
        f"rho(M) in [{ver['rho_M'][0]!r}, {ver['rho_M'][1]!r}] > 1",
    ]
    code = EXIT_OK if checks["passed"] else EXIT_CERT
    return Report("build-domain4", payload, "", "", 0, text=text), code


def _series_spec(args, inputs: _Inputs):
    from .analytic.series import build_series_spec
    from .steinness import ModulusSpec

    M = _matrix(inputs, args.matrix)
    mod = ModulusSpec.parse(args.m)
    k = _int_list(args.k)
    anchor = _complex(json.loads(args.anchor) if args.anchor.strip().startswith("[") else args.anchor)
    inputs.value(m=str(mod), k=list(k), anchor=[anchor.real, anchor.imag], tol=args.tol,
                 variant=args.variant)
    return build_series_spec(M, mod, k, anchor, args.variant)


def cmd_monomial(args, inputs: _Inputs) -> tuple[Report, int]:
    from .analytic.series import MonomialSection

    spec = _series_spec(args, inputs)
    sec = MonomialSection(spec, args.tol)
    results = []
    text = [f"variant: {spec.variant}"]
    if args.eval:
        # w: a number or [re, im], or a list of those; z: one point as a list of
        # [re, im] coordinates, or a list of such points
        ws = inputs.json_arg(args.eval[0])
        zs = inputs.json_arg(args.eval[1])
        if _depth(ws) == 0 or (_depth(ws) == 1 and len(ws) == 2):
            ws = [ws]
        if _depth(zs) == 2:
            zs = [zs]
        elif _depth(zs) != 3:
            raise InputError("z must be a list of [re, im] coordinates or a list of points")
        for w in ws:
            wc = _complex(w)
            for z in zs:
                pt = ComplexPoint(tuple(_complex(c) for c in z))
                v = sec.evaluate(wc, pt)
                results.append({"w": [wc.real, wc.imag], "z": [[c.real, c.imag] for c in pt.coords],
                                "value": [v.value.real, v.value.imag], "tail_bound": v.tail_bound,
                                "window": list(v.window)})
                text.append(f"f({wc}, {pt.coords}) = {v.value}  (tail <= {v.tail_bound:.3g}, j in {v.window})")
    return Report("monomial-extend", {"spec": spec.to_json(), "results": results}, "", "", 0, text=text), EXIT_OK


def cmd_witness(args, inputs: _Inputs) -> tuple[Report, int]:
    from .analytic.witness import check_witness, witness_search

    M = _matrix(inputs, args.matrix)
    inputs.value(horizon=args.horizon, tol=args.tol)
    cert = witness_search(M, args.tol, args.horizon, seed=args.rng_seed)
    fails = check_witness(cert)
    text = [f"k~ = {cert.k}, delta = {cert.delta}",
            f"J+ : {len(cert.margins_plus)} indices, max gap {cert.j_plus.max_gap}, discarded below {cert.discard_plus}",
            f"J- : {len(cert.margins_minus)} indices, max gap {cert.j_minus.max_gap}, discarded below {cert.discard_minus}",
            "independent check: " + ("PASS" if not fails else "FAIL " + "; ".join(fails))]
    payload = {"certificate": cert.to_json(), "valid": not fails, "failures": fails}
    return Report("witness", payload, "", "", 0, text=text), EXIT_OK if not fails else EXIT_CERT


def cmd_gaps(args, inputs: _Inputs) -> tuple[Report, int]:
    from .analytic.gaps import gap_set, three_gap_check

    theta = inputs.json_arg(args.theta)
    if isinstance(theta, (int, float)):
        theta = [theta]
    inputs.value(eps=args.eps, horizon=args.horizon)
    gs = gap_set([float(t) for t in theta], args.eps, args.horizon)
    payload = {"theta_turns": [float(t) for t in theta], "gap_set": gs.to_json(),
               "three_gap_consistent": three_gap_check(gs) if len(theta) == 1 else None}
    text = [f"{len(gs.members)} members in [0, {gs.horizon}], max gap {gs.max_gap}"]
    return Report("gaps", payload, "", "", 0, text=text), EXIT_OK


def cmd_laurent(args, inputs: _Inputs) -> tuple[Report, int]:
    from .analytic.laurent import laurent_coefficient, laurent_coefficients
    from .analytic.series import MonomialSection
    from .intcore import LatticeVector

    spec = _series_spec(args, inputs)
    w = _complex(json.loads(args.w) if args.w.strip().startswith("[") else args.w)
    inputs.value(w=[w.real, w.imag], js=args.js, samples=args.samples)
    sec = MonomialSection(spec, args.tol)
    d = spec.M.dim
    radii = [1.0] * d
    rows = []
    js = list(range(-args.js, args.js + 1))
    jks = [(LatticeVector(spec.k) @ spec.M.pow(j)).entries for j in js]
    n = args.samples
    while n < 2 * (1 + max(abs(x) for v in jks for x in v)):
        n *= 2
    g_jk = laurent_coefficients(sec, jks, w, radii, n)
    for j, jk, g in zip(js, jks, g_jk):
        g_shift = laurent_coefficient(sec, spec.k, w + j, radii, n)
        rows.append({"j": j, "jk": list(jk), "g_jk": [g.real, g.imag],
                     "g_k_shift": [g_shift.real, g_shift.imag], "residual": abs(g - g_shift)})
    payload = {"spec": spec.to_json(), "w": [w.real, w.imag], "samples_per_axis": n, "rows": rows,
               "max_residual": max(r["residual"] for r in rows)}
    text = [f"j={r['j']:+d}  |g_(j.k)(w) - g_k(w+j)| = {r['residual']:.3g}" for r in rows]
    return Report("laurent", payload, "", "", 0, text=text), EXIT_OK


# ---------------------------------------------------------------------------
# Parser and dispatch
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text", "csv"), default="json")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--rng-seed", type=int, default=0, help="deterministic seed (recorded)")
    common.add_argument("--threads", type=_positive(int), default=None,
                        help="worker processes (default: STEINLAB_THREADS or 1)")
    common.add_argument("--timing", action="store_true", help="record wall time in the provenance block")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="steinlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"steinlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("classify", parents=[common], help="Stein verdict for (M, m)")
    s.add_argument("--matrix", required=True, help="matrix JSON file or inline JSON")
    s.add_argument("--modulus", required=True, help="positive rational, 'inf' or '2inf'")
    s.add_argument("--tol", type=_positive(float), default=1e-12)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("critical-modulus", parents=[common], help="enclosure of 2 pi^2 / log rho(M)")
    s.add_argument("--matrix", required=True)
    s.add_argument("--tol", type=_positive(float), default=1e-12)
    s.set_defaults(func=cmd_critical)

    s = sub.add_parser("sz-margin", parents=[common], help="exhaustive house-margin search")
    s.add_argument("-d", type=int, required=True)
    s.add_argument("--tol", type=_positive(float), default=1e-9)
    s.add_argument("--shards", type=_positive(int), default=1)
    s.add_argument("--checkpoint", help="checkpoint directory (resumable)")
    s.add_argument("--records", action="store_true", help="include every enumerated polynomial")
    s.set_defaults(func=cmd_sz)

    s = sub.add_parser("build-domain4", parents=[common], help="rebuild and check the 4-dimensional example")
    s.add_argument("--matrix", help="4x4 matrix (default: built-in)")
    s.add_argument("--seed", help="integer seed vector u as JSON (default: built-in)")
    s.add_argument("--horizon", type=_positive(int), default=8)
    s.add_argument("--samples", type=_positive(int), default=8)
    s.set_defaults(func=cmd_domain4)

    for name, func, hlp in (("monomial-extend", cmd_monomial, "evaluate the Z-invariant extension of z^k"),
                            ("laurent", cmd_laurent, "Hartogs-Laurent shift relation by torus FFT")):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("--matrix", required=True)
        s.add_argument("-m", required=True, help="modulus")
        s.add_argument("-k", required=True, help="covector, e.g. 1,0")
        s.add_argument("--anchor", default="0")
        s.add_argument("--variant", choices=("cosh", "polynomial"), default=None)
        s.add_argument("--tol", type=_positive(float), default=1e-12)
        if name == "monomial-extend":
            s.add_argument("--eval", nargs=2, metavar=("W", "Z"), help="JSON for w (or list) and z (or list)")
        else:
            s.add_argument("--w", default="[0.3, 0.1]")
            s.add_argument("--js", type=int, default=2, help="check |j| <= JS")
            s.add_argument("--samples", type=_positive(int), default=16)
        s.set_defaults(func=func)

    s = sub.add_parser("witness", parents=[common], help="non-Steinness witness certificate")
    s.add_argument("--matrix", required=True)
    s.add_argument("--horizon", type=_positive(int), default=30)
    s.add_argument("--tol", type=_positive(float), default=1e-9)
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("gaps", parents=[common], help="return-time set of a torus rotation")
    s.add_argument("--theta", required=True, help="angles in turns (JSON list or file)")
    s.add_argument("--eps", type=_positive(float), required=True)
    s.add_argument("--horizon", type=_positive(int), default=10_000)
    s.set_defaults(func=cmd_gaps)
    return p


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads is None and os.environ.get("STEINLAB_THREADS"):
        try:
            args.threads = max(1, int(os.environ["STEINLAB_THREADS"]))
        except ValueError:
            print("steinlab: STEINLAB_THREADS must be an integer", file=sys.stderr)
            return EXIT_INPUT
    inputs = _Inputs()
    inputs.value(command=args.command, version=__version__, seed=args.rng_seed)
    t0 = time.perf_counter()
    try:
        report, code = args.func(args, inputs)
        report.inputs_sha256 = inputs.digest()
        report.tool_version = __version__
        report.seed = args.rng_seed
        if args.timing and report.wall_time is None:
            report.wall_time = time.perf_counter() - t0
        data = render_report(report, args.format)
    except SteinlabError as exc:
        print(f"steinlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return code


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
