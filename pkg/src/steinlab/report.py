"""Versioned report envelope and byte-stable rendering."""
from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Any, Iterable, Optional

import jsonschema

from .errors import SchemaViolation

SCHEMA_VERSION = 1
KINDS = ("classify", "critical-modulus", "sz-margin", "build-domain4", "monomial-extend",
         "witness", "gaps", "laurent")
CSV_COLUMNS = ("poly", "house_lo", "house_hi", "reciprocal", "cyclotomic")


def canonical_json(obj: Any) -> str:
    """Sorted keys, no whitespace, shortest round-trip floats, no NaN."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def inputs_digest(parts: Iterable[bytes]) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(len(p).to_bytes(8, "big"))
        h.update(p)
    return h.hexdigest()


@lru_cache(maxsize=None)
def load_schema(kind: str) -> dict:
    if kind not in KINDS:
        raise SchemaViolation(f"unknown report kind {kind!r}")
    text = resources.files("steinlab").joinpath("schemas", f"{kind}.v{SCHEMA_VERSION}.json").read_text()
    return json.loads(text)


@dataclass
class Report:
    kind: str
    payload: dict
    inputs_sha256: str
    tool_version: str
    seed: int
    wall_time: Optional[float] = None
    text: list[str] = field(default_factory=list)
    rows: Optional[list[dict]] = None

    def envelope(self) -> dict:
        prov = {"inputs_sha256": self.inputs_sha256, "tool_version": self.tool_version,
                "seed": self.seed}
        if self.wall_time is not None:
            prov["wall_time"] = self.wall_time
        return {"kind": self.kind, "schema_version": SCHEMA_VERSION, "payload": self.payload,
                "provenance": prov}


def validate(env: dict) -> None:
    # round-trip first so tuples and the like look exactly as they will on disk
    try:
        doc = json.loads(canonical_json(env))
    except ValueError as exc:
        raise SchemaViolation(f"payload is not JSON-serializable: {exc}") from exc
    try:
        jsonschema.validate(doc, load_schema(env.get("kind", "")))
    except jsonschema.ValidationError as exc:
        raise SchemaViolation(exc.message) from exc


def render_report(r: Report, fmt: str = "json") -> bytes:
    env = r.envelope()
    validate(env)
    if fmt == "json":
        return (canonical_json(env) + "\n").encode()
    if fmt == "text":
        lines = [f"# {r.kind} (schema v{SCHEMA_VERSION}, steinlab {r.tool_version})"]
        lines += r.text or [json.dumps(r.payload, sort_keys=True, indent=2)]
        lines.append(f"inputs sha256: {r.inputs_sha256}")
        return ("\n".join(lines) + "\n").encode()
    if fmt == "csv":
        if r.rows is None:
            raise SchemaViolation(f"{r.kind} has no tabular form")
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(CSV_COLUMNS), lineterminator="\n")
        w.writeheader()
        for row in r.rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
        return buf.getvalue().encode()
    raise SchemaViolation(f"unknown format {fmt!r}")
