import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from steinlab import __version__
from steinlab.cli import dispatch
from steinlab.errors import SchemaViolation
from steinlab.report import KINDS, Report, canonical_json, inputs_digest, load_schema, render_report, validate

ROOT = Path(__file__).resolve().parents[1]
FIB = "[[1,1],[1,0]]"


def run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = dispatch(list(argv) + ["--out", str(out)])
    return code, (out.read_bytes() if out.exists() else b"")


def envelope(data):
    return json.loads(data)


def test_classify(tmp_path):
    code, data = run(tmp_path, "classify", "--matrix", FIB, "--modulus", "100")
    env = envelope(data)
    assert code == 0 and env["kind"] == "classify" and env["schema_version"] == 1
    assert env["payload"]["kind"] == "NotSteinBaseOnly"
    code, data = run(tmp_path, "classify", "--matrix", "[[1,0],[0,1]]", "--modulus", "2inf")
    assert code == 0 and envelope(data)["payload"]["kind"] == "Stein"


def test_indeterminate_exit_code(tmp_path):
    code, _ = run(tmp_path, "classify", "--matrix", FIB, "--modulus", "41.0197916473349")
    assert code == 3


def test_input_errors(tmp_path):
    assert run(tmp_path, "classify", "--matrix", FIB)[0] == 2
    assert run(tmp_path, "classify", "--matrix", "[[2,0],[0,1]]", "--modulus", "1")[0] == 2
    assert run(tmp_path, "sz-margin", "-d", "40")[0] == 2
    assert run(tmp_path, "gaps", "--theta", "[0.1]", "--eps", "-1")[0] == 2
    assert dispatch(["no-such-command"]) == 2


def test_matrix_from_file(tmp_path):
    f = tmp_path / "m.json"
    f.write_text(FIB)
    code, data = run(tmp_path, "critical-modulus", "--matrix", str(f))
    lo, hi = envelope(data)["payload"]["critical_modulus"]
    assert code == 0 and lo <= 41.0198 <= hi + 1e-4


def test_byte_reproducible(tmp_path):
    a = run(tmp_path, "witness", "--matrix", FIB, "--horizon", "20", name="a")[1]
    b = run(tmp_path, "witness", "--matrix", FIB, "--horizon", "20", name="b")[1]
    assert a == b and a.endswith(b"\n")


def test_provenance_hash_tracks_inputs(tmp_path):
    h1 = envelope(run(tmp_path, "classify", "--matrix", FIB, "--modulus", "10")[1])["provenance"]
    h2 = envelope(run(tmp_path, "classify", "--matrix", FIB, "--modulus", "11")[1])["provenance"]
    h3 = envelope(run(tmp_path, "classify", "--matrix", FIB, "--modulus", "10", "--rng-seed", "4")[1])["provenance"]
    assert h1["inputs_sha256"] != h2["inputs_sha256"] != h3["inputs_sha256"]
    assert h1["tool_version"] == __version__ and "wall_time" not in h1
    timed = envelope(run(tmp_path, "classify", "--matrix", FIB, "--modulus", "10", "--timing")[1])
    assert timed["provenance"]["wall_time"] >= 0


def test_sz_margin_json_and_csv(tmp_path):
    code, data = run(tmp_path, "sz-margin", "-d", "2")
    env = envelope(data)
    assert code == 0 and env["payload"]["argmin_str"] == "x^2 - 2"
    code, data = run(tmp_path, "sz-margin", "-d", "2", "--format", "csv", "--shards", "3")
    rows = list(csv.DictReader(io.StringIO(data.decode())))
    assert code == 0 and rows
    assert list(rows[0]) == ["poly", "house_lo", "house_hi", "reciprocal", "cyclotomic"]
    assert any(r["poly"] == "x^2 - 2" for r in rows)


def test_sz_checkpoint(tmp_path):
    ck = tmp_path / "ck"
    code, a = run(tmp_path, "sz-margin", "-d", "3", "--shards", "2", "--checkpoint", str(ck), name="a")
    code2, b = run(tmp_path, "sz-margin", "-d", "3", "--shards", "2", "--checkpoint", str(ck), name="b")
    assert code == code2 == 0 and envelope(a)["payload"] == envelope(b)["payload"]
    assert len(list(ck.glob("*.json"))) == 2


def test_domain4(tmp_path):
    code, data = run(tmp_path, "build-domain4", "--horizon", "4", "--samples", "3")
    env = envelope(data)
    assert code == 0 and env["payload"]["certificate"]["J"] == 1 and env["payload"]["checks"]["passed"]
    code, data = run(tmp_path, "build-domain4", "--format", "text", "--horizon", "4", "--samples", "3")
    assert b"FAIL" not in data
    code, _ = run(tmp_path, "build-domain4", "--seed", "[-5,-18,-27,-30]")
    assert code == 4


def test_monomial_and_laurent(tmp_path):
    code, data = run(tmp_path, "monomial-extend", "--matrix", FIB, "-m", "10", "-k", "1,0",
                     "--eval", "[0,0]", "[[1.5,0],[0.7,0.2]]")
    res = envelope(data)["payload"]["results"][0]
    assert code == 0 and abs(complex(*res["value"]) - 1.5) < 1e-10
    code, data = run(tmp_path, "laurent", "--matrix", FIB, "-m", "10", "-k", "1,0")
    assert code == 0 and envelope(data)["payload"]["max_residual"] < 1e-6


def test_gaps(tmp_path):
    code, data = run(tmp_path, "gaps", "--theta", "[0.25]", "--eps", "0.5", "--horizon", "12")
    assert code == 0 and envelope(data)["payload"]["gap_set"]["members"] == [0, 4, 8, 12]


def test_csv_unavailable_for_non_tabular(tmp_path):
    assert run(tmp_path, "gaps", "--theta", "[0.25]", "--eps", "0.5", "--format", "csv")[0] == 4


def test_threads_env(tmp_path, monkeypatch):
    monkeypatch.setenv("STEINLAB_THREADS", "zero")
    assert run(tmp_path, "sz-margin", "-d", "2")[0] == 2
    monkeypatch.setenv("STEINLAB_THREADS", "2")
    assert run(tmp_path, "sz-margin", "-d", "3", "--shards", "2")[0] == 0


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "steinlab", "gaps", "--theta", "[0.5]", "--eps", "0.1",
                          "--horizon", "4"], capture_output=True, check=True)
    assert json.loads(out.stdout)["payload"]["gap_set"]["members"] == [0, 2, 4]


def test_report_helpers():
    assert canonical_json({"b": 1, "a": [1.5, None]}) == '{"a":[1.5,null],"b":1}'
    with pytest.raises(ValueError):
        canonical_json({"x": float("nan")})
    assert inputs_digest([b"ab", b"c"]) != inputs_digest([b"a", b"bc"])
    r = Report("gaps", {"oops": 1}, "0" * 64, __version__, 0)
    with pytest.raises(SchemaViolation):
        render_report(r)
    with pytest.raises(SchemaViolation):
        validate({"kind": "nope"})


@pytest.mark.parametrize("kind", KINDS)
def test_schemas_valid_and_mirrored(kind):
    schema = load_schema(kind)
    jsonschema.Draft202012Validator.check_schema(schema)
    docs = ROOT / "docs" / "schemas" / f"{kind}.v1.json"
    assert json.loads(docs.read_text()) == schema
