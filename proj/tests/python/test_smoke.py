import json
import math
import os
import subprocess
from fractions import Fraction
from pathlib import Path

import jsonschema
import pytest

import cfnormal

ROOT = Path(__file__).resolve().parents[2]
SCHEMAS = ROOT / "schemas"
CLI = os.environ.get("CFNORMAL_CLI")


def cf_value(digits):
    x = Fraction(0)
    for a in reversed(digits):
        x = 1 / (a + x)
    return x


def test_expand_and_evaluate():
    assert cfnormal.expand(2, 3, "short") == [1, 2]
    assert cfnormal.expand(1, 2) == [1, 1]
    assert cfnormal.expand(3, 5, "long") == [1, 1, 1, 1]
    assert cfnormal.evaluate([2, 3]) == (3, 7)
    for q in range(2, 60):
        for p in range(1, q):
            if math.gcd(p, q) != 1:
                continue
            for conv in ("short", "long"):
                d = cfnormal.expand(p, q, conv)
                assert cf_value(d) == Fraction(p, q)
                assert (d[-1] == 1) == (conv == "long")


def test_invalid_rational_raises():
    with pytest.raises(ValueError):
        cfnormal.expand(2, 4)
    with pytest.raises(ValueError):
        cfnormal.expand(5, 3)


def test_large_values_cross_as_ints():
    digits = [1] * 150
    p, q = cfnormal.evaluate(digits)
    assert q > 2**64
    assert Fraction(p, q) == cf_value(digits)


def test_concat_matches_digit_join():
    for conv in ("short", "long"):
        joined = cfnormal.expand(5, 13, conv) + cfnormal.expand(4, 9, conv)
        c = cfnormal.concat((5, 13), (4, 9), conv)
        assert Fraction(*c) == cf_value(joined)


def test_measures():
    assert cfnormal.lebesgue_measure([1, 2]) == (1, 12)
    assert cfnormal.cylinder([1, 2]) == ((2, 3), (3, 4))
    assert cfnormal.in_cylinder([1, 2], 3, 4) and not cfnormal.in_cylinder([1, 2], 2, 3)
    assert cfnormal.gauss_measure([1]) == pytest.approx(math.log2(4 / 3), rel=1e-14)
    assert cfnormal.gauss_measure([1, 2]) == pytest.approx(cfnormal.gauss_measure([2, 1]), rel=1e-14)
    c = cfnormal.constants()
    assert c["g"] == pytest.approx(math.pi**2 / (12 * math.log(2)), rel=1e-15)


def test_sequences_and_counts():
    assert [cfnormal.rational_at("type3", i) for i in range(1, 7)] == [
        (2, 3), (2, 5), (3, 5), (2, 7), (3, 7), (5, 7)]
    assert cfnormal.count("type3", 7) == 6
    assert cfnormal.index_of("type3", 5, 7) == 6
    assert cfnormal.stream("aks-dup", 8, "short") == [2, 3, 1, 2, 4, 2, 1, 3]
    assert cfnormal.pi_prime(10, 2, 1) == 7
    assert cfnormal.is_prime(2**61 - 1)


def test_census_and_reports():
    rep = cfnormal.census("all", 64)
    row = rep["rows"][0]
    assert row["total"] == cfnormal.count("all", 64)
    assert 0 <= row["abnormal"] <= row["total"]
    with pytest.raises(MemoryError):
        cfnormal.census("all", 10**6)
    stats = cfnormal.normality_report("type3", 2000, max_digit=2, max_len=1)
    assert len(stats["rows"]) == 2
    est = cfnormal.estimate_deviation_set("F", 0.5, 50, samples=2000, seed=3, threads=1)
    assert 0.0 <= est["estimate"] <= 1.0


CLI_CASES = [
    ("expand", ["expand", "3/7", "--format", "json"]),
    ("stats", ["stats", "--kind", "type1", "-N", "5000", "--max-digit", "3", "--max-len", "2",
               "--hypothesis", "50"]),
    ("stats", ["stats", "--kind", "all", "-N", "2000", "--pattern", "1,2", "--pattern", "3"]),
    ("census", ["census", "-m", "50", "-m", "80", "--conv", "short", "--timing"]),
    ("count", ["count", "--kind", "squarefree", "-m", "30", "--format", "json"]),
    ("piprime", ["piprime", "-x", "100", "-q", "2", "-a", "1", "--qp", "4", "--ap", "3", "--format", "json"]),
    ("constants", ["constants"]),
    ("measure", ["measure", "2,3"]),
    ("montecarlo", ["montecarlo", "--set", "E", "-N", "20", "-N", "40", "--samples", "2000", "--threads", "1"]),
]


def run_cli(args, **kw):
    return subprocess.run([CLI, *args], capture_output=True, check=False, **kw)


@pytest.mark.skipif(not CLI, reason="CFNORMAL_CLI not set")
@pytest.mark.parametrize("schema,args", CLI_CASES)
def test_cli_json_matches_schema(schema, args):
    out = run_cli(args)
    assert out.returncode == 0, out.stderr
    doc = json.loads(out.stdout)
    jsonschema.validate(doc, json.loads((SCHEMAS / f"{schema}.schema.json").read_text()))


@pytest.mark.skipif(not CLI, reason="CFNORMAL_CLI not set")
def test_stream_file_report_matches_schema(tmp_path):
    idx = tmp_path / "idx.txt"
    idx.write_text("1 2 3 4 5 9")
    report = tmp_path / "report.json"
    out = run_cli(["stream-file", str(idx), "--report", str(report)])
    assert out.returncode == 0
    doc = json.loads(report.read_text())
    jsonschema.validate(doc, json.loads((SCHEMAS / "stream_file_report.schema.json").read_text()))


@pytest.mark.skipif(not CLI, reason="CFNORMAL_CLI not set")
def test_cli_output_is_byte_identical_across_runs():
    for args in (["stats", "--kind", "type2", "-N", "3000"],
                 ["census", "-m", "60", "--format", "csv"],
                 ["stream", "--kind", "type1", "-n", "500", "--binary"]):
        assert run_cli(args).stdout == run_cli(args).stdout
    mc = ["montecarlo", "--set", "F", "--eps", "0.3", "-N", "30", "--samples", "9000", "--seed", "5"]
    one = run_cli(mc + ["--threads", "1"]).stdout
    assert one == run_cli(mc + ["--threads", "3"]).stdout


@pytest.mark.skipif(not CLI, reason="CFNORMAL_CLI not set")
def test_cli_csv_and_out_file(tmp_path):
    dest = tmp_path / "census.csv"
    out = run_cli(["census", "-m", "40", "--format", "csv", "--out", str(dest)])
    assert out.returncode == 0 and out.stdout == b""
    lines = dest.read_text().splitlines()
    assert lines[0] == "m,kind,eps,s,total,abnormal,ratio"
    assert lines[1].startswith("40,all,")


@pytest.mark.skipif(not CLI, reason="CFNORMAL_CLI not set")
def test_binary_dump_round_trips():
    text = run_cli(["stream", "--kind", "type3", "-n", "300"]).stdout.decode().split()
    raw = run_cli(["stream", "--kind", "type3", "-n", "300", "--binary"]).stdout
    values, cur, shift = [], 0, 0
    for b in raw:
        cur |= (b & 0x7F) << shift
        shift += 7
        if not b & 0x80:
            values.append(cur)
            cur, shift = 0, 0
    assert values == [int(t) for t in text]
