import csv
import io
import json
import shutil

import pytest
from click.testing import CliRunner

from neighbortrace.cli import main
from neighbortrace.lattice_core import standard_lattice
from neighbortrace.neighbors import isotropic_lines
from neighbortrace.orbits import quadric_size


def run(*args, expect=0):
    result = CliRunner().invoke(main, [str(a) for a in args])
    assert result.exit_code == expect, result.output
    return result.output


def csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_trace_fixture_csv(cache_dir):
    rows = csv_rows(run("trace", "--n", 7, "--lambda", "4,4,4", "--A", "p:2", "--cache-dir", cache_dir, "--threads", 1))
    assert rows == [{"n": "7", "lambda": "4,4,4", "weights": "13,11,9", "A": "p:2", "scaled_trace": "-168"}]


def test_trace_json_lists_every_pair(cache_dir):
    out = run(
        "trace", "--n", 7, "--lambda", "0,0,0", "--lambda", "4,4,4", "--primes", "2,3",
        "--cache-dir", cache_dir, "--format", "json", "--threads", 1,
    )
    rows = json.loads(out)
    values = {(r["A"], r["lambda"]): r["scaled_trace"] for r in rows}
    assert values[("p:2", "4,4,4")] == -168
    assert values[("p:3", "4,4,4")] == 3276
    assert values[("p:2", "0,0,0")] == 63
    assert values[("p:3", "0,0,0")] == 364
    assert len(rows) == 4


def test_thread_count_does_not_change_output(cache_dir):
    args = ["trace", "--n", 7, "--lambda", "2,1,0", "--lambda", "4,4,4", "--A", "trivial", "--A", "p:2", "--A", "p:3"]
    serial = run(*args, "--cache-dir", cache_dir, "--threads", 1)
    parallel = run(*args, "--cache-dir", cache_dir, "--threads", 3)
    assert serial == parallel


def test_orbits_of_three_neighbors_sum_to_quadric():
    rows = csv_rows(run("orbits", "--L", "E7", "--q", 3, "--oracle"))
    assert sum(int(r["cardinality"]) for r in rows) == quadric_size("E7", 3) == 364


def test_orbits_two_adic_single_class():
    rows = csv_rows(run("orbits", "--L", "E7", "--A", "2k:2"))
    assert [int(r["cardinality"]) for r in rows] == [630]


def test_orbits_needs_exactly_one_group():
    run("orbits", "--L", "E7", expect=2)
    run("orbits", "--L", "E7", "--q", 3, "--A", "p:2", expect=2)


def test_neighbors_emits_an_even_unimodular_gram():
    line = isotropic_lines(standard_lattice("E8"), 3)[0]
    out = json.loads(run("neighbors", "--L", "E8", "--q", 3, "--line", ",".join(map(str, line.generator))))
    gram = out["gram"]
    assert len(gram) == 8 and all(gram[i][i] % 2 == 0 for i in range(8))
    assert out["det"] == "1"


def test_neighbors_rejects_wrong_length():
    run("neighbors", "--L", "E7", "--q", 3, "--line", "1,0,0", expect=2)


def test_satake_rows_for_weight_four_four_four(cache_dir):
    rows = csv_rows(run("satake", "--n", 7, "--lambda", "4,4,4", "--primes", 2, "--cache-dir", cache_dir, "--threads", 1))
    assert [r["i"] for r in rows] == ["1"]
    assert rows[0]["weights"] == "13,11,9"


@pytest.mark.parametrize("table", ["SO7-p2", "SO7-odd"])
def test_reproduce_tables_have_no_mismatch(cache_dir, table):
    rows = csv_rows(run("reproduce", "--table", table, "--cache-dir", cache_dir, "--threads", 1))
    assert rows
    assert not [r for r in rows if r["status"] == "mismatch"]
    assert any(r["status"] == "match" for r in rows)


@pytest.mark.parametrize(
    "args",
    [
        ("trace", "--n", 7, "--lambda", "1,2,0"),
        ("trace", "--n", 7, "--lambda", "1,1,0", "--A", "2k:4"),
        ("trace", "--n", 6, "--lambda", "0,0,0"),
        ("trace", "--n", 7, "--lambda", "a,b,c"),
        ("trace", "--n", 7, "--lambda", "0,0,0", "--primes", "4"),
        ("trace", "--n", 7, "--lambda", "0,0,0", "--format", "xml"),
    ],
)
def test_usage_errors_exit_two(args, tmp_path):
    run(*args, "--cache-dir", tmp_path, expect=2)


def test_corrupted_cache_exits_one(cache_dir, tmp_path):
    run("trace", "--n", 7, "--lambda", "1,1,0", "--cache-dir", cache_dir, "--threads", 1)
    target = tmp_path / "cache"
    shutil.copytree(cache_dir, target)
    for path in (target / "census").glob("*.json"):
        head, body = path.read_text().split("\n", 1)
        path.write_text(head + "\n" + body.replace("]", " ]", 1))
    run("trace", "--n", 7, "--lambda", "1,1,0", "--cache-dir", target, "--threads", 1, expect=1)
