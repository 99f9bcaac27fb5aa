import csv
import io
import json
from fractions import Fraction

import pytest

from singlecell.bench import COLUMNS, bench, corpus, instances_from_dir, strip_time, to_csv
from singlecell.cli import EXIT_NULLIFIED, EXIT_OK, EXIT_USAGE, main
from singlecell.instance import (Instance, InstanceError, SmtlibError, extract_smtlib, generate,
                                 load_instance, parse_instance)

from conftest import EX1_SAMPLE, EX1_TEXTS, P

F = Fraction
EX1_DOC = {"vars": ["x1", "x2"], "polys": EX1_TEXTS, "sample": ["1/4", "-7/10"]}


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc, indent=2))
    return str(path)


# native format --------------------------------------------------------------------------

def test_parse_example_document(ex1):
    inst = parse_instance(json.dumps(EX1_DOC), "ex1")
    assert inst.polynomials == ex1
    assert inst.sample == EX1_SAMPLE
    assert inst.var_order.names == ("x1", "x2")
    assert not inst.expect_fail


def test_parse_rejects_arity_mismatch():
    doc = dict(EX1_DOC, sample=["1"])
    with pytest.raises(InstanceError, match="sample has 1 coordinates"):
        parse_instance(doc)


def test_parse_reports_polynomial_position():
    text = '{"vars": ["x1", "x2"],\n "polys": ["x1^2 +"],\n "sample": ["0", "0"]}'
    with pytest.raises(InstanceError) as info:
        parse_instance(text)
    msg = str(info.value)
    assert msg.startswith("polys[0] 'x1^2 +'")
    assert "line 2" in msg


def test_parse_reports_json_position():
    with pytest.raises(InstanceError, match="line 1, column"):
        parse_instance('{"vars": [}')


def test_parse_rejects_constants_and_missing_fields():
    with pytest.raises(InstanceError, match="constant"):
        parse_instance(dict(EX1_DOC, polys=["3"]))
    with pytest.raises(InstanceError, match="missing field 'sample'"):
        parse_instance({"vars": ["x1"], "polys": ["x1"]})


def test_instance_round_trip():
    inst = generate(3, 4, 3, 10, seed=11)
    again = parse_instance(json.dumps(inst.to_document()))
    assert again == inst


# SMT-LIB ----------------------------------------------------------------------------------

SMT = """(set-logic QF_NRA)
(declare-fun x () Real)
(declare-const y Real)
(assert (and (< (+ (* x x) (* y y)) 1) (> (* 2 x) 3)))
(assert (= (/ y 2) (/ 1 2)))
(check-sat)
"""


def test_smtlib_extraction():
    order, ps = extract_smtlib(SMT)
    assert order.names == ("x", "y")
    assert [p.to_text(order.names) for p in ps] == ["x^2 + y^2 - 1", "2*x - 3", "1/2*y - 1/2"]


@pytest.mark.parametrize("text,needle", [
    ("(declare-fun x () Real)(assert (or (< x 0) (> x 1)))", "unsupported construct: or"),
    ("(declare-fun x () Int)", "sort Int"),
    ("(declare-fun x () Real)(assert (< (/ 1 x) 0))", "division by a non-constant"),
    ("(declare-fun x () Real)(assert (< z 0))", "unknown symbol z"),
    ("(declare-fun x () Real)(assert (< x 0)", "unbalanced"),
])
def test_smtlib_rejections(text, needle):
    with pytest.raises(SmtlibError, match=needle):
        extract_smtlib(text)


def test_smtlib_error_has_position():
    with pytest.raises(SmtlibError, match=r"line 1, column 33"):
        extract_smtlib("(declare-fun x () Real)(assert (or (< x 0) (> x 1)))")


def test_load_smtlib_needs_sample(tmp_path):
    path = write(tmp_path, "a.smt2", SMT)
    with pytest.raises(InstanceError):
        load_instance(path)
    inst = load_instance(path, ["2", "0"])
    assert inst.sample == (2, 0) and len(inst.polynomials) == 3


# generator ---------------------------------------------------------------------------------

def test_generate_is_deterministic():
    a, b = generate(2, 3, 3, 10, 42), generate(2, 3, 3, 10, 42)
    assert a == b and a.to_document() == b.to_document()
    assert generate(2, 3, 3, 10, 43) != a


def test_generate_bounds():
    inst = generate(1, 1, 1, 5, 7)
    (p,) = inst.polynomials
    assert p.total_degree() == 1 and p.level == 1
    for seed in range(30):
        inst = generate(3, 4, 3, 10, seed)
        for q in inst.polynomials:
            assert q.total_degree() <= 3
            assert all(abs(c) <= 40 for c in q.terms.values())
            assert not q.is_constant()
        if not inst.expect_fail:
            assert all(q.evaluate(inst.sample) != 0 for q in inst.polynomials)


def test_generate_flags_unavoidable_zero():
    # with no retries some seed lands its sample on a zero set
    flagged = [s for s in range(400) if generate(1, 4, 1, 2, s, retries=0).expect_fail]
    assert flagged
    inst = generate(1, 4, 1, 2, flagged[0], retries=0)
    assert any(q.evaluate(inst.sample) == 0 for q in inst.polynomials)
    assert inst.to_document()["expect_fail"] is True


def test_generate_validates_arguments():
    with pytest.raises(ValueError):
        generate(4, 1, 2, 5, 0)
    with pytest.raises(ValueError):
        generate(2, 1, 5, 5, 0)


# CLI ------------------------------------------------------------------------------------------

def test_cli_run_example(tmp_path, capsys):
    path = write(tmp_path, "ex1.json", EX1_DOC)
    assert main(["run", path, "--heuristic", "bc-pd", "--verify", "50", "--seed", "1"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["bounds_at_sample"][0] == ["-3/5", "1"]
    assert doc["stats"]["ldcfs_omitted"] == 1
    assert doc["verification"]["passed"]
    assert doc["verification"]["certificate_failures"] == 0


def test_cli_stats_json(tmp_path, capsys):
    path = write(tmp_path, "ex1.json", EX1_DOC)
    assert main(["run", path, "--heuristic", "ldb-pd", "--stats-json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["heuristic"] == "ldb-pd" and doc["omission_ratio"] == "1"


def test_cli_nullification_exit_code(tmp_path, capsys):
    path = write(tmp_path, "null.json", {"vars": ["x1", "x2"], "polys": ["x1*x2"],
                                         "sample": ["0", "5"]})
    assert main(["run", path]) == EXIT_NULLIFIED
    assert "nullified" in capsys.readouterr().err
    assert main(["run", path, "--derivative-fallback", "--verify", "100"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["verification"]["passed"]


def test_cli_usage_errors(tmp_path, capsys):
    bad = write(tmp_path, "bad.json", '{"vars": ["x1"], "polys": ["x1 +"], "sample": ["0"]}')
    assert main(["run", bad]) == EXIT_USAGE
    assert "column" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.json")]) == EXIT_USAGE
    with pytest.raises(SystemExit) as info:
        main(["run", bad, "--heuristic", "nope"])
    assert info.value.code == EXIT_USAGE
    assert main(["generate", "--vars", "5"]) == EXIT_USAGE


def test_cli_generate_and_run(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert main(["generate", "--vars", "2", "--polys", "3", "--seed", "42", "-o", str(out)]) == 0
    assert parse_instance(out.read_text()) == generate(2, 3, 3, 10, 42)
    assert main(["run", str(out), "--heuristic", "ldb"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["heuristic"] == "ldb"


def test_cli_smtlib_run(tmp_path, capsys):
    path = write(tmp_path, "a.smt2", SMT)
    assert main(["run", path, "--sample", "2,0"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["vars"] == ["x", "y"]
    assert main(["run", path]) == EXIT_USAGE


# bench -----------------------------------------------------------------------------------------

def test_bench_rows(tmp_path):
    write(tmp_path, "ex1.json", EX1_DOC)
    write(tmp_path, "null.json", {"vars": ["x1", "x2"], "polys": ["x1*x2"], "sample": ["0", "5"]})
    write(tmp_path, "broken.json", "{")
    rows = bench(instances_from_dir(str(tmp_path)), verify=20)
    by = {(r["instance"], r["heuristic"]): r for r in rows}
    assert len(rows) == 12
    assert by[("ex1.json", "bc")]["ldcfs_omitted"] == 0
    assert by[("ex1.json", "bc-pd")]["ldcfs_omitted"] == 1
    assert by[("ex1.json", "bc")]["status"] == "ok"
    assert by[("null.json", "ldb")]["status"] == "nullified"
    assert by[("broken.json", "bc")]["status"] == "parse-error"
    assert [r["instance"] for r in rows] == sorted(r["instance"] for r in rows)


def test_bench_csv_layout(tmp_path):
    rows = bench(corpus(3), heuristics=("bc", "bc-pd"))
    path = tmp_path / "out.csv"
    text = to_csv(rows, str(path))
    assert path.read_text() == text
    parsed = list(csv.DictReader(io.StringIO(text)))
    assert tuple(parsed[0].keys()) == COLUMNS and len(parsed) == 6
    assert text.splitlines()[0] == ",".join(COLUMNS)
    assert "time_ms" not in strip_time(text)


def test_cli_bench_corpus(tmp_path, capsys):
    out = tmp_path / "c.csv"
    assert main(["bench", "--corpus", "2", "--heuristic", "bc", "--csv", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert len(lines) == 3 and lines[1].startswith("corpus-001,bc,")


def test_corpus_shape():
    insts = corpus(200)
    assert len(insts) == 200 and insts[0].name == "corpus-001"
    for inst in insts:
        assert len(inst.var_order) in (2, 3)
        assert 1 <= len(inst.polynomials) <= 4
        for p in inst.polynomials:
            assert p.total_degree() <= 3
