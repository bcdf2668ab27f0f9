import os
from pathlib import Path

import pytest

import multitab

ROOT = Path(os.environ.get("MULTITAB_SOURCE_DIR", Path(__file__).resolve().parents[2]))
DB_ROOT = ROOT / "data" / "databases"
CATALOG = ROOT / "data" / "templates" / "catalog.json"

PETS = {
    "name": "pets",
    "columns": ["PetID", "PetType", "pet_age", "weight"],
    "rows": [[2001, "cat", 3, 12.0], [2002, "dog", 2, 13.4], [2003, "dog", 1, 9.3]],
}


@pytest.fixture(scope="module")
def pets_db():
    return multitab.database_from_tables("pets_1", [PETS])


def test_execute_grouped_average(pets_db):
    out = multitab.execute("SELECT avg(weight), PetType FROM pets GROUP BY PetType", pets_db)
    assert out["columns"] == ["avg(weight)", "PetType"]
    assert [multitab.canonical_cell_text(v) for v in out["rows"][1]] == ["11.35", "dog"]
    assert multitab.serialize_answer_table(out) == "col : avg(weight) | PetType row 1 : 12.0 | cat row 2 : 11.35 | dog"


def test_errors_map_to_python_exceptions(pets_db):
    with pytest.raises(multitab.ParseError):
        multitab.execute("SELECT FROM pets", pets_db)
    with pytest.raises(multitab.ExecError):
        multitab.execute("SELECT * FROM nowhere", pets_db)
    with pytest.raises(multitab.FormatError):
        multitab.parse_answer_table("no markers")


def test_linearization_round_trip():
    text = multitab.serialize_input_table(PETS)
    assert text.startswith("<table_name> : pets col : PetID | PetType")
    assert len(text.split()) == 42
    parsed = multitab.parse_answer_table("col : a | b row 1 : x | y")
    assert parsed["columns"] == ["a", "b"] and parsed["rows"] == [["x", "y"]] and not parsed["ragged"]
    assert multitab.build_model_input("how many pets?", [PETS]) == "how many pets? " + text


def test_sql_helpers():
    assert multitab.normalize_sql("select  *  from Pets") == "SELECT * FROM Pets"
    assert multitab.table_names("SELECT x FROM a WHERE x IN (SELECT y FROM b)") == ["a", "b"]
    assert multitab.repair_from_clause("SELECT max(c) WHERE c > 3") == "SELECT max(c) FROM w WHERE c > 3"


def test_qc_reasons(pets_db):
    assert multitab.check_sample("SELECT * FROM pets", pets_db)[0]
    assert multitab.check_sample("SELECT * FROM pets WHERE weight > 100", pets_db)[1] == "empty-answer"
    assert multitab.check_sample("SELECT * FROM nonexistent", pets_db)[1] == "exec-error"
    assert multitab.check_sample("SELECT *", pets_db)[1] == "unparseable"


def test_generate_qc_and_evaluate(tmp_path):
    res = multitab.generate(str(DB_ROOT), str(CATALOG), 25, seed=3, workers=2)
    samples = res["samples"]
    assert len(samples) == 25 and res["shortfall"] == []
    again = multitab.generate(str(DB_ROOT), str(CATALOG), 25, seed=3, workers=1)
    assert again["samples"] == samples

    qc = multitab.run_qc(samples, str(DB_ROOT))
    assert qc["stats"]["kept"] == 25
    assert qc["kept"] == samples

    path = tmp_path / "d.jsonl"
    multitab.write_dataset(samples, str(path))
    assert multitab.read_dataset(str(path)) == samples

    targets = [s["target"] for s in samples]
    report = multitab.evaluate(targets, targets)
    assert report["table_em"] == 1.0 and report["cell"]["f1"] == 1.0


def test_failure_case_metrics():
    target = "col : avg(weight) | PetType row 1 : 12.0 | cat row 2 : 11.35 | dog"
    pred = "col : PetType | avg(weight) row 1 : cat | 12.0 row 2 : dog | 13.4"
    r = multitab.evaluate([pred], [target])
    assert r["table_em"] == 0.0
    assert r["row"]["f1"] == 0.5 and r["column"]["f1"] == 0.5 and r["cell"]["f1"] == 0.75


def test_load_fixture_database():
    db = multitab.load_database(str(DB_ROOT / "pets_1"))
    assert "pets" in db.table_names()
    assert db.table("pets")["rows"][0] == [2001, "cat", 3, 12.0]
