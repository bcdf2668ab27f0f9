#include <doctest.h>
#include <sqlite3.h>
#include <unistd.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "multitab/benchmark.hpp"
#include "multitab/dataset.hpp"
#include "multitab/executor.hpp"
#include "multitab/linearizer.hpp"
#include "multitab/sql/parser.hpp"

using namespace multitab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("multitab_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

void make_sqlite(const fs::path& p, const char* script) {
    fs::create_directories(p.parent_path());
    sqlite3* db = nullptr;
    REQUIRE(sqlite3_open(p.string().c_str(), &db) == SQLITE_OK);
    char* err = nullptr;
    const int rc = sqlite3_exec(db, script, nullptr, nullptr, &err);
    if (err) {
        MESSAGE(err);
        sqlite3_free(err);
    }
    sqlite3_close(db);
    REQUIRE(rc == SQLITE_OK);
}

const char* kPetsScript =
    "CREATE TABLE pets (PetID INTEGER, PetType VARCHAR(20), pet_age INT, weight REAL);"
    "INSERT INTO pets VALUES (2001, 'cat', 3, 12.0), (2002, 'dog', 2, 13.4), (2003, 'dog', 1, 9.3);"
    "CREATE TABLE notes (k, v TEXT);"
    "INSERT INTO notes VALUES (1, NULL), ('x', 'y');";

Sample full_sample() {
    Sample s;
    s.id = "s1";
    s.db_id = "pets_1";
    s.query = "SELECT count(*) FROM pets";
    s.template_id = "single_count";
    s.category = "single";
    s.table_names = {"pets"};
    s.tables = {mt_test::pets_table()};
    s.answer = mt_test::text_table({"count(*)"}, {});
    s.answer.rows = {{Value(3)}};
    return s;
}

}  // namespace

TEST_CASE("fixture databases load") {
    const auto& dbs = mt_test::fixture_dbs();
    CHECK(dbs.size() >= 4);
    const Database& pets = dbs.at("pets_1");
    const Table& t = pets.at("pets");
    CHECK(t.schema.columns == mt_test::pets_table().schema.columns);
    CHECK(t.rows == mt_test::pets_table().rows);
    CHECK(t.schema.types == mt_test::pets_table().schema.types);
    CHECK(t.name() == "pets");
}

TEST_CASE("csv parsing") {
    auto rows = parse_csv("\xEF\xBB\xBF" "a,b,c\r\n1,\"x, \"\"y\"\"\",\n\"\",2,3\n");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0][0] == "a");
    CHECK(rows[1][1] == "x, \"y\"");
    CHECK_FALSE(rows[1][2].has_value());
    CHECK(rows[2][0] == "");
    CHECK(parse_csv("a\n\"multi\nline\"\n")[1][0] == "multi\nline");
    CHECK_THROWS_AS(parse_csv("a\n\"open\n"), LoadError);
}

TEST_CASE("field coercion") {
    CHECK(coerce_field("42", ColumnType::Integer, "t", "c", 1) == Value(42));
    CHECK(coerce_field("4.5", ColumnType::Real, "t", "c", 1) == Value(4.5));
    CHECK(coerce_field("4", ColumnType::Real, "t", "c", 1) == Value(4.0));
    CHECK(coerce_field(std::nullopt, ColumnType::Integer, "t", "c", 1).is_null());
    CHECK(coerce_field("", ColumnType::Real, "t", "c", 1).is_null());
    CHECK(coerce_field("007", ColumnType::Text, "t", "c", 1) == Value("007"));
    CHECK(coerce_field("7", ColumnType::Any, "t", "c", 1) == Value(7));
    CHECK(coerce_field("7.5", ColumnType::Any, "t", "c", 1) == Value(7.5));
    CHECK(coerce_field("seven", ColumnType::Any, "t", "c", 1) == Value("seven"));
    try {
        coerce_field("abc", ColumnType::Integer, "pets", "PetID", 3);
        FAIL("expected LoadError");
    } catch (const LoadError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("pets") != std::string::npos);
        CHECK(msg.find("PetID") != std::string::npos);
        CHECK(msg.find("3") != std::string::npos);
        CHECK(msg.find("abc") != std::string::npos);
    }
}

TEST_CASE("csv-dir errors") {
    TempDir tmp("csv");
    CHECK_THROWS_AS(load_database_root(tmp.path), LoadError);

    write(tmp.path / "d" / "schema.json",
          R"({"name": "d", "tables": [{"name": "t", "file": "t.csv", "columns": [{"name": "n", "type": "integer"}]}]})");
    write(tmp.path / "d" / "t.csv", "n\n1\ntwo\n");
    CHECK_THROWS_WITH_AS(load_database(tmp.path / "d"), doctest::Contains("two"), LoadError);

    write(tmp.path / "d" / "t.csv", "m\n1\n");
    CHECK_THROWS_AS(load_database(tmp.path / "d"), LoadError);

    write(tmp.path / "d" / "t.csv", "n\n1\n\n2\n");
    const Database ok = load_database(tmp.path / "d");
    CHECK(ok.at("t").row_count() >= 2);
}

TEST_CASE("sqlite databases load with affinity types") {
    TempDir tmp("sqlite");
    make_sqlite(tmp.path / "pets_1" / "pets_1.sqlite", kPetsScript);
    const Database db = load_database(tmp.path / "pets_1");
    CHECK(db.name() == "pets_1");
    const Table& pets = db.at("pets");
    CHECK(pets.rows == mt_test::pets_table().rows);
    CHECK(pets.schema.types == mt_test::pets_table().schema.types);
    const Table& notes = db.at("notes");
    CHECK(notes.schema.type_of(0) == ColumnType::Any);
    CHECK(notes.rows[0][0] == Value(1));
    CHECK(notes.rows[1][0] == Value("x"));
    CHECK(notes.rows[0][1].is_null());

    const Table out = execute_text("SELECT avg(weight), PetType FROM pets GROUP BY PetType", db);
    CHECK(serialize_answer_table(out) == "col : avg(weight) | PetType row 1 : 12.0 | cat row 2 : 11.35 | dog");

    const auto root = load_database_root(tmp.path);
    CHECK(root.count("pets_1") == 1);
    CHECK(parse_database_format("sqlite-file") == DatabaseFormat::SqliteFile);
    CHECK(parse_database_format("csv-dir") == DatabaseFormat::CsvDir);
    CHECK(parse_database_format("xml") == std::nullopt);
}

TEST_CASE("from-clause repair") {
    CHECK(repair_from_clause("SELECT count(*)", "w") == "SELECT count(*) FROM w");
    CHECK(repair_from_clause("SELECT a FROM t", "w") == "SELECT a FROM t");
    CHECK(repair_from_clause("SELECT max(c) WHERE c > 3", "w") == "SELECT max(c) FROM w WHERE c > 3");
    CHECK(repair_from_clause("SELECT a UNION SELECT a FROM t", "w") == "SELECT a FROM w UNION SELECT a FROM t");
    CHECK(repair_from_clause("SELECT a ORDER BY a LIMIT 2;", "w") == "SELECT a FROM w ORDER BY a LIMIT 2;");
    CHECK(repair_from_clause("SELECT a", "select") == "SELECT a FROM \"select\"");
    CHECK_THROWS_AS(repair_from_clause("SELECT", "w"), sql::ParseError);

    // The repaired query runs against a one-table database named by the placeholder.
    Database db("one");
    Table w = mt_test::text_table({"c"}, {});
    w.schema.table_name = "w";
    w.rows = {{Value(1)}, {Value(5)}, {Value(4)}};
    db.add_table(w);
    const Table out = execute_text(repair_from_clause("SELECT max(c) WHERE c > 3", "w"), db);
    CHECK(out.rows[0][0] == Value(5));
}

TEST_CASE("jsonl round trip") {
    Sample a = full_sample();
    Sample b = full_sample();
    b.id = "s2";
    b.query.reset();
    b.template_id.reset();
    b.category.reset();
    b.question = "how many pets?";
    b.tables[0].rows[0][3] = Value(Null{});
    std::stringstream buf;
    write_dataset({a, b}, buf);
    const std::string text = buf.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    auto back = read_dataset(buf);
    REQUIRE(back.size() == 2);
    CHECK(back[0] == a);
    CHECK(back[1] == b);
    CHECK(sample_target(a) == "col : count(*) row 1 : 3");
    CHECK(sample_source(b).rfind("how many pets? <table_name> : pets", 0) == 0);
    CHECK(sample_source(a).rfind("SELECT count(*) FROM pets <table_name> : pets", 0) == 0);
}

TEST_CASE("jsonl field order is stable") {
    const std::string line = sample_to_json_line(full_sample());
    const auto pos = [&](const char* key) { return line.find(std::string("\"") + key + "\":"); };
    CHECK(pos("id") < pos("db_id"));
    CHECK(pos("db_id") < pos("query"));
    CHECK(pos("query") < pos("template_id"));
    CHECK(pos("category") < pos("table_names"));
    CHECK(pos("tables") < pos("answer"));
    CHECK(pos("answer") < pos("source"));
    CHECK(pos("source") < pos("target"));
    CHECK(line.find('\n') == std::string::npos);
}

TEST_CASE("malformed dataset lines report their line number") {
    const std::string good = sample_to_json_line(full_sample());
    std::stringstream truncated(good + "\n" + good.substr(0, good.size() / 2) + "\n");
    try {
        read_dataset(truncated);
        FAIL("expected DatasetError");
    } catch (const DatasetError& e) {
        CHECK(e.line() == 2);
    }

    std::string tampered = good;
    const auto at = tampered.find("row 1 : 3");
    REQUIRE(at != std::string::npos);
    tampered.replace(at, 9, "row 1 : 4");
    std::stringstream bad_target(tampered + "\n");
    CHECK_THROWS_AS(read_dataset(bad_target), DatasetError);

    std::stringstream blank("\n" + good + "\n\n");
    CHECK(read_dataset(blank).size() == 1);
}

TEST_CASE("text2sql benchmark reader") {
    TempDir tmp("t2s");
    write(tmp.path / "geography.json", R"([
      {"sql": ["SELECT CITYalias0.POPULATION FROM CITY AS CITYalias0 WHERE CITYalias0.CITY_NAME = \"city_name0\"",
               "SELECT 1"],
       "variables": [{"name": "city_name0", "example": "boston"}, {"name": "city_name01", "example": "x"}],
       "sentences": [
         {"text": "population of city_name0", "variables": {"city_name0": "austin"}, "question-split": "train"},
         {"text": "how many live in city_name0", "variables": {}, "question-split": "test"}]}
    ])");
    auto recs = read_text2sql_questions(tmp.path / "geography.json", "geoquery", "geoquery");
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].question == "population of austin");
    CHECK(recs[0].query ==
          "SELECT CITYalias0.POPULATION FROM CITY AS CITYalias0 WHERE CITYalias0.CITY_NAME = 'austin'");
    CHECK(recs[0].split == "train");
    CHECK(recs[1].question == "how many live in boston");
    CHECK(recs[1].split == "test");
    CHECK(recs[0].db_id == "geoquery");
}

TEST_CASE("spider-layout import runs qc per split") {
    TempDir tmp("spider");
    make_sqlite(tmp.path / "database" / "pets_1" / "pets_1.sqlite", kPetsScript);
    write(tmp.path / "train_spider.json", R"([
      {"db_id": "pets_1", "query": "SELECT count(*) FROM pets WHERE weight > 10", "question": "heavy pets?"},
      {"db_id": "pets_1", "query": "SELECT * FROM pets WHERE weight > 100", "question": "very heavy?"},
      {"db_id": "pets_1", "query": "SELECT nope FROM pets", "question": "broken"}])");
    write(tmp.path / "dev.json",
          R"([{"db_id": "pets_1", "query": "SELECT PetType FROM pets", "question": "types?"}])");
    auto splits = import_benchmark(BenchmarkKind::Spider, tmp.path, QcConfig{});
    REQUIRE(splits.size() == 2);
    CHECK(splits[0].split == "train");
    CHECK(splits[0].records == 3);
    CHECK(splits[0].kept.size() == 1);
    CHECK(splits[0].stats.discarded_for(QcReason::EmptyAnswer) == 1);
    CHECK(splits[0].stats.discarded_for(QcReason::ExecError) == 1);
    CHECK(splits[0].reference == 6715);
    CHECK(splits[0].kept[0].question == "heavy pets?");
    CHECK(splits[0].kept[0].answer.rows[0][0] == Value(2));
    CHECK(splits[1].split == "dev");
    CHECK(splits[1].kept.size() == 1);
}

TEST_CASE("reference counts") {
    CHECK(reference_count(BenchmarkKind::Spider, "train") == 6715);
    CHECK(reference_count(BenchmarkKind::GeoQuery, "train") == 530);
    CHECK(reference_count(BenchmarkKind::GeoQuery, "dev") == 49);
    CHECK(reference_count(BenchmarkKind::GeoQuery, "test") == 253);
    CHECK(reference_count(BenchmarkKind::Atis, "train") == 384);
    CHECK(reference_count(BenchmarkKind::Atis, "dev") == 45);
    CHECK(reference_count(BenchmarkKind::Atis, "test") == 86);
    CHECK(parse_benchmark_kind("geoquery") == BenchmarkKind::GeoQuery);
}
