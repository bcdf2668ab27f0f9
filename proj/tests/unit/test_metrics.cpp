#include <doctest.h>

#include "fixtures.hpp"
#include "multitab/linearizer.hpp"
#include "multitab/metrics.hpp"

using namespace multitab;

namespace {

Table target() {
    Table t;
    t.schema.columns = {"avg(weight)", "PetType"};
    t.rows = {{Value(12.0), Value("cat")}, {Value(11.35), Value("dog")}};
    return t;
}

// The failure-case prediction: columns swapped and no average computed.
Table prediction() {
    return parse_answer_table("col : PetType | avg(weight) row 1 : cat | 12.0 row 2 : dog | 13.4").table;
}

}  // namespace

TEST_CASE("table exact match") {
    CHECK_FALSE(table_em(prediction(), target()));
    CHECK(table_em(target(), target()));
    Table swapped = target();
    std::swap(swapped.rows[0], swapped.rows[1]);
    CHECK_FALSE(table_em(swapped, target()));
    Table upper = target();
    upper.schema.columns[1] = "pettype";
    CHECK_FALSE(table_em(upper, target()));
    MetricConfig ci;
    ci.header_case_sensitive = false;
    CHECK(table_em(upper, target(), ci));
}

TEST_CASE("row counts") {
    CHECK(row_counts(prediction(), target()) == UnitCounts{1, 2, 2});
    CHECK(row_counts(target(), target()) == UnitCounts{2, 2, 2});
    MetricConfig ordered;
    ordered.row_mode = RowMode::OrderedWithinRow;
    CHECK(row_counts(prediction(), target(), ordered) == UnitCounts{0, 2, 2});
}

TEST_CASE("row matching consumes targets") {
    Table t = mt_test::text_table({"a"}, {{"x"}, {"y"}});
    Table p = mt_test::text_table({"a"}, {{"x"}, {"x"}, {"x"}});
    CHECK(row_counts(p, t) == UnitCounts{1, 3, 2});
    // Set-within-row treats cells as a multiset, not a set.
    Table t2 = mt_test::text_table({"a", "b"}, {{"x", "x"}});
    Table p2 = mt_test::text_table({"a", "b"}, {{"x", "y"}});
    CHECK(row_counts(p2, t2).correct == 0);
}

TEST_CASE("column counts") {
    CHECK(column_counts(prediction(), target()) == UnitCounts{1, 2, 2});
    CHECK(column_counts(target(), target()) == UnitCounts{2, 2, 2});
    // Position is not scored.
    Table p = mt_test::text_table({"b", "a"}, {{"2", "1"}});
    Table t = mt_test::text_table({"a", "b"}, {{"1", "2"}});
    CHECK(column_counts(p, t) == UnitCounts{2, 2, 2});
    // Duplicate predicted columns only match once.
    Table dup = mt_test::text_table({"a", "a"}, {{"1", "1"}});
    CHECK(column_counts(dup, t).correct == 1);
}

TEST_CASE("cell counts") {
    CHECK(cell_counts(prediction(), target()) == UnitCounts{3, 4, 4});
    CHECK(cell_counts(target(), target()) == UnitCounts{4, 4, 4});
    Table t = mt_test::text_table({"a", "b"}, {{"x", "y"}});
    Table p = mt_test::text_table({"a", "b"}, {{"x", "x"}});
    CHECK(cell_counts(p, t) == UnitCounts{1, 2, 2});
}

TEST_CASE("numeric normalization") {
    MetricConfig cfg;
    CHECK(comparable_cell_text(Value("12"), cfg) == "12");
    cfg.cell_normalization = CellNormalization::NumericCanonical;
    CHECK(comparable_cell_text(Value("12"), cfg) == "12.0");
    CHECK(comparable_cell_text(Value(12), cfg) == "12.0");
    CHECK(comparable_cell_text(Value("12.50"), cfg) == "12.5");
    CHECK(comparable_cell_text(Value("dog"), cfg) == "dog");
    Table p = mt_test::text_table({"n"}, {{"12"}});
    Table t = mt_test::text_table({"n"}, {{"12.0"}});
    CHECK_FALSE(table_em(p, t));
    CHECK(table_em(p, t, cfg));
}

TEST_CASE("unit ratios") {
    UnitCounts z;
    CHECK(z.precision() == 0.0);
    CHECK(z.recall() == 0.0);
    CHECK(z.f1() == 0.0);
    UnitCounts c{3, 4, 4};
    CHECK(c.precision() == 0.75);
    CHECK(c.recall() == 0.75);
    CHECK(c.f1() == 0.75);
    UnitCounts d{1, 2, 4};
    CHECK(d.f1() == doctest::Approx(2.0 * 0.5 * 0.25 / 0.75));
}

TEST_CASE("corpus evaluation of the failure case") {
    std::vector<EvalPair> pairs = {{prediction(), target(), false}};
    const EvalReport r = evaluate_corpus(pairs);
    CHECK(r.table_em == 0.0);
    CHECK(r.row.precision == 0.5);
    CHECK(r.row.recall == 0.5);
    CHECK(r.row.f1 == 0.5);
    CHECK(r.column.precision == 0.5);
    CHECK(r.column.recall == 0.5);
    CHECK(r.column.f1 == 0.5);
    CHECK(r.cell.precision == 0.75);
    CHECK(r.cell.recall == 0.75);
    CHECK(r.cell.f1 == 0.75);
}

TEST_CASE("perfect predictions score 1 everywhere") {
    std::vector<EvalPair> pairs = {{target(), target(), false}, {mt_test::pets_table(), mt_test::pets_table(), false}};
    const EvalReport r = evaluate_corpus(pairs);
    CHECK(r.table_em == 1.0);
    for (const UnitScore* u : {&r.row, &r.column, &r.cell}) {
        CHECK(u->precision == 1.0);
        CHECK(u->recall == 1.0);
        CHECK(u->f1 == 1.0);
    }
}

TEST_CASE("unparseable predictions count against recall only") {
    std::vector<EvalPair> pairs = {{target(), target(), false}, {std::nullopt, target(), false}};
    const EvalReport r = evaluate_corpus(pairs);
    CHECK(r.row.recall == 0.5);
    CHECK(r.row.precision == 1.0);
    CHECK(r.table_em == 0.5);
    CHECK(r.unparseable_prediction_count == 1);
    CHECK_THROWS_AS(evaluate_corpus(std::vector<EvalPair>{}), std::invalid_argument);
}

TEST_CASE("prediction lines pair with targets") {
    const std::vector<std::string> lines = {"col : avg(weight) | PetType row 1 : 12.0 | cat row 2 : 11.35 | dog",
                                            "garbage", "col : a row 1 : x | y"};
    const std::vector<Table> targets = {target(), target(), target()};
    auto pairs = pair_predictions(lines, targets);
    REQUIRE(pairs.size() == 3);
    CHECK(pairs[0].prediction.has_value());
    CHECK_FALSE(pairs[1].prediction.has_value());
    CHECK(pairs[2].ragged);
    const EvalReport r = evaluate_corpus(pairs);
    CHECK(r.table_em_count == 1);
    CHECK(r.ragged_prediction_count == 1);
    CHECK_THROWS(pair_predictions(std::vector<std::string>{"x"}, targets));
}

TEST_CASE("report rendering") {
    std::vector<EvalPair> pairs = {{prediction(), target(), false}};
    const EvalReport r = evaluate_corpus(pairs);
    const std::string console = r.console_table();
    CHECK(console.find("Table EM") != std::string::npos);
    CHECK(console.find("75.00") != std::string::npos);
    CHECK(console.find("row mode: set-within-row") != std::string::npos);
    const std::string json = r.to_json();
    CHECK(json.find("\"table_em\"") != std::string::npos);
    CHECK(json.find("\"row_mode\": \"set-within-row\"") != std::string::npos);
    CHECK(parse_row_mode("ordered-within-row") == RowMode::OrderedWithinRow);
    CHECK(parse_row_mode("sideways") == std::nullopt);
    CHECK(parse_cell_normalization("numeric-canonical") == CellNormalization::NumericCanonical);
}
