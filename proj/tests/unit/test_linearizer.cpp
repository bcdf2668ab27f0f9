#include <doctest.h>

#include "fixtures.hpp"
#include "multitab/linearizer.hpp"

using namespace multitab;

namespace {

const std::string kPetsLinear =
    "<table_name> : pets col : PetID | PetType | pet_age | weight row 1 : 2001 | cat | 3 | 12.0 "
    "row 2 : 2002 | dog | 2 | 13.4 row 3 : 2003 | dog | 1 | 9.3";

Table worked_target() {
    Table t;
    t.schema.columns = {"avg(weight)", "PetType"};
    t.rows = {{Value(12.0), Value("cat")}, {Value(11.35), Value("dog")}};
    return t;
}

}  // namespace

TEST_CASE("input table serialization") {
    CHECK(serialize_input_table(mt_test::pets_table()) == kPetsLinear);

    Table empty = mt_test::text_table({"a", "b"}, {});
    empty.schema.table_name = "t";
    CHECK(serialize_input_table(empty) == "<table_name> : t col : a | b");

    Table bad = mt_test::pets_table();
    bad.rows[0][1] = Value("cat|dog");
    CHECK_THROWS_AS(serialize_input_table(bad), FormatError);

    Table unnamed = mt_test::text_table({"a"}, {{"1"}});
    CHECK_THROWS_AS(serialize_input_table(unnamed), FormatError);
}

TEST_CASE("answer table serialization") {
    Table one;
    one.schema.columns = {"count(*)"};
    one.rows = {{Value(1)}};
    CHECK(serialize_answer_table(one) == "col : count(*) row 1 : 1");
    CHECK(serialize_answer_table(worked_target()) == "col : avg(weight) | PetType row 1 : 12.0 | cat row 2 : 11.35 | dog");

    Table no_columns;
    CHECK_THROWS_AS(serialize_answer_table(no_columns), FormatError);
}

TEST_CASE("answer table parsing") {
    auto one = parse_answer_table("col : count(*) row 1 : 1");
    CHECK(one.table.schema.columns == std::vector<std::string>{"count(*)"});
    REQUIRE(one.table.row_count() == 1);
    CHECK(canonical_cell_text(one.table.rows[0][0]) == "1");
    CHECK_FALSE(one.ragged);

    auto two = parse_answer_table("col : a | b row 1 : x | y row 2 : z | w");
    CHECK(two.table.column_count() == 2);
    CHECK(two.table.row_count() == 2);
    CHECK(two.table.rows[1][1] == Value("w"));

    CHECK_THROWS_AS(parse_answer_table("no markers at all"), FormatError);
}

TEST_CASE("answer parsing tolerates whitespace and flags ragged rows") {
    auto p = parse_answer_table("  col :  a |b   row 1 :x|  y  row 2 : z  ");
    CHECK(p.table.schema.columns == std::vector<std::string>{"a", "b"});
    REQUIRE(p.table.row_count() == 2);
    CHECK(p.table.rows[0][1] == Value("y"));
    CHECK(p.ragged);
    CHECK(p.table.rows[1][1].is_null());

    auto long_row = parse_answer_table("col : a row 1 : x | y");
    CHECK(long_row.ragged);
    CHECK(long_row.table.rows[0].size() == 1);
}

TEST_CASE("answer round trip on the worked target") {
    const Table t = worked_target();
    CHECK(same_canonical_content(parse_answer_table(serialize_answer_table(t)).table, t));
}

TEST_CASE("model input concatenates the question and tables") {
    const std::vector<Table> tables = {mt_test::pets_table()};
    CHECK(build_model_input("how many pets?", tables) == "how many pets? " + kPetsLinear);
    CHECK(build_model_input("SELECT count(*) FROM pets", tables) == "SELECT count(*) FROM pets " + kPetsLinear);
    CHECK_THROWS_AS(build_model_input("q", std::vector<Table>{}), FormatError);
}

TEST_CASE("whitespace token count") {
    CHECK(count_whitespace_tokens("col : a | b") == 5);
    CHECK(count_whitespace_tokens("") == 0);
    CHECK(count_whitespace_tokens("   \t ") == 0);
    CHECK(count_whitespace_tokens(kPetsLinear) == 42);
}

TEST_CASE("format collisions") {
    CHECK(collides_with_format("a|b"));
    CHECK(collides_with_format("line\nbreak"));
    CHECK(collides_with_format("row 3 : x"));
    CHECK(collides_with_format("col : x"));
    CHECK(collides_with_format("<table_name> : y"));
    CHECK_FALSE(collides_with_format("dog"));
    CHECK_FALSE(collides_with_format("row"));
    CHECK_FALSE(collides_with_format("colour"));
}

TEST_CASE("custom format keywords") {
    LinearFormatConfig cfg;
    cfg.header_marker = "header :";
    cfg.separator = ";";
    Table t = mt_test::text_table({"a", "b"}, {{"1", "2"}});
    const std::string s = serialize_answer_table(t, cfg);
    CHECK(s == "header : a ; b row 1 : 1 ; 2");
    CHECK(same_canonical_content(parse_answer_table(s, cfg).table, t));
}
