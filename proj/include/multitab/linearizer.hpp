#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "multitab/table.hpp"

namespace multitab {

/// Keyword spellings of the flat table format. The defaults are the wire
/// format; changing them produces strings no pretrained checkpoint expects.
struct LinearFormatConfig {
    std::string table_name_marker = "<table_name> :";
    std::string header_marker = "col :";
    std::string row_marker_word = "row";  // rendered as "row {i} :"
    std::string separator = "|";
};

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string serialize_input_table(const Table& t, const LinearFormatConfig& cfg = {});
std::string serialize_answer_table(const Table& t, const LinearFormatConfig& cfg = {});

struct ParsedAnswer {
    Table table;
    /// Set when at least one row had a different cell count than the header;
    /// short rows are padded with Null, long rows truncated.
    bool ragged = false;
};

/// Lenient about whitespace. Throws FormatError("unparseable prediction ...")
/// when the text does not start with the header marker.
ParsedAnswer parse_answer_table(std::string_view s, const LinearFormatConfig& cfg = {});

/// "question <table_name> : ... <table_name> : ..." with tables in list order.
std::string build_model_input(std::string_view question, std::span<const Table> tables,
                              const LinearFormatConfig& cfg = {});

/// Whitespace-delimited token count. A heuristic stand-in for subword length.
std::size_t count_whitespace_tokens(std::string_view s);

/// True when the text would be misread by parse_answer_table or break the
/// line-oriented file formats: contains the separator, a line break, or
/// anything the parser recognizes as a marker.
bool collides_with_format(std::string_view text, const LinearFormatConfig& cfg = {});

}  // namespace multitab
