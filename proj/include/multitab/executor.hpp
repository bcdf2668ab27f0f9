#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "multitab/sql/ast.hpp"
#include "multitab/table.hpp"

namespace multitab {

enum class ExecErrorKind { UnknownTable, UnknownColumn, AmbiguousColumn, TypeMismatch, Unsupported };

std::string_view exec_error_kind_name(ExecErrorKind k);

class ExecError : public std::runtime_error {
public:
    ExecError(ExecErrorKind kind, std::string detail);

    ExecErrorKind kind() const { return kind_; }
    const std::string& detail() const { return detail_; }

private:
    ExecErrorKind kind_;
    std::string detail_;
};

/// Evaluates a parsed query with nested-loop semantics.
///
/// Row order without ORDER BY is the scan order of the evaluation: joins are
/// left-major, groups appear in first-occurrence order, set operations emit
/// left rows before right rows. Comparisons use three-valued logic and a row
/// or group survives a filter only when the predicate is true. Aggregates skip
/// Null inputs; sum/avg use compensated (Kahan-Babuska-Neumaier) summation,
/// sum over integers stays integral, avg is always real, and aggregates over no
/// inputs yield Null (count yields 0).
Table execute(const sql::Query& q, const Database& db);

/// parse + execute. Throws sql::ParseError or ExecError.
Table execute_text(std::string_view sql, const Database& db);

/// Header text for a select item as written: bare column name for a column
/// reference, "fn(arg)" for an aggregate, "*" for a star. The executor names
/// column outputs with the schema spelling of the resolved column, and expands
/// a star into the source column names.
std::string answer_header(const sql::SelectItem& item);

}  // namespace multitab
