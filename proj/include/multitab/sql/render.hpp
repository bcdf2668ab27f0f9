#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "multitab/sql/ast.hpp"

namespace multitab::sql {

/// Normalized SQL text: upper-case keywords, lower-case aggregate names,
/// single spaces, identifiers double-quoted only when required.
/// parse(render(q)) == q for every q produced by parse().
std::string render(const Query& q);
std::string render(const SelectStmt& s);
std::string render(const Expr& e);

std::string render_identifier(std::string_view name);
std::string render_column_ref(const ColumnRef& c);
std::string render_aggregate(const Aggregate& a);
std::string render_literal(const Value& v);
std::string render_operand(const Operand& o);

/// Table names referenced in FROM/JOIN clauses and nested subqueries, in
/// first-occurrence order, de-duplicated case-insensitively, without aliases.
std::vector<std::string> extract_table_names(const Query& q);

}  // namespace multitab::sql
