#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace multitab {

struct Null {
    friend bool operator==(Null, Null) = default;
};

/// A single relational cell. Comparison for metrics and grouping goes through
/// canonical_cell_text(); operator== here is structural (type + payload).
class Value {
public:
    using Storage = std::variant<Null, std::int64_t, double, std::string>;

    Value() = default;
    Value(Null) {}
    Value(std::int64_t v) : data_(v) {}
    Value(int v) : data_(static_cast<std::int64_t>(v)) {}
    Value(double v) : data_(v) {}
    Value(std::string v) : data_(std::move(v)) {}
    Value(const char* v) : data_(std::string(v)) {}

    bool is_null() const { return std::holds_alternative<Null>(data_); }
    bool is_integer() const { return std::holds_alternative<std::int64_t>(data_); }
    bool is_real() const { return std::holds_alternative<double>(data_); }
    bool is_text() const { return std::holds_alternative<std::string>(data_); }
    bool is_numeric() const { return is_integer() || is_real(); }

    std::int64_t as_integer() const { return std::get<std::int64_t>(data_); }
    double as_real() const { return std::get<double>(data_); }
    const std::string& as_text() const { return std::get<std::string>(data_); }

    /// Numeric payload widened to double. Precondition: is_numeric().
    double to_double() const { return is_integer() ? static_cast<double>(as_integer()) : as_real(); }

    const Storage& storage() const { return data_; }

    friend bool operator==(const Value& a, const Value& b) = default;

private:
    Storage data_;
};

/// Sentinel used for Null cells in every textual rendering.
inline constexpr std::string_view kNullText = "none";

/// The one canonical text form of a cell:
///   Null    -> "none"
///   Integer -> decimal digits
///   Real    -> at most 15 significant digits, always with a fractional part ("12.0")
///   Text    -> verbatim, leading/trailing whitespace trimmed
std::string canonical_cell_text(const Value& v);

/// Shortest rendering of a double rounded to 15 significant digits (SQLite's
/// real-to-text precision, so (13.4 + 9.3) / 2 prints as 11.35). Layout follows
/// Python's repr(): positional for decimal exponents in [-4, 16), scientific
/// otherwise.
std::string format_real(double v);

std::string_view trim(std::string_view s);

/// ASCII case-insensitive equality, used for identifier resolution.
bool iequals(std::string_view a, std::string_view b);
std::string to_lower(std::string_view s);

enum class ColumnType { Any, Integer, Real, Text };

std::string_view column_type_name(ColumnType t);
std::optional<ColumnType> parse_column_type(std::string_view s);

struct Schema {
    std::optional<std::string> table_name;
    std::vector<std::string> columns;
    /// Declared column types; empty when unknown (e.g. parsed predictions).
    std::vector<ColumnType> types;

    std::size_t width() const { return columns.size(); }
    ColumnType type_of(std::size_t i) const { return i < types.size() ? types[i] : ColumnType::Any; }

    friend bool operator==(const Schema&, const Schema&) = default;
};

using Row = std::vector<Value>;

struct Table {
    Schema schema;
    std::vector<Row> rows;

    std::size_t row_count() const { return rows.size(); }
    std::size_t column_count() const { return schema.columns.size(); }
    const std::string& name() const;

    friend bool operator==(const Table&, const Table&) = default;
};

struct Violation {
    std::optional<std::size_t> row;
    std::string message;
};

/// Checks the structural invariants: non-empty trimmed column names, matching
/// type vector length, and rectangular rows. Empty tables are valid.
std::vector<Violation> validate_table(const Table& t);

/// True when both tables have the same headers and the same cells under
/// canonical text, in the same order.
bool same_canonical_content(const Table& a, const Table& b);

class Database {
public:
    Database() = default;
    explicit Database(std::string name) : name_(std::move(name)) {}

    const std::string& name() const { return name_; }

    /// Stores verbatim; throws std::invalid_argument on a case-insensitive
    /// duplicate name or a table without a name.
    void add_table(Table t);

    const Table* find(std::string_view name) const;
    const Table& at(std::string_view name) const;

    /// Tables in insertion order.
    const std::vector<Table>& tables() const { return tables_; }
    std::size_t size() const { return tables_.size(); }

private:
    std::string name_;
    std::vector<Table> tables_;
    std::map<std::string, std::size_t> index_;  // lowercased name -> position
};

}  // namespace multitab
