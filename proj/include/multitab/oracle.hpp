#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "multitab/sample.hpp"
#include "multitab/sql/ast.hpp"
#include "multitab/table.hpp"

namespace multitab {

class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An in-memory SQLite copy of a Database. Columns are created without a
/// declared type so every value keeps the storage class it has here.
class SqliteMirror {
public:
    explicit SqliteMirror(const Database& db);
    ~SqliteMirror();
    SqliteMirror(const SqliteMirror&) = delete;
    SqliteMirror& operator=(const SqliteMirror&) = delete;

    /// Runs one statement; headers come from sqlite3_column_name.
    /// Throws OracleError with SQLite's message on failure.
    Table run(std::string_view sql) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct OracleVerdict {
    bool agree = false;
    std::string sql;     // text sent to both engines
    std::string detail;  // first difference, empty when agreeing
};

/// Executes render(q) here and in SQLite and compares headers and row
/// multisets under canonical cell text. For a SELECT with ORDER BY the order
/// keys are appended as extra output columns in both engines; the key
/// sequences must match exactly and rows must match as multisets within each
/// run of equal keys. When LIMIT cuts through such a run, only its keys are
/// compared, since either engine may keep any of the tied rows.
OracleVerdict compare_with_reference(const sql::Query& q, const Database& db, const SqliteMirror& mirror);
OracleVerdict compare_with_reference(std::string_view sql, const Database& db, const SqliteMirror& mirror);

struct OracleReport {
    std::size_t checked = 0;
    std::size_t agreed = 0;
    std::size_t ordered = 0;  // queries with ORDER BY
    std::vector<std::pair<std::string, OracleVerdict>> disagreements;  // sample id -> verdict
};

/// Checks every sample's query against its database. Mirrors are built once
/// per database.
OracleReport check_samples(const std::vector<Sample>& samples, const DatabaseSet& dbs);

}  // namespace multitab
