#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "multitab/sample.hpp"
#include "multitab/table.hpp"

namespace multitab {

class LoadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed dataset file. line() is 1-based.
class DatasetError : public std::runtime_error {
public:
    DatasetError(std::size_t line, const std::string& message);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

enum class DatabaseFormat { CsvDir, SqliteFile };

std::optional<DatabaseFormat> parse_database_format(std::string_view s);

/// csv-dir: a directory holding schema.json plus one CSV file per table.
///
///   {"name": "pets_1",
///    "tables": [{"name": "pets", "file": "pets.csv",
///                "columns": [{"name": "PetID", "type": "integer"}, ...]}]}
///
/// Each CSV starts with a header row that must repeat the declared column
/// names. An empty unquoted field is Null.
///
/// sqlite-file: every user table of the file, with column types taken from the
/// declared affinity and cells from each value's storage class.
Database load_database(const std::filesystem::path& path, DatabaseFormat format);

/// Picks the format from the path: a directory with schema.json is csv-dir, a
/// directory <d> holding <d>.sqlite (the Spider layout) or a regular file is
/// sqlite-file.
Database load_database(const std::filesystem::path& path);

/// Every database under root, keyed by database name. Entries that are not
/// databases are skipped; an empty result is an error.
DatabaseSet load_database_root(const std::filesystem::path& root);

/// RFC 4180 records. Unquoted empty fields come back as nullopt.
std::vector<std::vector<std::optional<std::string>>> parse_csv(std::string_view text);

/// Converts a raw field to the declared type. Throws LoadError naming the
/// table, column and 1-based data row on failure.
Value coerce_field(const std::optional<std::string>& raw, ColumnType type, std::string_view table,
                   std::string_view column, std::size_t row);

/// Inserts "FROM <placeholder>" into every top-level SELECT that lacks one,
/// before its first WHERE/GROUP BY/HAVING/ORDER BY/LIMIT, set operator, ";"
/// or the end of input. Queries that already have FROM come back unchanged.
/// Throws sql::ParseError when the result still does not parse.
std::string repair_from_clause(std::string_view query, std::string_view placeholder);

/// One JSON object per line:
///   id, db_id, query?, question?, template_id?, category?,
///   table_names, tables[{name, columns, types?, rows}], answer{columns, types?, rows},
///   source (model input), target (linearized answer)
/// Cells are JSON null / integer / float / string. source and target are
/// derived from the structured fields and checked again on read.
std::string sample_to_json_line(const Sample& s);
Sample sample_from_json_line(std::string_view line, std::size_t line_no = 1);

/// Model input for a sample: the question when present, else the query,
/// followed by the linearized input tables.
std::string sample_source(const Sample& s);
std::string sample_target(const Sample& s);

void write_dataset(const std::vector<Sample>& samples, std::ostream& out);
void write_dataset(const std::vector<Sample>& samples, const std::filesystem::path& path);

/// All-or-nothing: any bad line throws DatasetError with its line number.
std::vector<Sample> read_dataset(std::istream& in);
std::vector<Sample> read_dataset(const std::filesystem::path& path);

/// Reads a whole file; throws LoadError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace multitab
