#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "multitab/qc.hpp"
#include "multitab/sample.hpp"

namespace multitab {

enum class BenchmarkKind { Spider, Atis, GeoQuery };

std::optional<BenchmarkKind> parse_benchmark_kind(std::string_view s);
std::string_view benchmark_kind_name(BenchmarkKind k);

/// One gold (question, SQL, database) triple before execution.
struct BenchmarkRecord {
    std::string id;
    std::string db_id;
    std::string split;
    std::string question;
    std::string query;
};

/// Spider layout: {"db_id", "query", "question"} objects in a JSON array.
std::vector<BenchmarkRecord> read_spider_questions(const std::filesystem::path& file, std::string_view split);

/// text2sql-data layout (Atis, GeoQuery): entries with "sql", "variables" and
/// "sentences" carrying "text", "variables" and "question-split". Variables are
/// substituted into question and SQL; the first SQL variant is used and its
/// double-quoted string literals are rewritten with single quotes.
std::vector<BenchmarkRecord> read_text2sql_questions(const std::filesystem::path& file, std::string_view db_id,
                                                     std::string_view prefix);

/// Sample counts reported for the processed benchmarks, used only to print a
/// diff next to the importer's own counts.
std::optional<std::size_t> reference_count(BenchmarkKind kind, std::string_view split);

struct SplitImport {
    std::string split;
    std::size_t records = 0;
    std::optional<std::size_t> reference;
    QcStats stats;
    std::vector<Sample> kept;
};

/// Reads the benchmark under root, executes every gold query against its
/// database and applies QC. Splits come back in a fixed order (train, dev,
/// test). Record-level failures are QC discards.
///
///   spider:   root/train_spider.json, root/dev.json, root/database/<db>/<db>.sqlite
///   atis:     root/atis.json with root/atis.sqlite or root/atis-db.sqlite
///   geoquery: root/geography.json with root/geography.sqlite or root/geography-db.sqlite
std::vector<SplitImport> import_benchmark(BenchmarkKind kind, const std::filesystem::path& root, const QcConfig& qc,
                                          std::size_t workers = 1);

/// Converts raw records into query-only samples ready for run_qc.
std::vector<Sample> records_to_samples(const std::vector<BenchmarkRecord>& records);

}  // namespace multitab
