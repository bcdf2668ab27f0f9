#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "multitab/table.hpp"

namespace multitab {

enum class RowMode { OrderedWithinRow, SetWithinRow };
enum class CellNormalization { None, NumericCanonical };

std::string_view row_mode_name(RowMode m);
std::optional<RowMode> parse_row_mode(std::string_view s);
std::string_view cell_normalization_name(CellNormalization n);
std::optional<CellNormalization> parse_cell_normalization(std::string_view s);

struct MetricConfig {
    RowMode row_mode = RowMode::SetWithinRow;
    bool header_case_sensitive = true;
    CellNormalization cell_normalization = CellNormalization::None;
};

struct UnitCounts {
    std::size_t correct = 0;
    std::size_t predicted_total = 0;
    std::size_t target_total = 0;

    /// 0 when the denominator is 0.
    double precision() const;
    double recall() const;
    double f1() const;

    UnitCounts& operator+=(const UnitCounts& o);
    friend bool operator==(const UnitCounts&, const UnitCounts&) = default;
};

/// Text a cell is compared by. With numeric-canonical normalization, cells
/// that read as numbers compare by value ("12" == "12.0").
std::string comparable_cell_text(const Value& v, const MetricConfig& cfg);

/// Headers, header order, row order and every cell must match.
bool table_em(const Table& pred, const Table& target, const MetricConfig& cfg = {});

/// Each target row is consumed at most once. In set-within-row mode two rows
/// are equal when they hold the same multiset of cells.
UnitCounts row_counts(const Table& pred, const Table& target, const MetricConfig& cfg = {});

/// A predicted column is correct when an unconsumed target column has the same
/// header and the same value sequence. Targets are scanned left to right and
/// the first match is consumed. Column position is not scored.
UnitCounts column_counts(const Table& pred, const Table& target, const MetricConfig& cfg = {});

/// Multiset intersection of all cells, headers excluded.
UnitCounts cell_counts(const Table& pred, const Table& target, const MetricConfig& cfg = {});

struct PairScore {
    bool table_em = false;
    UnitCounts row, column, cell;
};

/// nullopt stands for an unparseable prediction: no correct or predicted
/// units, full target totals.
PairScore score_pair(const std::optional<Table>& pred, const Table& target, const MetricConfig& cfg = {});

struct UnitScore {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    UnitCounts counts;
};

struct EvalReport {
    double table_em = 0;
    std::size_t table_em_count = 0;
    UnitScore row, column, cell;
    std::size_t sample_count = 0;
    std::size_t unparseable_prediction_count = 0;
    std::size_t ragged_prediction_count = 0;
    MetricConfig config;

    std::string to_json() const;
    /// Fixed-width layout: Table EM, then P/R/F1 for rows, columns and cells,
    /// followed by a line naming the row mode.
    std::string console_table() const;
};

struct EvalPair {
    std::optional<Table> prediction;  // nullopt = unparseable
    Table target;
    bool ragged = false;
};

/// Micro-averaged over the corpus. Throws std::invalid_argument on an empty list.
EvalReport evaluate_corpus(std::span<const EvalPair> pairs, const MetricConfig& cfg = {});

/// Pairs one prediction line with each target answer. Lines that do not parse
/// become unparseable predictions.
std::vector<EvalPair> pair_predictions(std::span<const std::string> prediction_lines, std::span<const Table> targets);

}  // namespace multitab
