#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "multitab/sample.hpp"
#include "multitab/table.hpp"

namespace multitab {

enum class QcReason { None, Unparseable, ExecError, OversizedInput, EmptyAnswer };

inline constexpr std::array kDiscardReasons = {QcReason::Unparseable, QcReason::ExecError, QcReason::OversizedInput,
                                               QcReason::EmptyAnswer};

std::string_view qc_reason_name(QcReason r);

struct QcVerdict {
    bool keep = true;
    QcReason reason = QcReason::None;
    std::string detail;
};

struct QcConfig {
    std::size_t row_cap = 10'000;
    bool enable_oversize_check = false;
};

struct QcCheck {
    QcVerdict verdict;
    std::optional<Table> answer;           // set when kept
    std::vector<std::string> table_names;  // as written in the query, when parseable
};

/// First failing rule wins, in this order: unparseable, exec-error,
/// oversized-input, empty-answer. Samples whose tables cannot be linearized
/// (separator or marker collisions) are reported as unparseable.
QcCheck check_sample(std::string_view query, const Database& db, const QcConfig& cfg);

struct QcStats {
    std::size_t total = 0;
    std::size_t kept = 0;
    std::array<std::size_t, kDiscardReasons.size()> discarded{};

    std::size_t discarded_for(QcReason r) const;
    void record(const QcVerdict& v);
    void merge(const QcStats& other);
    std::string to_json() const;

    friend bool operator==(const QcStats&, const QcStats&) = default;
};

struct QcOutcome {
    std::vector<Sample> kept;
    QcStats stats;
    std::vector<std::pair<std::string, QcVerdict>> discarded;  // sample id -> verdict
};

/// Checks every sample against its database and rebuilds table_names, tables
/// and answer from the query for the survivors. Input order is preserved.
QcOutcome run_qc(const std::vector<Sample>& samples, const DatabaseSet& dbs, const QcConfig& cfg,
                 std::size_t workers = 1);

/// Input tables for a query: each referenced table copied out of the database
/// and renamed to the spelling the query uses.
std::vector<Table> materialize_inputs(const std::vector<std::string>& names, const Database& db);

}  // namespace multitab
