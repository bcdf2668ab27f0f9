#include "multitab/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <json.hpp>
#include <stdexcept>
#include <unordered_map>

#include "multitab/linearizer.hpp"

namespace multitab {

std::string_view row_mode_name(RowMode m) {
    return m == RowMode::SetWithinRow ? "set-within-row" : "ordered-within-row";
}

std::optional<RowMode> parse_row_mode(std::string_view s) {
    if (s == "set-within-row" || s == "set") return RowMode::SetWithinRow;
    if (s == "ordered-within-row" || s == "ordered") return RowMode::OrderedWithinRow;
    return std::nullopt;
}

std::string_view cell_normalization_name(CellNormalization n) {
    return n == CellNormalization::None ? "none" : "numeric-canonical";
}

std::optional<CellNormalization> parse_cell_normalization(std::string_view s) {
    if (s == "none") return CellNormalization::None;
    if (s == "numeric-canonical") return CellNormalization::NumericCanonical;
    return std::nullopt;
}

double UnitCounts::precision() const {
    return predicted_total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(predicted_total);
}

double UnitCounts::recall() const {
    return target_total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(target_total);
}

double UnitCounts::f1() const {
    const double p = precision();
    const double r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

UnitCounts& UnitCounts::operator+=(const UnitCounts& o) {
    correct += o.correct;
    predicted_total += o.predicted_total;
    target_total += o.target_total;
    return *this;
}

std::string comparable_cell_text(const Value& v, const MetricConfig& cfg) {
    std::string text = canonical_cell_text(v);
    if (cfg.cell_normalization == CellNormalization::None) return text;
    const char* b = text.data();
    const char* e = text.data() + text.size();
    std::int64_t i = 0;
    if (auto [p, ec] = std::from_chars(b, e, i); ec == std::errc() && p == e && !text.empty()) {
        return std::to_string(i) + ".0";
    }
    double d = 0;
    if (auto [p, ec] = std::from_chars(b, e, d); ec == std::errc() && p == e && !text.empty()) {
        return format_real(d);
    }
    return text;
}

namespace {

std::string header_key(const std::string& h, const MetricConfig& cfg) {
    std::string key(trim(h));
    return cfg.header_case_sensitive ? key : to_lower(key);
}

std::string row_key(const Row& row, const MetricConfig& cfg) {
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (const auto& v : row) cells.push_back(comparable_cell_text(v, cfg));
    if (cfg.row_mode == RowMode::SetWithinRow) std::sort(cells.begin(), cells.end());
    // Length-prefixed so cell boundaries cannot alias.
    std::string key;
    for (const auto& c : cells) {
        key += std::to_string(c.size());
        key += ':';
        key += c;
    }
    return key;
}

std::vector<std::string> column_values(const Table& t, std::size_t c, const MetricConfig& cfg) {
    std::vector<std::string> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) out.push_back(c < row.size() ? comparable_cell_text(row[c], cfg) : std::string());
    return out;
}

UnitCounts multiset_overlap(const std::vector<std::string>& pred, const std::vector<std::string>& target) {
    std::unordered_map<std::string, std::size_t> remaining;
    for (const auto& t : target) ++remaining[t];
    UnitCounts out{0, pred.size(), target.size()};
    for (const auto& p : pred) {
        auto it = remaining.find(p);
        if (it != remaining.end() && it->second > 0) {
            --it->second;
            ++out.correct;
        }
    }
    return out;
}

}  // namespace

bool table_em(const Table& pred, const Table& target, const MetricConfig& cfg) {
    if (pred.column_count() != target.column_count() || pred.row_count() != target.row_count()) return false;
    for (std::size_t c = 0; c < pred.column_count(); ++c) {
        if (header_key(pred.schema.columns[c], cfg) != header_key(target.schema.columns[c], cfg)) return false;
    }
    for (std::size_t r = 0; r < pred.rows.size(); ++r) {
        const auto& pr = pred.rows[r];
        const auto& tr = target.rows[r];
        if (pr.size() != tr.size()) return false;
        for (std::size_t c = 0; c < pr.size(); ++c) {
            if (comparable_cell_text(pr[c], cfg) != comparable_cell_text(tr[c], cfg)) return false;
        }
    }
    return true;
}

UnitCounts row_counts(const Table& pred, const Table& target, const MetricConfig& cfg) {
    std::vector<std::string> p, t;
    for (const auto& row : pred.rows) p.push_back(row_key(row, cfg));
    for (const auto& row : target.rows) t.push_back(row_key(row, cfg));
    return multiset_overlap(p, t);
}

UnitCounts column_counts(const Table& pred, const Table& target, const MetricConfig& cfg) {
    UnitCounts out{0, pred.column_count(), target.column_count()};
    std::vector<bool> consumed(target.column_count(), false);
    std::vector<std::vector<std::string>> target_values;
    for (std::size_t c = 0; c < target.column_count(); ++c) target_values.push_back(column_values(target, c, cfg));

    for (std::size_t pc = 0; pc < pred.column_count(); ++pc) {
        const std::string header = header_key(pred.schema.columns[pc], cfg);
        const auto values = column_values(pred, pc, cfg);
        for (std::size_t tc = 0; tc < target.column_count(); ++tc) {
            if (consumed[tc]) continue;
            if (header_key(target.schema.columns[tc], cfg) != header || target_values[tc] != values) continue;
            consumed[tc] = true;
            ++out.correct;
            break;
        }
    }
    return out;
}

UnitCounts cell_counts(const Table& pred, const Table& target, const MetricConfig& cfg) {
    std::vector<std::string> p, t;
    for (const auto& row : pred.rows)
        for (const auto& v : row) p.push_back(comparable_cell_text(v, cfg));
    for (const auto& row : target.rows)
        for (const auto& v : row) t.push_back(comparable_cell_text(v, cfg));
    return multiset_overlap(p, t);
}

PairScore score_pair(const std::optional<Table>& pred, const Table& target, const MetricConfig& cfg) {
    PairScore s;
    if (!pred) {
        std::size_t cells = 0;
        for (const auto& row : target.rows) cells += row.size();
        s.row = {0, 0, target.row_count()};
        s.column = {0, 0, target.column_count()};
        s.cell = {0, 0, cells};
        return s;
    }
    s.table_em = table_em(*pred, target, cfg);
    s.row = row_counts(*pred, target, cfg);
    s.column = column_counts(*pred, target, cfg);
    s.cell = cell_counts(*pred, target, cfg);
    return s;
}

namespace {

UnitScore finish(const UnitCounts& c) { return {c.precision(), c.recall(), c.f1(), c}; }

nlohmann::ordered_json unit_json(const UnitScore& u) {
    nlohmann::ordered_json j;
    j["precision"] = u.precision;
    j["recall"] = u.recall;
    j["f1"] = u.f1;
    j["correct"] = u.counts.correct;
    j["predicted_total"] = u.counts.predicted_total;
    j["target_total"] = u.counts.target_total;
    return j;
}

}  // namespace

EvalReport evaluate_corpus(std::span<const EvalPair> pairs, const MetricConfig& cfg) {
    if (pairs.empty()) throw std::invalid_argument("evaluate_corpus: no prediction/target pairs");
    EvalReport report;
    report.config = cfg;
    UnitCounts row, column, cell;
    for (const auto& p : pairs) {
        const PairScore s = score_pair(p.prediction, p.target, cfg);
        if (s.table_em) ++report.table_em_count;
        if (!p.prediction) ++report.unparseable_prediction_count;
        if (p.ragged) ++report.ragged_prediction_count;
        row += s.row;
        column += s.column;
        cell += s.cell;
    }
    report.sample_count = pairs.size();
    report.table_em = static_cast<double>(report.table_em_count) / static_cast<double>(pairs.size());
    report.row = finish(row);
    report.column = finish(column);
    report.cell = finish(cell);
    return report;
}

std::string EvalReport::to_json() const {
    nlohmann::ordered_json j;
    j["sample_count"] = sample_count;
    j["table_em"] = table_em;
    j["table_em_count"] = table_em_count;
    j["row"] = unit_json(row);
    j["column"] = unit_json(column);
    j["cell"] = unit_json(cell);
    j["unparseable_prediction_count"] = unparseable_prediction_count;
    j["ragged_prediction_count"] = ragged_prediction_count;
    j["row_mode"] = std::string(row_mode_name(config.row_mode));
    j["header_case_sensitive"] = config.header_case_sensitive;
    j["cell_normalization"] = std::string(cell_normalization_name(config.cell_normalization));
    return j.dump(2);
}

std::string EvalReport::console_table() const {
    char buf[512];
    std::string out;
    std::snprintf(buf, sizeof(buf), "%-10s | %-26s | %-26s | %-26s\n", "", "Row", "Column", "Cell");
    out += buf;
    std::snprintf(buf, sizeof(buf), "%-10s | %8s %8s %8s | %8s %8s %8s | %8s %8s %8s\n", "Table EM", "P", "R", "F1",
                  "P", "R", "F1", "P", "R", "F1");
    out += buf;
    auto pct = [](double x) { return 100.0 * x; };
    std::snprintf(buf, sizeof(buf), "%10.2f | %8.2f %8.2f %8.2f | %8.2f %8.2f %8.2f | %8.2f %8.2f %8.2f\n",
                  pct(table_em), pct(row.precision), pct(row.recall), pct(row.f1), pct(column.precision),
                  pct(column.recall), pct(column.f1), pct(cell.precision), pct(cell.recall), pct(cell.f1));
    out += buf;
    std::snprintf(buf, sizeof(buf), "samples: %zu  unparseable: %zu  ragged: %zu  row mode: %s\n", sample_count,
                  unparseable_prediction_count, ragged_prediction_count,
                  std::string(row_mode_name(config.row_mode)).c_str());
    out += buf;
    return out;
}

std::vector<EvalPair> pair_predictions(std::span<const std::string> prediction_lines, std::span<const Table> targets) {
    if (prediction_lines.size() != targets.size()) {
        throw std::invalid_argument("prediction count " + std::to_string(prediction_lines.size()) +
                                    " does not match target count " + std::to_string(targets.size()));
    }
    std::vector<EvalPair> out;
    out.reserve(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        EvalPair p;
        p.target = targets[i];
        try {
            auto parsed = parse_answer_table(prediction_lines[i]);
            p.ragged = parsed.ragged;
            p.prediction = std::move(parsed.table);
        } catch (const FormatError&) {
            p.prediction = std::nullopt;
        }
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace multitab
