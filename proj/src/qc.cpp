#include "multitab/qc.hpp"

#include <json.hpp>

#include "multitab/executor.hpp"
#include "multitab/linearizer.hpp"
#include "multitab/parallel.hpp"
#include "multitab/sql/parser.hpp"
#include "multitab/sql/render.hpp"

namespace multitab {

std::string_view qc_reason_name(QcReason r) {
    switch (r) {
        case QcReason::None: return "none";
        case QcReason::Unparseable: return "unparseable";
        case QcReason::ExecError: return "exec-error";
        case QcReason::OversizedInput: return "oversized-input";
        case QcReason::EmptyAnswer: return "empty-answer";
    }
    return "unknown";
}

namespace {

QcCheck discard(QcReason reason, std::string detail) {
    QcCheck out;
    out.verdict = {false, reason, std::move(detail)};
    return out;
}

std::size_t reason_slot(QcReason r) {
    for (std::size_t i = 0; i < kDiscardReasons.size(); ++i) {
        if (kDiscardReasons[i] == r) return i;
    }
    return kDiscardReasons.size();
}

}  // namespace

std::vector<Table> materialize_inputs(const std::vector<std::string>& names, const Database& db) {
    std::vector<Table> out;
    out.reserve(names.size());
    for (const auto& name : names) {
        Table t = db.at(name);
        t.schema.table_name = name;
        out.push_back(std::move(t));
    }
    return out;
}

QcCheck check_sample(std::string_view query, const Database& db, const QcConfig& cfg) {
    std::optional<sql::Query> parsed;
    try {
        parsed = sql::parse(query);
    } catch (const sql::ParseError& e) {
        return discard(QcReason::Unparseable, e.what());
    }

    auto names = sql::extract_table_names(*parsed);
    Table answer;
    try {
        answer = execute(*parsed, db);
    } catch (const ExecError& e) {
        auto out = discard(QcReason::ExecError, e.what());
        out.table_names = std::move(names);
        return out;
    }

    if (cfg.enable_oversize_check) {
        for (const auto& name : names) {
            const Table& t = db.at(name);
            if (t.row_count() > cfg.row_cap) {
                auto out = discard(QcReason::OversizedInput, "table '" + name + "' has " + std::to_string(t.row_count()) +
                                                                 " rows, cap is " + std::to_string(cfg.row_cap));
                out.table_names = std::move(names);
                return out;
            }
        }
    }

    if (answer.rows.empty()) {
        auto out = discard(QcReason::EmptyAnswer, "query returned no rows");
        out.table_names = std::move(names);
        return out;
    }

    try {
        serialize_answer_table(answer);
        for (const auto& t : materialize_inputs(names, db)) serialize_input_table(t);
    } catch (const FormatError& e) {
        auto out = discard(QcReason::Unparseable, std::string("not linearizable: ") + e.what());
        out.table_names = std::move(names);
        return out;
    }

    QcCheck out;
    out.answer = std::move(answer);
    out.table_names = std::move(names);
    return out;
}

std::size_t QcStats::discarded_for(QcReason r) const {
    const std::size_t slot = reason_slot(r);
    return slot < discarded.size() ? discarded[slot] : 0;
}

void QcStats::record(const QcVerdict& v) {
    ++total;
    if (v.keep) {
        ++kept;
    } else {
        ++discarded[reason_slot(v.reason)];
    }
}

void QcStats::merge(const QcStats& other) {
    total += other.total;
    kept += other.kept;
    for (std::size_t i = 0; i < discarded.size(); ++i) discarded[i] += other.discarded[i];
}

std::string QcStats::to_json() const {
    nlohmann::ordered_json j;
    j["total"] = total;
    j["kept"] = kept;
    auto& d = j["discarded"];
    d = nlohmann::ordered_json::object();
    for (QcReason r : kDiscardReasons) d[std::string(qc_reason_name(r))] = discarded_for(r);
    return j.dump(2);
}

QcOutcome run_qc(const std::vector<Sample>& samples, const DatabaseSet& dbs, const QcConfig& cfg, std::size_t workers) {
    std::vector<QcVerdict> verdicts(samples.size());
    std::vector<std::optional<Sample>> rebuilt(samples.size());

    parallel_for(samples.size(), workers, [&](std::size_t i) {
        const Sample& s = samples[i];
        auto db = dbs.find(s.db_id);
        if (db == dbs.end()) {
            verdicts[i] = {false, QcReason::ExecError, "unknown database '" + s.db_id + "'"};
            return;
        }
        if (!s.query) {
            verdicts[i] = {false, QcReason::Unparseable, "sample has no SQL query"};
            return;
        }
        QcCheck check = check_sample(*s.query, db->second, cfg);
        verdicts[i] = check.verdict;
        if (!check.verdict.keep) return;
        Sample out = s;
        out.tables = materialize_inputs(check.table_names, db->second);
        out.table_names = std::move(check.table_names);
        out.answer = std::move(*check.answer);
        rebuilt[i] = std::move(out);
    });

    QcOutcome outcome;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        outcome.stats.record(verdicts[i]);
        if (rebuilt[i]) {
            outcome.kept.push_back(std::move(*rebuilt[i]));
        } else {
            outcome.discarded.emplace_back(samples[i].id, verdicts[i]);
        }
    }
    return outcome;
}

}  // namespace multitab
