#include "multitab/benchmark.hpp"

#include <algorithm>
#include <cstdio>
#include <json.hpp>
#include <map>

#include "multitab/dataset.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace multitab {

std::optional<BenchmarkKind> parse_benchmark_kind(std::string_view s) {
    const std::string lower = to_lower(s);
    if (lower == "spider") return BenchmarkKind::Spider;
    if (lower == "atis") return BenchmarkKind::Atis;
    if (lower == "geoquery" || lower == "geo") return BenchmarkKind::GeoQuery;
    return std::nullopt;
}

std::string_view benchmark_kind_name(BenchmarkKind k) {
    switch (k) {
        case BenchmarkKind::Spider: return "spider";
        case BenchmarkKind::Atis: return "atis";
        case BenchmarkKind::GeoQuery: return "geoquery";
    }
    return "unknown";
}

std::optional<std::size_t> reference_count(BenchmarkKind kind, std::string_view split) {
    switch (kind) {
        case BenchmarkKind::Spider:
            if (split == "train") return 6715;
            break;
        case BenchmarkKind::GeoQuery:
            if (split == "train") return 530;
            if (split == "dev") return 49;
            if (split == "test") return 253;
            break;
        case BenchmarkKind::Atis:
            if (split == "train") return 384;
            if (split == "dev") return 45;
            if (split == "test") return 86;
            break;
    }
    return std::nullopt;
}

namespace {

json parse_json_file(const fs::path& file) {
    try {
        return json::parse(read_file(file));
    } catch (const json::exception& e) {
        throw LoadError(file.string() + ": " + e.what());
    }
}

std::string record_id(std::string_view prefix, std::string_view split, std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%06zu", index);
    return std::string(prefix) + "-" + std::string(split) + "-" + buf;
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    if (from.empty()) return;
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
}

// "boston" -> 'boston'; text2sql-data writes string values MySQL style.
std::string single_quote_strings(std::string_view sql) {
    std::string out;
    out.reserve(sql.size());
    for (std::size_t i = 0; i < sql.size(); ++i) {
        const char c = sql[i];
        if (c == '\'') {
            // Already single quoted; copy through to the closing quote.
            out.push_back(c);
            for (++i; i < sql.size(); ++i) {
                out.push_back(sql[i]);
                if (sql[i] == '\'') {
                    if (i + 1 < sql.size() && sql[i + 1] == '\'') {
                        out.push_back(sql[++i]);
                    } else {
                        break;
                    }
                }
            }
            continue;
        }
        if (c != '"') {
            out.push_back(c);
            continue;
        }
        out.push_back('\'');
        for (++i; i < sql.size() && sql[i] != '"'; ++i) {
            if (sql[i] == '\'') out.push_back('\'');
            out.push_back(sql[i]);
        }
        out.push_back('\'');
    }
    return out;
}

fs::path find_text2sql_db(const fs::path& root, std::string_view stem) {
    for (const auto& candidate : {std::string(stem) + ".sqlite", std::string(stem) + "-db.sqlite"}) {
        if (fs::exists(root / candidate)) return root / candidate;
    }
    throw LoadError("no " + std::string(stem) + ".sqlite or " + std::string(stem) + "-db.sqlite under " +
                    root.string());
}

}  // namespace

std::vector<BenchmarkRecord> read_spider_questions(const fs::path& file, std::string_view split) {
    const json doc = parse_json_file(file);
    if (!doc.is_array()) throw LoadError(file.string() + ": expected a JSON array");
    std::vector<BenchmarkRecord> out;
    out.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& rec = doc[i];
        try {
            out.push_back({record_id("spider", split, i), rec.at("db_id").get<std::string>(), std::string(split),
                           rec.at("question").get<std::string>(), rec.at("query").get<std::string>()});
        } catch (const json::exception& e) {
            throw LoadError(file.string() + ": record " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

std::vector<BenchmarkRecord> read_text2sql_questions(const fs::path& file, std::string_view db_id,
                                                     std::string_view prefix) {
    const json doc = parse_json_file(file);
    if (!doc.is_array()) throw LoadError(file.string() + ": expected a JSON array");
    std::vector<BenchmarkRecord> out;
    std::map<std::string, std::size_t> per_split;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& entry = doc[i];
        try {
            const auto& sqls = entry.at("sql");
            if (sqls.empty()) continue;
            const std::string sql_template = sqls.front().get<std::string>();

            // Entry-level defaults, overridden by each sentence's bindings.
            std::map<std::string, std::string> defaults;
            if (entry.contains("variables")) {
                for (const auto& v : entry.at("variables")) defaults[v.at("name")] = v.value("example", "");
            }

            for (const auto& sentence : entry.at("sentences")) {
                auto bindings = defaults;
                if (sentence.contains("variables")) {
                    for (const auto& [name, value] : sentence.at("variables").items()) {
                        bindings[name] = value.get<std::string>();
                    }
                }
                std::string question = sentence.at("text").get<std::string>();
                std::string query = sql_template;
                // Longest names first so "city_name10" is not clobbered by "city_name1".
                std::vector<std::pair<std::string, std::string>> ordered(bindings.begin(), bindings.end());
                std::stable_sort(ordered.begin(), ordered.end(),
                                 [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
                for (const auto& [name, value] : ordered) {
                    replace_all(question, name, value);
                    replace_all(query, name, value);
                }
                const std::string split = sentence.value("question-split", "train");
                const std::size_t index = per_split[split]++;
                out.push_back({record_id(prefix, split, index), std::string(db_id), split, std::move(question),
                               single_quote_strings(query)});
            }
        } catch (const json::exception& e) {
            throw LoadError(file.string() + ": entry " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

std::vector<Sample> records_to_samples(const std::vector<BenchmarkRecord>& records) {
    std::vector<Sample> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        Sample s;
        s.id = r.id;
        s.db_id = r.db_id;
        s.query = r.query;
        s.question = r.question;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<SplitImport> import_benchmark(BenchmarkKind kind, const fs::path& root, const QcConfig& qc,
                                          std::size_t workers) {
    std::vector<BenchmarkRecord> records;
    DatabaseSet dbs;

    if (kind == BenchmarkKind::Spider) {
        for (const auto& [file, split] : {std::pair{"train_spider.json", "train"}, std::pair{"dev.json", "dev"}}) {
            if (!fs::exists(root / file)) continue;
            auto part = read_spider_questions(root / file, split);
            records.insert(records.end(), part.begin(), part.end());
        }
        if (records.empty()) throw LoadError("no train_spider.json or dev.json under " + root.string());
        // Only databases that some record needs are loaded.
        for (const auto& r : records) {
            if (dbs.count(r.db_id)) continue;
            const fs::path dir = root / "database" / r.db_id;
            if (!fs::exists(dir)) continue;  // surfaces later as an unknown-database discard
            Database db = load_database(dir, DatabaseFormat::SqliteFile);
            dbs.emplace(r.db_id, std::move(db));
        }
    } else {
        const std::string stem = kind == BenchmarkKind::Atis ? "atis" : "geography";
        const std::string prefix(benchmark_kind_name(kind));
        records = read_text2sql_questions(root / (stem + ".json"), prefix, prefix);
        dbs.emplace(prefix, load_database(find_text2sql_db(root, stem), DatabaseFormat::SqliteFile));
    }

    std::vector<SplitImport> out;
    for (const std::string split : {"train", "dev", "test"}) {
        std::vector<BenchmarkRecord> part;
        std::copy_if(records.begin(), records.end(), std::back_inserter(part),
                     [&](const BenchmarkRecord& r) { return r.split == split; });
        if (part.empty()) continue;
        auto outcome = run_qc(records_to_samples(part), dbs, qc, workers);
        out.push_back({split, part.size(), reference_count(kind, split), outcome.stats, std::move(outcome.kept)});
    }
    return out;
}

}  // namespace multitab
