#include "multitab/config.hpp"

#include <charconv>
#include <json.hpp>
#include <stdexcept>

#include "multitab/dataset.hpp"

namespace multitab {

using ordered_json = nlohmann::ordered_json;

GenConfig ToolConfig::gen_config() const {
    GenConfig g;
    g.seed = seed;
    g.target_count = target_count;
    g.category_mix = category_mix;
    g.max_instantiation_attempts = max_instantiation_attempts;
    g.workers = workers;
    g.qc = qc;
    return g;
}

bool operator==(const ToolConfig& a, const ToolConfig& b) {
    auto metrics_eq = [](const MetricConfig& x, const MetricConfig& y) {
        return x.row_mode == y.row_mode && x.header_case_sensitive == y.header_case_sensitive &&
               x.cell_normalization == y.cell_normalization;
    };
    return a.seed == b.seed && a.workers == b.workers && a.catalog == b.catalog && a.db_root == b.db_root &&
           a.target_count == b.target_count && a.category_mix == b.category_mix &&
           a.max_instantiation_attempts == b.max_instantiation_attempts && a.qc.row_cap == b.qc.row_cap &&
           a.qc.enable_oversize_check == b.qc.enable_oversize_check &&
           a.import_oversize_check == b.import_oversize_check && metrics_eq(a.metrics, b.metrics);
}

std::string ToolConfig::to_json() const {
    ordered_json j;
    j["seed"] = seed;
    j["workers"] = workers;
    j["catalog"] = catalog;
    j["db_root"] = db_root;
    auto& gen = j["generate"];
    gen["count"] = target_count;
    auto& mix = gen["category_mix"];
    mix = ordered_json::object();
    for (Category c : kCategories) {
        auto it = category_mix.find(c);
        mix[std::string(category_name(c))] = it == category_mix.end() ? 0.0 : it->second;
    }
    gen["max_instantiation_attempts"] = max_instantiation_attempts;
    j["qc"]["row_cap"] = qc.row_cap;
    j["qc"]["enable_oversize_check"] = qc.enable_oversize_check;
    j["qc"]["import_oversize_check"] = import_oversize_check;
    j["metrics"]["row_mode"] = std::string(row_mode_name(metrics.row_mode));
    j["metrics"]["header_case_sensitive"] = metrics.header_case_sensitive;
    j["metrics"]["cell_normalization"] = std::string(cell_normalization_name(metrics.cell_normalization));
    return j.dump(2);
}

namespace {

void reject_unknown(const ordered_json& obj, std::initializer_list<std::string_view> known, std::string_view where) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (auto k : known) ok = ok || key == k;
        if (!ok) throw std::invalid_argument("unknown config key '" + std::string(where) + key + "'");
    }
}

}  // namespace

ToolConfig parse_config(std::string_view json_text, const ToolConfig& base) {
    ToolConfig cfg = base;
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const ordered_json::exception& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    try {
        reject_unknown(j, {"seed", "workers", "catalog", "db_root", "generate", "qc", "metrics"}, "");
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("workers")) cfg.workers = j.at("workers").get<std::size_t>();
        if (j.contains("catalog")) cfg.catalog = j.at("catalog").get<std::string>();
        if (j.contains("db_root")) cfg.db_root = j.at("db_root").get<std::string>();
        if (j.contains("generate")) {
            const auto& g = j.at("generate");
            reject_unknown(g, {"count", "category_mix", "max_instantiation_attempts"}, "generate.");
            if (g.contains("count")) cfg.target_count = g.at("count").get<std::size_t>();
            if (g.contains("max_instantiation_attempts")) {
                cfg.max_instantiation_attempts = g.at("max_instantiation_attempts").get<std::size_t>();
            }
            if (g.contains("category_mix")) {
                std::map<Category, double> mix;
                for (const auto& [key, value] : g.at("category_mix").items()) {
                    auto cat = parse_category(key);
                    if (!cat) throw std::invalid_argument("unknown category '" + key + "' in generate.category_mix");
                    mix[*cat] = value.get<double>();
                }
                for (Category c : kCategories) mix.try_emplace(c, 0.0);
                cfg.category_mix = std::move(mix);
            }
        }
        if (j.contains("qc")) {
            const auto& q = j.at("qc");
            reject_unknown(q, {"row_cap", "enable_oversize_check", "import_oversize_check"}, "qc.");
            if (q.contains("row_cap")) cfg.qc.row_cap = q.at("row_cap").get<std::size_t>();
            if (q.contains("enable_oversize_check")) cfg.qc.enable_oversize_check = q.at("enable_oversize_check").get<bool>();
            if (q.contains("import_oversize_check")) cfg.import_oversize_check = q.at("import_oversize_check").get<bool>();
        }
        if (j.contains("metrics")) {
            const auto& m = j.at("metrics");
            reject_unknown(m, {"row_mode", "header_case_sensitive", "cell_normalization"}, "metrics.");
            if (m.contains("row_mode")) {
                auto mode = parse_row_mode(m.at("row_mode").get<std::string>());
                if (!mode) throw std::invalid_argument("unknown metrics.row_mode");
                cfg.metrics.row_mode = *mode;
            }
            if (m.contains("header_case_sensitive")) {
                cfg.metrics.header_case_sensitive = m.at("header_case_sensitive").get<bool>();
            }
            if (m.contains("cell_normalization")) {
                auto norm = parse_cell_normalization(m.at("cell_normalization").get<std::string>());
                if (!norm) throw std::invalid_argument("unknown metrics.cell_normalization");
                cfg.metrics.cell_normalization = *norm;
            }
        }
    } catch (const ordered_json::exception& e) {
        throw std::invalid_argument(std::string("bad config value: ") + e.what());
    }
    return cfg;
}

ToolConfig load_config(const std::filesystem::path& path, const ToolConfig& base) {
    return parse_config(read_file(path), base);
}

std::map<Category, double> parse_category_mix(std::string_view spec) {
    std::map<Category, double> out;
    while (!spec.empty()) {
        const auto comma = spec.find(',');
        const std::string_view part = trim(spec.substr(0, comma));
        spec = comma == std::string_view::npos ? std::string_view() : spec.substr(comma + 1);
        if (part.empty()) continue;
        const auto eq = part.find('=');
        if (eq == std::string_view::npos) throw std::invalid_argument("mix entry '" + std::string(part) + "' lacks '='");
        auto cat = parse_category(trim(part.substr(0, eq)));
        if (!cat) throw std::invalid_argument("unknown category in mix entry '" + std::string(part) + "'");
        const std::string_view num = trim(part.substr(eq + 1));
        double v = 0;
        auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
        if (ec != std::errc() || p != num.data() + num.size()) {
            throw std::invalid_argument("bad proportion in mix entry '" + std::string(part) + "'");
        }
        out[*cat] = v;
    }
    if (out.empty()) throw std::invalid_argument("empty category mix");
    for (Category c : kCategories) out.try_emplace(c, 0.0);
    return out;
}

}  // namespace multitab
