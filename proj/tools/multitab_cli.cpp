// multitab: dataset construction, execution, QC and evaluation from the shell.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "multitab/benchmark.hpp"
#include "multitab/config.hpp"
#include "multitab/dataset.hpp"
#include "multitab/executor.hpp"
#include "multitab/linearizer.hpp"
#include "multitab/metrics.hpp"
#include "multitab/oracle.hpp"
#include "multitab/qc.hpp"
#include "multitab/sql/parser.hpp"
#include "multitab/sql/render.hpp"
#include "multitab/synth.hpp"

namespace fs = std::filesystem;
using namespace multitab;

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool with_out) {
    cmd->add_option("--config", c.config_path, "JSON config overriding the built-in defaults")->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "Random seed");
    cmd->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
    if (with_out) cmd->add_option("--out", c.out, "Output path");
}

ToolConfig resolve_config(const Common& c) {
    ToolConfig cfg = c.config_path.empty() ? ToolConfig{} : load_config(c.config_path);
    if (c.seed) cfg.seed = *c.seed;
    if (c.workers) cfg.workers = *c.workers;
    return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw LoadError("cannot write " + path.string());
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
    if (!out.flush()) throw LoadError("write failed for " + path.string());
}

std::string render_grid(const Table& t) {
    std::vector<std::size_t> width(t.column_count(), 0);
    std::vector<std::vector<std::string>> cells;
    for (std::size_t c = 0; c < t.column_count(); ++c) width[c] = t.schema.columns[c].size();
    for (const auto& row : t.rows) {
        std::vector<std::string> line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            line.push_back(canonical_cell_text(row[c]));
            width[c] = std::max(width[c], line.back().size());
        }
        cells.push_back(std::move(line));
    }
    auto emit = [&](const std::vector<std::string>& line) {
        std::string out;
        for (std::size_t c = 0; c < line.size(); ++c) {
            if (c) out += " | ";
            out += line[c];
            if (c + 1 < line.size()) out.append(width[c] - line[c].size(), ' ');
        }
        return out + "\n";
    };
    std::string out = emit(t.schema.columns);
    std::string rule;
    for (std::size_t c = 0; c < width.size(); ++c) {
        if (c) rule += "-+-";
        rule.append(width[c], '-');
    }
    out += rule + "\n";
    for (const auto& line : cells) out += emit(line);
    out += "(" + std::to_string(t.row_count()) + (t.row_count() == 1 ? " row)\n" : " rows)\n");
    return out;
}

void print_qc_stats(const QcStats& s, std::string_view prefix) {
    std::printf("%stotal: %zu\n", std::string(prefix).c_str(), s.total);
    std::printf("%skept: %zu\n", std::string(prefix).c_str(), s.kept);
    for (QcReason r : kDiscardReasons) {
        std::printf("%sdiscarded %s: %zu\n", std::string(prefix).c_str(), std::string(qc_reason_name(r)).c_str(),
                    s.discarded_for(r));
    }
}

Database open_database(const std::string& spec, const std::string& db_root) {
    if (fs::exists(spec)) return load_database(spec);
    const fs::path under_root = fs::path(db_root) / spec;
    if (fs::exists(under_root)) return load_database(under_root);
    throw LoadError("no database at '" + spec + "' or '" + under_root.string() + "'");
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
    Common common;
    std::string db_root, catalog, mix, qc_report;
    std::optional<std::size_t> count;
    bool oracle = false;
};

int cmd_generate(const GenerateArgs& a) {
    ToolConfig cfg = resolve_config(a.common);
    if (!a.db_root.empty()) cfg.db_root = a.db_root;
    if (!a.catalog.empty()) cfg.catalog = a.catalog;
    if (a.count) cfg.target_count = *a.count;
    if (!a.mix.empty()) cfg.category_mix = parse_category_mix(a.mix);
    GenConfig gen = cfg.gen_config();
    gen.validate();

    const auto catalog = load_catalog(cfg.catalog);
    const auto dbs = load_database_root(cfg.db_root);
    GenResult result = generate(dbs, catalog, gen);
    write_dataset(result.samples, fs::path(a.common.out));

    QcStats attempted = result.rejected;
    attempted.total += result.samples.size();
    attempted.kept += result.samples.size();
    const std::string report_path = a.qc_report.empty() ? a.common.out + ".qc.json" : a.qc_report;
    write_text(report_path, attempted.to_json());

    std::printf("seed: %llu\n", static_cast<unsigned long long>(gen.seed));
    std::printf("requested: %zu\n", gen.target_count);
    std::printf("generated: %zu\n", result.samples.size());
    std::printf("attempts: %zu\n", result.attempts);
    for (Category c : kCategories) {
        const std::size_t n = result.produced[c];
        const double pct = result.samples.empty() ? 0.0 : 100.0 * static_cast<double>(n) / result.samples.size();
        std::printf("category %s: %zu (%.2f%%)\n", std::string(category_name(c)).c_str(), n, pct);
    }
    for (QcReason r : kDiscardReasons) {
        std::printf("rejected %s: %zu\n", std::string(qc_reason_name(r)).c_str(), result.rejected.discarded_for(r));
    }
    std::printf("shortfall: %zu\n", result.shortfall.size());
    std::printf("partial: %s\n", result.complete() ? "no" : "yes");
    std::printf("output: %s\n", a.common.out.c_str());

    int rc = result.complete() ? kOk : kFailure;
    if (a.oracle) {
        const auto report = check_samples(result.samples, dbs);
        std::printf("oracle checked: %zu\n", report.checked);
        std::printf("oracle agreed: %zu\n", report.agreed);
        for (const auto& [id, v] : report.disagreements) {
            std::fprintf(stderr, "oracle disagreement %s: %s\n  %s\n", id.c_str(), v.detail.c_str(), v.sql.c_str());
        }
        if (!report.disagreements.empty()) rc = kFailure;
    }
    return rc;
}

struct ExecArgs {
    Common common;
    std::string db, db_root, sql, sql_file, format = "table";
    bool oracle = false;
};

int cmd_exec(const ExecArgs& a) {
    const ToolConfig cfg = resolve_config(a.common);
    std::string text = a.sql;
    if (!a.sql_file.empty()) text = read_file(a.sql_file);
    const Database db = open_database(a.db, a.db_root.empty() ? cfg.db_root : a.db_root);
    const auto query = sql::parse(text);
    const Table answer = execute(query, db);
    std::string out;
    if (a.format == "linearized") {
        out = serialize_answer_table(answer) + "\n";
    } else {
        out = render_grid(answer);
    }
    if (a.common.out.empty()) {
        std::fputs(out.c_str(), stdout);
    } else {
        write_text(a.common.out, out);
    }
    if (a.oracle) {
        SqliteMirror mirror(db);
        const auto verdict = compare_with_reference(query, db, mirror);
        std::printf("oracle: %s%s%s\n", verdict.agree ? "agree" : "disagree", verdict.detail.empty() ? "" : " - ",
                    verdict.detail.c_str());
        if (!verdict.agree) return kFailure;
    }
    return kOk;
}

struct EvalArgs {
    Common common;
    std::string pred_file, gold_file, row_mode, report, normalization;
    bool header_case_insensitive = false;
};

std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    return lines;
}

int cmd_eval(const EvalArgs& a) {
    ToolConfig cfg = resolve_config(a.common);
    MetricConfig mc = cfg.metrics;
    if (!a.row_mode.empty()) {
        auto mode = parse_row_mode(a.row_mode);
        if (!mode) throw std::invalid_argument("unknown row mode '" + a.row_mode + "'");
        mc.row_mode = *mode;
    }
    if (!a.normalization.empty()) {
        auto n = parse_cell_normalization(a.normalization);
        if (!n) throw std::invalid_argument("unknown cell normalization '" + a.normalization + "'");
        mc.cell_normalization = *n;
    }
    if (a.header_case_insensitive) mc.header_case_sensitive = false;

    const auto predictions = read_lines(a.pred_file);
    const auto gold = read_dataset(fs::path(a.gold_file));
    if (predictions.size() != gold.size()) {
        std::fprintf(stderr, "error: %zu prediction lines but %zu gold samples\n", predictions.size(), gold.size());
        return kFailure;
    }
    std::vector<Table> targets;
    targets.reserve(gold.size());
    for (const auto& s : gold) targets.push_back(s.answer);
    const auto pairs = pair_predictions(predictions, targets);
    const EvalReport report = evaluate_corpus(pairs, mc);
    std::fputs(report.console_table().c_str(), stdout);
    if (!a.report.empty()) write_text(a.report, report.to_json());
    return kOk;
}

struct ImportArgs {
    Common common;
    std::string benchmark, root;
    std::optional<std::size_t> row_cap;
    bool no_row_cap = false;
};

int cmd_import(const ImportArgs& a) {
    const ToolConfig cfg = resolve_config(a.common);
    auto kind = parse_benchmark_kind(a.benchmark);
    if (!kind) throw std::invalid_argument("unknown benchmark '" + a.benchmark + "'");
    QcConfig qc = cfg.qc;
    qc.enable_oversize_check = cfg.import_oversize_check && !a.no_row_cap;
    if (a.row_cap) qc.row_cap = *a.row_cap;

    const auto splits = import_benchmark(*kind, a.root, qc, cfg.workers);
    fs::create_directories(a.common.out);
    for (const auto& s : splits) {
        const fs::path file = fs::path(a.common.out) / (s.split + ".jsonl");
        write_dataset(s.kept, file);
        write_text(fs::path(a.common.out) / (s.split + ".qc.json"), s.stats.to_json());
        std::printf("split %s: records %zu kept %zu", s.split.c_str(), s.records, s.kept.size());
        if (s.reference) {
            const long long diff = static_cast<long long>(s.kept.size()) - static_cast<long long>(*s.reference);
            std::printf(" reference %zu diff %+lld", *s.reference, diff);
        }
        std::printf("\n");
        print_qc_stats(s.stats, "  ");
    }
    std::printf("row cap: %s\n", qc.enable_oversize_check ? std::to_string(qc.row_cap).c_str() : "off");
    return kOk;
}

struct QcArgs {
    Common common;
    std::string in, db_root, report;
    std::optional<std::size_t> row_cap;
    bool oversize = false;
};

int cmd_qc(const QcArgs& a) {
    const ToolConfig cfg = resolve_config(a.common);
    QcConfig qc = cfg.qc;
    if (a.row_cap) qc.row_cap = *a.row_cap;
    if (a.oversize || a.row_cap) qc.enable_oversize_check = true;
    const auto samples = read_dataset(fs::path(a.in));
    const auto dbs = load_database_root(a.db_root.empty() ? cfg.db_root : a.db_root);
    const auto outcome = run_qc(samples, dbs, qc, cfg.workers);
    if (!a.common.out.empty()) write_dataset(outcome.kept, fs::path(a.common.out));
    if (!a.report.empty()) write_text(a.report, outcome.stats.to_json());
    print_qc_stats(outcome.stats, "");
    for (const auto& [id, verdict] : outcome.discarded) {
        std::fprintf(stderr, "discard %s %s: %s\n", id.c_str(), std::string(qc_reason_name(verdict.reason)).c_str(),
                     verdict.detail.c_str());
    }
    return kOk;
}

struct LinearizeArgs {
    Common common;
    std::string in;
};

int cmd_linearize(const LinearizeArgs& a) {
    const auto samples = read_dataset(fs::path(a.in));
    std::string source, target;
    for (const auto& s : samples) {
        source += sample_source(s) + "\n";
        target += sample_target(s) + "\n";
    }
    write_text(a.common.out + ".source", source);
    write_text(a.common.out + ".target", target);
    std::printf("samples: %zu\n", samples.size());
    std::printf("source: %s.source\n", a.common.out.c_str());
    std::printf("target: %s.target\n", a.common.out.c_str());
    return kOk;
}

struct RepairArgs {
    Common common;
    std::string in, placeholder = "w";
};

int cmd_repair(const RepairArgs& a) {
    const auto lines = read_lines(a.in);
    std::string out;
    std::size_t repaired = 0, failed = 0;
    for (const auto& line : lines) {
        if (trim(line).empty()) continue;
        try {
            out += repair_from_clause(line, a.placeholder) + "\n";
            ++repaired;
        } catch (const sql::ParseError& e) {
            ++failed;
            std::fprintf(stderr, "unrepairable: %s (%s)\n", line.c_str(), e.what());
        }
    }
    if (a.common.out.empty()) {
        std::fputs(out.c_str(), stdout);
    } else {
        write_text(a.common.out, out);
    }
    std::fprintf(stderr, "repaired: %zu\nfailed: %zu\n", repaired, failed);
    return failed == 0 ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-table QA dataset toolkit"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Instantiate SQL templates into a synthetic dataset");
    add_common(g, gen.common, true);
    g->get_option("--out")->required();
    g->add_option("--db-root", gen.db_root, "Directory of databases");
    g->add_option("--catalog", gen.catalog, "Template catalog");
    g->add_option("--count", gen.count, "Number of samples");
    g->add_option("--mix", gen.mix, "Category proportions, e.g. single=0.3,join=0.7");
    g->add_option("--qc-report", gen.qc_report, "QC report path (default <out>.qc.json)");
    g->add_flag("--oracle", gen.oracle, "Cross-check every query against SQLite");

    ExecArgs ex;
    auto* e = app.add_subcommand("exec", "Execute one query and print the answer table");
    add_common(e, ex.common, true);
    e->add_option("--db", ex.db, "Database path, or name under --db-root")->required();
    e->add_option("--db-root", ex.db_root, "Directory of databases");
    auto* sql_opt = e->add_option("--sql", ex.sql, "SQL text");
    auto* sql_file_opt = e->add_option("--sql-file", ex.sql_file, "File holding the SQL text")->check(CLI::ExistingFile);
    sql_opt->excludes(sql_file_opt);
    e->add_option("--format", ex.format, "table or linearized")->check(CLI::IsMember({"table", "linearized"}));
    e->add_flag("--oracle", ex.oracle, "Also run the query in SQLite and compare");

    EvalArgs ev;
    auto* v = app.add_subcommand("eval", "Score predicted answers against a gold dataset");
    add_common(v, ev.common, false);
    v->add_option("--pred-file", ev.pred_file, "One linearized answer per line")->required()->check(CLI::ExistingFile);
    v->add_option("--gold-file", ev.gold_file, "Gold dataset (JSONL)")->required()->check(CLI::ExistingFile);
    v->add_option("--row-mode", ev.row_mode, "set-within-row or ordered-within-row");
    v->add_option("--cell-normalization", ev.normalization, "none or numeric-canonical");
    v->add_flag("--header-case-insensitive", ev.header_case_insensitive, "Compare headers ignoring case");
    v->add_option("--report", ev.report, "Write the JSON report here");

    ImportArgs im;
    auto* i = app.add_subcommand("import", "Convert a text-to-SQL benchmark into table QA samples");
    add_common(i, im.common, true);
    i->get_option("--out")->required();
    i->add_option("--benchmark", im.benchmark, "spider, atis or geoquery")->required();
    i->add_option("--root", im.root, "Benchmark directory")->required()->check(CLI::ExistingDirectory);
    i->add_option("--row-cap", im.row_cap, "Discard samples with a larger input table")->check(CLI::PositiveNumber);
    i->add_flag("--no-row-cap", im.no_row_cap, "Disable the input-size check");

    QcArgs q;
    auto* qc = app.add_subcommand("qc", "Re-run quality control over a dataset");
    add_common(qc, q.common, true);
    qc->add_option("--in", q.in, "Dataset (JSONL)")->required()->check(CLI::ExistingFile);
    qc->add_option("--db-root", q.db_root, "Directory of databases");
    qc->add_option("--row-cap", q.row_cap, "Enable the input-size check with this cap")->check(CLI::PositiveNumber);
    qc->add_flag("--oversize-check", q.oversize, "Enable the input-size check with the configured cap");
    qc->add_option("--report", q.report, "Write QC stats (JSON) here");

    LinearizeArgs li;
    auto* l = app.add_subcommand("linearize", "Write model input and target lines for a dataset");
    add_common(l, li.common, true);
    l->get_option("--out")->required();
    l->add_option("--in", li.in, "Dataset (JSONL)")->required()->check(CLI::ExistingFile);

    RepairArgs rp;
    auto* r = app.add_subcommand("repair", "Insert a placeholder FROM clause into FROM-less queries");
    add_common(r, rp.common, true);
    r->add_option("--in", rp.in, "One query per line")->required()->check(CLI::ExistingFile);
    r->add_option("--placeholder", rp.placeholder, "Table name to insert");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int rc = app.exit(err);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (g->parsed()) return cmd_generate(gen);
        if (e->parsed()) return cmd_exec(ex);
        if (v->parsed()) return cmd_eval(ev);
        if (i->parsed()) return cmd_import(im);
        if (qc->parsed()) return cmd_qc(q);
        if (l->parsed()) return cmd_linearize(li);
        if (r->parsed()) return cmd_repair(rp);
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return kFailure;
    }
    return kUsage;
}
