// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "multitab/config.hpp"
#include "multitab/dataset.hpp"
#include "multitab/executor.hpp"
#include "multitab/linearizer.hpp"
#include "multitab/metrics.hpp"
#include "multitab/oracle.hpp"
#include "multitab/qc.hpp"
#include "multitab/sql/parser.hpp"
#include "multitab/synth.hpp"

using namespace multitab;
namespace fs = std::filesystem;

namespace {

fs::path source_path(const std::string& rel) { return fs::path(MULTITAB_SOURCE_DIR) / rel; }

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void criterion(const char* name, double limit_seconds, const std::function<Outcome()>& body) {
    const auto start = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (limit_seconds > 0 && secs > limit_seconds) {
        o.pass = false;
        o.detail += " (over the " + std::to_string(static_cast<int>(limit_seconds)) + "s limit)";
    }
    if (!o.pass) ++failures;
    std::printf("%s %-24s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", name, secs, o.detail.c_str());
    std::fflush(stdout);
}

const DatabaseSet& fixture_dbs() {
    static const DatabaseSet dbs = load_database_root(source_path("data/databases"));
    return dbs;
}

const std::vector<Template>& catalog() {
    static const auto c = load_catalog(source_path("data/templates/catalog.json"));
    return c;
}

Table pets_table() {
    Table t;
    t.schema.table_name = "pets";
    t.schema.columns = {"PetID", "PetType", "pet_age", "weight"};
    t.schema.types = {ColumnType::Integer, ColumnType::Text, ColumnType::Integer, ColumnType::Real};
    t.rows = {{Value(2001), Value("cat"), Value(3), Value(12.0)},
              {Value(2002), Value("dog"), Value(2), Value(13.4)},
              {Value(2003), Value("dog"), Value(1), Value(9.3)}};
    return t;
}

std::string fmt(const char* f, double a, double b, double c) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), f, a, b, c);
    return buf;
}

// ---------------------------------------------------------------------------

Outcome metric_vectors() {
    Table target;
    target.schema.columns = {"avg(weight)", "PetType"};
    target.rows = {{Value(12.0), Value("cat")}, {Value(11.35), Value("dog")}};
    const auto pred = parse_answer_table("col : PetType | avg(weight) row 1 : cat | 12.0 row 2 : dog | 13.4").table;
    const std::vector<EvalPair> pairs = {{pred, target, false}};
    const EvalReport r = evaluate_corpus(pairs);
    const auto exact = [](const UnitScore& u, double v) { return u.precision == v && u.recall == v && u.f1 == v; };
    const bool ok = r.table_em == 0.0 && exact(r.row, 0.5) && exact(r.column, 0.5) && exact(r.cell, 0.75);
    return {ok, "table EM " + std::to_string(r.table_em) + fmt(", row F1 %.4f, column F1 %.4f, cell F1 %.4f",
                                                                 r.row.f1, r.column.f1, r.cell.f1)};
}

Outcome executor_pets() {
    Database db("pets_1");
    db.add_table(pets_table());
    const Table out = execute_text("SELECT avg(weight), PetType FROM pets GROUP BY PetType", db);
    const bool headers = out.schema.columns == std::vector<std::string>{"avg(weight)", "PetType"};
    const bool rows = out.row_count() == 2 && out.rows[0][0] == Value(12.0) && out.rows[0][1] == Value("cat") &&
                      canonical_cell_text(out.rows[1][0]) == "11.35" && out.rows[1][1] == Value("dog");
    return {headers && rows, serialize_answer_table(out)};
}

Outcome oracle_equivalence() {
    GenConfig cfg = ToolConfig{}.gen_config();
    cfg.seed = 20240501;
    cfg.target_count = 500;
    const auto gen = generate(fixture_dbs(), catalog(), cfg);
    if (gen.samples.size() != 500) return {false, "generated only " + std::to_string(gen.samples.size())};
    std::set<std::string> dbs;
    for (const auto& s : gen.samples) dbs.insert(s.db_id);
    const auto report = check_samples(gen.samples, fixture_dbs());
    std::string detail = std::to_string(report.agreed) + "/" + std::to_string(report.checked) + " agree over " +
                         std::to_string(dbs.size()) + " databases (" + std::to_string(report.ordered) +
                         " with ORDER BY)";
    if (!report.disagreements.empty()) {
        const auto& [id, v] = report.disagreements.front();
        detail += "; first: " + id + " " + v.detail + " in " + v.sql;
    }
    return {report.agreed == 500 && dbs.size() >= 3, detail};
}

Outcome generator_constraints() {
    GenConfig cfg = ToolConfig{}.gen_config();
    cfg.seed = 77;
    cfg.target_count = 10'000;
    const auto gen = generate(fixture_dbs(), catalog(), cfg);
    if (gen.samples.size() != cfg.target_count) {
        return {false, "generated " + std::to_string(gen.samples.size()) + " of 10000"};
    }
    std::size_t join_bad = 0, setop_bad = 0, empty = 0;
    std::map<std::string, std::size_t> per_category;
    for (const auto& s : gen.samples) {
        const Database& db = fixture_dbs().at(s.db_id);
        ++per_category[*s.category];
        const bool ok = satisfies_category_constraints(s, db);
        if (!ok) (*s.category == "join" ? join_bad : setop_bad)++;
        const Table answer = execute_text(*s.query, db);
        if (answer.row_count() == 0 || !same_canonical_content(answer, s.answer)) ++empty;
    }
    double worst = 0;
    for (const auto& [c, p] : cfg.category_mix) {
        const double got = static_cast<double>(per_category[std::string(category_name(c))]) / cfg.target_count;
        worst = std::max(worst, std::abs(got - p));
    }
    const bool ok = join_bad == 0 && setop_bad == 0 && empty == 0 && worst <= 0.02;
    char dev[64];
    std::snprintf(dev, sizeof(dev), ", worst category deviation %.4f", worst);
    return {ok, "join violations " + std::to_string(join_bad) + ", set-op violations " + std::to_string(setop_bad) +
                    ", empty or stale answers " + std::to_string(empty) + dev};
}

std::string random_word(std::mt19937_64& rng) {
    static const std::string letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-.,'()*%$";
    std::uniform_int_distribution<int> len(1, 8);
    std::uniform_int_distribution<std::size_t> pick(0, letters.size() - 1);
    std::string w;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) w += letters[pick(rng)];
    return w;
}

Value random_cell(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> kind(0, 9);
    switch (kind(rng)) {
        case 0: return Value(Null{});
        case 1:
        case 2: return Value(std::uniform_int_distribution<std::int64_t>(-100000, 100000)(rng));
        case 3:
        case 4: return Value(std::uniform_real_distribution<double>(-1e4, 1e4)(rng));
        case 5: {
            std::string words = random_word(rng) + " " + random_word(rng);
            return Value(words);
        }
        default: return Value(random_word(rng));
    }
}

Outcome linearizer_round_trip() {
    std::mt19937_64 rng(424242);
    std::size_t ok = 0, tried = 0;
    std::string first_failure;
    while (tried < 1000) {
        Table t;
        const int cols = std::uniform_int_distribution<int>(1, 6)(rng);
        const int rows = std::uniform_int_distribution<int>(0, 12)(rng);
        for (int c = 0; c < cols; ++c) t.schema.columns.push_back(random_word(rng));
        for (int r = 0; r < rows; ++r) {
            Row row;
            for (int c = 0; c < cols; ++c) row.push_back(random_cell(rng));
            t.rows.push_back(std::move(row));
        }
        ++tried;
        const auto parsed = parse_answer_table(serialize_answer_table(t));
        if (!parsed.ragged && same_canonical_content(parsed.table, t)) {
            ++ok;
        } else if (first_failure.empty()) {
            first_failure = serialize_answer_table(t);
        }
    }
    return {ok == tried, std::to_string(ok) + "/" + std::to_string(tried) + " tables round-trip" +
                             (first_failure.empty() ? "" : "; first failure: " + first_failure)};
}

Outcome qc_behavior() {
    Database db("qc_db");
    db.add_table(pets_table());
    Table big;
    big.schema.table_name = "big";
    big.schema.columns = {"n", "label"};
    big.schema.types = {ColumnType::Integer, ColumnType::Text};
    for (int i = 0; i < 10'001; ++i) big.rows.push_back({Value(i), Value(i % 2 ? "odd" : "even")});
    db.add_table(big);
    Table owners;
    owners.schema.table_name = "owners";
    owners.schema.columns = {"PetID", "owner"};
    owners.rows = {{Value(2001), Value("kim")}, {Value(2002), Value("lee")}};
    db.add_table(owners);

    DatabaseSet dbs;
    dbs.emplace("qc_db", db);
    QcConfig cfg;
    cfg.enable_oversize_check = true;

    const std::vector<std::pair<std::string, QcReason>> suite = {
        {"SELECT * FROM", QcReason::Unparseable},
        {"SELECT PetID FROM pets WHERE", QcReason::Unparseable},
        {"SELEC PetID FROM pets", QcReason::Unparseable},
        {"SELECT PetID FROM pets WHERE PetType = 'cat", QcReason::Unparseable},
        {"SELECT median(weight) FROM pets", QcReason::Unparseable},
        {"SELECT * FROM nonexistent", QcReason::ExecError},
        {"SELECT color FROM pets", QcReason::ExecError},
        {"SELECT PetID FROM pets AS a JOIN owners AS b ON a.PetID = b.PetID", QcReason::ExecError},
        {"SELECT PetID FROM pets WHERE PetType > 3", QcReason::ExecError},
        {"SELECT PetID FROM pets UNION SELECT PetID, owner FROM owners", QcReason::ExecError},
        {"SELECT T9.PetID FROM pets AS T1", QcReason::ExecError},
        {"SELECT * FROM pets WHERE weight > 100", QcReason::EmptyAnswer},
        {"SELECT PetType FROM pets WHERE PetType = 'fish'", QcReason::EmptyAnswer},
        {"SELECT PetID FROM pets EXCEPT SELECT PetID FROM pets", QcReason::EmptyAnswer},
        {"SELECT PetID FROM pets INTERSECT SELECT PetID FROM owners WHERE owner = 'nobody'", QcReason::EmptyAnswer},
        {"SELECT PetType, count(*) FROM pets GROUP BY PetType HAVING count(*) > 5", QcReason::EmptyAnswer},
        {"SELECT PetID FROM pets WHERE weight IS NULL", QcReason::EmptyAnswer},
        {"SELECT PetID FROM pets LIMIT 0", QcReason::EmptyAnswer},
        {"SELECT count(*) FROM big", QcReason::OversizedInput},
        {"SELECT T1.PetID FROM pets AS T1 JOIN big AS T2 ON T1.PetID = T2.n", QcReason::OversizedInput},
    };
    std::vector<Sample> batch;
    for (std::size_t i = 0; i < suite.size(); ++i) {
        Sample s;
        s.id = "bad-" + std::to_string(i);
        s.db_id = "qc_db";
        s.query = suite[i].first;
        batch.push_back(std::move(s));
    }
    for (const char* good : {"SELECT * FROM pets", "SELECT avg(weight), PetType FROM pets GROUP BY PetType",
                              "SELECT T1.PetType, T2.owner FROM pets AS T1 JOIN owners AS T2 ON T1.PetID = T2.PetID",
                              "SELECT PetID FROM pets UNION SELECT PetID FROM owners"}) {
        Sample s;
        s.id = "good-" + std::to_string(batch.size());
        s.db_id = "qc_db";
        s.query = good;
        batch.push_back(std::move(s));
    }

    const auto first = run_qc(batch, dbs, cfg, 4);
    std::size_t correct = 0;
    std::string mismatch;
    std::map<std::string, QcReason> got;
    for (const auto& [id, v] : first.discarded) got[id] = v.reason;
    for (std::size_t i = 0; i < suite.size(); ++i) {
        auto it = got.find("bad-" + std::to_string(i));
        if (it != got.end() && it->second == suite[i].second) {
            ++correct;
        } else if (mismatch.empty()) {
            mismatch = "; wrong verdict for: " + suite[i].first;
        }
    }
    const auto second = run_qc(first.kept, dbs, cfg, 1);
    const bool idempotent = second.kept == first.kept && second.stats.kept == second.stats.total;
    const bool ok = correct == suite.size() && first.kept.size() == 4 && idempotent;
    return {ok, std::to_string(correct) + "/" + std::to_string(suite.size()) + " discarded with the right reason, " +
                    std::to_string(first.kept.size()) + " kept, second pass " +
                    (idempotent ? "unchanged" : "changed") + mismatch};
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MULTITAB_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
    const fs::path dir = fs::temp_directory_path() / ("multitab_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::string common = " --count 1000 --seed 2023 --db-root " + source_path("data/databases").string() +
                               " --catalog " + source_path("data/templates/catalog.json").string();
    int rc = 0;
    rc |= run_cli("generate" + common + " --workers 1 --out " + (dir / "a.jsonl").string());
    rc |= run_cli("generate" + common + " --workers 1 --out " + (dir / "b.jsonl").string());
    rc |= run_cli("generate" + common + " --workers 8 --out " + (dir / "c.jsonl").string());
    const std::string a = slurp(dir / "a.jsonl");
    const bool same_runs = a == slurp(dir / "b.jsonl");
    const bool same_workers = a == slurp(dir / "c.jsonl");
    const auto lines = std::count(a.begin(), a.end(), '\n');
    fs::remove_all(dir);
    return {rc == 0 && same_runs && same_workers && lines == 1000,
            std::to_string(lines) + " lines; repeat run " + (same_runs ? "identical" : "differs") + "; 1 vs 8 workers " +
                (same_workers ? "identical" : "differs")};
}

Table mutate(const Table& t, std::mt19937_64& rng) {
    Table m = t;
    const int steps = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int s = 0; s < steps; ++s) {
        const int op = std::uniform_int_distribution<int>(0, 6)(rng);
        const std::size_t rows = m.row_count(), cols = m.column_count();
        auto r_at = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
        switch (op) {
            case 0:
                if (rows > 1) std::swap(m.rows[r_at(rows)], m.rows[r_at(rows)]);
                break;
            case 1:
                if (cols > 1) {
                    const std::size_t a = r_at(cols), b = r_at(cols);
                    std::swap(m.schema.columns[a], m.schema.columns[b]);
                    for (auto& row : m.rows) std::swap(row[a], row[b]);
                }
                break;
            case 2:
                if (rows) m.rows[r_at(rows)][r_at(cols)] = Value(std::uniform_int_distribution<int>(0, 5)(rng));
                break;
            case 3:
                if (rows) m.rows.erase(m.rows.begin() + static_cast<std::ptrdiff_t>(r_at(rows)));
                break;
            case 4:
                if (rows) m.rows.push_back(m.rows[r_at(rows)]);
                break;
            case 5:
                m.schema.columns[r_at(cols)] += "_x";
                break;
            default: {
                Row row;
                for (std::size_t c = 0; c < cols; ++c) row.emplace_back(std::uniform_int_distribution<int>(0, 5)(rng));
                m.rows.push_back(std::move(row));
            }
        }
    }
    return m;
}

Outcome metric_properties() {
    std::mt19937_64 rng(99);
    std::size_t em_full = 0, em_total = 0, violations = 0;
    std::string first;
    for (int i = 0; i < 1000; ++i) {
        Table t;
        const int cols = std::uniform_int_distribution<int>(1, 4)(rng);
        const int rows = std::uniform_int_distribution<int>(1, 6)(rng);
        for (int c = 0; c < cols; ++c) t.schema.columns.push_back("c" + std::to_string(c));
        for (int r = 0; r < rows; ++r) {
            Row row;
            for (int c = 0; c < cols; ++c) row.emplace_back(std::uniform_int_distribution<int>(0, 5)(rng));
            t.rows.push_back(std::move(row));
        }
        const Table p = mutate(t, rng);
        for (RowMode mode : {RowMode::SetWithinRow, RowMode::OrderedWithinRow}) {
            MetricConfig cfg;
            cfg.row_mode = mode;
            const PairScore fwd = score_pair(p, t, cfg);
            const PairScore back = score_pair(t, p, cfg);
            bool ok = true;
            for (const auto* u : {&fwd.row, &fwd.column, &fwd.cell}) {
                ok = ok && u->correct <= std::min(u->predicted_total, u->target_total);
            }
            const auto mirrored = [](const UnitCounts& a, const UnitCounts& b) {
                return a.correct == b.correct && a.predicted_total == b.target_total &&
                       a.target_total == b.predicted_total && a.precision() == b.recall() && a.recall() == b.precision();
            };
            ok = ok && mirrored(fwd.row, back.row) && mirrored(fwd.column, back.column) && mirrored(fwd.cell, back.cell);
            ok = ok && fwd.table_em == back.table_em;
            if (fwd.table_em) {
                ++em_total;
                bool full = true;
                for (const auto* u : {&fwd.row, &fwd.column, &fwd.cell}) {
                    full = full && u->correct == u->predicted_total && u->correct == u->target_total;
                }
                if (full) ++em_full;
                ok = ok && full;
            }
            if (!ok) {
                ++violations;
                if (first.empty()) first = "; first: " + serialize_answer_table(p) + " vs " + serialize_answer_table(t);
            }
        }
    }
    return {violations == 0 && em_total > 0,
            "1000 pairs x 2 row modes, " + std::to_string(violations) + " violations, " + std::to_string(em_full) + "/" +
                std::to_string(em_total) + " exact matches with full unit counts" + first};
}

}  // namespace

int main() {
    criterion("metric-oracle-vectors", 1, metric_vectors);
    criterion("executor-correctness", 1, executor_pets);
    criterion("oracle-equivalence", 60, oracle_equivalence);
    criterion("generator-constraints", 300, generator_constraints);
    criterion("linearizer-round-trip", 10, linearizer_round_trip);
    criterion("qc-behavior", 10, qc_behavior);
    criterion("determinism", 0, determinism);
    criterion("metric-properties", 30, metric_properties);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
