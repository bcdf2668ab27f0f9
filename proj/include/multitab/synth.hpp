#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "multitab/qc.hpp"
#include "multitab/sample.hpp"
#include "multitab/table.hpp"

namespace multitab {

enum class Category { Single, Join, Union, Intersect, Except };

inline constexpr std::array kCategories = {Category::Single, Category::Join, Category::Union, Category::Intersect,
                                           Category::Except};

std::string_view category_name(Category c);
std::optional<Category> parse_category(std::string_view s);
bool is_set_op_category(Category c);

enum class SlotKind { Columns, Column, CommonColumn, Agg, Relop, Value, CountValue, Limit, Direction };

std::string_view slot_kind_name(SlotKind k);
std::optional<SlotKind> parse_slot_kind(std::string_view s);

enum class ColumnFilter { Any, Numeric, Text };

/// Declarative constraint for one placeholder. Table slots ({table},
/// {table1}, {table2}) are implicit and bound from candidate_tables().
struct Slot {
    std::string name;
    SlotKind kind = SlotKind::Column;
    std::string table;            // table slot the column is drawn from
    std::string qualifier;        // alias prefix for rendered columns, e.g. "T1"
    ColumnFilter filter = ColumnFilter::Any;
    std::string column;           // column slot an agg/value refers to
    std::vector<std::string> distinct_from;  // column slots this one must differ from
    std::int64_t min = 1;
    std::int64_t max = 1;
};

/// Clause kinds used for the tier progression.
enum class ClauseKind { Aggregation, Where, GroupBy, Having, OrderBy };

struct Template {
    std::string id;
    Category category = Category::Single;
    int tier = 1;
    std::optional<std::string> parent;
    std::string body;
    std::vector<Slot> slots;
    std::vector<std::string> placeholders;  // in order of first appearance in body
    std::vector<ClauseKind> clauses;        // derived from the dummy-substituted body

    const Slot* slot(std::string_view name) const;
    std::vector<std::string> table_slots() const;
};

class CatalogError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads and validates a JSON template catalog: unique ids, known slot kinds,
/// every placeholder declared, bodies parse after dummy substitution, tier
/// chains add exactly one clause kind per step, and per-category minimum
/// counts when the catalog declares them. Errors name the template id.
std::vector<Template> load_catalog(const std::filesystem::path& path);
std::vector<Template> parse_catalog(std::string_view json_text);

/// Placeholders "{name}" in order of first appearance, de-duplicated.
std::vector<std::string> template_placeholders(std::string_view body);

std::string substitute(std::string_view body, const std::map<std::string, std::string, std::less<>>& bindings);

/// Admissible table tuples (as table names) for a template: single-table
/// templates take each table; join templates take ordered pairs of distinct
/// tables sharing at least one column name (case-insensitive); set-operation
/// templates take ordered pairs of distinct tables with identical column-name
/// sequences.
std::vector<std::vector<std::string>> candidate_tables(const Database& db, const Template& t);

bool tables_share_header(const Table& a, const Table& b);
bool headers_identical(const Table& a, const Table& b);

/// Numeric when declared integer/real, or untyped with only numeric non-null
/// values.
bool column_is_numeric(const Table& t, std::size_t column);

/// 64-bit engine with explicit bounded sampling so streams are identical on
/// every platform (std distributions are implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Stream for one sample: derived from (seed, index) only.
    static Rng for_index(std::uint64_t seed, std::uint64_t index);

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);
    /// Uniform in [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi);
    /// Uniform in [0, 1).
    double unit();

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[below(v.size())];
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

struct Instantiation {
    std::string sql;
    std::vector<std::string> tables;  // the chosen tuple
    std::map<std::string, std::string, std::less<>> bindings;
};

class InstantiationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Samples a table tuple uniformly, then binds every slot. Retries up to
/// max_attempts times when a slot has no admissible value (e.g. no numeric
/// column for sum/avg). Throws InstantiationError when the budget runs out or
/// there is no candidate tuple.
Instantiation instantiate(const Template& t, const Database& db, Rng& rng, std::size_t max_attempts = 50);

struct GenConfig {
    std::uint64_t seed = 0;
    std::size_t target_count = 0;
    std::map<Category, double> category_mix;
    std::size_t max_instantiation_attempts = 50;
    std::size_t workers = 1;
    QcConfig qc;

    /// Throws std::invalid_argument when proportions are negative, name no
    /// category, or do not sum to 1.
    void validate() const;
};

/// Exact per-category counts for n samples (largest remainder; ties go to the
/// earlier category).
std::map<Category, std::size_t> category_quotas(const std::map<Category, double>& mix, std::size_t n);

struct GenResult {
    std::vector<Sample> samples;       // ordered by sample index
    std::vector<std::size_t> shortfall;  // indices that exhausted the attempt budget
    std::size_t attempts = 0;
    QcStats rejected;                  // QC verdicts of rejected attempts
    std::map<Category, std::size_t> produced;

    bool complete() const { return shortfall.empty(); }
};

/// Deterministic for a fixed seed regardless of cfg.workers: sample i draws
/// its category from a seeded shuffle of the exact quotas and all further
/// randomness from Rng::for_index(seed, i).
GenResult generate(const DatabaseSet& dbs, const std::vector<Template>& catalog, const GenConfig& cfg);

/// Re-derives the table-pair constraints for a generated query:
/// join samples must reference two tables sharing a header, set-operation
/// samples two header-identical tables.
bool satisfies_category_constraints(const Sample& s, const Database& db);

}  // namespace multitab
