#include "multitab/synth.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <set>

#include "multitab/dataset.hpp"
#include "multitab/parallel.hpp"
#include "multitab/sql/parser.hpp"
#include "multitab/sql/render.hpp"

namespace multitab {

using ordered_json = nlohmann::ordered_json;

std::string_view category_name(Category c) {
    switch (c) {
        case Category::Single: return "single";
        case Category::Join: return "join";
        case Category::Union: return "union";
        case Category::Intersect: return "intersect";
        case Category::Except: return "except";
    }
    return "unknown";
}

std::optional<Category> parse_category(std::string_view s) {
    for (Category c : kCategories) {
        if (category_name(c) == s) return c;
    }
    return std::nullopt;
}

bool is_set_op_category(Category c) {
    return c == Category::Union || c == Category::Intersect || c == Category::Except;
}

namespace {

constexpr std::array<std::pair<SlotKind, std::string_view>, 9> kSlotKinds = {{
    {SlotKind::Columns, "columns"},
    {SlotKind::Column, "column"},
    {SlotKind::CommonColumn, "common_column"},
    {SlotKind::Agg, "agg"},
    {SlotKind::Relop, "relop"},
    {SlotKind::Value, "value"},
    {SlotKind::CountValue, "count_value"},
    {SlotKind::Limit, "limit"},
    {SlotKind::Direction, "direction"},
}};

std::string_view clause_kind_name(ClauseKind k) {
    switch (k) {
        case ClauseKind::Aggregation: return "aggregation";
        case ClauseKind::Where: return "where";
        case ClauseKind::GroupBy: return "group_by";
        case ClauseKind::Having: return "having";
        case ClauseKind::OrderBy: return "order_by";
    }
    return "unknown";
}

}  // namespace

std::string_view slot_kind_name(SlotKind k) {
    for (const auto& [kind, name] : kSlotKinds) {
        if (kind == k) return name;
    }
    return "unknown";
}

std::optional<SlotKind> parse_slot_kind(std::string_view s) {
    for (const auto& [kind, name] : kSlotKinds) {
        if (name == s) return kind;
    }
    return std::nullopt;
}

const Slot* Template::slot(std::string_view name) const {
    for (const auto& s : slots) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

std::vector<std::string> Template::table_slots() const {
    if (category == Category::Single) return {"table"};
    return {"table1", "table2"};
}

std::vector<std::string> template_placeholders(std::string_view body) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while ((pos = body.find('{', pos)) != std::string_view::npos) {
        const auto close = body.find('}', pos);
        if (close == std::string_view::npos) break;
        std::string name(body.substr(pos + 1, close - pos - 1));
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
        pos = close + 1;
    }
    return out;
}

std::string substitute(std::string_view body, const std::map<std::string, std::string, std::less<>>& bindings) {
    std::string out;
    std::size_t pos = 0;
    while (pos < body.size()) {
        const auto open = body.find('{', pos);
        if (open == std::string_view::npos) break;
        const auto close = body.find('}', open);
        if (close == std::string_view::npos) break;
        out += body.substr(pos, open - pos);
        auto it = bindings.find(body.substr(open + 1, close - open - 1));
        if (it == bindings.end()) throw std::invalid_argument("unbound placeholder {" +
                                                              std::string(body.substr(open + 1, close - open - 1)) + "}");
        out += it->second;
        pos = close + 1;
    }
    out += body.substr(pos);
    return out;
}

// ---------------------------------------------------------------------------
// Catalog loading

namespace {

void collect_clauses(const sql::Query& q, std::set<ClauseKind>& out) {
    if (!q.is_select()) {
        collect_clauses(*q.set_op().left, out);
        collect_clauses(*q.set_op().right, out);
        return;
    }
    const auto& s = q.select();
    for (const auto& item : s.items) {
        if (std::holds_alternative<sql::Aggregate>(item)) out.insert(ClauseKind::Aggregation);
    }
    for (const auto& o : s.order_by) {
        if (std::holds_alternative<sql::Aggregate>(o.key)) out.insert(ClauseKind::Aggregation);
    }
    if (s.where) out.insert(ClauseKind::Where);
    if (!s.group_by.empty()) out.insert(ClauseKind::GroupBy);
    if (s.having) {
        out.insert(ClauseKind::Having);
        out.insert(ClauseKind::Aggregation);
    }
    if (!s.order_by.empty() || s.limit) out.insert(ClauseKind::OrderBy);
}

std::string dummy_for(const Template& t, std::string_view name) {
    for (const auto& ts : t.table_slots()) {
        if (ts == name) return "dummy_" + ts;
    }
    const Slot* s = t.slot(name);
    switch (s->kind) {
        case SlotKind::Columns:
        case SlotKind::Column:
        case SlotKind::CommonColumn:
            return s->qualifier.empty() ? "c" : s->qualifier + ".c";
        case SlotKind::Agg: return "count";
        case SlotKind::Relop: return "=";
        case SlotKind::Value:
        case SlotKind::CountValue:
        case SlotKind::Limit: return "1";
        case SlotKind::Direction: return "ASC";
    }
    return "x";
}

Slot parse_slot(const ordered_json& j, const Template& t) {
    Slot s;
    s.name = j.at("name").get<std::string>();
    const std::string kind = j.at("kind").get<std::string>();
    auto parsed = parse_slot_kind(kind);
    if (!parsed) throw CatalogError("template '" + t.id + "': slot '" + s.name + "' has unknown kind '" + kind + "'");
    s.kind = *parsed;
    s.table = j.value("table", t.table_slots().front());
    s.qualifier = j.value("qualifier", "");
    const std::string filter = j.value("type", "any");
    if (filter == "any") {
        s.filter = ColumnFilter::Any;
    } else if (filter == "numeric") {
        s.filter = ColumnFilter::Numeric;
    } else if (filter == "text") {
        s.filter = ColumnFilter::Text;
    } else {
        throw CatalogError("template '" + t.id + "': slot '" + s.name + "' has unknown type '" + filter + "'");
    }
    s.column = j.value("column", "");
    s.distinct_from = j.value("distinct_from", std::vector<std::string>{});
    const std::int64_t default_min = s.kind == SlotKind::CountValue ? 0 : 1;
    const std::int64_t default_max = s.kind == SlotKind::CountValue ? 2 : (s.kind == SlotKind::Limit ? 5 : 1);
    s.min = j.value("min", default_min);
    s.max = j.value("max", default_max);
    if (s.min > s.max) throw CatalogError("template '" + t.id + "': slot '" + s.name + "' has min > max");
    return s;
}

void validate_template(Template& t) {
    const auto tables = t.table_slots();
    auto is_table_slot = [&](const std::string& n) { return std::find(tables.begin(), tables.end(), n) != tables.end(); };

    std::set<std::string> seen;
    for (const auto& s : t.slots) {
        if (is_table_slot(s.name)) throw CatalogError("template '" + t.id + "': slot '" + s.name + "' shadows a table slot");
        if (!seen.insert(s.name).second) throw CatalogError("template '" + t.id + "': duplicate slot '" + s.name + "'");
        const bool column_kind =
            s.kind == SlotKind::Columns || s.kind == SlotKind::Column || s.kind == SlotKind::CommonColumn;
        if (column_kind && s.kind != SlotKind::CommonColumn && !is_table_slot(s.table)) {
            throw CatalogError("template '" + t.id + "': slot '" + s.name + "' names unknown table slot '" + s.table + "'");
        }
        if (s.kind == SlotKind::CommonColumn && t.category != Category::Join) {
            throw CatalogError("template '" + t.id + "': common_column is only defined for join templates");
        }
        if (s.kind == SlotKind::Agg || s.kind == SlotKind::Value) {
            const Slot* ref = t.slot(s.column);
            if (!ref || (ref->kind != SlotKind::Column && ref->kind != SlotKind::CommonColumn)) {
                throw CatalogError("template '" + t.id + "': slot '" + s.name + "' must refer to a column slot");
            }
        }
        for (const auto& other : s.distinct_from) {
            if (!t.slot(other)) {
                throw CatalogError("template '" + t.id + "': slot '" + s.name + "' is distinct from unknown slot '" +
                                   other + "'");
            }
        }
    }

    t.placeholders = template_placeholders(t.body);
    std::map<std::string, std::string, std::less<>> dummies;
    for (const auto& p : t.placeholders) {
        if (!is_table_slot(p) && !t.slot(p)) {
            throw CatalogError("template '" + t.id + "': unknown placeholder {" + p + "}");
        }
        dummies[p] = dummy_for(t, p);
    }
    for (const auto& s : t.slots) {
        if (std::find(t.placeholders.begin(), t.placeholders.end(), s.name) == t.placeholders.end()) {
            throw CatalogError("template '" + t.id + "': slot '" + s.name + "' does not appear in the body");
        }
    }
    for (const auto& ts : tables) {
        if (std::find(t.placeholders.begin(), t.placeholders.end(), ts) == t.placeholders.end()) {
            throw CatalogError("template '" + t.id + "': body never uses {" + ts + "}");
        }
    }

    sql::Query q;
    try {
        q = sql::parse(substitute(t.body, dummies));
    } catch (const sql::ParseError& e) {
        throw CatalogError("template '" + t.id + "': body does not parse after dummy substitution: " + e.what());
    }
    const bool set_op = !q.is_select();
    if (set_op != is_set_op_category(t.category)) {
        throw CatalogError("template '" + t.id + "': body shape does not match category '" +
                           std::string(category_name(t.category)) + "'");
    }
    if (set_op) {
        const auto kind = q.set_op().op;
        const bool ok = (kind == sql::SetOpKind::Union && t.category == Category::Union) ||
                        (kind == sql::SetOpKind::Intersect && t.category == Category::Intersect) ||
                        (kind == sql::SetOpKind::Except && t.category == Category::Except);
        if (!ok) throw CatalogError("template '" + t.id + "': set operator does not match category");
    }
    std::set<ClauseKind> clauses;
    collect_clauses(q, clauses);
    t.clauses.assign(clauses.begin(), clauses.end());
}

std::string clause_list(const std::vector<ClauseKind>& v) {
    std::string out = "{";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += clause_kind_name(v[i]);
    }
    return out + "}";
}

void validate_tiers(const std::vector<Template>& templates) {
    std::map<std::string, const Template*> by_id;
    for (const auto& t : templates) by_id[t.id] = &t;
    for (const auto& t : templates) {
        if (t.tier < 1) throw CatalogError("template '" + t.id + "': tier must be at least 1");
        if (!t.parent) {
            if (t.tier != 1) throw CatalogError("template '" + t.id + "': tier " + std::to_string(t.tier) + " needs a parent");
            continue;
        }
        auto it = by_id.find(*t.parent);
        if (it == by_id.end()) throw CatalogError("template '" + t.id + "': unknown parent '" + *t.parent + "'");
        const Template& p = *it->second;
        if (p.category != t.category) throw CatalogError("template '" + t.id + "': parent has another category");
        if (p.tier + 1 != t.tier) {
            throw CatalogError("template '" + t.id + "': tier " + std::to_string(t.tier) + " under parent tier " +
                               std::to_string(p.tier));
        }
        std::vector<ClauseKind> added;
        const bool superset = std::includes(t.clauses.begin(), t.clauses.end(), p.clauses.begin(), p.clauses.end());
        std::set_difference(t.clauses.begin(), t.clauses.end(), p.clauses.begin(), p.clauses.end(),
                            std::back_inserter(added));
        if (!superset || added.size() != 1) {
            throw CatalogError("template '" + t.id + "': clauses " + clause_list(t.clauses) +
                               " must extend parent clauses " + clause_list(p.clauses) + " by exactly one kind");
        }
    }
}

}  // namespace

std::vector<Template> parse_catalog(std::string_view json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const ordered_json::exception& e) {
        throw CatalogError(std::string("catalog is not valid JSON: ") + e.what());
    }

    std::vector<Template> out;
    std::set<std::string> ids;
    try {
        for (const auto& j : doc.at("templates")) {
            Template t;
            t.id = j.at("id").get<std::string>();
            if (!ids.insert(t.id).second) throw CatalogError("duplicate template id '" + t.id + "'");
            const std::string cat = j.at("category").get<std::string>();
            auto parsed = parse_category(cat);
            if (!parsed) throw CatalogError("template '" + t.id + "': unknown category '" + cat + "'");
            t.category = *parsed;
            t.tier = j.value("tier", 1);
            if (j.contains("parent") && !j.at("parent").is_null()) t.parent = j.at("parent").get<std::string>();
            t.body = j.at("body").get<std::string>();
            if (j.contains("slots")) {
                for (const auto& s : j.at("slots")) t.slots.push_back(parse_slot(s, t));
            }
            validate_template(t);
            out.push_back(std::move(t));
        }
        validate_tiers(out);

        if (doc.contains("minimum_counts")) {
            std::map<std::string, std::size_t> counts;
            for (const auto& t : out) ++counts[std::string(category_name(t.category))];
            for (const auto& [key, value] : doc.at("minimum_counts").items()) {
                const std::size_t want = value.get<std::size_t>();
                const std::size_t have = key == "total" ? out.size() : counts[key];
                if (have < want) {
                    throw CatalogError("catalog has " + std::to_string(have) + " '" + key + "' templates, needs " +
                                       std::to_string(want));
                }
            }
        }
    } catch (const ordered_json::exception& e) {
        throw CatalogError(std::string("malformed catalog: ") + e.what());
    }
    return out;
}

std::vector<Template> load_catalog(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const LoadError& e) {
        throw CatalogError(e.what());
    }
    return parse_catalog(text);
}

// ---------------------------------------------------------------------------
// Table admissibility

bool tables_share_header(const Table& a, const Table& b) {
    for (const auto& x : a.schema.columns) {
        for (const auto& y : b.schema.columns) {
            if (iequals(x, y)) return true;
        }
    }
    return false;
}

bool headers_identical(const Table& a, const Table& b) {
    if (a.column_count() != b.column_count()) return false;
    for (std::size_t i = 0; i < a.column_count(); ++i) {
        if (!iequals(a.schema.columns[i], b.schema.columns[i])) return false;
    }
    return true;
}

bool column_is_numeric(const Table& t, std::size_t column) {
    switch (t.schema.type_of(column)) {
        case ColumnType::Integer:
        case ColumnType::Real: return true;
        case ColumnType::Text: return false;
        case ColumnType::Any: break;
    }
    bool any = false;
    for (const auto& row : t.rows) {
        const Value& v = row[column];
        if (v.is_null()) continue;
        if (!v.is_numeric()) return false;
        any = true;
    }
    return any;
}

std::vector<std::vector<std::string>> candidate_tables(const Database& db, const Template& t) {
    std::vector<std::vector<std::string>> out;
    const auto& tables = db.tables();
    if (t.category == Category::Single) {
        for (const auto& tab : tables) out.push_back({tab.name()});
        return out;
    }
    for (std::size_t i = 0; i < tables.size(); ++i) {
        for (std::size_t j = 0; j < tables.size(); ++j) {
            if (i == j) continue;
            const bool ok = t.category == Category::Join ? tables_share_header(tables[i], tables[j])
                                                         : headers_identical(tables[i], tables[j]);
            if (ok) out.push_back({tables[i].name(), tables[j].name()});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Random streams

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

Rng Rng::for_index(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ull)));
}

std::uint64_t Rng::below(std::uint64_t n) {
    // Rejection sampling keeps the result unbiased.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = next();
    } while (x >= limit);
    return x % n;
}

std::int64_t Rng::between(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
    if (span == UINT64_MAX) return static_cast<std::int64_t>(next());
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + below(span + 1));
}

double Rng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

// ---------------------------------------------------------------------------
// Instantiation

namespace {

constexpr std::array<std::string_view, 5> kAllAggs = {"count", "sum", "avg", "min", "max"};
constexpr std::array<std::string_view, 3> kTextAggs = {"count", "min", "max"};
constexpr std::array<std::string_view, 6> kRelops = {"=", "!=", "<", "<=", ">", ">="};

struct BoundColumn {
    const Table* table = nullptr;
    std::size_t index = 0;
};

class Binder {
public:
    Binder(const Template& t, const Database& db, const std::vector<std::string>& tuple, Rng& rng)
        : t_(t), rng_(rng) {
        const auto names = t.table_slots();
        for (std::size_t i = 0; i < names.size(); ++i) {
            tables_[names[i]] = &db.at(tuple[i]);
            bindings_[names[i]] = sql::render_identifier(tuple[i]);
        }
    }

    // False when some slot has no admissible value.
    bool bind_all() {
        for (const auto& s : t_.slots) {
            if (!bind(s)) return false;
        }
        return true;
    }

    std::map<std::string, std::string, std::less<>>& bindings() { return bindings_; }

private:
    std::string qualify(const Slot& s, const std::string& column) const {
        std::string col = sql::render_identifier(column);
        return s.qualifier.empty() ? col : s.qualifier + "." + col;
    }

    bool passes_filter(const Table& tab, std::size_t c, ColumnFilter f) const {
        if (f == ColumnFilter::Any) return true;
        const bool numeric = column_is_numeric(tab, c);
        return f == ColumnFilter::Numeric ? numeric : !numeric;
    }

    bool excluded(const Slot& s, const std::string& column) const {
        for (const auto& other : s.distinct_from) {
            auto it = columns_.find(other);
            if (it == columns_.end()) continue;
            const BoundColumn& b = it->second;
            if (iequals(b.table->schema.columns[b.index], column)) return true;
        }
        return false;
    }

    std::vector<std::size_t> eligible(const Slot& s, const Table& tab) const {
        std::vector<std::size_t> out;
        for (std::size_t c = 0; c < tab.column_count(); ++c) {
            if (passes_filter(tab, c, s.filter) && !excluded(s, tab.schema.columns[c])) out.push_back(c);
        }
        return out;
    }

    bool bind(const Slot& s) {
        switch (s.kind) {
            case SlotKind::Columns: {
                const Table& tab = *tables_.at(s.table);
                auto pool = eligible(s, tab);
                if (pool.empty()) return false;
                const auto hi = std::min<std::int64_t>(s.max, static_cast<std::int64_t>(pool.size()));
                const auto lo = std::min<std::int64_t>(s.min, hi);
                const auto k = static_cast<std::size_t>(rng_.between(lo, hi));
                rng_.shuffle(pool);
                pool.resize(k);
                std::string text;
                for (std::size_t i = 0; i < pool.size(); ++i) {
                    if (i) text += ", ";
                    text += qualify(s, tab.schema.columns[pool[i]]);
                }
                bindings_[s.name] = text;
                columns_[s.name] = {&tab, pool.front()};
                return true;
            }
            case SlotKind::Column: {
                const Table& tab = *tables_.at(s.table);
                auto pool = eligible(s, tab);
                if (pool.empty()) return false;
                const std::size_t c = rng_.pick(pool);
                bindings_[s.name] = qualify(s, tab.schema.columns[c]);
                columns_[s.name] = {&tab, c};
                return true;
            }
            case SlotKind::CommonColumn: {
                const Table& a = *tables_.at("table1");
                const Table& b = *tables_.at("table2");
                std::vector<std::size_t> pool;
                for (std::size_t c = 0; c < a.column_count(); ++c) {
                    const bool shared = std::any_of(b.schema.columns.begin(), b.schema.columns.end(),
                                                    [&](const std::string& y) { return iequals(a.schema.columns[c], y); });
                    if (shared && passes_filter(a, c, s.filter) && !excluded(s, a.schema.columns[c])) pool.push_back(c);
                }
                if (pool.empty()) return false;
                const std::size_t c = rng_.pick(pool);
                bindings_[s.name] = qualify(s, a.schema.columns[c]);
                columns_[s.name] = {&a, c};
                return true;
            }
            case SlotKind::Agg: {
                const BoundColumn& col = columns_.at(s.column);
                if (column_is_numeric(*col.table, col.index)) {
                    bindings_[s.name] = std::string(kAllAggs[rng_.below(kAllAggs.size())]);
                } else {
                    bindings_[s.name] = std::string(kTextAggs[rng_.below(kTextAggs.size())]);
                }
                return true;
            }
            case SlotKind::Relop:
                bindings_[s.name] = std::string(kRelops[rng_.below(kRelops.size())]);
                return true;
            case SlotKind::Value: {
                const BoundColumn& col = columns_.at(s.column);
                auto v = sample_value(*col.table, col.index);
                if (!v) return false;
                bindings_[s.name] = sql::render_literal(*v);
                return true;
            }
            case SlotKind::CountValue:
            case SlotKind::Limit:
                bindings_[s.name] = std::to_string(rng_.between(s.min, s.max));
                return true;
            case SlotKind::Direction:
                bindings_[s.name] = rng_.below(2) == 0 ? "ASC" : "DESC";
                return true;
        }
        return false;
    }

    // An in-column value, or for numeric columns half the time a value drawn
    // uniformly between the column's min and max.
    std::optional<Value> sample_value(const Table& tab, std::size_t c) {
        std::vector<const Value*> present;
        for (const auto& row : tab.rows) {
            if (!row[c].is_null()) present.push_back(&row[c]);
        }
        if (present.empty()) return std::nullopt;
        const Value& drawn = *rng_.pick(present);
        if (!column_is_numeric(tab, c) || !drawn.is_numeric() || rng_.below(2) == 0) return drawn;

        bool all_integer = true;
        double lo = drawn.to_double();
        double hi = lo;
        std::int64_t ilo = INT64_MAX;
        std::int64_t ihi = INT64_MIN;
        for (const Value* v : present) {
            if (!v->is_numeric()) return drawn;
            lo = std::min(lo, v->to_double());
            hi = std::max(hi, v->to_double());
            if (v->is_integer()) {
                ilo = std::min(ilo, v->as_integer());
                ihi = std::max(ihi, v->as_integer());
            } else {
                all_integer = false;
            }
        }
        if (all_integer) return Value(rng_.between(ilo, ihi));
        const double x = lo + (hi - lo) * rng_.unit();
        return Value(std::round(x * 100.0) / 100.0);
    }

    const Template& t_;
    Rng& rng_;
    std::map<std::string, const Table*, std::less<>> tables_;
    std::map<std::string, BoundColumn, std::less<>> columns_;
    std::map<std::string, std::string, std::less<>> bindings_;
};

}  // namespace

Instantiation instantiate(const Template& t, const Database& db, Rng& rng, std::size_t max_attempts) {
    const auto candidates = candidate_tables(db, t);
    if (candidates.empty()) {
        throw InstantiationError("template '" + t.id + "': no admissible tables in database '" + db.name() + "'");
    }
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
        const auto& tuple = rng.pick(candidates);
        Binder binder(t, db, tuple, rng);
        if (!binder.bind_all()) continue;
        Instantiation out;
        out.sql = substitute(t.body, binder.bindings());
        out.tables = tuple;
        out.bindings = std::move(binder.bindings());
        return out;
    }
    throw InstantiationError("template '" + t.id + "': no admissible assignment in database '" + db.name() +
                             "' after " + std::to_string(max_attempts) + " attempts");
}

// ---------------------------------------------------------------------------
// Corpus generation

void GenConfig::validate() const {
    if (category_mix.empty()) throw std::invalid_argument("category mix is empty");
    double total = 0;
    for (const auto& [cat, p] : category_mix) {
        if (!(p >= 0)) throw std::invalid_argument("negative proportion for " + std::string(category_name(cat)));
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-6) throw std::invalid_argument("category proportions sum to " + std::to_string(total));
    if (max_instantiation_attempts == 0) throw std::invalid_argument("max_instantiation_attempts must be positive");
    if (qc.row_cap == 0) throw std::invalid_argument("row cap must be positive");
}

std::map<Category, std::size_t> category_quotas(const std::map<Category, double>& mix, std::size_t n) {
    std::map<Category, std::size_t> out;
    std::vector<std::pair<double, Category>> remainders;
    std::size_t assigned = 0;
    for (Category c : kCategories) {
        auto it = mix.find(c);
        const double share = it == mix.end() ? 0.0 : it->second * static_cast<double>(n);
        const auto whole = static_cast<std::size_t>(std::floor(share));
        out[c] = whole;
        assigned += whole;
        if (it != mix.end() && it->second > 0) remainders.emplace_back(share - static_cast<double>(whole), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < n && !remainders.empty(); ++i, ++assigned) {
        ++out[remainders[i % remainders.size()].second];
    }
    return out;
}

namespace {

struct Choice {
    const Template* tmpl;
    std::vector<const Database*> dbs;
};

struct SlotResult {
    std::optional<Sample> sample;
    QcStats rejected;
    std::size_t attempts = 0;
};

}  // namespace

GenResult generate(const DatabaseSet& dbs, const std::vector<Template>& catalog, const GenConfig& cfg) {
    cfg.validate();

    std::map<Category, std::vector<Choice>> pools;
    for (const auto& t : catalog) {
        Choice choice{&t, {}};
        for (const auto& [name, db] : dbs) {
            if (!candidate_tables(db, t).empty()) choice.dbs.push_back(&db);
        }
        if (!choice.dbs.empty()) pools[t.category].push_back(std::move(choice));
    }

    std::vector<Category> plan;
    plan.reserve(cfg.target_count);
    for (const auto& [cat, count] : category_quotas(cfg.category_mix, cfg.target_count)) {
        plan.insert(plan.end(), count, cat);
    }
    Rng(splitmix64(cfg.seed ^ 0xC2B2AE3D27D4EB4Full)).shuffle(plan);

    std::vector<SlotResult> slots(cfg.target_count);
    parallel_for(cfg.target_count, cfg.workers, [&](std::size_t i) {
        SlotResult& out = slots[i];
        auto pool = pools.find(plan[i]);
        if (pool == pools.end()) return;
        Rng rng = Rng::for_index(cfg.seed, i);
        for (std::size_t attempt = 0; attempt < cfg.max_instantiation_attempts; ++attempt) {
            ++out.attempts;
            const Choice& choice = rng.pick(pool->second);
            const Database& db = *rng.pick(choice.dbs);
            Instantiation inst;
            try {
                inst = instantiate(*choice.tmpl, db, rng, 1);
            } catch (const InstantiationError&) {
                continue;
            }
            QcCheck check = check_sample(inst.sql, db, cfg.qc);
            if (!check.verdict.keep) {
                out.rejected.record(check.verdict);
                continue;
            }
            Sample s;
            char id[32];
            std::snprintf(id, sizeof(id), "synth-%07zu", i);
            s.id = id;
            s.db_id = db.name();
            s.query = sql::render(sql::parse(inst.sql));
            s.tables = materialize_inputs(check.table_names, db);
            s.table_names = std::move(check.table_names);
            s.answer = std::move(*check.answer);
            s.template_id = choice.tmpl->id;
            s.category = std::string(category_name(choice.tmpl->category));
            out.sample = std::move(s);
            return;
        }
    });

    GenResult result;
    for (Category c : kCategories) result.produced[c] = 0;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        auto& slot = slots[i];
        result.attempts += slot.attempts;
        result.rejected.merge(slot.rejected);
        if (slot.sample) {
            ++result.produced[plan[i]];
            result.samples.push_back(std::move(*slot.sample));
        } else {
            result.shortfall.push_back(i);
        }
    }
    return result;
}

bool satisfies_category_constraints(const Sample& s, const Database& db) {
    if (!s.category) return false;
    const auto cat = parse_category(*s.category);
    if (!cat) return false;
    std::vector<const Table*> tabs;
    for (const auto& n : s.table_names) {
        const Table* t = db.find(n);
        if (!t) return false;
        tabs.push_back(t);
    }
    if (*cat == Category::Single) return tabs.size() == 1;
    if (tabs.size() != 2 || iequals(tabs[0]->name(), tabs[1]->name())) return false;
    if (*cat == Category::Join) return tables_share_header(*tabs[0], *tabs[1]);
    return headers_identical(*tabs[0], *tabs[1]);
}

}  // namespace multitab
