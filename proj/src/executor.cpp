#include "multitab/executor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "multitab/sql/parser.hpp"
#include "multitab/sql/render.hpp"

namespace multitab {

using namespace sql;

std::string_view exec_error_kind_name(ExecErrorKind k) {
    switch (k) {
        case ExecErrorKind::UnknownTable: return "unknown-table";
        case ExecErrorKind::UnknownColumn: return "unknown-column";
        case ExecErrorKind::AmbiguousColumn: return "ambiguous-column";
        case ExecErrorKind::TypeMismatch: return "type-mismatch";
        case ExecErrorKind::Unsupported: return "unsupported";
    }
    return "unknown";
}

ExecError::ExecError(ExecErrorKind kind, std::string detail)
    : std::runtime_error(std::string(exec_error_kind_name(kind)) + ": " + detail), kind_(kind), detail_(std::move(detail)) {}

std::string answer_header(const SelectItem& item) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ColumnRef>) {
                return x.name;
            } else if constexpr (std::is_same_v<T, Aggregate>) {
                return render_aggregate(x);
            } else {
                return "*";
            }
        },
        item);
}

namespace {

enum class Truth { False, True, Unknown };

Truth truth_not(Truth t) {
    if (t == Truth::Unknown) return t;
    return t == Truth::True ? Truth::False : Truth::True;
}

Truth truth_of(bool b) { return b ? Truth::True : Truth::False; }

std::string describe_value(const Value& v) { return canonical_cell_text(v); }

// Three-way comparison for predicates. nullopt when either side is Null.
std::optional<int> compare_values(const Value& a, const Value& b) {
    if (a.is_null() || b.is_null()) return std::nullopt;
    if (a.is_integer() && b.is_integer()) {
        return a.as_integer() < b.as_integer() ? -1 : (a.as_integer() > b.as_integer() ? 1 : 0);
    }
    if (a.is_numeric() && b.is_numeric()) {
        const long double x = a.is_integer() ? static_cast<long double>(a.as_integer()) : a.as_real();
        const long double y = b.is_integer() ? static_cast<long double>(b.as_integer()) : b.as_real();
        return x < y ? -1 : (x > y ? 1 : 0);
    }
    if (a.is_text() && b.is_text()) {
        const int c = a.as_text().compare(b.as_text());
        return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    throw ExecError(ExecErrorKind::TypeMismatch,
                    "cannot compare '" + describe_value(a) + "' with '" + describe_value(b) + "'");
}

int type_rank(const Value& v) {
    if (v.is_null()) return 0;
    if (v.is_numeric()) return 1;
    return 2;
}

// Total order for sorting and min/max: Null < numbers < text.
int order_values(const Value& a, const Value& b) {
    const int ra = type_rank(a);
    const int rb = type_rank(b);
    if (ra != rb) return ra < rb ? -1 : 1;
    if (ra == 0) return 0;
    return *compare_values(a, b);
}

// Key for grouping, DISTINCT and set operations: canonical text with Null
// kept distinct from the text "none".
void append_key(std::string& key, const Value& v) {
    if (v.is_null()) {
        key += '\x00';
    } else {
        key += '\x01';
        key += canonical_cell_text(v);
    }
    key += '\x1f';
}

std::string row_key(const Row& row) {
    std::string key;
    for (const Value& v : row) append_key(key, v);
    return key;
}

// ASCII case-insensitive LIKE with '%' and '_'; '_' consumes one UTF-8 code point.
bool like_match(std::string_view text, std::string_view pattern) {
    auto lower = [](char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; };
    auto cp_len = [](std::string_view s, std::size_t i) {
        std::size_t n = 1;
        while (i + n < s.size() && (static_cast<unsigned char>(s[i + n]) & 0xC0) == 0x80) ++n;
        return n;
    };
    std::size_t t = 0, p = 0;
    std::size_t star_p = std::string_view::npos, star_t = 0;
    while (t < text.size()) {
        if (p < pattern.size() && pattern[p] == '%') {
            star_p = p++;
            star_t = t;
        } else if (p < pattern.size() && pattern[p] == '_') {
            t += cp_len(text, t);
            ++p;
        } else if (p < pattern.size() && lower(pattern[p]) == lower(text[t])) {
            ++t;
            ++p;
        } else if (star_p != std::string_view::npos) {
            p = star_p + 1;
            star_t += cp_len(text, star_t);
            t = star_t;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '%') ++p;
    return p == pattern.size();
}

// Mirrors the summation state SQLite keeps for sum()/avg().
struct SumState {
    double sum = 0.0;
    double err = 0.0;
    std::int64_t isum = 0;
    std::int64_t count = 0;
    bool approx = false;
    bool overflow = false;

    void step_real(double r) {
        volatile double s = sum;
        volatile double t = s + r;
        if (std::fabs(s) > std::fabs(r)) {
            err += (s - t) + r;
        } else {
            err += (r - t) + s;
        }
        sum = t;
    }

    void step_int64(std::int64_t v) {
        constexpr std::int64_t kBig = 4503599627370496LL;
        if (v <= -kBig || v >= kBig) {
            const std::int64_t small = v % 16384;
            step_real(static_cast<double>(v - small));
            step_real(static_cast<double>(small));
        } else {
            step_real(static_cast<double>(v));
        }
    }

    void init_from(std::int64_t v) {
        constexpr std::int64_t kBig = 4503599627370496LL;
        if (v <= -kBig || v >= kBig) {
            const std::int64_t small = v % 16384;
            sum = static_cast<double>(v - small);
            err = static_cast<double>(small);
        } else {
            sum = static_cast<double>(v);
            err = 0.0;
        }
    }

    void add(const Value& v) {
        ++count;
        if (!approx) {
            if (!v.is_integer()) {
                init_from(isum);
                approx = true;
                step_real(v.as_real());
            } else {
                std::int64_t x = 0;
                if (!__builtin_add_overflow(isum, v.as_integer(), &x)) {
                    isum = x;
                } else {
                    overflow = true;
                    init_from(isum);
                    approx = true;
                    step_int64(v.as_integer());
                }
            }
        } else if (v.is_integer()) {
            step_int64(v.as_integer());
        } else {
            overflow = false;
            step_real(v.as_real());
        }
    }

    double approx_total() const { return std::isinf(err) || std::isnan(err) ? sum : sum + err; }

    Value sum_result() const {
        if (count == 0) return Value(Null{});
        if (!approx) return Value(isum);
        if (overflow) throw ExecError(ExecErrorKind::Unsupported, "integer overflow in sum()");
        return Value(approx_total());
    }

    Value avg_result() const {
        if (count == 0) return Value(Null{});
        const double r = approx ? approx_total() : static_cast<double>(isum);
        return Value(r / static_cast<double>(count));
    }
};

struct Column {
    std::string binding;  // alias or table name
    std::string name;
};

struct Relation {
    std::vector<Column> columns;
    std::vector<Row> rows;
};

class Executor {
public:
    explicit Executor(const Database& db) : db_(db) {}

    Table run(const Query& q) {
        if (!q.is_select()) return run_set_op(q.set_op());
        return run_select(q.select());
    }

private:
    const Database& db_;
    std::unordered_map<const InQuery*, std::vector<Value>> subquery_cache_;

    // Evaluation context: either a single row, or a group of rows with a
    // representative row for bare column references.
    struct Context {
        const Relation* rel = nullptr;
        const Row* row = nullptr;
        const std::vector<std::size_t>* group = nullptr;
    };

    const Table& lookup_table(const std::string& name) const {
        const Table* t = db_.find(name);
        if (!t) throw ExecError(ExecErrorKind::UnknownTable, "no such table: " + name);
        return *t;
    }

    static std::size_t resolve(const Relation& rel, const ColumnRef& ref) {
        std::optional<std::size_t> found;
        bool binding_seen = !ref.qualifier;
        for (std::size_t i = 0; i < rel.columns.size(); ++i) {
            const Column& c = rel.columns[i];
            if (ref.qualifier) {
                if (!iequals(c.binding, *ref.qualifier)) continue;
                binding_seen = true;
            }
            if (!iequals(c.name, ref.name)) continue;
            if (found) throw ExecError(ExecErrorKind::AmbiguousColumn, "ambiguous column name: " + render_column_ref(ref));
            found = i;
        }
        if (!found) {
            const std::string what = binding_seen ? "no such column: " : "no such table alias: ";
            throw ExecError(ExecErrorKind::UnknownColumn, what + render_column_ref(ref));
        }
        return *found;
    }

    Relation scan(const TableRef& ref) const {
        const Table& t = lookup_table(ref.name);
        Relation rel;
        for (const auto& name : t.schema.columns) rel.columns.push_back({ref.binding(), name});
        rel.rows = t.rows;
        return rel;
    }

    Relation build_from(const SelectStmt& s) {
        Relation rel = scan(s.from);
        for (const Join& j : s.joins) {
            Relation right = scan(j.table);
            Relation out;
            out.columns = rel.columns;
            out.columns.insert(out.columns.end(), right.columns.begin(), right.columns.end());
            const std::size_t li = resolve(out, j.left);
            const std::size_t ri = resolve(out, j.right);
            const std::size_t left_width = rel.columns.size();
            const std::size_t right_width = right.columns.size();
            auto cell = [left_width](const Row& l, const Row& r, std::size_t i) -> const Value& {
                return i < left_width ? l[i] : r[i - left_width];
            };
            for (const Row& l : rel.rows) {
                bool matched = false;
                for (const Row& r : right.rows) {
                    auto c = compare_values(cell(l, r, li), cell(l, r, ri));
                    if (c && *c == 0) {
                        Row combined = l;
                        combined.insert(combined.end(), r.begin(), r.end());
                        out.rows.push_back(std::move(combined));
                        matched = true;
                    }
                }
                if (!matched && j.kind == JoinKind::LeftOuter) {
                    Row combined = l;
                    combined.resize(left_width + right_width, Value(Null{}));
                    out.rows.push_back(std::move(combined));
                }
            }
            rel = std::move(out);
        }
        return rel;
    }

    Value aggregate(const Aggregate& a, const Context& ctx) {
        if (!ctx.group) throw ExecError(ExecErrorKind::Unsupported, "misuse of aggregate " + render_aggregate(a));
        const auto& rows = ctx.rel->rows;
        if (!a.arg) return Value(static_cast<std::int64_t>(ctx.group->size()));

        const std::size_t col = resolve(*ctx.rel, *a.arg);
        std::vector<const Value*> inputs;
        std::unordered_set<std::string> seen;
        for (std::size_t idx : *ctx.group) {
            const Value& v = rows[idx][col];
            if (v.is_null()) continue;
            if (a.distinct) {
                std::string key;
                append_key(key, v);
                if (!seen.insert(std::move(key)).second) continue;
            }
            inputs.push_back(&v);
        }

        switch (a.fn) {
            case AggFn::Count:
                return Value(static_cast<std::int64_t>(inputs.size()));
            case AggFn::Sum:
            case AggFn::Avg: {
                SumState st;
                for (const Value* v : inputs) {
                    if (!v->is_numeric()) {
                        throw ExecError(ExecErrorKind::TypeMismatch,
                                        std::string(agg_name(a.fn)) + "() over non-numeric value '" + describe_value(*v) + "'");
                    }
                    st.add(*v);
                }
                return a.fn == AggFn::Sum ? st.sum_result() : st.avg_result();
            }
            case AggFn::Min:
            case AggFn::Max: {
                const Value* best = nullptr;
                for (const Value* v : inputs) {
                    if (!best) {
                        best = v;
                        continue;
                    }
                    const int c = order_values(*v, *best);
                    if ((a.fn == AggFn::Min && c < 0) || (a.fn == AggFn::Max && c > 0)) best = v;
                }
                return best ? *best : Value(Null{});
            }
        }
        return Value(Null{});
    }

    Value operand(const Operand& o, const Context& ctx) {
        if (const auto* lit = std::get_if<Literal>(&o)) return lit->value;
        if (const auto* ref = std::get_if<ColumnRef>(&o)) {
            const std::size_t i = resolve(*ctx.rel, *ref);
            if (!ctx.row) return Value(Null{});
            return (*ctx.row)[i];
        }
        return aggregate(std::get<Aggregate>(o), ctx);
    }

    const std::vector<Value>& subquery_values(const InQuery& in) {
        auto it = subquery_cache_.find(&in);
        if (it != subquery_cache_.end()) return it->second;
        Table t = Executor(db_).run(*in.query);
        if (t.column_count() != 1) {
            throw ExecError(ExecErrorKind::Unsupported,
                            "IN subquery returns " + std::to_string(t.column_count()) + " columns, expected 1");
        }
        std::vector<Value> values;
        values.reserve(t.rows.size());
        for (auto& r : t.rows) values.push_back(std::move(r[0]));
        return subquery_cache_.emplace(&in, std::move(values)).first->second;
    }

    static Truth membership(const Value& subject, const std::vector<Value>& values) {
        if (subject.is_null()) return values.empty() ? Truth::False : Truth::Unknown;
        bool unknown = false;
        for (const Value& v : values) {
            auto c = compare_values(subject, v);
            if (!c) {
                unknown = true;
            } else if (*c == 0) {
                return Truth::True;
            }
        }
        return unknown ? Truth::Unknown : Truth::False;
    }

    static Truth apply_cmp(CmpOp op, std::optional<int> c) {
        if (!c) return Truth::Unknown;
        switch (op) {
            case CmpOp::Eq: return truth_of(*c == 0);
            case CmpOp::Ne: return truth_of(*c != 0);
            case CmpOp::Lt: return truth_of(*c < 0);
            case CmpOp::Le: return truth_of(*c <= 0);
            case CmpOp::Gt: return truth_of(*c > 0);
            case CmpOp::Ge: return truth_of(*c >= 0);
        }
        return Truth::Unknown;
    }

    static Truth truth_and(Truth a, Truth b) {
        if (a == Truth::False || b == Truth::False) return Truth::False;
        if (a == Truth::Unknown || b == Truth::Unknown) return Truth::Unknown;
        return Truth::True;
    }

    Truth eval(const Expr& e, const Context& ctx) {
        return std::visit(
            [&](const auto& n) -> Truth {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Comparison>) {
                    return apply_cmp(n.op, compare_values(operand(n.lhs, ctx), operand(n.rhs, ctx)));
                } else if constexpr (std::is_same_v<T, Between>) {
                    const Value s = operand(n.subject, ctx);
                    Truth t = truth_and(apply_cmp(CmpOp::Ge, compare_values(s, operand(n.low, ctx))),
                                        apply_cmp(CmpOp::Le, compare_values(s, operand(n.high, ctx))));
                    return n.negated ? truth_not(t) : t;
                } else if constexpr (std::is_same_v<T, InList>) {
                    std::vector<Value> values;
                    values.reserve(n.values.size());
                    for (const auto& lit : n.values) values.push_back(lit.value);
                    Truth t = membership(operand(n.subject, ctx), values);
                    return n.negated ? truth_not(t) : t;
                } else if constexpr (std::is_same_v<T, InQuery>) {
                    Truth t = membership(operand(n.subject, ctx), subquery_values(n));
                    return n.negated ? truth_not(t) : t;
                } else if constexpr (std::is_same_v<T, Like>) {
                    const Value s = operand(n.subject, ctx);
                    const Value p = operand(n.pattern, ctx);
                    if (s.is_null() || p.is_null()) return Truth::Unknown;
                    Truth t = truth_of(like_match(canonical_cell_text(s), p.is_text() ? p.as_text() : canonical_cell_text(p)));
                    return n.negated ? truth_not(t) : t;
                } else if constexpr (std::is_same_v<T, IsNull>) {
                    const bool null = operand(n.subject, ctx).is_null();
                    return truth_of(n.negated ? !null : null);
                } else if constexpr (std::is_same_v<T, And>) {
                    Truth acc = Truth::True;
                    for (const auto& t : n.terms) {
                        acc = truth_and(acc, eval(t, ctx));
                        if (acc == Truth::False) break;
                    }
                    return acc;
                } else if constexpr (std::is_same_v<T, Or>) {
                    Truth acc = Truth::False;
                    for (const auto& t : n.terms) {
                        Truth v = eval(t, ctx);
                        if (v == Truth::True) return Truth::True;
                        if (v == Truth::Unknown) acc = Truth::Unknown;
                    }
                    return acc;
                } else {
                    return truth_not(eval(*n.term, ctx));
                }
            },
            e.node);
    }

    static void collect_expr_aggregates(const Expr& e, std::vector<const Aggregate*>& out) {
        auto from_operand = [&](const Operand& o) {
            if (const auto* a = std::get_if<Aggregate>(&o)) out.push_back(a);
        };
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Comparison>) {
                    from_operand(n.lhs);
                    from_operand(n.rhs);
                } else if constexpr (std::is_same_v<T, Between>) {
                    from_operand(n.subject);
                    from_operand(n.low);
                    from_operand(n.high);
                } else if constexpr (std::is_same_v<T, Like>) {
                    from_operand(n.subject);
                    from_operand(n.pattern);
                } else if constexpr (std::is_same_v<T, InList> || std::is_same_v<T, InQuery> ||
                                     std::is_same_v<T, IsNull>) {
                    from_operand(n.subject);
                } else if constexpr (std::is_same_v<T, And> || std::is_same_v<T, Or>) {
                    for (const auto& t : n.terms) collect_expr_aggregates(t, out);
                } else {
                    collect_expr_aggregates(*n.term, out);
                }
            },
            e.node);
    }

    static std::vector<const Aggregate*> collect_aggregates(const SelectStmt& s) {
        std::vector<const Aggregate*> out;
        for (const auto& item : s.items) {
            if (const auto* a = std::get_if<Aggregate>(&item)) out.push_back(a);
        }
        if (s.having) collect_expr_aggregates(*s.having, out);
        for (const auto& o : s.order_by) {
            if (const auto* a = std::get_if<Aggregate>(&o.key)) out.push_back(a);
        }
        return out;
    }

    // Row that supplies values for bare (non-grouped, non-aggregated) column
    // references: the first row reaching the extreme when the query has exactly
    // one aggregate and it is min() or max(), otherwise the last row.
    std::optional<std::size_t> representative(const Relation& rel, const std::vector<std::size_t>& group,
                                              const std::vector<const Aggregate*>& aggs) {
        if (group.empty()) return std::nullopt;
        if (aggs.size() == 1 && aggs[0]->arg && (aggs[0]->fn == AggFn::Min || aggs[0]->fn == AggFn::Max)) {
            const std::size_t col = resolve(rel, *aggs[0]->arg);
            const bool want_max = aggs[0]->fn == AggFn::Max;
            std::optional<std::size_t> best;
            for (std::size_t idx : group) {
                const Value& v = rel.rows[idx][col];
                if (v.is_null()) continue;
                if (!best) {
                    best = idx;
                    continue;
                }
                const int c = order_values(v, rel.rows[*best][col]);
                if ((want_max && c > 0) || (!want_max && c < 0)) best = idx;
            }
            if (best) return best;
        }
        return group.back();
    }

    struct OutputRow {
        Row values;
        Row sort_keys;
    };

    void project(const SelectStmt& s, const Context& ctx, std::vector<OutputRow>& out) {
        OutputRow o;
        for (const auto& item : s.items) {
            if (std::holds_alternative<Star>(item)) {
                if (ctx.row) {
                    o.values.insert(o.values.end(), ctx.row->begin(), ctx.row->end());
                } else {
                    o.values.resize(o.values.size() + ctx.rel->columns.size(), Value(Null{}));
                }
            } else if (const auto* ref = std::get_if<ColumnRef>(&item)) {
                o.values.push_back(operand(Operand{*ref}, ctx));
            } else {
                o.values.push_back(aggregate(std::get<Aggregate>(item), ctx));
            }
        }
        for (const auto& key : s.order_by) o.sort_keys.push_back(operand(key.key, ctx));
        out.push_back(std::move(o));
    }

    Table run_select(const SelectStmt& s) {
        Relation rel = build_from(s);

        Table result;
        for (const auto& item : s.items) {
            if (std::holds_alternative<Star>(item)) {
                for (const auto& c : rel.columns) result.schema.columns.push_back(c.name);
            } else if (const auto* ref = std::get_if<ColumnRef>(&item)) {
                result.schema.columns.push_back(rel.columns[resolve(rel, *ref)].name);
            } else {
                result.schema.columns.push_back(render_aggregate(std::get<Aggregate>(item)));
            }
        }

        std::vector<std::size_t> kept;
        for (std::size_t i = 0; i < rel.rows.size(); ++i) {
            if (!s.where || eval(*s.where, Context{&rel, &rel.rows[i], nullptr}) == Truth::True) kept.push_back(i);
        }

        const auto aggs = collect_aggregates(s);
        const bool grouped = !s.group_by.empty() || !aggs.empty() || s.having.has_value();
        std::vector<OutputRow> out;

        if (!grouped) {
            for (std::size_t i : kept) project(s, Context{&rel, &rel.rows[i], nullptr}, out);
        } else {
            std::vector<std::size_t> group_cols;
            for (const auto& g : s.group_by) group_cols.push_back(resolve(rel, g));

            std::vector<std::vector<std::size_t>> groups;
            if (group_cols.empty()) {
                groups.push_back(kept);
            } else {
                std::unordered_map<std::string, std::size_t> index;
                for (std::size_t i : kept) {
                    std::string key;
                    for (std::size_t c : group_cols) append_key(key, rel.rows[i][c]);
                    auto [it, inserted] = index.emplace(std::move(key), groups.size());
                    if (inserted) groups.emplace_back();
                    groups[it->second].push_back(i);
                }
            }

            for (const auto& g : groups) {
                auto rep = representative(rel, g, aggs);
                Context ctx{&rel, rep ? &rel.rows[*rep] : nullptr, &g};
                if (s.having && eval(*s.having, ctx) != Truth::True) continue;
                project(s, ctx, out);
            }
        }

        if (s.distinct) {
            std::unordered_set<std::string> seen;
            std::vector<OutputRow> unique;
            for (auto& o : out) {
                if (seen.insert(row_key(o.values)).second) unique.push_back(std::move(o));
            }
            out = std::move(unique);
        }

        if (!s.order_by.empty()) {
            std::stable_sort(out.begin(), out.end(), [&](const OutputRow& a, const OutputRow& b) {
                for (std::size_t k = 0; k < s.order_by.size(); ++k) {
                    int c = order_values(a.sort_keys[k], b.sort_keys[k]);
                    if (s.order_by[k].descending) c = -c;
                    if (c != 0) return c < 0;
                }
                return false;
            });
        }

        if (s.limit && out.size() > static_cast<std::size_t>(*s.limit)) out.resize(static_cast<std::size_t>(*s.limit));

        result.rows.reserve(out.size());
        for (auto& o : out) result.rows.push_back(std::move(o.values));
        return result;
    }

    Table run_set_op(const SetOp& op) {
        Table left = run(*op.left);
        Table right = run(*op.right);
        if (left.column_count() != right.column_count()) {
            throw ExecError(ExecErrorKind::Unsupported,
                            std::string("operands of ") + std::string(set_op_keyword(op.op)) + " have " +
                                std::to_string(left.column_count()) + " and " + std::to_string(right.column_count()) +
                                " columns");
        }

        Table result;
        result.schema.columns = left.schema.columns;
        std::unordered_set<std::string> emitted;
        auto emit_distinct = [&](Row& r) {
            if (emitted.insert(row_key(r)).second) result.rows.push_back(std::move(r));
        };

        std::unordered_map<std::string, std::size_t> right_counts;
        for (const Row& r : right.rows) ++right_counts[row_key(r)];

        switch (op.op) {
            case SetOpKind::Union:
                if (op.all) {
                    result.rows = std::move(left.rows);
                    for (auto& r : right.rows) result.rows.push_back(std::move(r));
                } else {
                    for (auto& r : left.rows) emit_distinct(r);
                    for (auto& r : right.rows) emit_distinct(r);
                }
                break;
            case SetOpKind::Intersect:
                for (auto& r : left.rows) {
                    auto it = right_counts.find(row_key(r));
                    if (it == right_counts.end() || it->second == 0) continue;
                    if (op.all) {
                        --it->second;
                        result.rows.push_back(std::move(r));
                    } else {
                        emit_distinct(r);
                    }
                }
                break;
            case SetOpKind::Except:
                for (auto& r : left.rows) {
                    auto it = right_counts.find(row_key(r));
                    const bool in_right = it != right_counts.end() && it->second > 0;
                    if (op.all) {
                        if (in_right) {
                            --it->second;
                        } else {
                            result.rows.push_back(std::move(r));
                        }
                    } else if (!in_right) {
                        emit_distinct(r);
                    }
                }
                break;
        }
        return result;
    }
};

}  // namespace

Table execute(const Query& q, const Database& db) {
    Executor ex(db);
    return ex.run(q);
}

Table execute_text(std::string_view sql_text, const Database& db) {
    return execute(parse(sql_text), db);
}

}  // namespace multitab
