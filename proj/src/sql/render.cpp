#include "multitab/sql/render.hpp"

#include "multitab/sql/parser.hpp"

namespace multitab::sql {

std::string_view agg_name(AggFn fn) {
    switch (fn) {
        case AggFn::Count: return "count";
        case AggFn::Sum: return "sum";
        case AggFn::Avg: return "avg";
        case AggFn::Min: return "min";
        case AggFn::Max: return "max";
    }
    return "?";
}

std::string_view cmp_symbol(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "=";
        case CmpOp::Ne: return "!=";
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
    }
    return "?";
}

std::string_view set_op_keyword(SetOpKind op) {
    switch (op) {
        case SetOpKind::Union: return "UNION";
        case SetOpKind::Intersect: return "INTERSECT";
        case SetOpKind::Except: return "EXCEPT";
    }
    return "?";
}

namespace {

bool is_plain_identifier(std::string_view name) {
    if (name.empty()) return false;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    if (!alpha(name.front())) return false;
    for (char c : name) {
        if (!alpha(c) && !(c >= '0' && c <= '9')) return false;
    }
    return !is_keyword(name);
}

void render_into(std::string& out, const Query& q);

void render_expr_into(std::string& out, const Expr& e);

void render_wrapped(std::string& out, const Expr& e, bool wrap) {
    if (wrap) out += '(';
    render_expr_into(out, e);
    if (wrap) out += ')';
}

void render_expr_into(std::string& out, const Expr& e) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Comparison>) {
                out += render_operand(n.lhs);
                out += ' ';
                out += cmp_symbol(n.op);
                out += ' ';
                out += render_operand(n.rhs);
            } else if constexpr (std::is_same_v<T, Between>) {
                out += render_operand(n.subject);
                out += n.negated ? " NOT BETWEEN " : " BETWEEN ";
                out += render_operand(n.low);
                out += " AND ";
                out += render_operand(n.high);
            } else if constexpr (std::is_same_v<T, InList>) {
                out += render_operand(n.subject);
                out += n.negated ? " NOT IN (" : " IN (";
                for (std::size_t i = 0; i < n.values.size(); ++i) {
                    if (i > 0) out += ", ";
                    out += render_literal(n.values[i].value);
                }
                out += ')';
            } else if constexpr (std::is_same_v<T, InQuery>) {
                out += render_operand(n.subject);
                out += n.negated ? " NOT IN (" : " IN (";
                render_into(out, *n.query);
                out += ')';
            } else if constexpr (std::is_same_v<T, Like>) {
                out += render_operand(n.subject);
                out += n.negated ? " NOT LIKE " : " LIKE ";
                out += render_operand(n.pattern);
            } else if constexpr (std::is_same_v<T, IsNull>) {
                out += render_operand(n.subject);
                out += n.negated ? " IS NOT NULL" : " IS NULL";
            } else if constexpr (std::is_same_v<T, And>) {
                for (std::size_t i = 0; i < n.terms.size(); ++i) {
                    if (i > 0) out += " AND ";
                    const auto& t = n.terms[i].node;
                    render_wrapped(out, n.terms[i], std::holds_alternative<Or>(t) || std::holds_alternative<And>(t));
                }
            } else if constexpr (std::is_same_v<T, Or>) {
                for (std::size_t i = 0; i < n.terms.size(); ++i) {
                    if (i > 0) out += " OR ";
                    render_wrapped(out, n.terms[i], std::holds_alternative<Or>(n.terms[i].node));
                }
            } else if constexpr (std::is_same_v<T, Not>) {
                out += "NOT ";
                const auto& t = n.term->node;
                render_wrapped(out, *n.term, std::holds_alternative<Or>(t) || std::holds_alternative<And>(t));
            }
        },
        e.node);
}

void render_table_ref(std::string& out, const TableRef& t) {
    out += render_identifier(t.name);
    if (t.alias) {
        out += " AS ";
        out += render_identifier(*t.alias);
    }
}

void render_select_into(std::string& out, const SelectStmt& s) {
    out += s.distinct ? "SELECT DISTINCT " : "SELECT ";
    for (std::size_t i = 0; i < s.items.size(); ++i) {
        if (i > 0) out += ", ";
        std::visit(
            [&](const auto& item) {
                using T = std::decay_t<decltype(item)>;
                if constexpr (std::is_same_v<T, Star>) {
                    out += '*';
                } else if constexpr (std::is_same_v<T, ColumnRef>) {
                    out += render_column_ref(item);
                } else {
                    out += render_aggregate(item);
                }
            },
            s.items[i]);
    }
    out += " FROM ";
    render_table_ref(out, s.from);
    for (const Join& j : s.joins) {
        out += j.kind == JoinKind::LeftOuter ? " LEFT JOIN " : " JOIN ";
        render_table_ref(out, j.table);
        out += " ON ";
        out += render_column_ref(j.left);
        out += " = ";
        out += render_column_ref(j.right);
    }
    if (s.where) {
        out += " WHERE ";
        render_expr_into(out, *s.where);
    }
    if (!s.group_by.empty()) {
        out += " GROUP BY ";
        for (std::size_t i = 0; i < s.group_by.size(); ++i) {
            if (i > 0) out += ", ";
            out += render_column_ref(s.group_by[i]);
        }
    }
    if (s.having) {
        out += " HAVING ";
        render_expr_into(out, *s.having);
    }
    if (!s.order_by.empty()) {
        out += " ORDER BY ";
        for (std::size_t i = 0; i < s.order_by.size(); ++i) {
            if (i > 0) out += ", ";
            out += render_operand(s.order_by[i].key);
            if (s.order_by[i].descending) out += " DESC";
        }
    }
    if (s.limit) {
        out += " LIMIT ";
        out += std::to_string(*s.limit);
    }
}

void render_into(std::string& out, const Query& q) {
    if (q.is_select()) {
        render_select_into(out, q.select());
        return;
    }
    const SetOp& op = q.set_op();
    render_into(out, *op.left);
    out += ' ';
    out += set_op_keyword(op.op);
    if (op.all) out += " ALL";
    out += ' ';
    const bool wrap = !op.right->is_select();
    if (wrap) out += '(';
    render_into(out, *op.right);
    if (wrap) out += ')';
}

void add_name(std::vector<std::string>& out, const std::string& name) {
    for (const auto& existing : out) {
        if (iequals(existing, name)) return;
    }
    out.push_back(name);
}

void collect_names(const Query& q, std::vector<std::string>& out);

void collect_expr_names(const Expr& e, std::vector<std::string>& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, InQuery>) {
                collect_names(*n.query, out);
            } else if constexpr (std::is_same_v<T, And> || std::is_same_v<T, Or>) {
                for (const auto& t : n.terms) collect_expr_names(t, out);
            } else if constexpr (std::is_same_v<T, Not>) {
                collect_expr_names(*n.term, out);
            }
        },
        e.node);
}

void collect_names(const Query& q, std::vector<std::string>& out) {
    if (!q.is_select()) {
        collect_names(*q.set_op().left, out);
        collect_names(*q.set_op().right, out);
        return;
    }
    const SelectStmt& s = q.select();
    add_name(out, s.from.name);
    for (const Join& j : s.joins) add_name(out, j.table.name);
    if (s.where) collect_expr_names(*s.where, out);
    if (s.having) collect_expr_names(*s.having, out);
}

}  // namespace

std::string render_identifier(std::string_view name) {
    if (is_plain_identifier(name)) return std::string(name);
    std::string out = "\"";
    for (char c : name) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string render_column_ref(const ColumnRef& c) {
    if (!c.qualifier) return render_identifier(c.name);
    return render_identifier(*c.qualifier) + "." + render_identifier(c.name);
}

std::string render_aggregate(const Aggregate& a) {
    std::string out(agg_name(a.fn));
    out += '(';
    if (a.distinct) out += "DISTINCT ";
    out += a.arg ? render_column_ref(*a.arg) : "*";
    out += ')';
    return out;
}

std::string render_literal(const Value& v) {
    if (v.is_null()) return "NULL";
    if (v.is_integer()) return std::to_string(v.as_integer());
    if (v.is_real()) return format_real(v.as_real());
    std::string out = "'";
    for (char c : v.as_text()) {
        if (c == '\'') out += '\'';
        out += c;
    }
    out += '\'';
    return out;
}

std::string render_operand(const Operand& o) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ColumnRef>) {
                return render_column_ref(x);
            } else if constexpr (std::is_same_v<T, Literal>) {
                return render_literal(x.value);
            } else {
                return render_aggregate(x);
            }
        },
        o);
}

std::string render(const Query& q) {
    std::string out;
    render_into(out, q);
    return out;
}

std::string render(const SelectStmt& s) {
    std::string out;
    render_select_into(out, s);
    return out;
}

std::string render(const Expr& e) {
    std::string out;
    render_expr_into(out, e);
    return out;
}

std::vector<std::string> extract_table_names(const Query& q) {
    std::vector<std::string> out;
    collect_names(q, out);
    return out;
}

}  // namespace multitab::sql
