#include "multitab/sql/parser.hpp"

#include <optional>
#include <utility>

namespace multitab::sql {

namespace {

std::string describe(const Token& t) {
    switch (t.kind) {
        case TokenKind::End: return "end of input";
        case TokenKind::String: return "'" + t.text + "'";
        default: return t.text;
    }
}

std::optional<AggFn> agg_from_name(std::string_view name) {
    const std::string lower = to_lower(name);
    if (lower == "count") return AggFn::Count;
    if (lower == "sum") return AggFn::Sum;
    if (lower == "avg") return AggFn::Avg;
    if (lower == "min") return AggFn::Min;
    if (lower == "max") return AggFn::Max;
    return std::nullopt;
}

Expr make_and(Expr lhs, Expr rhs) {
    And out;
    for (Expr* e : {&lhs, &rhs}) {
        if (auto* inner = std::get_if<And>(&e->node)) {
            for (auto& t : inner->terms) out.terms.push_back(std::move(t));
        } else {
            out.terms.push_back(std::move(*e));
        }
    }
    return Expr{std::move(out)};
}

Expr make_or(Expr lhs, Expr rhs) {
    Or out;
    for (Expr* e : {&lhs, &rhs}) {
        if (auto* inner = std::get_if<Or>(&e->node)) {
            for (auto& t : inner->terms) out.terms.push_back(std::move(t));
        } else {
            out.terms.push_back(std::move(*e));
        }
    }
    return Expr{std::move(out)};
}

class Parser {
public:
    explicit Parser(std::string_view sql) : tokens_(tokenize(sql)) {}

    Query parse_statement() {
        Query q = parse_query();
        accept_symbol(";");
        if (peek().kind != TokenKind::End) fail("end of statement");
        return q;
    }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos_ + ahead;
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }
    const Token& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(std::string expected) const {
        throw ParseError(peek().position, std::move(expected), describe(peek()));
    }

    bool is_kw(std::string_view kw, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == TokenKind::Keyword && t.text == kw;
    }
    bool is_sym(std::string_view sym, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == TokenKind::Symbol && t.text == sym;
    }
    bool accept_kw(std::string_view kw) {
        if (!is_kw(kw)) return false;
        advance();
        return true;
    }
    bool accept_symbol(std::string_view sym) {
        if (!is_sym(sym)) return false;
        advance();
        return true;
    }
    void expect_kw(std::string_view kw) {
        if (!accept_kw(kw)) fail(std::string(kw));
    }
    void expect_symbol(std::string_view sym) {
        if (!accept_symbol(sym)) fail("'" + std::string(sym) + "'");
    }
    std::string expect_identifier(std::string_view what) {
        if (peek().kind != TokenKind::Identifier) fail(std::string(what));
        return advance().text;
    }

    std::optional<SetOpKind> peek_set_op() const {
        if (is_kw("UNION")) return SetOpKind::Union;
        if (is_kw("INTERSECT")) return SetOpKind::Intersect;
        if (is_kw("EXCEPT")) return SetOpKind::Except;
        return std::nullopt;
    }

    // Set operators share one precedence level and associate to the left.
    Query parse_query() {
        const std::size_t first_pos = peek().position;
        Query q{parse_select()};
        bool compound = false;
        while (auto op = peek_set_op()) {
            if (!compound && (!q.select().order_by.empty() || q.select().limit)) {
                throw ParseError(first_pos, "set operator operands without ORDER BY/LIMIT", "ORDER BY/LIMIT");
            }
            advance();
            const bool all = accept_kw("ALL");
            const std::size_t rhs_pos = peek().position;
            SelectStmt rhs = parse_select();
            if (!rhs.order_by.empty() || rhs.limit) {
                throw ParseError(rhs_pos, "set operator operands without ORDER BY/LIMIT", "ORDER BY/LIMIT");
            }
            q = Query{SetOp{*op, all, Box<Query>(std::move(q)), Box<Query>(Query{std::move(rhs)})}};
            compound = true;
        }
        return q;
    }

    SelectStmt parse_select() {
        expect_kw("SELECT");
        SelectStmt s;
        s.distinct = accept_kw("DISTINCT");
        do {
            s.items.push_back(parse_select_item());
        } while (accept_symbol(","));

        expect_kw("FROM");
        s.from = parse_table_ref();
        while (true) {
            JoinKind kind = JoinKind::Inner;
            if (is_kw("JOIN")) {
                advance();
            } else if (is_kw("INNER") && is_kw("JOIN", 1)) {
                advance();
                advance();
            } else if (is_kw("LEFT")) {
                advance();
                accept_kw("OUTER");
                expect_kw("JOIN");
                kind = JoinKind::LeftOuter;
            } else {
                break;
            }
            Join j;
            j.kind = kind;
            j.table = parse_table_ref();
            expect_kw("ON");
            j.left = parse_column_ref();
            expect_symbol("=");
            j.right = parse_column_ref();
            s.joins.push_back(std::move(j));
        }

        if (accept_kw("WHERE")) s.where = parse_expr();
        if (accept_kw("GROUP")) {
            expect_kw("BY");
            do {
                s.group_by.push_back(parse_column_ref());
            } while (accept_symbol(","));
        }
        if (accept_kw("HAVING")) s.having = parse_expr();
        if (accept_kw("ORDER")) {
            expect_kw("BY");
            do {
                OrderItem item;
                item.key = parse_operand();
                if (accept_kw("DESC")) {
                    item.descending = true;
                } else {
                    accept_kw("ASC");
                }
                s.order_by.push_back(std::move(item));
            } while (accept_symbol(","));
        }
        if (accept_kw("LIMIT")) {
            if (peek().kind != TokenKind::Integer || peek().value.as_integer() < 0) fail("non-negative integer");
            s.limit = advance().value.as_integer();
        }
        return s;
    }

    SelectItem parse_select_item() {
        if (accept_symbol("*")) return Star{};
        if (peek().kind == TokenKind::Identifier && !peek().quoted && is_sym("(", 1)) {
            return parse_aggregate();
        }
        return parse_column_ref();
    }

    Aggregate parse_aggregate() {
        auto fn = agg_from_name(peek().text);
        if (!fn) fail("aggregate function (count, sum, avg, min, max)");
        advance();
        expect_symbol("(");
        Aggregate a;
        a.fn = *fn;
        a.distinct = accept_kw("DISTINCT");
        if (is_sym("*")) {
            if (a.fn != AggFn::Count || a.distinct) fail("column reference");
            advance();
        } else {
            a.arg = parse_column_ref();
        }
        expect_symbol(")");
        return a;
    }

    TableRef parse_table_ref() {
        TableRef t;
        t.name = expect_identifier("table name");
        if (accept_kw("AS")) {
            t.alias = expect_identifier("alias");
        } else if (peek().kind == TokenKind::Identifier) {
            t.alias = advance().text;
        }
        return t;
    }

    ColumnRef parse_column_ref() {
        ColumnRef c;
        std::string first = expect_identifier("column name");
        if (accept_symbol(".")) {
            c.qualifier = std::move(first);
            c.name = expect_identifier("column name");
        } else {
            c.name = std::move(first);
        }
        return c;
    }

    Literal parse_literal() {
        if (accept_kw("NULL")) return Literal{Value(Null{})};
        bool negative = false;
        if (is_sym("-")) {
            advance();
            negative = true;
        }
        const Token& t = peek();
        if (t.kind == TokenKind::Integer) {
            advance();
            return Literal{negative ? Value(-t.value.as_integer()) : t.value};
        }
        if (t.kind == TokenKind::Real) {
            advance();
            return Literal{negative ? Value(-t.value.as_real()) : t.value};
        }
        if (t.kind == TokenKind::String && !negative) {
            advance();
            return Literal{t.value};
        }
        fail("literal");
    }

    Operand parse_operand() {
        const Token& t = peek();
        if (t.kind == TokenKind::Identifier) {
            if (!t.quoted && is_sym("(", 1)) return parse_aggregate();
            return parse_column_ref();
        }
        if (t.kind == TokenKind::String || t.kind == TokenKind::Integer || t.kind == TokenKind::Real ||
            is_sym("-") || is_kw("NULL")) {
            return parse_literal();
        }
        fail("column, literal or aggregate");
    }

    Expr parse_expr() {
        Expr lhs = parse_and();
        while (accept_kw("OR")) lhs = make_or(std::move(lhs), parse_and());
        return lhs;
    }

    Expr parse_and() {
        Expr lhs = parse_not();
        while (accept_kw("AND")) lhs = make_and(std::move(lhs), parse_not());
        return lhs;
    }

    Expr parse_not() {
        if (accept_kw("NOT")) return Expr{Not{Box<Expr>(parse_not())}};
        if (accept_symbol("(")) {
            Expr inner = parse_expr();
            expect_symbol(")");
            return inner;
        }
        return parse_predicate();
    }

    Expr parse_predicate() {
        Operand subject = parse_operand();
        const Token& t = peek();
        if (t.kind == TokenKind::Symbol) {
            static const std::pair<std::string_view, CmpOp> kOps[] = {
                {"=", CmpOp::Eq}, {"!=", CmpOp::Ne}, {"<", CmpOp::Lt},
                {"<=", CmpOp::Le}, {">", CmpOp::Gt}, {">=", CmpOp::Ge},
            };
            for (const auto& [sym, op] : kOps) {
                if (t.text == sym) {
                    advance();
                    return Expr{Comparison{op, std::move(subject), parse_operand()}};
                }
            }
        }
        if (accept_kw("IS")) {
            const bool negated = accept_kw("NOT");
            expect_kw("NULL");
            return Expr{IsNull{std::move(subject), negated}};
        }
        const bool negated = accept_kw("NOT");
        if (accept_kw("BETWEEN")) {
            Operand low = parse_operand();
            expect_kw("AND");
            Operand high = parse_operand();
            return Expr{Between{std::move(subject), std::move(low), std::move(high), negated}};
        }
        if (accept_kw("LIKE")) {
            return Expr{Like{std::move(subject), parse_operand(), negated}};
        }
        if (accept_kw("IN")) {
            expect_symbol("(");
            if (is_kw("SELECT")) {
                Query sub = parse_query();
                expect_symbol(")");
                return Expr{InQuery{std::move(subject), Box<Query>(std::move(sub)), negated}};
            }
            InList list;
            list.subject = std::move(subject);
            list.negated = negated;
            do {
                list.values.push_back(parse_literal());
            } while (accept_symbol(","));
            expect_symbol(")");
            return Expr{std::move(list)};
        }
        fail(negated ? "BETWEEN, IN or LIKE" : "comparison operator, BETWEEN, IN, LIKE or IS");
    }
};

}  // namespace

Query parse(std::string_view sql) {
    Parser p(sql);
    return p.parse_statement();
}

}  // namespace multitab::sql
