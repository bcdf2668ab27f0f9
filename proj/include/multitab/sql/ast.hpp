#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "multitab/table.hpp"

namespace multitab::sql {

/// Heap-allocated member with value semantics, for recursive AST nodes.
template <typename T>
class Box {
public:
    Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
    Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
    Box(Box&&) noexcept = default;
    Box& operator=(const Box& other) {
        if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
        return *this;
    }
    Box& operator=(Box&&) noexcept = default;
    ~Box() = default;

    const T& operator*() const { return *ptr_; }
    T& operator*() { return *ptr_; }
    const T* operator->() const { return ptr_.get(); }
    T* operator->() { return ptr_.get(); }

    friend bool operator==(const Box& a, const Box& b) { return *a == *b; }

private:
    std::unique_ptr<T> ptr_;
};

struct ColumnRef {
    std::optional<std::string> qualifier;  // table name or alias
    std::string name;

    friend bool operator==(const ColumnRef&, const ColumnRef&) = default;
};

enum class AggFn { Count, Sum, Avg, Min, Max };

struct Aggregate {
    AggFn fn = AggFn::Count;
    std::optional<ColumnRef> arg;  // nullopt means '*'
    bool distinct = false;

    friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

struct Star {
    friend bool operator==(Star, Star) = default;
};

using SelectItem = std::variant<ColumnRef, Star, Aggregate>;

struct TableRef {
    std::string name;
    std::optional<std::string> alias;

    /// The name other clauses use to qualify this table's columns.
    const std::string& binding() const { return alias ? *alias : name; }

    friend bool operator==(const TableRef&, const TableRef&) = default;
};

enum class JoinKind { Inner, LeftOuter };

struct Join {
    JoinKind kind = JoinKind::Inner;
    TableRef table;
    ColumnRef left;
    ColumnRef right;

    friend bool operator==(const Join&, const Join&) = default;
};

struct Literal {
    Value value;
    friend bool operator==(const Literal&, const Literal&) = default;
};

using Operand = std::variant<ColumnRef, Literal, Aggregate>;

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

struct Query;
struct Expr;

struct Comparison {
    CmpOp op = CmpOp::Eq;
    Operand lhs;
    Operand rhs;
    friend bool operator==(const Comparison&, const Comparison&) = default;
};

struct Between {
    Operand subject;
    Operand low;
    Operand high;
    bool negated = false;
    friend bool operator==(const Between&, const Between&) = default;
};

struct InList {
    Operand subject;
    std::vector<Literal> values;
    bool negated = false;
    friend bool operator==(const InList&, const InList&) = default;
};

struct InQuery {
    Operand subject;
    Box<Query> query;
    bool negated = false;
    friend bool operator==(const InQuery&, const InQuery&) = default;
};

struct Like {
    Operand subject;
    Operand pattern;
    bool negated = false;
    friend bool operator==(const Like&, const Like&) = default;
};

struct IsNull {
    Operand subject;
    bool negated = false;
    friend bool operator==(const IsNull&, const IsNull&) = default;
};

/// n-ary; the parser flattens nested AND chains.
struct And {
    std::vector<Expr> terms;
    friend bool operator==(const And&, const And&) = default;
};

struct Or {
    std::vector<Expr> terms;
    friend bool operator==(const Or&, const Or&) = default;
};

struct Not {
    Box<Expr> term;
    friend bool operator==(const Not&, const Not&) = default;
};

struct Expr {
    std::variant<Comparison, Between, InList, InQuery, Like, IsNull, And, Or, Not> node;
    friend bool operator==(const Expr&, const Expr&) = default;
};

struct OrderItem {
    Operand key;
    bool descending = false;
    friend bool operator==(const OrderItem&, const OrderItem&) = default;
};

struct SelectStmt {
    bool distinct = false;
    std::vector<SelectItem> items;
    TableRef from;
    std::vector<Join> joins;
    std::optional<Expr> where;
    std::vector<ColumnRef> group_by;
    std::optional<Expr> having;
    std::vector<OrderItem> order_by;
    std::optional<std::int64_t> limit;

    friend bool operator==(const SelectStmt&, const SelectStmt&) = default;
};

enum class SetOpKind { Union, Intersect, Except };

struct SetOp {
    SetOpKind op = SetOpKind::Union;
    bool all = false;
    Box<Query> left;
    Box<Query> right;
    friend bool operator==(const SetOp&, const SetOp&) = default;
};

struct Query {
    std::variant<SelectStmt, SetOp> node;

    bool is_select() const { return std::holds_alternative<SelectStmt>(node); }
    const SelectStmt& select() const { return std::get<SelectStmt>(node); }
    const SetOp& set_op() const { return std::get<SetOp>(node); }

    friend bool operator==(const Query&, const Query&) = default;
};

std::string_view agg_name(AggFn fn);  // lowercase
std::string_view cmp_symbol(CmpOp op);
std::string_view set_op_keyword(SetOpKind op);

}  // namespace multitab::sql
