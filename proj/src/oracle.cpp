#include "multitab/oracle.hpp"

#include <algorithm>

#include "multitab/executor.hpp"
#include "multitab/sql/parser.hpp"
#include "multitab/sql/render.hpp"
#include "sqlite_util.hpp"

namespace multitab {

using detail::SqliteHandle;
using detail::StmtHandle;

struct SqliteMirror::Impl {
    SqliteHandle db;
};

namespace {

void exec_or_throw(sqlite3* db, const std::string& sql) {
    char* err = nullptr;
    if (sqlite3_exec(db, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
        std::string msg = err ? err : "unknown error";
        sqlite3_free(err);
        throw OracleError("sqlite: " + msg + " in: " + sql);
    }
}

void bind_value(sqlite3_stmt* stmt, int i, const Value& v) {
    if (v.is_null()) {
        sqlite3_bind_null(stmt, i);
    } else if (v.is_integer()) {
        sqlite3_bind_int64(stmt, i, v.as_integer());
    } else if (v.is_real()) {
        sqlite3_bind_double(stmt, i, v.as_real());
    } else {
        const auto& s = v.as_text();
        sqlite3_bind_text(stmt, i, s.data(), static_cast<int>(s.size()), SQLITE_TRANSIENT);
    }
}

}  // namespace

SqliteMirror::SqliteMirror(const Database& db) : impl_(std::make_unique<Impl>()) {
    sqlite3* raw = nullptr;
    if (sqlite3_open_v2(":memory:", &raw, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE, nullptr) != SQLITE_OK) {
        sqlite3_close(raw);
        throw OracleError("sqlite: cannot open an in-memory database");
    }
    impl_->db.reset(raw);
    exec_or_throw(raw, "BEGIN");
    for (const auto& t : db.tables()) {
        std::string create = "CREATE TABLE " + detail::quote_identifier(t.name()) + " (";
        std::string insert = "INSERT INTO " + detail::quote_identifier(t.name()) + " VALUES (";
        for (std::size_t c = 0; c < t.column_count(); ++c) {
            if (c) {
                create += ", ";
                insert += ", ";
            }
            create += detail::quote_identifier(t.schema.columns[c]);
            insert += "?";
        }
        exec_or_throw(raw, create + ")");
        sqlite3_stmt* stmt = nullptr;
        if (sqlite3_prepare_v2(raw, (insert + ")").c_str(), -1, &stmt, nullptr) != SQLITE_OK) {
            throw OracleError(std::string("sqlite: ") + sqlite3_errmsg(raw));
        }
        StmtHandle guard(stmt);
        for (const auto& row : t.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) bind_value(stmt, static_cast<int>(c + 1), row[c]);
            if (sqlite3_step(stmt) != SQLITE_DONE) throw OracleError(std::string("sqlite: ") + sqlite3_errmsg(raw));
            sqlite3_reset(stmt);
        }
    }
    exec_or_throw(raw, "COMMIT");
}

SqliteMirror::~SqliteMirror() = default;

Table SqliteMirror::run(std::string_view sql) const {
    sqlite3* db = impl_->db.get();
    sqlite3_stmt* raw = nullptr;
    if (sqlite3_prepare_v2(db, sql.data(), static_cast<int>(sql.size()), &raw, nullptr) != SQLITE_OK) {
        throw OracleError(std::string("sqlite: ") + sqlite3_errmsg(db));
    }
    StmtHandle stmt(raw);
    Table out;
    const int n = sqlite3_column_count(raw);
    for (int i = 0; i < n; ++i) out.schema.columns.emplace_back(sqlite3_column_name(raw, i));
    int rc;
    while ((rc = sqlite3_step(raw)) == SQLITE_ROW) {
        Row row;
        row.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) row.push_back(detail::column_value(raw, i));
        out.rows.push_back(std::move(row));
    }
    if (rc != SQLITE_DONE) throw OracleError(std::string("sqlite: ") + sqlite3_errmsg(db));
    return out;
}

namespace {

using TextRow = std::vector<std::string>;

TextRow text_row(const Row& row, std::size_t from = 0, std::size_t to = SIZE_MAX) {
    TextRow out;
    for (std::size_t i = from; i < std::min(to, row.size()); ++i) out.push_back(canonical_cell_text(row[i]));
    return out;
}

std::vector<TextRow> sorted_rows(const Table& t) {
    std::vector<TextRow> out;
    for (const auto& r : t.rows) out.push_back(text_row(r));
    std::sort(out.begin(), out.end());
    return out;
}

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " | " : "") + v[i];
    return out;
}

struct Runs {
    Table ours;
    Table theirs;
};

std::optional<std::string> compare_headers(const Table& ours, const Table& theirs) {
    if (ours.schema.columns != theirs.schema.columns) {
        return "headers differ: [" + join(ours.schema.columns) + "] vs sqlite [" + join(theirs.schema.columns) + "]";
    }
    return std::nullopt;
}

std::optional<std::string> compare_multisets(const Table& ours, const Table& theirs) {
    if (ours.row_count() != theirs.row_count()) {
        return "row counts differ: " + std::to_string(ours.row_count()) + " vs sqlite " +
               std::to_string(theirs.row_count());
    }
    const auto a = sorted_rows(ours);
    const auto b = sorted_rows(theirs);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return "row multisets differ: [" + join(a[i]) + "] vs sqlite [" + join(b[i]) + "]";
    }
    return std::nullopt;
}

// ours/theirs carry `width` result columns followed by the order keys.
std::optional<std::string> compare_ordered(const Table& ours, const Table& theirs, std::size_t width,
                                           std::optional<std::int64_t> limit) {
    if (ours.row_count() != theirs.row_count()) {
        return "row counts differ: " + std::to_string(ours.row_count()) + " vs sqlite " +
               std::to_string(theirs.row_count());
    }
    const std::size_t n = ours.row_count();
    for (std::size_t i = 0; i < n; ++i) {
        const auto ka = text_row(ours.rows[i], width);
        const auto kb = text_row(theirs.rows[i], width);
        if (ka != kb) {
            return "order keys differ at row " + std::to_string(i + 1) + ": [" + join(ka) + "] vs sqlite [" + join(kb) +
                   "]";
        }
    }
    const bool truncated = limit && static_cast<std::size_t>(std::max<std::int64_t>(*limit, 0)) == n;
    std::size_t start = 0;
    while (start < n) {
        std::size_t end = start + 1;
        const auto key = text_row(ours.rows[start], width);
        while (end < n && text_row(ours.rows[end], width) == key) ++end;
        if (truncated && end == n) break;
        std::vector<TextRow> a, b;
        for (std::size_t i = start; i < end; ++i) {
            a.push_back(text_row(ours.rows[i], 0, width));
            b.push_back(text_row(theirs.rows[i], 0, width));
        }
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != b) {
            return "rows with order key [" + join(key) + "] differ starting at row " + std::to_string(start + 1);
        }
        start = end;
    }
    return std::nullopt;
}

}  // namespace

OracleVerdict compare_with_reference(const sql::Query& q, const Database& db, const SqliteMirror& mirror) {
    OracleVerdict v;
    v.sql = sql::render(q);

    auto run_both = [&](const sql::Query& query, const std::string& text) -> std::optional<Runs> {
        Runs r;
        std::string ours_error, theirs_error;
        try {
            r.ours = execute(query, db);
        } catch (const std::exception& e) {
            ours_error = e.what();
        }
        try {
            r.theirs = mirror.run(text);
        } catch (const OracleError& e) {
            theirs_error = e.what();
        }
        if (ours_error.empty() && theirs_error.empty()) return r;
        if (!ours_error.empty() && !theirs_error.empty()) {
            v.agree = true;
            v.detail = "both engines reject the query";
        } else if (!ours_error.empty()) {
            v.detail = "only the executor fails: " + ours_error;
        } else {
            v.detail = "only sqlite fails: " + theirs_error;
        }
        return std::nullopt;
    };

    auto plain = run_both(q, v.sql);
    if (!plain) return v;
    if (auto diff = compare_headers(plain->ours, plain->theirs)) {
        v.detail = *diff;
        return v;
    }

    const bool ordered = q.is_select() && !q.select().order_by.empty();
    if (!ordered) {
        if (auto diff = compare_multisets(plain->ours, plain->theirs)) {
            v.detail = *diff;
            return v;
        }
        v.agree = true;
        return v;
    }

    sql::Query augmented = q;
    auto& sel = std::get<sql::SelectStmt>(augmented.node);
    for (const auto& o : sel.order_by) {
        if (const auto* c = std::get_if<sql::ColumnRef>(&o.key)) {
            sel.items.emplace_back(*c);
        } else if (const auto* a = std::get_if<sql::Aggregate>(&o.key)) {
            sel.items.emplace_back(*a);
        }
    }
    const std::string aug_text = sql::render(augmented);
    auto keyed = run_both(augmented, aug_text);
    if (!keyed) {
        v.agree = false;
        if (v.detail.empty()) v.detail = "order-key query failed";
        v.sql = aug_text;
        return v;
    }
    if (auto diff = compare_ordered(keyed->ours, keyed->theirs, plain->ours.column_count(), sel.limit)) {
        v.detail = *diff;
        v.sql = aug_text;
        return v;
    }
    // The keyed run must describe the same rows the plain query returns.
    Table projected;
    projected.schema = plain->ours.schema;
    for (const auto& r : keyed->ours.rows) projected.rows.emplace_back(r.begin(), r.begin() + plain->ours.column_count());
    if (!sel.limit || *sel.limit < 0 || static_cast<std::size_t>(*sel.limit) > projected.row_count()) {
        if (auto diff = compare_multisets(projected, plain->theirs)) {
            v.detail = *diff;
            return v;
        }
    }
    v.agree = true;
    return v;
}

OracleVerdict compare_with_reference(std::string_view sql_text, const Database& db, const SqliteMirror& mirror) {
    return compare_with_reference(sql::parse(sql_text), db, mirror);
}

OracleReport check_samples(const std::vector<Sample>& samples, const DatabaseSet& dbs) {
    OracleReport report;
    std::map<std::string, std::unique_ptr<SqliteMirror>, std::less<>> mirrors;
    for (const auto& s : samples) {
        ++report.checked;
        auto db = dbs.find(s.db_id);
        if (db == dbs.end() || !s.query) {
            report.disagreements.push_back({s.id, {false, s.query.value_or(""), "no database or query"}});
            continue;
        }
        auto& mirror = mirrors[s.db_id];
        if (!mirror) mirror = std::make_unique<SqliteMirror>(db->second);
        const auto q = sql::parse(*s.query);
        if (q.is_select() && !q.select().order_by.empty()) ++report.ordered;
        auto verdict = compare_with_reference(q, db->second, *mirror);
        if (verdict.agree) {
            ++report.agreed;
        } else {
            report.disagreements.emplace_back(s.id, std::move(verdict));
        }
    }
    return report;
}

}  // namespace multitab
