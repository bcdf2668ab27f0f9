#include "multitab/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <json.hpp>

#include "multitab/linearizer.hpp"
#include "multitab/sql/parser.hpp"
#include "multitab/sql/render.hpp"
#include "sqlite_util.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace multitab {

DatasetError::DatasetError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

std::optional<DatabaseFormat> parse_database_format(std::string_view s) {
    if (s == "csv-dir" || s == "csv") return DatabaseFormat::CsvDir;
    if (s == "sqlite-file" || s == "sqlite") return DatabaseFormat::SqliteFile;
    return std::nullopt;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

// ---------------------------------------------------------------------------
// CSV

std::vector<std::vector<std::optional<std::string>>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::optional<std::string>>> records;
    std::vector<std::optional<std::string>> record;
    std::string field;
    bool quoted = false;
    bool in_quotes = false;
    bool field_started = false;

    auto end_field = [&] {
        if (quoted || !field.empty()) {
            record.emplace_back(std::move(field));
        } else {
            record.emplace_back(std::nullopt);
        }
        field.clear();
        quoted = false;
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    std::size_t i = 0;
    if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field_started) throw LoadError("csv: stray quote inside an unquoted field");
                in_quotes = true;
                quoted = true;
                field_started = true;
                break;
            case ',':
                end_field();
                break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
                end_record();
                break;
            case '\n':
                end_record();
                break;
            default:
                if (quoted) throw LoadError("csv: text after closing quote");
                field.push_back(c);
                field_started = true;
        }
    }
    if (in_quotes) throw LoadError("csv: unterminated quoted field");
    if (field_started || !record.empty()) end_record();
    return records;
}

Value coerce_field(const std::optional<std::string>& raw, ColumnType type, std::string_view table,
                   std::string_view column, std::size_t row) {
    auto fail = [&](std::string_view what) -> LoadError {
        return LoadError("table '" + std::string(table) + "' column '" + std::string(column) + "' row " +
                         std::to_string(row) + ": cannot read '" + raw.value_or("") + "' as " + std::string(what));
    };
    if (!raw) return Null{};
    const std::string_view s = trim(*raw);

    auto as_int = [&]() -> std::optional<std::int64_t> {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
        return v;
    };
    auto as_real = [&]() -> std::optional<double> {
        double v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
        return v;
    };

    switch (type) {
        case ColumnType::Text:
            return *raw;
        case ColumnType::Integer:
            if (s.empty()) return Null{};
            if (auto v = as_int()) return *v;
            throw fail("integer");
        case ColumnType::Real:
            if (s.empty()) return Null{};
            if (auto v = as_real()) return *v;
            throw fail("real");
        case ColumnType::Any:
            if (auto v = as_int()) return *v;
            if (auto v = as_real()) return *v;
            return *raw;
    }
    return *raw;
}

namespace {

Database load_csv_dir(const fs::path& dir) {
    const fs::path schema_path = dir / "schema.json";
    if (!fs::exists(schema_path)) throw LoadError("missing schema descriptor " + schema_path.string());
    json schema;
    try {
        schema = json::parse(read_file(schema_path));
    } catch (const json::exception& e) {
        throw LoadError(schema_path.string() + ": " + e.what());
    }

    try {
        Database db(schema.value("name", dir.filename().string()));
        for (const auto& spec : schema.at("tables")) {
            Table t;
            const std::string name = spec.at("name").get<std::string>();
            t.schema.table_name = name;
            for (const auto& col : spec.at("columns")) {
                t.schema.columns.push_back(col.at("name").get<std::string>());
                const std::string type_name = col.value("type", "any");
                auto type = parse_column_type(type_name);
                if (!type) {
                    throw LoadError("table '" + name + "' column '" + t.schema.columns.back() + "': unknown type '" +
                                    type_name + "'");
                }
                t.schema.types.push_back(*type);
            }

            const fs::path file = dir / spec.value("file", name + ".csv");
            auto records = parse_csv(read_file(file));
            if (records.empty()) throw LoadError(file.string() + ": missing header row");
            const auto& header = records.front();
            bool header_ok = header.size() == t.schema.width();
            for (std::size_t c = 0; header_ok && c < header.size(); ++c) {
                header_ok = header[c] && trim(*header[c]) == t.schema.columns[c];
            }
            if (!header_ok) throw LoadError(file.string() + ": header row does not match schema for table '" + name + "'");

            for (std::size_t r = 1; r < records.size(); ++r) {
                const auto& rec = records[r];
                if (rec.size() != t.schema.width()) {
                    throw LoadError("table '" + name + "' row " + std::to_string(r) + ": expected " +
                                    std::to_string(t.schema.width()) + " fields, found " + std::to_string(rec.size()));
                }
                Row row;
                row.reserve(rec.size());
                for (std::size_t c = 0; c < rec.size(); ++c) {
                    row.push_back(coerce_field(rec[c], t.schema.types[c], name, t.schema.columns[c], r));
                }
                t.rows.push_back(std::move(row));
            }
            db.add_table(std::move(t));
        }
        if (db.size() == 0) throw LoadError(dir.string() + ": schema declares no tables");
        return db;
    } catch (const json::exception& e) {
        throw LoadError(schema_path.string() + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw LoadError(schema_path.string() + ": " + e.what());
    }
}

ColumnType affinity_of(std::string declared) {
    declared = to_lower(declared);
    if (declared.find("int") != std::string::npos) return ColumnType::Integer;
    if (declared.find("char") != std::string::npos || declared.find("clob") != std::string::npos ||
        declared.find("text") != std::string::npos)
        return ColumnType::Text;
    if (declared.find("real") != std::string::npos || declared.find("floa") != std::string::npos ||
        declared.find("doub") != std::string::npos)
        return ColumnType::Real;
    return ColumnType::Any;
}

using detail::column_value;
using detail::SqliteHandle;
using detail::StmtHandle;

StmtHandle prepare(sqlite3* db, const std::string& sql, const fs::path& path) {
    sqlite3_stmt* stmt = nullptr;
    if (sqlite3_prepare_v2(db, sql.c_str(), -1, &stmt, nullptr) != SQLITE_OK) {
        throw LoadError(path.string() + ": " + sqlite3_errmsg(db));
    }
    return StmtHandle(stmt);
}

Database load_sqlite_file(const fs::path& path) {
    if (!fs::is_regular_file(path)) throw LoadError("not a file: " + path.string());
    sqlite3* raw = nullptr;
    const int rc = sqlite3_open_v2(path.string().c_str(), &raw, SQLITE_OPEN_READONLY, nullptr);
    SqliteHandle db(raw);
    if (rc != SQLITE_OK) throw LoadError(path.string() + ": " + (raw ? sqlite3_errmsg(raw) : "cannot open"));

    std::vector<std::string> names;
    {
        auto stmt = prepare(db.get(),
                            "SELECT name FROM sqlite_master WHERE type = 'table' AND name NOT LIKE 'sqlite_%' "
                            "ORDER BY rowid",
                            path);
        while (sqlite3_step(stmt.get()) == SQLITE_ROW) {
            names.emplace_back(reinterpret_cast<const char*>(sqlite3_column_text(stmt.get(), 0)));
        }
    }

    Database out(path.stem().string());
    for (const auto& name : names) {
        Table t;
        t.schema.table_name = name;
        {
            auto info = prepare(db.get(), "PRAGMA table_info(" + detail::quote_identifier(name) + ")", path);
            while (sqlite3_step(info.get()) == SQLITE_ROW) {
                t.schema.columns.emplace_back(reinterpret_cast<const char*>(sqlite3_column_text(info.get(), 1)));
                const auto* decl = reinterpret_cast<const char*>(sqlite3_column_text(info.get(), 2));
                t.schema.types.push_back(affinity_of(decl ? decl : ""));
            }
        }
        auto stmt = prepare(db.get(), "SELECT * FROM " + detail::quote_identifier(name), path);
        const int ncol = sqlite3_column_count(stmt.get());
        int step = SQLITE_ROW;
        while ((step = sqlite3_step(stmt.get())) == SQLITE_ROW) {
            Row row;
            row.reserve(static_cast<std::size_t>(ncol));
            for (int i = 0; i < ncol; ++i) row.push_back(column_value(stmt.get(), i));
            t.rows.push_back(std::move(row));
        }
        if (step != SQLITE_DONE) throw LoadError(path.string() + ": table '" + name + "': " + sqlite3_errmsg(db.get()));
        try {
            out.add_table(std::move(t));
        } catch (const std::invalid_argument& e) {
            throw LoadError(path.string() + ": " + e.what());
        }
    }
    if (out.size() == 0) throw LoadError(path.string() + ": no tables");
    return out;
}

}  // namespace

Database load_database(const fs::path& path, DatabaseFormat format) {
    if (!fs::exists(path)) throw LoadError("no such path: " + path.string());
    if (format == DatabaseFormat::CsvDir) return load_csv_dir(path);
    if (fs::is_directory(path)) {
        const fs::path inner = path / (path.filename().string() + ".sqlite");
        Database db = load_sqlite_file(inner);
        return db;
    }
    return load_sqlite_file(path);
}

Database load_database(const fs::path& path) {
    if (fs::is_directory(path)) {
        if (fs::exists(path / "schema.json")) return load_csv_dir(path);
        if (fs::exists(path / (path.filename().string() + ".sqlite"))) {
            return load_database(path, DatabaseFormat::SqliteFile);
        }
        throw LoadError(path.string() + ": neither schema.json nor " + path.filename().string() + ".sqlite found");
    }
    return load_database(path, DatabaseFormat::SqliteFile);
}

DatabaseSet load_database_root(const fs::path& root) {
    if (!fs::is_directory(root)) throw LoadError("not a directory: " + root.string());
    std::vector<fs::path> entries;
    for (const auto& e : fs::directory_iterator(root)) entries.push_back(e.path());
    std::sort(entries.begin(), entries.end());

    DatabaseSet out;
    for (const auto& p : entries) {
        const bool is_db_dir = fs::is_directory(p) && (fs::exists(p / "schema.json") ||
                                                        fs::exists(p / (p.filename().string() + ".sqlite")));
        const auto ext = p.extension().string();
        const bool is_db_file = fs::is_regular_file(p) && (ext == ".sqlite" || ext == ".db");
        if (!is_db_dir && !is_db_file) continue;
        Database db = load_database(p);
        std::string name = db.name();
        if (out.count(name)) throw LoadError("duplicate database name '" + name + "' under " + root.string());
        out.emplace(std::move(name), std::move(db));
    }
    if (out.empty()) throw LoadError("no databases found under " + root.string());
    return out;
}

// ---------------------------------------------------------------------------
// FROM repair

std::string repair_from_clause(std::string_view query, std::string_view placeholder) {
    const auto tokens = sql::tokenize(query);
    std::vector<std::size_t> inserts;
    int depth = 0;
    bool in_select = false;
    bool has_from = false;

    auto close_branch = [&](std::size_t pos) {
        if (in_select && !has_from) inserts.push_back(pos);
        in_select = false;
    };

    for (const auto& tok : tokens) {
        if (tok.kind == sql::TokenKind::End) {
            close_branch(tok.position);
            break;
        }
        if (tok.kind == sql::TokenKind::Symbol) {
            if (tok.text == "(") ++depth;
            if (tok.text == ")") --depth;
            if (tok.text == ";" && depth == 0) close_branch(tok.position);
            continue;
        }
        if (depth != 0 || tok.kind != sql::TokenKind::Keyword) continue;
        const std::string& kw = tok.text;
        if (kw == "SELECT") {
            in_select = true;
            has_from = false;
        } else if (kw == "FROM") {
            has_from = true;
        } else if (kw == "WHERE" || kw == "GROUP" || kw == "HAVING" || kw == "ORDER" || kw == "LIMIT") {
            close_branch(tok.position);
        } else if (kw == "UNION" || kw == "INTERSECT" || kw == "EXCEPT") {
            close_branch(tok.position);
        }
    }

    if (inserts.empty()) return std::string(query);

    const std::string clause = "FROM " + sql::render_identifier(placeholder);
    std::string out;
    std::size_t cursor = 0;
    for (std::size_t pos : inserts) {
        std::string_view head = query.substr(cursor, pos - cursor);
        while (!head.empty() && (head.back() == ' ' || head.back() == '\t' || head.back() == '\n' || head.back() == '\r'))
            head.remove_suffix(1);
        out += head;
        out += ' ';
        out += clause;
        if (pos < query.size() && query[pos] != ';') out += ' ';
        cursor = pos;
        while (cursor < query.size() && (query[cursor] == ' ' || query[cursor] == '\t' || query[cursor] == '\n' ||
                                         query[cursor] == '\r'))
            ++cursor;
    }
    out += query.substr(cursor);
    sql::parse(out);
    return out;
}

// ---------------------------------------------------------------------------
// JSONL datasets

namespace {

ordered_json value_to_json(const Value& v) {
    if (v.is_null()) return nullptr;
    if (v.is_integer()) return v.as_integer();
    if (v.is_real()) return v.as_real();
    return v.as_text();
}

Value value_from_json(const json& j) {
    switch (j.type()) {
        case json::value_t::null: return Null{};
        case json::value_t::number_integer: return j.get<std::int64_t>();
        case json::value_t::number_unsigned: {
            const auto u = j.get<std::uint64_t>();
            if (u > static_cast<std::uint64_t>(INT64_MAX)) throw std::out_of_range("integer cell out of range");
            return static_cast<std::int64_t>(u);
        }
        case json::value_t::number_float: return j.get<double>();
        case json::value_t::string: return j.get<std::string>();
        default: throw std::invalid_argument("cell must be null, a number or a string");
    }
}

ordered_json table_to_json(const Table& t, bool with_name) {
    ordered_json j;
    if (with_name) j["name"] = t.name();
    j["columns"] = t.schema.columns;
    if (!t.schema.types.empty()) {
        auto& types = j["types"];
        types = ordered_json::array();
        for (ColumnType ty : t.schema.types) types.push_back(std::string(column_type_name(ty)));
    }
    auto& rows = j["rows"];
    rows = ordered_json::array();
    for (const auto& row : t.rows) {
        ordered_json r = ordered_json::array();
        for (const auto& v : row) r.push_back(value_to_json(v));
        rows.push_back(std::move(r));
    }
    return j;
}

Table table_from_json(const json& j, bool with_name) {
    Table t;
    if (with_name) t.schema.table_name = j.at("name").get<std::string>();
    t.schema.columns = j.at("columns").get<std::vector<std::string>>();
    if (j.contains("types")) {
        for (const auto& ty : j.at("types")) {
            auto parsed = parse_column_type(ty.get<std::string>());
            if (!parsed) throw std::invalid_argument("unknown column type '" + ty.get<std::string>() + "'");
            t.schema.types.push_back(*parsed);
        }
    }
    for (const auto& r : j.at("rows")) {
        Row row;
        for (const auto& cell : r) row.push_back(value_from_json(cell));
        t.rows.push_back(std::move(row));
    }
    auto problems = validate_table(t);
    if (!problems.empty()) throw std::invalid_argument("table '" + t.name() + "': " + problems.front().message);
    return t;
}

std::optional<std::string> optional_string(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<std::string>();
}

}  // namespace

std::string sample_source(const Sample& s) {
    const std::string& lead = s.question ? *s.question : s.query.value_or("");
    return build_model_input(lead, s.tables);
}

std::string sample_target(const Sample& s) { return serialize_answer_table(s.answer); }

std::string sample_to_json_line(const Sample& s) {
    if (!s.query && !s.question) throw std::invalid_argument("sample '" + s.id + "' has neither query nor question");
    if (s.table_names.size() != s.tables.size()) {
        throw std::invalid_argument("sample '" + s.id + "': table_names and tables differ in length");
    }
    ordered_json j;
    j["id"] = s.id;
    j["db_id"] = s.db_id;
    if (s.query) j["query"] = *s.query;
    if (s.question) j["question"] = *s.question;
    if (s.template_id) j["template_id"] = *s.template_id;
    if (s.category) j["category"] = *s.category;
    j["table_names"] = s.table_names;
    auto& tables = j["tables"];
    tables = ordered_json::array();
    for (const auto& t : s.tables) tables.push_back(table_to_json(t, true));
    j["answer"] = table_to_json(s.answer, false);
    j["source"] = sample_source(s);
    j["target"] = sample_target(s);
    return j.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

Sample sample_from_json_line(std::string_view line, std::size_t line_no) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw DatasetError(line_no, std::string("malformed JSON: ") + e.what());
    }
    try {
        if (!j.is_object()) throw std::invalid_argument("record is not an object");
        Sample s;
        s.id = j.at("id").get<std::string>();
        s.db_id = j.value("db_id", "");
        s.query = optional_string(j, "query");
        s.question = optional_string(j, "question");
        s.template_id = optional_string(j, "template_id");
        s.category = optional_string(j, "category");
        if (!s.query && !s.question) throw std::invalid_argument("record has neither query nor question");
        s.table_names = j.at("table_names").get<std::vector<std::string>>();
        for (const auto& t : j.at("tables")) s.tables.push_back(table_from_json(t, true));
        if (s.tables.size() != s.table_names.size()) {
            throw std::invalid_argument("table_names and tables differ in length");
        }
        s.answer = table_from_json(j.at("answer"), false);
        if (auto src = optional_string(j, "source"); src && *src != sample_source(s)) {
            throw std::invalid_argument("stored source does not match the tables");
        }
        if (auto tgt = optional_string(j, "target"); tgt && *tgt != sample_target(s)) {
            throw std::invalid_argument("stored target does not match the answer");
        }
        return s;
    } catch (const DatasetError&) {
        throw;
    } catch (const std::exception& e) {
        throw DatasetError(line_no, e.what());
    }
}

void write_dataset(const std::vector<Sample>& samples, std::ostream& out) {
    for (const auto& s : samples) out << sample_to_json_line(s) << '\n';
}

void write_dataset(const std::vector<Sample>& samples, const fs::path& path) {
    // Serialize first so a bad sample never leaves a half-written file behind.
    std::string buffer;
    for (const auto& s : samples) {
        buffer += sample_to_json_line(s);
        buffer += '\n';
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw LoadError("cannot write " + path.string());
    out << buffer;
    if (!out.flush()) throw LoadError("write failed for " + path.string());
}

std::vector<Sample> read_dataset(std::istream& in) {
    std::vector<Sample> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        out.push_back(sample_from_json_line(line, line_no));
    }
    return out;
}

std::vector<Sample> read_dataset(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path.string());
    return read_dataset(in);
}

}  // namespace multitab
