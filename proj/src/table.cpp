#include "multitab/table.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

namespace multitab {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

}  // namespace

std::string_view trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (ascii_lower(a[i]) != ascii_lower(b[i])) return false;
    }
    return true;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = ascii_lower(c);
    return out;
}

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
    if (v == 0.0) return std::signbit(v) ? "-0.0" : "0.0";

    // 15 significant digits, as SQLite's real-to-text conversion, e.g. "-1.13500000000000e+01".
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 14);
    std::string_view sci(buf, static_cast<std::size_t>(res.ptr - buf));

    bool negative = false;
    if (sci.front() == '-') {
        negative = true;
        sci.remove_prefix(1);
    }
    auto epos = sci.find('e');
    std::string_view mantissa = sci.substr(0, epos);
    int exponent = 0;
    std::from_chars(sci.data() + epos + 1 + (sci[epos + 1] == '+' ? 1 : 0), sci.data() + sci.size(), exponent);

    std::string digits;
    for (char c : mantissa) {
        if (c != '.') digits.push_back(c);
    }
    while (digits.size() > 1 && digits.back() == '0') digits.pop_back();

    std::string out = negative ? "-" : "";
    if (exponent >= -4 && exponent < 16) {
        const int ndigits = static_cast<int>(digits.size());
        if (exponent < 0) {
            out += "0.";
            out.append(static_cast<std::size_t>(-exponent - 1), '0');
            out += digits;
        } else if (exponent + 1 >= ndigits) {
            out += digits;
            out.append(static_cast<std::size_t>(exponent + 1 - ndigits), '0');
            out += ".0";
        } else {
            out += digits.substr(0, static_cast<std::size_t>(exponent + 1));
            out += '.';
            out += digits.substr(static_cast<std::size_t>(exponent + 1));
        }
        return out;
    }

    out += digits.substr(0, 1);
    if (digits.size() > 1) {
        out += '.';
        out += digits.substr(1);
    }
    out += 'e';
    out += exponent < 0 ? '-' : '+';
    int mag = exponent < 0 ? -exponent : exponent;
    if (mag < 10) out += '0';
    out += std::to_string(mag);
    return out;
}

std::string canonical_cell_text(const Value& v) {
    struct Visitor {
        std::string operator()(Null) const { return std::string(kNullText); }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const { return format_real(d); }
        std::string operator()(const std::string& s) const { return std::string(trim(s)); }
    };
    return std::visit(Visitor{}, v.storage());
}

std::string_view column_type_name(ColumnType t) {
    switch (t) {
        case ColumnType::Integer: return "integer";
        case ColumnType::Real: return "real";
        case ColumnType::Text: return "text";
        case ColumnType::Any: break;
    }
    return "any";
}

std::optional<ColumnType> parse_column_type(std::string_view s) {
    const std::string lower = to_lower(trim(s));
    if (lower == "integer" || lower == "int") return ColumnType::Integer;
    if (lower == "real" || lower == "float" || lower == "double") return ColumnType::Real;
    if (lower == "text" || lower == "string") return ColumnType::Text;
    if (lower == "any") return ColumnType::Any;
    return std::nullopt;
}

const std::string& Table::name() const {
    static const std::string empty;
    return schema.table_name ? *schema.table_name : empty;
}

std::vector<Violation> validate_table(const Table& t) {
    std::vector<Violation> out;
    for (std::size_t c = 0; c < t.schema.columns.size(); ++c) {
        if (trim(t.schema.columns[c]).empty()) {
            out.push_back({std::nullopt, "column " + std::to_string(c) + " has an empty name"});
        }
    }
    if (!t.schema.types.empty() && t.schema.types.size() != t.schema.columns.size()) {
        out.push_back({std::nullopt, "type list length " + std::to_string(t.schema.types.size()) +
                                         " differs from column count " + std::to_string(t.column_count())});
    }
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (t.rows[r].size() != t.column_count()) {
            out.push_back({r, "row " + std::to_string(r) + " has " + std::to_string(t.rows[r].size()) +
                                  " cells, expected " + std::to_string(t.column_count())});
        }
    }
    return out;
}

bool same_canonical_content(const Table& a, const Table& b) {
    if (a.schema.columns != b.schema.columns || a.rows.size() != b.rows.size()) return false;
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
        if (a.rows[r].size() != b.rows[r].size()) return false;
        for (std::size_t c = 0; c < a.rows[r].size(); ++c) {
            if (canonical_cell_text(a.rows[r][c]) != canonical_cell_text(b.rows[r][c])) return false;
        }
    }
    return true;
}

void Database::add_table(Table t) {
    if (!t.schema.table_name || t.schema.table_name->empty()) {
        throw std::invalid_argument("database '" + name_ + "': table without a name");
    }
    auto key = to_lower(*t.schema.table_name);
    if (index_.contains(key)) {
        throw std::invalid_argument("database '" + name_ + "': duplicate table '" + *t.schema.table_name + "'");
    }
    index_.emplace(std::move(key), tables_.size());
    tables_.push_back(std::move(t));
}

const Table* Database::find(std::string_view name) const {
    auto it = index_.find(to_lower(name));
    return it == index_.end() ? nullptr : &tables_[it->second];
}

const Table& Database::at(std::string_view name) const {
    if (const Table* t = find(name)) return *t;
    throw std::out_of_range("database '" + name_ + "' has no table '" + std::string(name) + "'");
}

}  // namespace multitab
