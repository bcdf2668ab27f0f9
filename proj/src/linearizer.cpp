#include "multitab/linearizer.hpp"

#include <optional>
#include <vector>

namespace multitab {

namespace {

bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::size_t skip_ws(std::string_view s, std::size_t i) {
    while (i < s.size() && is_ws(s[i])) ++i;
    return i;
}

struct Marker {
    std::size_t begin;
    std::size_t end;  // one past the ':'
};

// Matches `word <ws>* :` where the word ends in one or more space-separated
// tokens (e.g. "col" or "<table_name>"). The word must start at the beginning
// of the text or right after whitespace.
std::optional<Marker> match_keyword_at(std::string_view s, std::size_t i, std::string_view word) {
    if (i > 0 && !is_ws(s[i - 1])) return std::nullopt;
    if (s.substr(i, word.size()) != word) return std::nullopt;
    std::size_t j = skip_ws(s, i + word.size());
    if (j < s.size() && s[j] == ':') return Marker{i, j + 1};
    return std::nullopt;
}

// `row <ws>+ <digits> <ws>* :`
std::optional<Marker> match_row_at(std::string_view s, std::size_t i, std::string_view word) {
    if (i > 0 && !is_ws(s[i - 1])) return std::nullopt;
    if (s.substr(i, word.size()) != word) return std::nullopt;
    std::size_t j = i + word.size();
    if (j >= s.size() || !is_ws(s[j])) return std::nullopt;
    j = skip_ws(s, j);
    if (j >= s.size() || !is_digit(s[j])) return std::nullopt;
    while (j < s.size() && is_digit(s[j])) ++j;
    j = skip_ws(s, j);
    if (j < s.size() && s[j] == ':') return Marker{i, j + 1};
    return std::nullopt;
}

std::optional<Marker> find_row_marker(std::string_view s, std::size_t from, std::string_view word) {
    for (std::size_t i = s.find(word, from); i != std::string_view::npos; i = s.find(word, i + 1)) {
        if (auto m = match_row_at(s, i, word)) return m;
    }
    return std::nullopt;
}

std::optional<Marker> find_keyword(std::string_view s, std::string_view word) {
    for (std::size_t i = s.find(word); i != std::string_view::npos; i = s.find(word, i + 1)) {
        if (auto m = match_keyword_at(s, i, word)) return m;
    }
    return std::nullopt;
}

// "col :" -> "col"
std::string_view marker_word(std::string_view marker) {
    auto colon = marker.rfind(':');
    return trim(colon == std::string_view::npos ? marker : marker.substr(0, colon));
}

std::string checked_text(std::string_view text, const LinearFormatConfig& cfg, std::string_view what) {
    if (collides_with_format(text, cfg)) {
        throw FormatError(std::string(what) + " '" + std::string(text) + "' collides with the table format");
    }
    return std::string(text);
}

void append_body(std::string& out, const Table& t, const LinearFormatConfig& cfg) {
    if (t.column_count() == 0) throw FormatError("cannot linearize a table without columns");
    auto violations = validate_table(t);
    if (!violations.empty()) throw FormatError("invalid table: " + violations.front().message);

    const std::string sep = " " + cfg.separator + " ";
    out += cfg.header_marker;
    out += ' ';
    for (std::size_t c = 0; c < t.column_count(); ++c) {
        if (c > 0) out += sep;
        out += checked_text(trim(t.schema.columns[c]), cfg, "header");
    }
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        out += ' ';
        out += cfg.row_marker_word;
        out += ' ';
        out += std::to_string(r + 1);
        out += " : ";
        const Row& row = t.rows[r];
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out += sep;
            out += checked_text(canonical_cell_text(row[c]), cfg, "cell");
        }
    }
}

std::vector<std::string> split_cells(std::string_view s, std::string_view sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(trim(s.substr(start)));
            break;
        }
        out.emplace_back(trim(s.substr(start, pos - start)));
        start = pos + sep.size();
    }
    return out;
}

}  // namespace

bool collides_with_format(std::string_view text, const LinearFormatConfig& cfg) {
    if (text.find(cfg.separator) != std::string_view::npos) return true;
    if (text.find('\n') != std::string_view::npos || text.find('\r') != std::string_view::npos) return true;
    if (find_row_marker(text, 0, cfg.row_marker_word)) return true;
    if (find_keyword(text, marker_word(cfg.header_marker))) return true;
    if (text.find(marker_word(cfg.table_name_marker)) != std::string_view::npos) return true;
    return false;
}

std::string serialize_input_table(const Table& t, const LinearFormatConfig& cfg) {
    if (!t.schema.table_name || trim(*t.schema.table_name).empty()) {
        throw FormatError("input table has no name");
    }
    std::string out = cfg.table_name_marker;
    out += ' ';
    out += checked_text(trim(*t.schema.table_name), cfg, "table name");
    out += ' ';
    append_body(out, t, cfg);
    return out;
}

std::string serialize_answer_table(const Table& t, const LinearFormatConfig& cfg) {
    std::string out;
    append_body(out, t, cfg);
    return out;
}

ParsedAnswer parse_answer_table(std::string_view s, const LinearFormatConfig& cfg) {
    s = trim(s);
    auto header = match_keyword_at(s, 0, marker_word(cfg.header_marker));
    if (!header) {
        throw FormatError("unparseable prediction: missing leading '" + cfg.header_marker + "'");
    }

    // Segment boundaries: header text, then one segment per row marker.
    std::vector<std::string_view> segments;
    std::size_t pos = header->end;
    auto next = find_row_marker(s, pos, cfg.row_marker_word);
    segments.push_back(s.substr(pos, (next ? next->begin : s.size()) - pos));
    while (next) {
        pos = next->end;
        next = find_row_marker(s, pos, cfg.row_marker_word);
        segments.push_back(s.substr(pos, (next ? next->begin : s.size()) - pos));
    }

    ParsedAnswer out;
    if (!trim(segments.front()).empty()) {
        out.table.schema.columns = split_cells(segments.front(), cfg.separator);
    }
    const std::size_t width = out.table.schema.columns.size();
    for (std::size_t i = 1; i < segments.size(); ++i) {
        auto cells = split_cells(segments[i], cfg.separator);
        if (cells.size() != width) out.ragged = true;
        Row row;
        row.reserve(width);
        for (std::size_t c = 0; c < width; ++c) {
            if (c < cells.size()) {
                row.emplace_back(std::move(cells[c]));
            } else {
                row.emplace_back(Null{});
            }
        }
        out.table.rows.push_back(std::move(row));
    }
    return out;
}

std::string build_model_input(std::string_view question, std::span<const Table> tables,
                              const LinearFormatConfig& cfg) {
    if (tables.empty()) throw FormatError("model input needs at least one table");
    std::string out(question);
    for (const Table& t : tables) {
        out += ' ';
        out += serialize_input_table(t, cfg);
    }
    return out;
}

std::size_t count_whitespace_tokens(std::string_view s) {
    std::size_t n = 0;
    std::size_t i = 0;
    while (true) {
        i = skip_ws(s, i);
        if (i >= s.size()) break;
        ++n;
        while (i < s.size() && !is_ws(s[i])) ++i;
    }
    return n;
}

}  // namespace multitab
