#include "table_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "idrkit/errors.hpp"

namespace idrkit::cli {

namespace {

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t tab = line.find(sep, pos);
        out.emplace_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
        if (tab == std::string_view::npos) break;
        pos = tab + 1;
    }
    return out;
}

}  // namespace

std::size_t Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    throw DomainError("missing column '" + std::string(name) + "'");
}

bool Table::has_column(std::string_view name) const {
    for (const auto& c : columns) {
        if (c == name) return true;
    }
    return false;
}

std::vector<double> Table::real_column(std::string_view name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string& s = rows[r][c];
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
            throw ParseError(source_lines[r], c + 1, "not a finite number: '" + s + "'");
        }
        out.push_back(v);
    }
    return out;
}

std::vector<int> Table::label_column(std::string_view name) const {
    const std::size_t c = column(name);
    std::vector<int> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string& s = rows[r][c];
        if (s == "0" || s == "1") {
            out.push_back(s == "1" ? 1 : 0);
        } else {
            throw ParseError(source_lines[r], c + 1, "label must be 0 or 1: '" + s + "'");
        }
    }
    return out;
}

Table parse_table(std::string_view text, char sep) {
    Table t;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool have_header = false;
    while (pos < text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        auto cells = split(line, sep);
        if (!have_header) {
            t.columns = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != t.columns.size()) {
            throw ParseError(line_no, std::min(cells.size(), t.columns.size()) + 1,
                             "expected " + std::to_string(t.columns.size()) + " columns, found " +
                                 std::to_string(cells.size()));
        }
        t.rows.push_back(std::move(cells));
        t.source_lines.push_back(line_no);
    }
    if (!have_header) throw EmptyFile("table has no header row");
    return t;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Table read_table(const std::string& path) { return parse_table(read_file(path)); }

std::string format_real(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_row(std::ostream& out, const std::vector<std::string>& cells, char sep) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << sep;
        out << cells[i];
    }
    out << '\n';
}

}  // namespace idrkit::cli
