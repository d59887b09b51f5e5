#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace idrkit::cli {

/// Delimited table with a header row.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> source_lines;   ///< 1-based line of each row

    /// Index of `name`; DomainError when missing.
    std::size_t column(std::string_view name) const;
    bool has_column(std::string_view name) const;
    /// Parses column `name` as finite reals; ParseError on bad cells.
    std::vector<double> real_column(std::string_view name) const;
    std::vector<int> label_column(std::string_view name) const;
};

Table parse_table(std::string_view text, char sep = '\t');
/// Throws EmptyFile when the file has no header.
Table read_table(const std::string& path);
std::string read_file(const std::string& path);

/// 17 significant digits, so values round-trip exactly.
std::string format_real(double x);

void write_row(std::ostream& out, const std::vector<std::string>& cells, char sep = '\t');

}  // namespace idrkit::cli
