#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace entlink {

// One value, 9 significant digits. Keeps CSV output byte-stable.
std::string format_sig9(double x);

// Minimal CSV container: '#' comment lines, one header row, string cells.
struct CsvTable {
  std::vector<std::string> comments;  // without the leading "# "
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
  std::size_t column(const std::string& name) const;  // throws std::out_of_range

  void write(std::ostream& os) const;
  std::string to_string() const;

  static CsvTable read(std::istream& is);
  static CsvTable read_file(const std::string& path);
};

}  // namespace entlink
