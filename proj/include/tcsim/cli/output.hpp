#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tcsim::cli {

/// Shortest round-trip decimal ('.' separator, locale independent).
std::string format_number(double value);

using Cell = std::variant<double, long long, bool, std::string>;

/// Comma-separated, header row, '\n' line endings. Booleans print as
/// true/false; strings must not contain commas or newlines.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<Cell> row);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

struct LineSeries {
  std::string label;
  std::vector<double> x, y;
};

/// Polyline plot with axes, ticks, labels and a legend. Non-finite points
/// break the line.
std::string svg_line_plot(const std::vector<LineSeries>& series, const std::string& title,
                          const std::string& x_label, const std::string& y_label);

/// Cell grid colored by value (row-major, one row per y value) with a
/// color bar. Non-finite cells are drawn gray.
std::string svg_heat_map(const std::vector<double>& x, const std::vector<double>& y,
                         const std::vector<double>& values, const std::string& title,
                         const std::string& x_label, const std::string& y_label);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace tcsim::cli
