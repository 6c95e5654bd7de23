#ifndef TOA_TABLE_HPP
#define TOA_TABLE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace toa {

using Cell = std::variant<double, std::int64_t, std::string>;

/// Column-named rows plus key/value metadata, written as CSV or JSON.
///
/// CSV layout: `# key: value` metadata lines, one header line, then rows.
/// Doubles are rendered with 17 significant digits so they parse back exactly.
struct Table {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::size_t column_index(const std::string& name) const;
  double number(std::size_t row, const std::string& column) const;
};

std::string format_double(double v);

void write_csv(std::ostream& out, const Table& table);
void write_json(std::ostream& out, const Table& table);

/// Parses what write_csv emits. Numeric-looking fields become double (or
/// int64 when integral with no decimal point/exponent); the rest stay strings.
Table read_csv(std::istream& in);
Table read_json(std::istream& in);

}  // namespace toa

#endif  // TOA_TABLE_HPP
