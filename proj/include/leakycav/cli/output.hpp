#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace leakycav::cli {

// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

// RFC 4180: quote when the field holds a comma, quote, CR or LF.
std::string csv_field(std::string_view s);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

// A cell is empty (missing value), a number, an integer flag or text.
using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::string to_csv() const;
  // {"columns": [...], "rows": [[...], ...]} with missing cells as null.
  std::string to_json() const;
};

// Writes atomically enough for our purposes: to path.tmp, then rename.
void write_text(const std::string& path, const std::string& text);

}  // namespace leakycav::cli
