#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace nest::csv {

//! Header plus string cells. Fields may be double-quoted; "" escapes a quote.
struct Table
{
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  //! 1-based source line of each row.
  std::vector<std::size_t> line_of;

  //! Column position by name; throws ParseError when absent.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;
};

Table read(std::istream& in);
Table read_file(const std::filesystem::path& path);

//! 17 significant digits, locale independent; round-trips every finite
//! double.
std::string format_double(double v);

double parse_double(std::string_view cell, std::size_t line, std::string_view column);
long long parse_int(std::string_view cell, std::size_t line, std::string_view column);

//! Accumulates CSV text.
class Writer
{
public:
  explicit Writer(const std::vector<std::string>& header);

  Writer& field(std::string_view s);
  Writer& field(double v);
  Writer& field(long long v);
  Writer& field(int v) { return field(static_cast<long long>(v)); }
  Writer& end_row();

  const std::string& str() const { return text_; }

private:
  std::string text_;
  bool row_open_ = false;
};

//! Writes to a temporary sibling, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

} // namespace nest::csv
