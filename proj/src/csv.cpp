#include "nest/csv.hpp"
#include "nest/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nest::csv {

namespace {

std::vector<std::string>
split_line(const std::string& line, std::size_t lineno)
{
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted)
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(lineno) + ": unterminated quoted field");
  out.push_back(std::move(cur));
  return out;
}

std::string_view
trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
    s.remove_suffix(1);
  return s;
}

} // namespace

std::size_t
Table::column(std::string_view name) const
{
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == name)
      return c;
  throw Error(ErrorCode::ParseError, "missing column '" + std::string(name) + "'");
}

bool
Table::has_column(std::string_view name) const
{
  for (const auto& h : header)
    if (h == name)
      return true;
  return false;
}

Table
read(std::istream& in)
{
  Table t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
      line.erase(0, 3);
    if (trim(line).empty())
      continue;
    auto cells = split_line(line, lineno);
    for (auto& c : cells)
      c = std::string(trim(c));
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size())
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(lineno) + ": expected " +
                    std::to_string(t.header.size()) + " fields, found " +
                    std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
    t.line_of.push_back(lineno);
  }
  if (!have_header)
    throw Error(ErrorCode::ParseError, "empty CSV input: no header row");
  return t;
}

Table
read_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return read(in);
}

std::string
format_double(double v)
{
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res =
    std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

double
parse_double(std::string_view cell, std::size_t line, std::string_view column)
{
  cell = trim(cell);
  if (cell == "nan" || cell == "NaN")
    return std::nan("");
  if (cell == "inf")
    return INFINITY;
  if (cell == "-inf")
    return -INFINITY;
  const char* begin = cell.data();
  if (!cell.empty() && cell.front() == '+')
    ++begin;
  double v = 0.0;
  const auto res = std::from_chars(begin, cell.data() + cell.size(), v);
  if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size())
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line) + ", column '" + std::string(column) +
                  "': not a number: '" + std::string(cell) + "'");
  return v;
}

long long
parse_int(std::string_view cell, std::size_t line, std::string_view column)
{
  cell = trim(cell);
  long long v = 0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size())
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line) + ", column '" + std::string(column) +
                  "': not an integer: '" + std::string(cell) + "'");
  return v;
}

Writer::Writer(const std::vector<std::string>& header)
{
  for (const auto& h : header)
    field(h);
  end_row();
}

Writer&
Writer::field(std::string_view s)
{
  if (row_open_)
    text_ += ',';
  row_open_ = true;
  if (s.find_first_of(",\"\n") == std::string_view::npos) {
    text_ += s;
  } else {
    text_ += '"';
    for (char c : s) {
      if (c == '"')
        text_ += '"';
      text_ += c;
    }
    text_ += '"';
  }
  return *this;
}

Writer&
Writer::field(double v)
{
  return field(std::string_view(format_double(v)));
}

Writer&
Writer::field(long long v)
{
  return field(std::string_view(std::to_string(v)));
}

Writer&
Writer::end_row()
{
  text_ += '\n';
  row_open_ = false;
  return *this;
}

void
write_file_atomic(const std::filesystem::path& path, std::string_view content)
{
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
      throw Error(ErrorCode::IoError, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw Error(ErrorCode::IoError,
                "cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

} // namespace nest::csv
