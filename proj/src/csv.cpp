#include "film/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "film/errors.hpp"

namespace film {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& token, const std::filesystem::path& path,
                    int line_no) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw ParseError(path.string() + ":" + std::to_string(line_no) +
                     ": cannot parse number from '" + token + "'");
  return v;
}

}  // namespace

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");

  Table table;
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line))
    throw ParseError(path.string() + ":1: empty file");
  ++line_no;
  auto header = split_line(line);
  if (header.size() < 2)
    throw ParseError(path.string() + ":1: expected an id column and at least "
                                     "one value column");
  table.id_label = header.front();
  table.columns.assign(header.begin() + 1, header.end());

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_line(line);
    if (cells.size() != header.size())
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": expected " + std::to_string(header.size()) +
                       " fields, found " + std::to_string(cells.size()));
    table.row_ids.push_back(cells.front());
    std::vector<double> vals;
    vals.reserve(cells.size() - 1);
    for (std::size_t j = 1; j < cells.size(); ++j)
      vals.push_back(parse_double(cells[j], path, line_no));
    rows.push_back(std::move(vals));
  }
  if (rows.empty())
    throw ParseError(path.string() + ": no data rows");

  table.values.resize(static_cast<Index>(rows.size()),
                      static_cast<Index>(table.columns.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      table.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return table;
}

void write_table(const std::filesystem::path& path, const Table& table) {
  if (static_cast<Index>(table.row_ids.size()) != table.values.rows() ||
      static_cast<Index>(table.columns.size()) != table.values.cols())
    throw DimensionError("write_table: ids/columns do not match the value matrix");
  std::ofstream out(path);
  if (!out) throw ParseError(path.string() + ": cannot open file for writing");
  out << table.id_label;
  for (const auto& c : table.columns) out << "," << c;
  out << "\n";
  for (Index i = 0; i < table.values.rows(); ++i) {
    out << table.row_ids[static_cast<std::size_t>(i)];
    for (Index j = 0; j < table.values.cols(); ++j)
      out << "," << format_double(table.values(i, j));
    out << "\n";
  }
}

Vector read_weight_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::vector<double> vals;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    vals.push_back(parse_double(line, path, line_no));
  }
  if (vals.empty()) throw ParseError(path.string() + ": no values");
  Vector out(static_cast<Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i)
    out(static_cast<Index>(i)) = vals[i];
  return out;
}

}  // namespace film
