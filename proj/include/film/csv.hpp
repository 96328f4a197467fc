#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "film/types.hpp"

namespace film {

// Serialises a double with 17 significant digits (lossless round-trip).
std::string format_double(double v);

// Rectangular numeric table: header row, first column holds row identifiers.
// Comma separated, '.' decimal point, UTF-8, no quoting.
struct Table {
  std::string id_label = "id";
  std::vector<std::string> row_ids;
  std::vector<std::string> columns;
  Matrix values;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
};

Table read_table(const std::filesystem::path& path);
void write_table(const std::filesystem::path& path, const Table& table);

// One value per line, blank lines ignored.
Vector read_weight_file(const std::filesystem::path& path);

}  // namespace film
