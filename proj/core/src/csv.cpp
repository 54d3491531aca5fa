#include "lkr/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lkr {

std::string format_sig12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out << ',';
    out << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw std::runtime_error("write_csv: ragged row in " + path.string());
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << format_sig12(row[c]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_csv: write failed for " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty file " + path.string());
  std::stringstream head(line);
  std::string cell;
  while (std::getline(head, cell, ',')) t.columns.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != t.columns.size())
      throw std::runtime_error("read_csv: ragged row in " + path.string());
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::uint64_t fnv1a64(std::string_view payload) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char ch : payload) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t file_fnv1a64(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("file_fnv1a64: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string payload = ss.str();
  return fnv1a64(payload);
}

double symmetric_rel_err(double a, double b) {
  const double denom = std::max({std::abs(a), std::abs(b), 1e-30});
  return std::abs(a - b) / denom;
}

}  // namespace lkr
