#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lkr {

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Strict comma-separated output, floating point at 12 significant digits.
void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

std::string format_sig12(double v);

std::uint64_t fnv1a64(std::string_view payload);
std::uint64_t file_fnv1a64(const std::filesystem::path& path);

// |a - b| / max(|a|, |b|, eps) with eps = 1e-30.
double symmetric_rel_err(double a, double b);

}  // namespace lkr
