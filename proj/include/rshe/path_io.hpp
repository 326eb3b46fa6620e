#pragma once

// File formats for paths and fields.
//
// Binary matrix container (little-endian):
//   bytes 0-3   magic "RSHE"
//   bytes 4-5   version (uint16, currently 1)
//   bytes 6-7   dtype code (uint16, 1 = float64)
//   bytes 8-11  rows (uint32)
//   bytes 12-15 cols (uint32)
//   then rows*cols float64 values, row-major.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rshe/gauss_sampler.hpp"

namespace rshe::io {

inline constexpr std::uint16_t kContainerVersion = 1;
inline constexpr std::uint16_t kDtypeFloat64 = 1;

struct Matrix {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<double> data;  // row-major
};

void write_matrix(const std::filesystem::path& file, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& file);

/// Two-column CSV "t,<value_column>" with round-trippable doubles.
void write_path_csv(const std::filesystem::path& file, const PathSample& path,
                    const std::string& value_column = "value");
PathSample read_path_csv(const std::filesystem::path& file);

/// Stacks equally-gridded paths as rows.
Matrix paths_to_matrix(const std::vector<PathSample>& paths);

/// Shortest decimal string that round-trips the double.
std::string fmt(double x);

}  // namespace rshe::io
