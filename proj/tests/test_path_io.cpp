#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "rshe/error.hpp"
#include "rshe/path_io.hpp"

using namespace rshe;

namespace {
std::filesystem::path tmp(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "rshe_test_path_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}
}  // namespace

TEST(BinaryContainer, RoundTripAndHeader) {
  io::Matrix m{2, 3, {1.0, -2.5, 3.25, 1e-300, 0.1, 7.0}};
  const auto f = tmp("m.bin");
  io::write_matrix(f, m);
  EXPECT_EQ(std::filesystem::file_size(f), 16u + 6 * 8);
  std::ifstream in(f, std::ios::binary);
  char magic[4];
  in.read(magic, 4);
  EXPECT_EQ(std::string(magic, 4), "RSHE");
  const auto back = io::read_matrix(f);
  EXPECT_EQ(back.rows, 2u);
  EXPECT_EQ(back.cols, 3u);
  EXPECT_EQ(back.data, m.data);
}

TEST(BinaryContainer, RejectsBadMagic) {
  const auto f = tmp("bad.bin");
  std::ofstream(f, std::ios::binary) << "NOPE0000000000000000";
  EXPECT_ANY_THROW(io::read_matrix(f));
}

TEST(PathCsv, RoundTripIsExact) {
  PathSample p;
  p.grid = TimeGrid::unit(4);
  p.values = {0.0, 0.1, -1.0 / 3.0, 2.0, 1e-17};
  const auto f = tmp("p.csv");
  io::write_path_csv(f, p);
  std::ifstream in(f);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,value");
  const auto back = io::read_path_csv(f);
  EXPECT_EQ(back.values, p.values);
  EXPECT_EQ(back.grid.n, 5u);
}

TEST(PathCsv, CustomColumn) {
  PathSample p;
  p.grid = TimeGrid::unit(2);
  p.values = {0.0, 1.0, 2.0};
  const auto f = tmp("u.csv");
  io::write_path_csv(f, p, "u");
  std::ifstream in(f);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,u");
}

TEST(PathsToMatrix, StacksRows) {
  PathSample a, b;
  a.grid = b.grid = TimeGrid::unit(1);
  a.values = {0, 1};
  b.values = {0, 2};
  const auto m = io::paths_to_matrix({a, b});
  EXPECT_EQ(m.rows, 2u);
  EXPECT_EQ(m.cols, 2u);
  EXPECT_EQ(m.data, (std::vector<double>{0, 1, 0, 2}));
  b.grid = TimeGrid::unit(2);
  b.values = {0, 1, 2};
  EXPECT_THROW(io::paths_to_matrix({a, b}), GridMismatch);
}
