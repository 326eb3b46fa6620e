#include "rshe/path_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rshe/error.hpp"

namespace rshe::io {

namespace {

static_assert(std::endian::native == std::endian::little, "container writer assumes a little-endian host");

template <class T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw ConfigError("truncated matrix container");
  return v;
}

}  // namespace

std::string fmt(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_matrix(const std::filesystem::path& file, const Matrix& m) {
  if (m.data.size() != static_cast<std::size_t>(m.rows) * m.cols)
    throw ConfigError("matrix payload does not match its shape");
  std::ofstream os(file, std::ios::binary);
  if (!os) throw ConfigError("cannot open " + file.string() + " for writing");
  os.write("RSHE", 4);
  put<std::uint16_t>(os, kContainerVersion);
  put<std::uint16_t>(os, kDtypeFloat64);
  put<std::uint32_t>(os, m.rows);
  put<std::uint32_t>(os, m.cols);
  os.write(reinterpret_cast<const char*>(m.data.data()), static_cast<std::streamsize>(m.data.size() * sizeof(double)));
}

Matrix read_matrix(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + file.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "RSHE", 4) != 0) throw ConfigError("bad magic in " + file.string());
  if (get<std::uint16_t>(is) != kContainerVersion) throw ConfigError("unsupported container version");
  if (get<std::uint16_t>(is) != kDtypeFloat64) throw ConfigError("unsupported dtype code");
  Matrix m;
  m.rows = get<std::uint32_t>(is);
  m.cols = get<std::uint32_t>(is);
  m.data.resize(static_cast<std::size_t>(m.rows) * m.cols);
  is.read(reinterpret_cast<char*>(m.data.data()), static_cast<std::streamsize>(m.data.size() * sizeof(double)));
  if (!is) throw ConfigError("truncated matrix payload");
  return m;
}

void write_path_csv(const std::filesystem::path& file, const PathSample& path, const std::string& value_column) {
  std::ofstream os(file);
  if (!os) throw ConfigError("cannot open " + file.string() + " for writing");
  os << "t," << value_column << "\n";
  for (std::size_t i = 0; i < path.values.size(); ++i) os << fmt(path.grid.at(i)) << ',' << fmt(path.values[i]) << '\n';
}

PathSample read_path_csv(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw ConfigError("cannot open " + file.string());
  std::string line;
  std::getline(is, line);
  std::vector<double> t, v;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("malformed CSV row: " + line);
    t.push_back(std::stod(line.substr(0, comma)));
    v.push_back(std::stod(line.substr(comma + 1)));
  }
  if (t.size() < 2) throw ConfigError("path CSV needs at least two rows");
  PathSample p;
  p.grid = TimeGrid{t.front(), t.size(), (t.back() - t.front()) / static_cast<double>(t.size() - 1)};
  p.values = std::move(v);
  return p;
}

Matrix paths_to_matrix(const std::vector<PathSample>& paths) {
  Matrix m;
  if (paths.empty()) return m;
  m.rows = static_cast<std::uint32_t>(paths.size());
  m.cols = static_cast<std::uint32_t>(paths.front().values.size());
  m.data.reserve(static_cast<std::size_t>(m.rows) * m.cols);
  for (const auto& p : paths) {
    if (p.values.size() != m.cols) throw GridMismatch("paths_to_matrix: ragged paths");
    m.data.insert(m.data.end(), p.values.begin(), p.values.end());
  }
  return m;
}

}  // namespace rshe::io
