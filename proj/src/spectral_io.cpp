#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "cmbo/error.hpp"
#include "cmbo/spectral.hpp"

namespace cmbo::spectral {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary field dumps assume a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is, const std::filesystem::path& path) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw ArgumentError("truncated binary field file " + path.string());
  }
  return v;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, mode);
  if (!os) throw ArgumentError("cannot open " + path.string() + " for writing");
  return os;
}

}  // namespace

void write_csv(const SpectralField& f, const std::filesystem::path& path) {
  auto os = open_out(path, std::ios::out | std::ios::trunc);
  os << "X,value\n" << std::setprecision(17);
  const auto& grid = f.grid();
  for (std::size_t i = 0; i < f.size(); ++i) os << grid.node(i) << ',' << f[i] << '\n';
  if (!os) throw ArgumentError("write failed for " + path.string());
}

SpectralField read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ArgumentError("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line) || line.rfind("X,value", 0) != 0) {
    throw ArgumentError(path.string() + ": expected header X,value");
  }
  std::vector<double> xs, vs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ArgumentError(path.string() + ": malformed row " + line);
    xs.push_back(std::stod(line.substr(0, comma)));
    vs.push_back(std::stod(line.substr(comma + 1)));
  }
  if (xs.size() < 2) throw ArgumentError(path.string() + ": too few rows");
  const double dx = xs[1] - xs[0];
  const double period = dx * static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i] - dx * static_cast<double>(i)) > 1e-9 * (1.0 + period)) {
      throw ArgumentError(path.string() + ": X column is not a uniform grid starting at 0");
    }
  }
  return SpectralField::from_values(PeriodicGrid(period, xs.size()), std::move(vs));
}

void write_binary(const SpectralField& f, const std::filesystem::path& path) {
  auto os = open_out(path, std::ios::out | std::ios::binary | std::ios::trunc);
  put<double>(os, f.grid().period());
  put<std::uint64_t>(os, f.size());
  for (double v : f.values()) put<double>(os, v);
  if (!os) throw ArgumentError("write failed for " + path.string());
}

SpectralField read_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ArgumentError("cannot open " + path.string());
  const auto period = get<double>(is, path);
  const auto n = get<std::uint64_t>(is, path);
  if (n > (std::uint64_t{1} << 32)) throw ArgumentError(path.string() + ": implausible size");
  PeriodicGrid grid(period, static_cast<std::size_t>(n));
  std::vector<double> values(grid.size());
  for (auto& v : values) v = get<double>(is, path);
  return SpectralField::from_values(grid, std::move(values));
}

}  // namespace cmbo::spectral
