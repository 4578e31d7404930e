#include "kbsyk/snapshot.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "kbsyk/errors.hpp"

namespace kbsyk {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

constexpr std::size_t kMagicLen = 6;

template <class T>
void put(std::ostream& os, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  os.write(buf, sizeof(T));
}

template <class T>
T get(std::istream& is) {
  char buf[sizeof(T)];
  is.read(buf, sizeof(T));
  if (!is) throw Error("snapshot truncated");
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace

void write_snapshot(const CMatrix& g, const TimeLattice& lattice, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  os.write(kSnapshotMagic, kMagicLen);
  put<double>(os, lattice.delta_t);
  put<double>(os, lattice.lambda_t);
  put<std::int64_t>(os, lattice.n_points);
  const int n = lattice.n_points;
  std::vector<double> row(2 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      row[2 * j] = g(i, j).real();
      row[2 * j + 1] = g(i, j).imag();
    }
    os.write(reinterpret_cast<const char*>(row.data()), sizeof(double) * row.size());
  }
  if (!os) throw Error("write failed for " + path);
}

void write_snapshot(const ContourGreen& g, const std::string& path) {
  write_snapshot(g.data(), g.lattice(), path);
}

ContourGreen read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  char magic[kMagicLen];
  is.read(magic, kMagicLen);
  if (!is || std::memcmp(magic, kSnapshotMagic, kMagicLen) != 0) throw Error(path + " is not a snapshot");
  TimeLattice lat;
  lat.delta_t = get<double>(is);
  lat.lambda_t = get<double>(is);
  const auto n = get<std::int64_t>(is);
  if (n < 1 || n > 20000) throw Error("snapshot has an implausible size");
  lat.n_points = static_cast<int>(n);
  CMatrix g(n, n);
  std::vector<double> row(2 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    is.read(reinterpret_cast<char*>(row.data()), sizeof(double) * row.size());
    if (!is) throw Error("snapshot truncated");
    for (int j = 0; j < n; ++j) g(i, j) = cplx(row[2 * j], row[2 * j + 1]);
  }
  return ContourGreen(lat, std::move(g));
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_csv(const CMatrix& g, const TimeLattice& lat, std::ostream& out, int stride) {
  if (stride < 1) throw DomainError("stride must be positive");
  out << "t1,t2,re,im\n";
  for (int i = 0; i < lat.n_points; i += stride)
    for (int j = 0; j < lat.n_points; j += stride)
      out << format_double(lat.time(i)) << ',' << format_double(lat.time(j)) << ','
          << format_double(g(i, j).real()) << ',' << format_double(g(i, j).imag()) << '\n';
}

void write_csv(const ContourGreen& g, const std::string& path, int stride) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_csv(g.data(), g.lattice(), os, stride);
}

}  // namespace kbsyk
