#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "fnls/errors.hpp"
#include "fnls/grid.hpp"

namespace fnls {

// Layout (all little-endian):
//   "FNLS" | u32 version | u32 rank | rank x (u64 n_j, f64 L_j) | size x (f64 re, f64 im), row-major.
inline constexpr std::array<char, 4> kSnapshotMagic{'F', 'N', 'L', 'S'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

namespace detail {

template <typename U>
void put_le(std::ostream& os, U v) {
  unsigned char b[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  os.write(reinterpret_cast<const char*>(b), sizeof(U));
}

template <typename U>
U get_le(std::istream& is, const char* what) {
  unsigned char b[sizeof(U)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(U))) throw ParseError(std::string("snapshot truncated in ") + what);
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(b[i]) << (8 * i);
  return v;
}

inline void put_f64(std::ostream& os, double x) { put_le(os, std::bit_cast<std::uint64_t>(x)); }
inline double get_f64(std::istream& is, const char* what) { return std::bit_cast<double>(get_le<std::uint64_t>(is, what)); }

}  // namespace detail

inline void write_snapshot(std::ostream& os, const ComplexField& u) {
  const Grid& g = u.grid();
  os.write(kSnapshotMagic.data(), kSnapshotMagic.size());
  detail::put_le<std::uint32_t>(os, kSnapshotVersion);
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.rank()));
  for (std::size_t j = 0; j < g.rank(); ++j) {
    detail::put_le<std::uint64_t>(os, g.dim(j));
    detail::put_f64(os, g.length(j));
  }
  for (const auto& v : u.values()) {
    detail::put_f64(os, v.real());
    detail::put_f64(os, v.imag());
  }
  if (!os) throw Error("snapshot write failed");
}

inline ComplexField read_snapshot(std::istream& is) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kSnapshotMagic) throw ParseError("not a snapshot (bad magic)");
  const auto version = detail::get_le<std::uint32_t>(is, "header");
  if (version != kSnapshotVersion) throw ParseError("unsupported snapshot version " + std::to_string(version));
  const auto rank = detail::get_le<std::uint32_t>(is, "header");
  if (rank < 1 || rank > 3) throw ParseError("snapshot rank " + std::to_string(rank) + " outside 1..3");
  std::vector<std::size_t> dims;
  std::vector<double> lengths;
  for (std::uint32_t j = 0; j < rank; ++j) {
    dims.push_back(static_cast<std::size_t>(detail::get_le<std::uint64_t>(is, "header")));
    lengths.push_back(detail::get_f64(is, "header"));
  }
  Grid g(dims, lengths);
  ComplexField u(g);
  for (auto& v : u.values()) {
    const double re = detail::get_f64(is, "data");
    const double im = detail::get_f64(is, "data");
    v = Complex(re, im);
  }
  if (is.peek() != std::char_traits<char>::eof()) throw ParseError("trailing bytes after snapshot data");
  return u;
}

inline void save_snapshot(const std::string& path, const ComplexField& u) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  write_snapshot(os, u);
}

inline ComplexField load_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open '" + path + "'");
  return read_snapshot(is);
}

}  // namespace fnls
