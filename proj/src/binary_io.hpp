#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace ggd::detail {

// Little-endian scalar I/O for the checkpoint formats.

inline void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint64_t read_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("truncated checkpoint");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
  return v;
}

inline void write_f64(std::ostream& out, double v) { write_u64(out, std::bit_cast<std::uint64_t>(v)); }

inline double read_f64(std::istream& in) { return std::bit_cast<double>(read_u64(in)); }

template <class Range>
void write_f64_array(std::ostream& out, const Range& values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()),
              std::streamsize(values.size() * sizeof(double)));
  } else {
    for (double v : values) write_f64(out, v);
  }
}

template <class Range>
void read_f64_array(std::istream& in, Range& values) {
  if constexpr (std::endian::native == std::endian::little) {
    if (!in.read(reinterpret_cast<char*>(values.data()),
                 std::streamsize(values.size() * sizeof(double))))
      throw std::runtime_error("truncated checkpoint");
  } else {
    for (double& v : values) v = read_f64(in);
  }
}

inline void expect_magic(std::istream& in, const char (&magic)[5]) {
  char got[4];
  if (!in.read(got, 4) || std::memcmp(got, magic, 4) != 0)
    throw std::runtime_error(std::string("bad checkpoint magic (expected ") + magic + ")");
}

}  // namespace ggd::detail
