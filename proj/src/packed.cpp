#include "ggd/packed.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ggd {

PackedSymmetric::PackedSymmetric(std::size_t size, double fill)
    : size_(size), values_(packed_length(size), fill) {}

PackedSymmetric::PackedSymmetric(std::size_t size, std::vector<double> packed)
    : size_(size), values_(std::move(packed)) {
  if (values_.size() != packed_length(size))
    throw std::invalid_argument("packed buffer of size " + std::to_string(values_.size()) +
                                " does not match matrix order " + std::to_string(size));
}

namespace {

void check_shapes(const PackedSymmetric& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.size() || y.size() != a.size())
    throw std::invalid_argument("matrix-vector size mismatch");
}

// Rows [begin, end) of y += A x. Each packed row contributes its dot product
// to y[i] and scatters a_ij * x_i to y[j] for the mirrored lower triangle.
void accumulate_rows(const PackedSymmetric& a, std::span<const double> x, double* y,
                     std::size_t begin, std::size_t end) {
  const std::size_t n = a.size();
  for (std::size_t i = begin; i < end; ++i) {
    const double* row = a.upper_row(i).data();
    const double xi = x[i];
    double dot = row[0] * xi;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = row[j - i];
      dot += v * x[j];
      y[j] += v * xi;
    }
    y[i] += dot;
  }
}

// Row boundaries splitting the packed triangle into `parts` chunks of roughly
// equal element count.
std::vector<std::size_t> balanced_rows(std::size_t n, std::size_t parts) {
  std::vector<std::size_t> bounds{0};
  const double total = double(n) * double(n + 1) / 2.0;
  double acc = 0.0;
  std::size_t part = 1;
  for (std::size_t i = 0; i < n && part < parts; ++i) {
    acc += double(n - i);
    if (acc >= total * double(part) / double(parts)) {
      bounds.push_back(i + 1);
      ++part;
    }
  }
  while (bounds.size() <= parts) bounds.push_back(n);
  bounds.back() = n;
  return bounds;
}

}  // namespace

void PackedSymmetric::multiply(std::span<const double> x, std::span<double> y) const {
  check_shapes(*this, x, y);
#ifdef _OPENMP
  const auto threads = std::size_t(omp_get_max_threads());
#else
  const std::size_t threads = 1;
#endif
  if (threads <= 1 || size_ < 256) {
    serial::multiply(*this, x, y);
    return;
  }
  const auto bounds = balanced_rows(size_, threads);
  std::vector<double> partial(threads * size_, 0.0);
#pragma omp parallel for schedule(static, 1) num_threads(int(threads))
  for (std::size_t t = 0; t < threads; ++t)
    accumulate_rows(*this, x, partial.data() + t * size_, bounds[t], bounds[t + 1]);
  // Fixed-order reduction keeps results reproducible for a given thread count.
#pragma omp parallel for schedule(static)
  for (std::size_t j = 0; j < size_; ++j) {
    double s = 0.0;
    for (std::size_t t = 0; t < threads; ++t) s += partial[t * size_ + j];
    y[j] = s;
  }
}

std::vector<double> PackedSymmetric::row_sums() const {
  std::vector<double> sums(size_, 0.0);
  for (std::size_t i = 0; i < size_; ++i) {
    const auto row = upper_row(i);
    double s = row[0];
    for (std::size_t j = 1; j < row.size(); ++j) {
      s += row[j];
      sums[i + j] += row[j];
    }
    sums[i] += s;
  }
  return sums;
}

double PackedSymmetric::frobenius_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < size_; ++i) {
    const auto row = upper_row(i);
    s += row[0] * row[0];
    for (std::size_t j = 1; j < row.size(); ++j) s += 2.0 * row[j] * row[j];
  }
  return std::sqrt(s);
}

namespace serial {

void multiply(const PackedSymmetric& a, std::span<const double> x, std::span<double> y) {
  check_shapes(a, x, y);
  std::fill(y.begin(), y.end(), 0.0);
  accumulate_rows(a, x, y.data(), 0, a.size());
}

}  // namespace serial

}  // namespace ggd
