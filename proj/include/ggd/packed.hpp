#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ggd {

/// Dense symmetric matrix stored as its packed upper triangle, row by row.
///
/// Row i holds columns i..size-1 contiguously, so element (i, j) with i <= j
/// lives at row_offset(i) + (j - i). Half the footprint of a full square
/// matrix; at size 10^4 that is ~400 MB instead of ~800 MB.
class PackedSymmetric {
 public:
  PackedSymmetric() = default;
  explicit PackedSymmetric(std::size_t size, double fill = 0.0);
  PackedSymmetric(std::size_t size, std::vector<double> packed);

  std::size_t size() const noexcept { return size_; }

  static std::size_t packed_length(std::size_t size) noexcept { return size * (size + 1) / 2; }

  std::size_t row_offset(std::size_t i) const noexcept {
    return i * size_ - i * (i - 1) / 2;  // i = 0 wraps harmlessly to 0
  }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return i <= j ? values_[row_offset(i) + (j - i)] : values_[row_offset(j) + (i - j)];
  }
  double& operator()(std::size_t i, std::size_t j) noexcept {
    return i <= j ? values_[row_offset(i) + (j - i)] : values_[row_offset(j) + (i - j)];
  }

  /// Upper-triangle part of row i: entries (i, i), (i, i+1), ..., (i, size-1).
  std::span<const double> upper_row(std::size_t i) const noexcept {
    return {values_.data() + row_offset(i), size_ - i};
  }
  std::span<double> upper_row(std::size_t i) noexcept {
    return {values_.data() + row_offset(i), size_ - i};
  }

  std::span<const double> packed() const noexcept { return values_; }
  std::span<double> packed() noexcept { return values_; }

  /// y = A x. Parallel over rows with a fixed row partition per thread count,
  /// so the result is reproducible for a given number of threads.
  void multiply(std::span<const double> x, std::span<double> y) const;

  /// Full row sums (equal to column sums).
  std::vector<double> row_sums() const;

  /// Frobenius norm.
  double frobenius_norm() const;

 private:
  std::size_t size_ = 0;
  std::vector<double> values_;
};

namespace serial {
/// Single-threaded reference for PackedSymmetric::multiply.
void multiply(const PackedSymmetric& a, std::span<const double> x, std::span<double> y);
}  // namespace serial

}  // namespace ggd
