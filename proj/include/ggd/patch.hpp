#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ggd/image.hpp"

namespace ggd {

/// One-based raster index of pixel (i, j): k = n(i - 1) + j, 1 <= k <= n^2.
/// Throws std::out_of_range for i or j outside [1, n].
std::size_t patch_index(std::size_t i, std::size_t j, std::size_t n);

/// Throws std::invalid_argument unless rho is odd and 3 <= rho < 2n.
void validate_patch_side(std::size_t rho, std::size_t n);

/// n^2 patches of rho x rho pixels, one centred on every pixel.
///
/// Patch k (zero-based, k = row * n + col) holds rho^2 components in raster
/// order: component a * rho + b is the pixel at offset (a - rho/2, b - rho/2)
/// from the centre. The storage is a row-major (n^2 x rho^2) matrix, so a
/// "slot" (one component across all patches) is a strided column.
class PatchSet {
 public:
  PatchSet() = default;
  PatchSet(std::size_t n, std::size_t rho, std::vector<double> values);

  std::size_t side() const noexcept { return n_; }
  std::size_t rho() const noexcept { return rho_; }
  std::size_t count() const noexcept { return n_ * n_; }
  std::size_t dimension() const noexcept { return rho_ * rho_; }

  std::span<const double> patch(std::size_t k) const {
    return {values_.data() + k * dimension(), dimension()};
  }
  std::span<double> patch(std::size_t k) { return {values_.data() + k * dimension(), dimension()}; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  /// Same layout with every component multiplied by `factor`.
  PatchSet scaled(double factor) const;

 private:
  std::size_t n_ = 0;
  std::size_t rho_ = 0;
  std::vector<double> values_;
};

/// Replicate-padded patch extraction.
PatchSet extract_patches(const Image& image, std::size_t rho);

struct PixelNeighborhood {
  std::size_t center = 0;
  std::vector<std::size_t> members;  // zero-based linear indices, ascending
};

/// Pixels within Chebyshev radius rho/2 of `k` (zero-based), clipped to the
/// image domain.
PixelNeighborhood pixel_neighborhood(std::size_t k, std::size_t n, std::size_t rho);

/// Shepard weights of the window offsets around (row, col), in raster order of
/// the full rho x rho window. Offsets falling outside the image get weight 0;
/// the rest are exp(-|offset|^2) renormalised to sum to one.
std::vector<double> shepard_weights(std::size_t row, std::size_t col, std::size_t n,
                                    std::size_t rho);

/// Shepard merge of (denoised) patches back into an image, clamped to [0, 255].
Image merge_patches(const PatchSet& patches);

namespace serial {
Image merge_patches(const PatchSet& patches);
}

}  // namespace ggd
