#include "ggd/patch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ggd {

std::size_t patch_index(std::size_t i, std::size_t j, std::size_t n) {
  if (i < 1 || i > n || j < 1 || j > n)
    throw std::out_of_range("pixel (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") outside a " + std::to_string(n) + "x" + std::to_string(n) +
                            " image");
  return n * (i - 1) + j;
}

void validate_patch_side(std::size_t rho, std::size_t n) {
  if (rho % 2 == 0) throw std::invalid_argument("patch length must be odd");
  if (rho < 3 || rho >= 2 * n)
    throw std::invalid_argument("patch length must satisfy 3 <= rho < 2n (rho = " +
                                std::to_string(rho) + ", n = " + std::to_string(n) + ")");
}

PatchSet::PatchSet(std::size_t n, std::size_t rho, std::vector<double> values)
    : n_(n), rho_(rho), values_(std::move(values)) {
  if (values_.size() != n * n * rho * rho)
    throw std::invalid_argument("patch set needs n^2 * rho^2 = " +
                                std::to_string(n * n * rho * rho) + " values, got " +
                                std::to_string(values_.size()));
}

PatchSet PatchSet::scaled(double factor) const {
  std::vector<double> out(values_);
  for (double& v : out) v *= factor;
  return PatchSet(n_, rho_, std::move(out));
}

PatchSet extract_patches(const Image& image, std::size_t rho) {
  const std::size_t n = image.side();
  validate_patch_side(rho, n);
  const auto half = static_cast<std::ptrdiff_t>(rho / 2);
  const auto last = static_cast<std::ptrdiff_t>(n) - 1;
  const std::size_t dim = rho * rho;
  std::vector<double> values(n * n * dim);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t row = 0; row <= last; ++row) {
    for (std::ptrdiff_t col = 0; col <= last; ++col) {
      double* out = values.data() + (std::size_t(row) * n + std::size_t(col)) * dim;
      for (std::ptrdiff_t a = -half; a <= half; ++a) {
        const auto r = std::size_t(std::clamp(row + a, std::ptrdiff_t{0}, last));
        for (std::ptrdiff_t b = -half; b <= half; ++b) {
          const auto c = std::size_t(std::clamp(col + b, std::ptrdiff_t{0}, last));
          *out++ = image.at(r, c);
        }
      }
    }
  }
  return PatchSet(n, rho, std::move(values));
}

PixelNeighborhood pixel_neighborhood(std::size_t k, std::size_t n, std::size_t rho) {
  if (k >= n * n) throw std::out_of_range("pixel index outside the image");
  const std::size_t half = rho / 2;
  const std::size_t row = k / n, col = k % n;
  PixelNeighborhood out{k, {}};
  const std::size_t r0 = row > half ? row - half : 0, r1 = std::min(n - 1, row + half);
  const std::size_t c0 = col > half ? col - half : 0, c1 = std::min(n - 1, col + half);
  out.members.reserve((r1 - r0 + 1) * (c1 - c0 + 1));
  for (std::size_t r = r0; r <= r1; ++r)
    for (std::size_t c = c0; c <= c1; ++c) out.members.push_back(r * n + c);
  return out;
}

std::vector<double> shepard_weights(std::size_t row, std::size_t col, std::size_t n,
                                    std::size_t rho) {
  const auto half = static_cast<std::ptrdiff_t>(rho / 2);
  const auto in_domain = [n](std::ptrdiff_t v) { return v >= 0 && v < std::ptrdiff_t(n); };
  std::vector<double> w(rho * rho, 0.0);
  double total = 0.0;
  for (std::ptrdiff_t dr = -half; dr <= half; ++dr) {
    for (std::ptrdiff_t dc = -half; dc <= half; ++dc) {
      if (!in_domain(std::ptrdiff_t(row) + dr) || !in_domain(std::ptrdiff_t(col) + dc)) continue;
      const double g = std::exp(-double(dr * dr + dc * dc));
      w[std::size_t((dr + half) * std::ptrdiff_t(rho) + (dc + half))] = g;
      total += g;
    }
  }
  for (double& v : w) v /= total;
  return w;
}

namespace {

// Shepard merge of one output row. For a contributing patch centred at offset
// (dr, dc) from the target pixel, the target sits at offset (-dr, -dc) inside
// that patch, i.e. component (half - dr) * rho + (half - dc).
void merge_row(const PatchSet& patches, std::span<const double> kernel, std::size_t row,
               std::vector<double>& out) {
  const std::size_t n = patches.side(), rho = patches.rho();
  const auto half = std::ptrdiff_t(rho / 2);
  const auto sn = std::ptrdiff_t(n);
  for (std::ptrdiff_t col = 0; col < sn; ++col) {
    double acc = 0.0, total = 0.0;
    for (std::ptrdiff_t dr = -half; dr <= half; ++dr) {
      const std::ptrdiff_t r = std::ptrdiff_t(row) + dr;
      if (r < 0 || r >= sn) continue;
      for (std::ptrdiff_t dc = -half; dc <= half; ++dc) {
        const std::ptrdiff_t c = col + dc;
        if (c < 0 || c >= sn) continue;
        const double g = kernel[std::size_t((dr + half) * std::ptrdiff_t(rho) + (dc + half))];
        const auto slot = std::size_t((half - dr) * std::ptrdiff_t(rho) + (half - dc));
        acc += g * patches.patch(std::size_t(r) * n + std::size_t(c))[slot];
        total += g;
      }
    }
    out[row * n + std::size_t(col)] = acc / total;
  }
}

std::vector<double> gaussian_window(std::size_t rho) {
  const auto half = std::ptrdiff_t(rho / 2);
  std::vector<double> kernel(rho * rho);
  for (std::ptrdiff_t dr = -half; dr <= half; ++dr)
    for (std::ptrdiff_t dc = -half; dc <= half; ++dc)
      kernel[std::size_t((dr + half) * std::ptrdiff_t(rho) + (dc + half))] =
          std::exp(-double(dr * dr + dc * dc));
  return kernel;
}

void check_complete(const PatchSet& patches) {
  if (patches.side() == 0 || patches.values().size() != patches.count() * patches.dimension())
    throw std::invalid_argument("incomplete patch set");
}

}  // namespace

Image merge_patches(const PatchSet& patches) {
  check_complete(patches);
  const std::size_t n = patches.side();
  const auto kernel = gaussian_window(patches.rho());
  std::vector<double> out(n * n);
#pragma omp parallel for schedule(static)
  for (std::size_t row = 0; row < n; ++row) merge_row(patches, kernel, row, out);
  return clamped_image(n, std::move(out));
}

namespace serial {

Image merge_patches(const PatchSet& patches) {
  check_complete(patches);
  const std::size_t n = patches.side();
  const auto kernel = gaussian_window(patches.rho());
  std::vector<double> out(n * n);
  for (std::size_t row = 0; row < n; ++row) merge_row(patches, kernel, row, out);
  return clamped_image(n, std::move(out));
}

}  // namespace serial

}  // namespace ggd
