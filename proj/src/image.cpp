#include "ggd/image.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace ggd {

namespace {

bool in_range(double v) { return std::isfinite(v) && v >= 0.0 && v <= 255.0; }

}  // namespace

Image::Image(std::size_t n, double value) : n_(n), values_(n * n, value) {
  if (!in_range(value)) throw std::invalid_argument("pixel value outside [0, 255]");
}

Image::Image(std::size_t n, std::vector<double> values) : n_(n), values_(std::move(values)) {
  if (values_.size() != n * n)
    throw std::invalid_argument("expected " + std::to_string(n * n) + " pixels, got " +
                                std::to_string(values_.size()));
  if (!std::all_of(values_.begin(), values_.end(), in_range))
    throw std::invalid_argument("pixel value outside [0, 255]");
}

Image clamped_image(std::size_t n, std::vector<double> values) {
  for (double& v : values) v = std::clamp(v, 0.0, 255.0);
  return Image(n, std::move(values));
}

double uniform_symmetric(std::uint64_t raw) noexcept {
  const double unit = static_cast<double>(raw >> 11) * 0x1.0p-53;  // [0, 1)
  return 2.0 * unit - 1.0;
}

Image add_uniform_noise(const Image& image, const NoiseSpec& spec) {
  if (!(spec.epsilon >= 0.0) || !std::isfinite(spec.epsilon))
    throw std::invalid_argument("noise magnitude must be a finite value >= 0");
  std::mt19937_64 gen(spec.seed);
  std::vector<double> out(image.values().begin(), image.values().end());
  for (double& v : out) v += spec.epsilon * uniform_symmetric(gen());
  return clamped_image(image.side(), std::move(out));
}

double reconstruction_error(const Image& reference, const Image& candidate) {
  if (reference.side() != candidate.side())
    throw std::invalid_argument("image sizes differ: " + std::to_string(reference.side()) +
                                " vs " + std::to_string(candidate.side()));
  const auto a = reference.values();
  const auto b = candidate.values();
  double diff = 0.0, norm_a = 0.0, norm_b = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    diff += d * d;
    norm_a += a[k] * a[k];
    norm_b += b[k] * b[k];
  }
  if (norm_a == 0.0 || norm_b == 0.0)
    throw std::invalid_argument("reconstruction error undefined for an all-zero image");
  return diff / std::sqrt(norm_a * norm_b);
}

double gray_from_rgb(double r, double g, double b) noexcept { return (r + g + b) / 3.0; }

std::uint8_t quantize(double value) noexcept {
  // std::round rounds halves away from zero.
  const double r = std::round(value);
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

}  // namespace ggd
