#include <algorithm>
#include <cmath>
#include <random>

#include "ggd/pipeline.hpp"

namespace ggd::synthetic {

Image constant(std::size_t n, double value) { return Image(n, value); }

Image checkerboard(std::size_t n, std::size_t cell, double low, double high) {
  if (cell == 0) throw std::invalid_argument("checkerboard cell must be >= 1");
  std::vector<double> v(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) v[r * n + c] = ((r / cell + c / cell) % 2) ? high : low;
  return Image(n, std::move(v));
}

Image gradient(std::size_t n) {
  std::vector<double> v(n * n);
  const double span = n > 1 ? double(2 * (n - 1)) : 1.0;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) v[r * n + c] = 255.0 * double(r + c) / span;
  return Image(n, std::move(v));
}

namespace {

std::vector<double> blob_field(std::size_t n, std::size_t count, std::mt19937_64& gen) {
  std::vector<double> v(n * n, 20.0);
  for (std::size_t b = 0; b < count; ++b) {
    const double cy = (0.5 + 0.5 * uniform_symmetric(gen())) * double(n);
    const double cx = (0.5 + 0.5 * uniform_symmetric(gen())) * double(n);
    const double sigma = (0.06 + 0.05 * (1.0 + uniform_symmetric(gen()))) * double(n);
    const double amp = 90.0 + 60.0 * uniform_symmetric(gen());
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        const double dy = double(r) - cy, dx = double(c) - cx;
        v[r * n + c] += amp * std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
      }
  }
  return v;
}

}  // namespace

Image gaussian_blobs(std::size_t n, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  return clamped_image(n, blob_field(n, count, gen));
}

Image scene(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<double> v = blob_field(n, 4, gen);
  for (int k = 0; k < 3; ++k) {
    const auto pick = [&](double lo, double hi) {
      return std::size_t((lo + (hi - lo) * 0.5 * (1.0 + uniform_symmetric(gen()))) * double(n));
    };
    const std::size_t r0 = pick(0.0, 0.6), c0 = pick(0.0, 0.6);
    const std::size_t r1 = std::min(n, r0 + pick(0.15, 0.35) + 1);
    const std::size_t c1 = std::min(n, c0 + pick(0.15, 0.35) + 1);
    const double level = k % 2 ? 60.0 : 200.0;
    for (std::size_t r = r0; r < r1; ++r)
      for (std::size_t c = c0; c < c1; ++c) v[r * n + c] = level;
  }
  return clamped_image(n, std::move(v));
}

}  // namespace ggd::synthetic
