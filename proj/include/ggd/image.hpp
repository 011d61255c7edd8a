#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

namespace ggd {

/// Raised for unreadable, malformed or unsupported image files.
class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Square grayscale image with real-valued intensities in [0, 255].
///
/// Pixels are stored row-major; (row, col) are zero-based and measured from
/// the top-left corner. Values are never quantized in memory, only when the
/// image is written to disk.
class Image {
 public:
  Image() = default;

  /// Constant image of side n.
  explicit Image(std::size_t n, double value = 0.0);

  /// Takes ownership of n*n row-major values. Throws std::invalid_argument if
  /// the size does not match or any value is outside [0, 255].
  Image(std::size_t n, std::vector<double> values);

  std::size_t side() const noexcept { return n_; }
  std::size_t pixel_count() const noexcept { return values_.size(); }
  bool empty() const noexcept { return n_ == 0; }

  double at(std::size_t row, std::size_t col) const { return values_[row * n_ + col]; }
  double operator[](std::size_t k) const { return values_[k]; }

  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

/// Builds an Image from arbitrary real values by clamping each to [0, 255].
Image clamped_image(std::size_t n, std::vector<double> values);

struct NoiseSpec {
  double epsilon = 0.0;
  std::uint64_t seed = 0;
};

/// Uniform draw in [-1, 1) from a 64-bit Mersenne Twister output. The mapping
/// is fixed (top 53 bits scaled by 2^-53) so streams are identical on every
/// platform, unlike std::uniform_real_distribution.
double uniform_symmetric(std::uint64_t raw) noexcept;

/// I + epsilon * U[-1, 1], then clamped to [0, 255].
///
/// One generator (std::mt19937_64 seeded with spec.seed) supplies one draw per
/// pixel in row-major order.
Image add_uniform_noise(const Image& image, const NoiseSpec& spec);

/// Normalized sum of squared differences:
///   sum (a - b)^2 / sqrt(sum a^2 * sum b^2)
/// Symmetric in its arguments. Throws std::invalid_argument on a size
/// mismatch or when either image is identically zero.
double reconstruction_error(const Image& reference, const Image& candidate);

// File I/O. Supported inputs: binary PGM (P5, maxval 255) and 8-bit gray or
// RGB PNG. Color pixels become the unweighted mean of their three channels.
Image load_image(const std::filesystem::path& path);

/// Writes grayscale PGM or PNG, chosen by extension (".pgm" / ".png").
/// Values are rounded half away from zero, then clamped to [0, 255].
void save_image(const Image& image, const std::filesystem::path& path);

/// Eight-bit value written for an intensity.
std::uint8_t quantize(double value) noexcept;

/// Decodes an in-memory binary PGM. Exposed for tests.
Image decode_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const Image& image);

/// Gray conversion used by the loader: per-pixel mean of r, g, b.
double gray_from_rgb(double r, double g, double b) noexcept;

}  // namespace ggd
