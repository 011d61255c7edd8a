#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "ggd/image.hpp"

namespace ggd {

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

Image square_or_throw(std::size_t width, std::size_t height, std::vector<double> values) {
  if (width != height)
    throw ImageIoError("non-square image (" + std::to_string(width) + "x" +
                       std::to_string(height) + ")");
  if (width == 0) throw ImageIoError("empty image");
  return Image(width, std::move(values));
}

// Minimal PGM header tokenizer: whitespace separated, '#' comments to EOL.
class PgmHeader {
 public:
  explicit PgmHeader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::string token() {
    skip_space_and_comments();
    std::string out;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) out.push_back(char(bytes_[pos_++]));
    if (out.empty()) throw ImageIoError("truncated PGM header");
    return out;
  }

  std::size_t number() {
    const std::string t = token();
    if (!std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit((unsigned char)c); }))
      throw ImageIoError("malformed PGM header field '" + t + "'");
    return std::stoul(t);
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() const { return pos_ + 1; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

Image load_png(const std::filesystem::path& path) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.string().c_str()))
    throw ImageIoError("cannot read PNG " + path.string() + ": " + img.message);

  const auto fail = [&](const std::string& what) {
    png_image_free(&img);
    throw ImageIoError(what + ": " + path.string());
  };
  if (img.format & PNG_FORMAT_FLAG_LINEAR) fail("16-bit PNG not supported");
  if (img.format & PNG_FORMAT_FLAG_ALPHA) fail("PNG with alpha channel not supported");

  const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buffer.data(), 0, nullptr))
    throw ImageIoError("cannot decode PNG " + path.string() + ": " + img.message);

  const std::size_t w = img.width, h = img.height;
  std::vector<double> values(w * h);
  if (color) {
    for (std::size_t k = 0; k < values.size(); ++k)
      values[k] = gray_from_rgb(buffer[3 * k], buffer[3 * k + 1], buffer[3 * k + 2]);
  } else {
    std::copy(buffer.begin(), buffer.end(), values.begin());
  }
  return square_or_throw(w, h, std::move(values));
}

void save_png(const Image& image, const std::filesystem::path& path) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.side());
  img.height = static_cast<png_uint_32>(image.side());
  img.format = PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(image.pixel_count());
  std::transform(image.values().begin(), image.values().end(), buffer.begin(), quantize);
  if (!png_image_write_to_file(&img, path.string().c_str(), 0, buffer.data(), 0, nullptr))
    throw ImageIoError("cannot write PNG " + path.string() + ": " + img.message);
}

}  // namespace

Image decode_pgm(std::span<const std::uint8_t> bytes) {
  PgmHeader header(bytes);
  const std::string magic = header.token();
  if (magic != "P5") throw ImageIoError("unsupported PGM variant '" + magic + "' (need P5)");
  const std::size_t width = header.number();
  const std::size_t height = header.number();
  const std::size_t maxval = header.number();
  if (maxval != 255) throw ImageIoError("unsupported PGM maxval " + std::to_string(maxval));
  const std::size_t offset = header.raster_offset();
  if (offset > bytes.size() || bytes.size() - offset < width * height)
    throw ImageIoError("truncated PGM raster");
  std::vector<double> values(bytes.begin() + offset, bytes.begin() + offset + width * height);
  return square_or_throw(width, height, std::move(values));
}

std::vector<std::uint8_t> encode_pgm(const Image& image) {
  const std::string header =
      "P5\n" + std::to_string(image.side()) + " " + std::to_string(image.side()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + image.pixel_count());
  for (double v : image.values()) out.push_back(quantize(v));
  return out;
}

Image load_image(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return load_png(path);
  if (ext == ".pgm") return decode_pgm(read_file(path));
  throw ImageIoError("unsupported image format '" + ext + "' (expected .pgm or .png)");
}

void save_image(const Image& image, const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") {
    save_png(image, path);
  } else if (ext == ".pgm") {
    const auto bytes = encode_pgm(image);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ImageIoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw ImageIoError("write failed: " + path.string());
  } else {
    throw ImageIoError("unsupported image format '" + ext + "' (expected .pgm or .png)");
  }
}

}  // namespace ggd
