#include "robustpr_cli/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <robustpr/errors.hpp>
#include <robustpr/instance_io.hpp>

namespace robustpr::cli {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(const std::string& bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const unsigned char c = static_cast<unsigned char>(bytes_[pos_]);
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) throw ParseError(std::string("PGM ") + what + " out of range");
      ++pos_;
    }
    if (pos_ == start) throw ParseError(std::string("PGM: expected ") + what);
    return value;
  }

  std::size_t& pos() { return pos_; }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage parse_pgm(const std::string& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
    throw ParseError("not a PGM file (expected magic P2 or P5)");
  GrayImage img;
  img.format = bytes[1] == '2' ? PgmFormat::Ascii : PgmFormat::Binary;
  HeaderReader reader(bytes);
  reader.pos() = 2;
  const long width = reader.number("width");
  const long height = reader.number("height");
  const long maxval = reader.number("maxval");
  if (width < 1 || height < 1) throw ParseError("PGM dimensions must be positive");
  if (maxval < 1 || maxval > 65535) throw ParseError("PGM maxval must lie in [1, 65535]");
  if (width * height > 100'000'000L) throw ParseError("PGM dimensions too large");
  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  img.maxval = static_cast<int>(maxval);
  const std::size_t count = static_cast<std::size_t>(width * height);
  img.pixels.resize(count);
  const auto scale = [&](long v) { return std::min(1.0, static_cast<double>(v) / static_cast<double>(maxval)); };

  if (img.format == PgmFormat::Ascii) {
    for (std::size_t k = 0; k < count; ++k) img.pixels[k] = scale(reader.number("pixel value"));
    return img;
  }
  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t pos = reader.pos();
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
    throw ParseError("PGM: missing separator before raster");
  ++pos;
  const std::size_t depth = maxval > 255 ? 2 : 1;
  if (bytes.size() - pos < count * depth) throw ParseError("PGM raster is truncated");
  for (std::size_t k = 0; k < count; ++k) {
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos + k * depth);
    const long v = depth == 2 ? (long{p[0]} << 8) | p[1] : long{p[0]};
    img.pixels[k] = scale(v);
  }
  return img;
}

std::string emit_pgm(const GrayImage& img) {
  if (img.width < 1 || img.height < 1 || img.maxval < 1 || img.maxval > 65535 ||
      img.pixels.size() != static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height))
    throw InvalidArgument("inconsistent image");
  const auto level = [&](double v) {
    if (!std::isfinite(v)) v = 0.0;
    return static_cast<long>(std::lround(std::clamp(v, 0.0, 1.0) * img.maxval));
  };
  std::ostringstream out;
  out << (img.format == PgmFormat::Ascii ? "P2" : "P5") << '\n'
      << img.width << ' ' << img.height << '\n'
      << img.maxval << '\n';
  if (img.format == PgmFormat::Ascii) {
    for (int r = 0; r < img.height; ++r) {
      for (int c = 0; c < img.width; ++c) {
        if (c) out << ' ';
        out << level(img.pixels[static_cast<std::size_t>(r) * img.width + c]);
      }
      out << '\n';
    }
  } else {
    for (double v : img.pixels) {
      const long l = level(v);
      if (img.maxval > 255) out.put(static_cast<char>((l >> 8) & 0xff));
      out.put(static_cast<char>(l & 0xff));
    }
  }
  return out.str();
}

GrayImage read_pgm(const std::filesystem::path& path) { return parse_pgm(read_text_file(path)); }

void write_pgm(const std::filesystem::path& path, const GrayImage& image) { write_text_file(path, emit_pgm(image)); }

RealVector image_to_signal(const GrayImage& image) {
  return Eigen::Map<const RealVector>(image.pixels.data(), static_cast<Index>(image.pixels.size()));
}

GrayImage signal_to_image(const RealVector& x, const GrayImage& like) {
  if (x.size() != static_cast<Index>(like.pixels.size())) throw InvalidArgument("signal length does not match image");
  GrayImage out = like;
  for (Index k = 0; k < x.size(); ++k) out.pixels[static_cast<std::size_t>(k)] = std::clamp(x[k], 0.0, 1.0);
  return out;
}

}  // namespace robustpr::cli
