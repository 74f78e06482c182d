#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <robustpr/signal.hpp>

namespace robustpr::cli {

enum class PgmFormat { Ascii, Binary };  // P2, P5

/// Grayscale image with pixels scaled to [0,1] by the file's maxval.
struct GrayImage {
  int width = 0;
  int height = 0;
  int maxval = 255;
  PgmFormat format = PgmFormat::Binary;
  std::vector<double> pixels;  ///< row-major, width * height
};

/// Accepts P2 and P5 with maxval in [1, 65535]; samples above maxval clamp to 1.
/// Throws ParseError on anything else.
GrayImage parse_pgm(const std::string& bytes);
std::string emit_pgm(const GrayImage& image);

GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

/// Flattened row-major real signal.
RealVector image_to_signal(const GrayImage& image);
/// Inverse of image_to_signal with clamping to [0,1].
GrayImage signal_to_image(const RealVector& x, const GrayImage& like);

}  // namespace robustpr::cli
