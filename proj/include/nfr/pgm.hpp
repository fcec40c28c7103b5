#pragma once

#include <string>
#include <string_view>

#include "nfr/image.hpp"

namespace nfr {

/// Binary greymap (P5), 8- or 16-bit (big-endian) samples.
struct Pgm {
  Image<double> image;  // shape {rows, cols}
  int maxval = 255;
};

/// Parses P5 bytes; header comments are skipped. `origin` names the source in errors.
Pgm parse_pgm(std::string_view bytes, const std::string& origin = "<memory>");

/// Canonical encoding: "P5\n<cols> <rows>\n<maxval>\n" followed by the samples, each rounded
/// to the nearest integer and clamped to [0, maxval].
std::string encode_pgm(const Image<double>& img, int maxval = 255);

Pgm read_pgm(const std::string& path);
void write_pgm(const std::string& path, const Image<double>& img, int maxval = 255);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace nfr
