#include "nfr/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "nfr/errors.hpp"

namespace nfr {

namespace {

class HeaderReader {
public:
  HeaderReader(std::string_view bytes, const std::string& origin) : bytes_(bytes), origin_(origin) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long read_int(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000) throw IoError(origin_, std::string("PGM ") + what + " is too large");
      ++pos_;
    }
    if (pos_ == start) throw IoError(origin_, std::string("PGM header: missing ") + what);
    return value;
  }

  std::size_t& pos() { return pos_; }

private:
  std::string_view bytes_;
  const std::string& origin_;
  std::size_t pos_ = 0;
};

}  // namespace

Pgm parse_pgm(std::string_view bytes, const std::string& origin) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw IoError(origin, "not a binary PGM (missing P5 magic)");
  }
  HeaderReader header(bytes.substr(2), origin);
  const long cols = header.read_int("width");
  const long rows = header.read_int("height");
  const long maxval = header.read_int("maxval");
  if (cols <= 0 || rows <= 0) throw IoError(origin, "PGM dimensions must be positive");
  if (maxval <= 0 || maxval > 65535) throw IoError(origin, "PGM maxval must be in [1, 65535]");

  std::size_t pos = 2 + header.pos();
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw IoError(origin, "PGM header must end with a single whitespace byte");
  }
  ++pos;

  const std::size_t bytes_per_sample = maxval < 256 ? 1 : 2;
  const auto count = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  if (bytes.size() - pos < count * bytes_per_sample) {
    throw IoError(origin, "PGM data truncated: expected " + std::to_string(count * bytes_per_sample) + " bytes, found " +
                              std::to_string(bytes.size() - pos));
  }

  VectorX<double> data(static_cast<Eigen::Index>(count));
  const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
  for (std::size_t i = 0; i < count; ++i) {
    unsigned value = bytes_per_sample == 1 ? raw[i] : (unsigned(raw[2 * i]) << 8) | raw[2 * i + 1];
    if (value > static_cast<unsigned>(maxval)) throw IoError(origin, "PGM sample exceeds maxval");
    data[static_cast<Eigen::Index>(i)] = static_cast<double>(value);
  }
  return Pgm{Image<double>(std::move(data), Shape{rows, cols}), static_cast<int>(maxval)};
}

std::string encode_pgm(const Image<double>& img, int maxval) {
  if (img.dimension() != 2) throw UnsupportedDimension("PGM output requires a 2D image");
  if (maxval <= 0 || maxval > 65535) throw InvalidArgument("PGM maxval must be in [1, 65535]");
  std::ostringstream out;
  out << "P5\n" << img.cols() << ' ' << img.rows() << '\n' << maxval << '\n';
  std::string bytes = out.str();
  const bool wide = maxval >= 256;
  bytes.reserve(bytes.size() + static_cast<std::size_t>(img.size()) * (wide ? 2 : 1));
  for (Eigen::Index i = 0; i < img.size(); ++i) {
    const auto v = static_cast<unsigned>(std::clamp(std::round(img[i]), 0.0, static_cast<double>(maxval)));
    if (wide) bytes.push_back(static_cast<char>(v >> 8));
    bytes.push_back(static_cast<char>(v & 0xFF));
  }
  return bytes;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(path, "read failed");
  return bytes;
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(path, "write failed");
}

Pgm read_pgm(const std::string& path) { return parse_pgm(read_file(path), path); }

void write_pgm(const std::string& path, const Image<double>& img, int maxval) {
  write_file(path, encode_pgm(img, maxval));
}

}  // namespace nfr
