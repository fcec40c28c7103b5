#include "nfr/csv.hpp"

#include <cstdio>
#include <sstream>

#include "nfr/errors.hpp"

namespace nfr::csv {

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string rearrangement(const Rearrangement<double>& v) {
  std::string out = "cumulative_mass_start,mass,value\n";
  const VectorX<double> starts = v.cumulative_starts();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    out += format_real(starts[k]) + ',' + format_real(v.masses()[k]) + ',' + format_real(v.values()[k]) + '\n';
  }
  return out;
}

std::string histogram(const std::vector<HistogramBin<double>>& bins) {
  std::string out = "value,mass\n";
  for (const auto& bin : bins) out += format_real(bin.value) + ',' + std::to_string(bin.mass) + '\n';
  return out;
}

std::string image_values(const Image<double>& img) {
  std::string out = "index,value\n";
  for (Eigen::Index i = 0; i < img.size(); ++i) out += std::to_string(i) + ',' + format_real(img[i]) + '\n';
  return out;
}

std::string regions(const Segmentation<double>& seg) {
  std::string out = "label,value,mass\n";
  for (Eigen::Index r = 0; r < seg.region_count(); ++r) {
    out += std::to_string(r) + ',' + format_real(seg.region_values[r]) + ',' + std::to_string(seg.region_masses[r]) +
           '\n';
  }
  return out;
}

Image<double> parse_image_values(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "index,value") throw IoError(origin, "expected header 'index,value'");
  std::vector<double> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("missing comma");
      if (std::stoul(line.substr(0, comma)) != values.size()) throw std::invalid_argument("index out of order");
      values.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception& e) {
      throw IoError(origin, "row " + std::to_string(row) + ": " + e.what());
    }
  }
  if (values.empty()) throw IoError(origin, "no samples");
  const auto n = static_cast<Eigen::Index>(values.size());
  return Image<double>(Eigen::Map<const VectorX<double>>(values.data(), n), Shape{n});
}

}  // namespace nfr::csv
