#pragma once

#include <string>
#include <vector>

#include "nfr/image.hpp"
#include "nfr/rearrangement.hpp"
#include "nfr/segmentation.hpp"

namespace nfr::csv {

/// Shortest round-trip text for a double (17 significant digits).
std::string format_real(double x);

/// cumulative_mass_start,mass,value
std::string rearrangement(const Rearrangement<double>& v);

/// value,mass (ascending value)
std::string histogram(const std::vector<HistogramBin<double>>& bins);

/// index,value; one row per sample in storage order.
std::string image_values(const Image<double>& img);

/// label,value,mass
std::string regions(const Segmentation<double>& seg);

/// Parses an index,value table back into flat samples (shape {N}).
Image<double> parse_image_values(const std::string& text, const std::string& origin);

}  // namespace nfr::csv
