#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "nfr/image.hpp"
#include "nfr/noise_metrics.hpp"
#include "nfr/rearrangement.hpp"
#include "nfr/synthetic.hpp"

namespace nfr::testing {

inline bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

/// Random rearrangement with `q` strictly decreasing values in [0, 255] and integer masses.
inline Rearrangement<double> random_rearrangement(int q, std::uint64_t seed, int max_mass = 20) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> value(0.0, 255.0);
  std::uniform_int_distribution<int> mass(1, max_mass);
  std::vector<double> vals(static_cast<std::size_t>(q));
  for (auto& v : vals) v = value(rng);
  std::sort(vals.begin(), vals.end(), std::greater<>());
  VectorX<double> values = Eigen::Map<VectorX<double>>(vals.data(), q);
  VectorX<double> masses(q);
  for (int i = 0; i < q; ++i) masses[i] = mass(rng);
  return Rearrangement<double>(values, masses);
}

/// Squares at SNR 10, rounded and clamped to the 8-bit grid (what a PGM round trip yields).
inline Image<double> noisy_squares(Eigen::Index size, std::uint64_t seed, double snr = 10.0) {
  const Image<double> clean = synthetic::squares<double>(size);
  return quantize(add_gaussian_noise(clean, NoiseSpec{snr, seed}), 0.0, 255.0, 256);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::path(NFR_SCRATCH_DIR) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace nfr::testing
