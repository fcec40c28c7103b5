#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <algorithm>
#include <random>
#include <vector>

#include "nfr/errors.hpp"
#include "nfr/image.hpp"
#include "nfr/segmentation.hpp"

namespace nfr::synthetic {

/// Intensities of the four-level test image, brightest first.
inline constexpr double kSquaresLevels[4] = {255.0, 170.0, 85.0, 0.0};

/// size x size image split into four equal quadrants at 255 (top-left), 170 (top-right),
/// 85 (bottom-left) and 0 (bottom-right). size must be even.
template <typename Scalar = double>
Image<Scalar> squares(Eigen::Index size) {
  if (size < 2 || size % 2 != 0) throw InvalidArgument("squares: size must be a positive even number");
  typename Image<Scalar>::RowMajorMatrix m(size, size);
  const Eigen::Index half = size / 2;
  for (Eigen::Index r = 0; r < size; ++r) {
    for (Eigen::Index c = 0; c < size; ++c) {
      const int quadrant = (r >= half ? 2 : 0) + (c >= half ? 1 : 0);
      m(r, c) = static_cast<Scalar>(kSquaresLevels[quadrant]);
    }
  }
  return Image<Scalar>::from_matrix(m);
}

/// Ground-truth mask of quadrant `level` (index into kSquaresLevels).
inline Mask squares_mask(Eigen::Index size, int level) {
  const Image<double> img = squares<double>(size);
  Mask mask(static_cast<std::size_t>(img.size()));
  for (Eigen::Index i = 0; i < img.size(); ++i) mask[static_cast<std::size_t>(i)] = img[i] == kSquaresLevels[level];
  return mask;
}

/// Horizontal ramp from 0 to 255: a near-uniform intensity distribution.
template <typename Scalar = double>
Image<Scalar> ramp(Eigen::Index rows, Eigen::Index cols) {
  typename Image<Scalar>::RowMajorMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = std::round(Scalar(255) * Scalar(c) / Scalar(std::max<Eigen::Index>(1, cols - 1)));
    }
  }
  return Image<Scalar>::from_matrix(m);
}

/// Sinusoidal grating, a stand-in for a texture with a continuous, non-uniform histogram.
template <typename Scalar = double>
Image<Scalar> texture(Eigen::Index rows, Eigen::Index cols, Scalar period = 16) {
  typename Image<Scalar>::RowMajorMatrix m(rows, cols);
  const Scalar w = 2 * std::numbers::pi_v<Scalar> / period;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = std::round(Scalar(127.5) + Scalar(100) * std::sin(w * Scalar(c)) * std::cos(Scalar(0.5) * w * Scalar(r)));
    }
  }
  return Image<Scalar>::from_matrix(m);
}

/// Integer image with values drawn uniformly from `levels` evenly spread values in [0, 255].
template <typename Scalar = double>
Image<Scalar> random_levels(const Shape& shape, int levels, std::uint64_t seed) {
  if (levels < 1 || levels > 256) throw InvalidArgument("random_levels: levels must be in [1, 256]");
  std::mt19937_64 rng(seed);
  VectorX<Scalar> data(shape_size(shape));
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const auto k = static_cast<int>(rng() % static_cast<std::uint64_t>(levels));
    data[i] = levels == 1 ? Scalar(0) : std::round(Scalar(255) * Scalar(k) / Scalar(levels - 1));
  }
  return Image<Scalar>(std::move(data), shape);
}

}  // namespace nfr::synthetic

namespace nfr::synthetic {

/// Image in which every one of `levels` integer values 0..levels-1 occurs at least once,
/// the remaining pixels drawn uniformly. Needs shape_size(shape) >= levels.
template <typename Scalar = double>
Image<Scalar> exact_levels(const Shape& shape, int levels, std::uint64_t seed) {
  const Eigen::Index n = shape_size(shape);
  if (levels < 1 || n < levels) throw InvalidArgument("exact_levels: need 1 <= levels <= pixel count");
  std::mt19937_64 rng(seed);
  std::vector<Scalar> data(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    data[static_cast<std::size_t>(i)] =
        i < levels ? Scalar(i) : Scalar(rng() % static_cast<std::uint64_t>(levels));
  }
  std::shuffle(data.begin(), data.end(), rng);
  return Image<Scalar>(Eigen::Map<const VectorX<Scalar>>(data.data(), n), shape);
}

}  // namespace nfr::synthetic
