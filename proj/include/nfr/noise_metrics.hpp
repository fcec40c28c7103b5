#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "nfr/errors.hpp"
#include "nfr/image.hpp"

namespace nfr {

struct NoiseSpec {
  double snr = 10.0;
  std::uint64_t seed = 0;
};

/// Population standard deviation of the samples.
template <typename Derived>
typename Derived::Scalar empirical_std(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Scalar mean = x.mean();
  return std::sqrt((x.array() - mean).square().sum() / Scalar(x.size()));
}

/// Standard normal stream: Box-Muller (cosine and sine branch, in that order) over
/// std::mt19937_64, uniforms taken from the top 53 bits of each draw. The engine's output
/// sequence is fixed by the C++ standard, so streams match across standard libraries.
class GaussianStream {
public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] keeps the logarithm finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

private:
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Adds i.i.d. N(0, (sigma(img) / snr)^2) noise; the result is neither clamped nor rounded.
template <typename Scalar>
Image<Scalar> add_gaussian_noise(const Image<Scalar>& img, const NoiseSpec& spec) {
  if (!(spec.snr > 0)) throw InvalidArgument("snr must be positive");
  const Scalar sigma = empirical_std(img.data());
  if (!(sigma > 0)) throw InvalidArgument("add_gaussian_noise: constant image, SNR is undefined");
  const Scalar noise_std = sigma / static_cast<Scalar>(spec.snr);
  GaussianStream gauss(spec.seed);
  VectorX<Scalar> out = img.data();
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += noise_std * static_cast<Scalar>(gauss.next());
  return img.with_data(std::move(out));
}

template <typename Scalar>
Scalar rmse(const Image<Scalar>& a, const Image<Scalar>& b) {
  require_same_shape(a, b, "rmse");
  return std::sqrt((a.data() - b.data()).squaredNorm() / Scalar(a.size()));
}

/// sigma(clean) / sigma(noisy - clean).
template <typename Scalar>
Scalar snr_measure(const Image<Scalar>& clean, const Image<Scalar>& noisy) {
  require_same_shape(clean, noisy, "snr_measure");
  const VectorX<Scalar> noise = noisy.data() - clean.data();
  return empirical_std(clean.data()) / empirical_std(noise);
}

template <typename Scalar>
Image<Scalar> clamp(const Image<Scalar>& img, Scalar lo, Scalar hi) {
  return img.with_data(img.data().cwiseMax(lo).cwiseMin(hi));
}

}  // namespace nfr
