#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "nfr/errors.hpp"
#include "nfr/image.hpp"

namespace nfr {

using IndexVector = Eigen::Matrix<Eigen::Index, Eigen::Dynamic, 1>;

/// Piecewise-constant non-increasing function on [0, |Ω|].
///
/// Entry k holds value `values[k]` on the interval [C_k, C_k + masses[k]) where C_k is the
/// cumulative mass of the entries before it. One entry per distinct level of the source
/// image; masses need not be integers (sampled continuous functions use |Ω|/M per sample).
template <typename Scalar>
class Rearrangement {
public:
  Rearrangement() = default;

  Rearrangement(VectorX<Scalar> values, VectorX<Scalar> masses)
      : values_(std::move(values)), masses_(std::move(masses)) {
    if (values_.size() == 0) throw InvalidArgument("rearrangement needs at least one entry");
    if (values_.size() != masses_.size()) throw InvalidArgument("values and masses differ in length");
    if (!(masses_.array() > Scalar(0)).all()) throw InvalidArgument("rearrangement masses must be positive");
    if (!values_.allFinite()) throw InvalidArgument("rearrangement values must be finite");
  }

  static Rearrangement constant(Scalar value, Scalar measure) {
    return Rearrangement(VectorX<Scalar>::Constant(1, value), VectorX<Scalar>::Constant(1, measure));
  }

  const VectorX<Scalar>& values() const { return values_; }
  const VectorX<Scalar>& masses() const { return masses_; }
  Eigen::Index size() const { return values_.size(); }
  Scalar total_mass() const { return masses_.sum(); }

  /// Same partition, new values.
  Rearrangement with_values(VectorX<Scalar> values) const {
    if (values.size() != values_.size()) throw InvalidArgument("value count does not match partition");
    return Rearrangement(std::move(values), masses_);
  }

  /// Left endpoint of every entry's interval.
  VectorX<Scalar> cumulative_starts() const {
    VectorX<Scalar> starts(size());
    Scalar acc = 0;
    for (Eigen::Index k = 0; k < size(); ++k) {
      starts[k] = acc;
      acc += masses_[k];
    }
    return starts;
  }

  /// u_*(s) = inf{q : m(q) <= s}; right-continuous. Endpoints clamp to the first/last entry.
  Scalar evaluate(Scalar s) const {
    Scalar acc = 0;
    for (Eigen::Index k = 0; k < size(); ++k) {
      acc += masses_[k];
      if (s < acc) return values_[k];
    }
    return values_[size() - 1];
  }

  bool is_non_increasing() const {
    for (Eigen::Index k = 1; k < size(); ++k) {
      if (values_[k] > values_[k - 1]) return false;
    }
    return true;
  }

  bool same_partition(const Rearrangement& other) const {
    return masses_.size() == other.masses_.size() && masses_ == other.masses_;
  }

  Scalar sup_norm() const { return values_.cwiseAbs().maxCoeff(); }

  /// L^p norm over [0, |Ω|]; p = infinity gives the sup norm.
  Scalar lp_norm(Scalar p) const {
    if (std::isinf(p)) return sup_norm();
    return std::pow((values_.cwiseAbs().array().pow(p) * masses_.array()).sum(), Scalar(1) / p);
  }

  /// Mass-weighted mean value, i.e. |Ω|^{-1} times the integral of u_*.
  Scalar mean() const { return values_.dot(masses_) / total_mass(); }

private:
  VectorX<Scalar> values_;
  VectorX<Scalar> masses_;
};

/// Level-set structure of an image: distinct values (strictly descending), their pixel
/// counts, and each pixel's level index. Filtering never refines this partition.
template <typename Scalar>
struct LevelStructure {
  VectorX<Scalar> values;
  IndexVector masses;
  IndexVector pixel_level;
  Shape shape;

  Eigen::Index level_count() const { return values.size(); }
  Eigen::Index pixel_count() const { return pixel_level.size(); }

  /// Boolean mask of the pixels in level `k`.
  std::vector<bool> level_mask(Eigen::Index k) const {
    std::vector<bool> mask(static_cast<std::size_t>(pixel_count()));
    for (Eigen::Index i = 0; i < pixel_count(); ++i) mask[static_cast<std::size_t>(i)] = pixel_level[i] == k;
    return mask;
  }
};

template <typename Scalar>
struct Rearranged {
  Rearrangement<Scalar> rearrangement;
  LevelStructure<Scalar> levels;
};

/// m_u(q): number of samples strictly greater than q.
template <typename Scalar>
Eigen::Index distribution_function(const Image<Scalar>& img, Scalar q) {
  return (img.data().array() > q).count();
}

/// Same quantity read off a rearrangement (mass of entries strictly above q).
template <typename Scalar>
Scalar distribution_function(const Rearrangement<Scalar>& v, Scalar q) {
  return (v.values().array() > q).select(v.masses(), Scalar(0)).sum();
}

template <typename Scalar>
Rearranged<Scalar> decreasing_rearrangement(const Image<Scalar>& img) {
  const auto& data = img.data();
  const Eigen::Index n = data.size();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return data[a] > data[b]; });

  std::vector<Scalar> values;
  std::vector<Eigen::Index> counts;
  LevelStructure<Scalar> levels;
  levels.pixel_level.resize(n);
  levels.shape = img.shape();
  for (Eigen::Index pos = 0; pos < n; ++pos) {
    const Eigen::Index pixel = order[static_cast<std::size_t>(pos)];
    if (values.empty() || data[pixel] != values.back()) {
      values.push_back(data[pixel]);
      counts.push_back(0);
    }
    ++counts.back();
    levels.pixel_level[pixel] = static_cast<Eigen::Index>(values.size()) - 1;
  }

  const auto q = static_cast<Eigen::Index>(values.size());
  levels.values = Eigen::Map<const VectorX<Scalar>>(values.data(), q);
  levels.masses = Eigen::Map<const IndexVector>(counts.data(), q);
  Rearrangement<Scalar> v(levels.values, levels.masses.template cast<Scalar>());
  return {std::move(v), std::move(levels)};
}

/// Image whose pixel i takes new_values[levels.pixel_level[i]].
template <typename Scalar, typename Derived>
Image<Scalar> reconstruct(const LevelStructure<Scalar>& levels, const Eigen::MatrixBase<Derived>& new_values) {
  if (new_values.size() != levels.level_count()) {
    throw InvalidArgument("reconstruct: expected " + std::to_string(levels.level_count()) + " level values, got " +
                          std::to_string(new_values.size()));
  }
  VectorX<Scalar> data(levels.pixel_count());
  for (Eigen::Index i = 0; i < levels.pixel_count(); ++i) data[i] = new_values[levels.pixel_level[i]];
  return Image<Scalar>(std::move(data), levels.shape);
}

template <typename Scalar>
Image<Scalar> reconstruct(const LevelStructure<Scalar>& levels, const Rearrangement<Scalar>& filtered) {
  return reconstruct(levels, filtered.values());
}

template <typename Scalar>
struct HistogramBin {
  Scalar value;
  Eigen::Index mass;

  bool operator==(const HistogramBin&) const = default;
};

/// h_u(q) = |{u = q}| for every occurring q, ascending by value.
template <typename Scalar>
std::vector<HistogramBin<Scalar>> histogram(const Image<Scalar>& img) {
  std::vector<Scalar> sorted(img.data().data(), img.data().data() + img.size());
  std::sort(sorted.begin(), sorted.end());
  std::vector<HistogramBin<Scalar>> bins;
  for (Scalar x : sorted) {
    if (bins.empty() || bins.back().value != x) bins.push_back({x, 0});
    ++bins.back().mass;
  }
  return bins;
}

/// Snap every sample to the nearest of `bins` equally spaced values spanning [lo, hi],
/// clamping out-of-range samples. quantize(img, 0, 255, 256) is round-and-clamp to 8 bits.
template <typename Scalar>
Image<Scalar> quantize(const Image<Scalar>& img, Scalar lo, Scalar hi, int bins) {
  if (bins < 2 || !(hi > lo)) throw InvalidArgument("quantize: need bins >= 2 and hi > lo");
  const Scalar step = (hi - lo) / Scalar(bins - 1);
  VectorX<Scalar> out = img.data().unaryExpr([&](Scalar x) {
    const Scalar k = std::clamp(std::round((x - lo) / step), Scalar(0), Scalar(bins - 1));
    return lo + k * step;
  });
  return img.with_data(std::move(out));
}

}  // namespace nfr
