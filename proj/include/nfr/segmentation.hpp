#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "nfr/errors.hpp"
#include "nfr/filter1d.hpp"
#include "nfr/image.hpp"
#include "nfr/rearrangement.hpp"

namespace nfr {

using Mask = std::vector<bool>;

/// Flat-region labelling of an image. Region 0 holds the brightest value.
template <typename Scalar>
struct Segmentation {
  IndexVector labels;               // per pixel
  VectorX<Scalar> region_values;    // strictly descending
  IndexVector region_masses;        // pixels per region
  Shape shape;

  Eigen::Index region_count() const { return region_values.size(); }

  Mask mask(Eigen::Index region) const {
    Mask m(static_cast<std::size_t>(labels.size()));
    for (Eigen::Index i = 0; i < labels.size(); ++i) m[static_cast<std::size_t>(i)] = labels[i] == region;
    return m;
  }
};

/// Groups consecutive entries of a filtered rearrangement into regions: a new region starts
/// whenever the gap to the previous entry exceeds merge_tol * dynamic_range. Returns the
/// region index of every entry.
template <typename Scalar>
IndexVector merge_levels(const Rearrangement<Scalar>& filtered, Scalar merge_tol, Scalar dynamic_range) {
  if (!(merge_tol >= 0)) throw InvalidArgument("merge tolerance must be nonnegative");
  const Scalar gap = merge_tol * dynamic_range;
  IndexVector region(filtered.size());
  Eigen::Index current = 0;
  region[0] = 0;
  for (Eigen::Index k = 1; k < filtered.size(); ++k) {
    if (std::abs(filtered.values()[k - 1] - filtered.values()[k]) > gap) ++current;
    region[k] = current;
  }
  return region;
}

/// Builds the segmentation of `levels` given the converged value of every level.
template <typename Scalar>
Segmentation<Scalar> label_regions(const LevelStructure<Scalar>& levels, const Rearrangement<Scalar>& filtered,
                                   Scalar merge_tol) {
  const Scalar range = levels.values.maxCoeff() - levels.values.minCoeff();
  const IndexVector region = merge_levels(filtered, merge_tol, range);
  const Eigen::Index count = region[region.size() - 1] + 1;

  Segmentation<Scalar> seg;
  seg.shape = levels.shape;
  seg.region_masses = IndexVector::Zero(count);
  VectorX<Scalar> weighted = VectorX<Scalar>::Zero(count);
  for (Eigen::Index k = 0; k < filtered.size(); ++k) {
    seg.region_masses[region[k]] += levels.masses[k];
    weighted[region[k]] += Scalar(levels.masses[k]) * filtered.values()[k];
  }
  seg.region_values = weighted.cwiseQuotient(seg.region_masses.template cast<Scalar>());
  seg.labels.resize(levels.pixel_count());
  for (Eigen::Index i = 0; i < levels.pixel_count(); ++i) seg.labels[i] = region[levels.pixel_level[i]];
  return seg;
}

/// Filters the image's rearrangement to convergence and reads regions off the flat levels.
template <typename Scalar>
Segmentation<Scalar> segment(const Image<Scalar>& img, const FilterConfig<Scalar>& cfg, Scalar merge_tol = Scalar(1e-3),
                             FilterTrace<Scalar>* trace_out = nullptr) {
  const auto [v0, levels] = decreasing_rearrangement(img);
  FilterTrace<Scalar> trace = iterate(v0, cfg);
  Segmentation<Scalar> seg = label_regions(levels, trace.final_iterate(), merge_tol);
  if (trace_out) *trace_out = std::move(trace);
  return seg;
}

/// 2|A ∩ B| / (|A| + |B|); two empty masks count as a perfect match.
inline double dice(const Mask& a, const Mask& b) {
  if (a.size() != b.size()) throw InvalidArgument("dice: mask sizes differ");
  std::size_t both = 0;
  std::size_t na = 0;
  std::size_t nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += a[i];
    nb += b[i];
    both += a[i] && b[i];
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

/// Positions on [0, |Ω|] where the discrete curvature of the rearrangement changes sign.
///
/// Curvature at entry i is the change of slope between its neighbours, slopes taken between
/// entry midpoints. A sign change between entries i and j (zero curvatures skipped) is
/// reported at the left edge of entry j. These mirror extrema of the histogram.
template <typename Scalar>
std::vector<Scalar> inflexion_points(const Rearrangement<Scalar>& v) {
  std::vector<Scalar> points;
  const Eigen::Index q = v.size();
  if (q < 3) return points;
  const VectorX<Scalar> starts = v.cumulative_starts();
  const VectorX<Scalar> centers = starts + v.masses() / Scalar(2);
  auto slope = [&](Eigen::Index i) { return (v.values()[i + 1] - v.values()[i]) / (centers[i + 1] - centers[i]); };

  int previous_sign = 0;
  for (Eigen::Index i = 1; i + 1 < q; ++i) {
    const Scalar curvature = slope(i) - slope(i - 1);
    const int sign = (curvature > 0) - (curvature < 0);
    if (sign == 0) continue;
    if (previous_sign != 0 && sign != previous_sign) points.push_back(starts[i]);
    previous_sign = sign;
  }
  return points;
}

}  // namespace nfr
