#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "nfr/errors.hpp"
#include "nfr/filter1d.hpp"
#include "nfr/image.hpp"
#include "nfr/kernels.hpp"
#include "nfr/parallel.hpp"
#include "nfr/rearrangement.hpp"

namespace nfr {

// Pixel-domain filters. direct_nf is the brute-force twin of the 1D engine; bilateral and
// nlm are the comparison baselines. All of them favour clarity over speed.

struct SpatialConfig {
  double rho = 1.0;                       // bilateral spatial scale / NLM patch Gaussian std
  int patch_radius = 1;                   // NLM patch half-width
  std::optional<int> window_radius;       // spatial truncation; defaults per filter

  void validate() const {
    if (!(rho > 0)) throw InvalidArgument("rho must be positive");
    if (patch_radius < 0) throw InvalidArgument("patch radius must be nonnegative");
    if (window_radius && *window_radius < 1) throw InvalidArgument("window radius must be at least 1");
  }

  int bilateral_window() const { return window_radius.value_or(static_cast<int>(std::ceil(3.0 * rho))); }
  int nlm_window() const { return window_radius.value_or(10); }
};

/// One direct NF step: every pixel averages the whole image, weighted by K_h(w(x) - w(y)).
template <typename Scalar>
Image<Scalar> direct_nf_step(const Image<Scalar>& weights, const Image<Scalar>& values, const Kernel<Scalar>& k,
                             std::uint64_t* evaluations = nullptr) {
  require_same_shape(weights, values, "direct_nf_step");
  const Eigen::Index n = values.size();
  const auto& w = weights.data();
  const auto& u = values.data();
  const Scalar lo = u.minCoeff();
  const Scalar hi = u.maxCoeff();

  VectorX<Scalar> out(n);
  parallel_for<Eigen::Index>(0, n, 16, [&](Eigen::Index x0, Eigen::Index x1) {
    for (Eigen::Index x = x0; x < x1; ++x) {
      Scalar num = 0;
      Scalar den = 0;
      for (Eigen::Index y = 0; y < n; ++y) {
        const Scalar kw = k(w[x] - w[y]);
        num += kw * u[y];
        den += kw;
      }
      out[x] = std::clamp(num / den, lo, hi);
    }
  });

  // With the Gaussian and values ordered like the weights, the exact step preserves that order;
  // pixels whose levels have merged numerically can still come out an ulp apart the wrong way.
  if (k.is_gaussian()) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return w[a] < w[b] || (w[a] == w[b] && u[a] < u[b]);
    });
    bool ordered = true;
    for (std::size_t i = 1; i < order.size() && ordered; ++i) ordered = u[order[i - 1]] <= u[order[i]];
    if (ordered) {
      for (std::size_t i = 1; i < order.size(); ++i) out[order[i]] = std::max(out[order[i]], out[order[i - 1]]);
    }
  }

  if (evaluations) *evaluations += static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n);
  return values.with_data(std::move(out));
}

/// Iterated direct NF; the fixed scheme keeps the input image as kernel weights.
template <typename Scalar>
Image<Scalar> direct_nf(const Image<Scalar>& img, const Kernel<Scalar>& k, int iterations,
                        Scheme scheme = Scheme::varying_kernel, std::uint64_t* evaluations = nullptr) {
  if (iterations < 0) throw InvalidArgument("direct_nf: iterations must be nonnegative");
  Image<Scalar> current = img;
  for (int n = 0; n < iterations; ++n) {
    current = direct_nf_step(scheme == Scheme::varying_kernel ? current : img, current, k, evaluations);
  }
  return current;
}

/// Direct NF step that visits histogram bins instead of pixels: N * Q kernel evaluations.
template <typename Scalar>
Image<Scalar> direct_nf_step_histogram(const Image<Scalar>& img, const Kernel<Scalar>& k,
                                       std::uint64_t* evaluations = nullptr) {
  const auto bins = histogram(img);
  const auto q = static_cast<Eigen::Index>(bins.size());
  VectorX<Scalar> level(q);
  VectorX<Scalar> count(q);
  for (Eigen::Index b = 0; b < q; ++b) {
    level[b] = bins[static_cast<std::size_t>(b)].value;
    count[b] = static_cast<Scalar>(bins[static_cast<std::size_t>(b)].mass);
  }
  const auto& u = img.data();
  VectorX<Scalar> out(img.size());
  parallel_for<Eigen::Index>(0, img.size(), 256, [&](Eigen::Index x0, Eigen::Index x1) {
    for (Eigen::Index x = x0; x < x1; ++x) {
      Scalar num = 0;
      Scalar den = 0;
      for (Eigen::Index b = 0; b < q; ++b) {
        const Scalar kw = k(u[x] - level[b]) * count[b];
        num += kw * level[b];
        den += kw;
      }
      out[x] = std::clamp(num / den, level[0], level[q - 1]);
    }
  });
  if (evaluations) *evaluations += static_cast<std::uint64_t>(img.size()) * static_cast<std::uint64_t>(q);
  return img.with_data(std::move(out));
}

/// J over all pixel pairs, the brute-force counterpart of functional_j.
template <typename Scalar>
Scalar functional_j_direct(const Image<Scalar>& img, const Kernel<Scalar>& k) {
  const auto& u = img.data();
  const Kernel<Scalar> unit = k.rescaled(Scalar(1));
  const Scalar inv_h2 = Scalar(1) / (k.h() * k.h());
  Scalar total = 0;
  for (Eigen::Index x = 0; x < u.size(); ++x) {
    Scalar row = 0;
    for (Eigen::Index y = 0; y < u.size(); ++y) {
      const Scalar d = u[x] - u[y];
      row += g_primitive(unit, d * d * inv_h2);
    }
    total += row;
  }
  return total;
}

/// Bilateral filter on a 2D image: weights K_h(u(x) - u(y)) exp(-|x - y|^2 / rho^2) over a
/// square window of radius ceil(3 rho) (clipped at the image border), normalised per pixel.
template <typename Scalar>
Image<Scalar> bilateral(const Image<Scalar>& img, const Kernel<Scalar>& k, const SpatialConfig& sp,
                        int iterations = 1) {
  if (img.dimension() != 2) throw UnsupportedDimension("bilateral: only 2D images are supported");
  sp.validate();
  const int radius = sp.bilateral_window();
  const Scalar inv_rho2 = Scalar(1) / Scalar(sp.rho * sp.rho);

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> spatial(2 * radius + 1, 2 * radius + 1);
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      spatial(dy + radius, dx + radius) = std::exp(-Scalar(dx * dx + dy * dy) * inv_rho2);
    }
  }

  Image<Scalar> current = img;
  for (int it = 0; it < iterations; ++it) {
    const auto u = current.as_matrix();
    const Eigen::Index rows = u.rows();
    const Eigen::Index cols = u.cols();
    const Scalar lo = u.minCoeff();
    const Scalar hi = u.maxCoeff();
    typename Image<Scalar>::RowMajorMatrix out(rows, cols);
    parallel_for<Eigen::Index>(0, rows, 4, [&](Eigen::Index r0, Eigen::Index r1) {
      for (Eigen::Index r = r0; r < r1; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
          Scalar num = 0;
          Scalar den = 0;
          for (Eigen::Index y = std::max<Eigen::Index>(0, r - radius); y <= std::min(rows - 1, r + radius); ++y) {
            for (Eigen::Index x = std::max<Eigen::Index>(0, c - radius); x <= std::min(cols - 1, c + radius); ++x) {
              const Scalar wgt = k(u(r, c) - u(y, x)) * spatial(y - r + radius, x - c + radius);
              num += wgt * u(y, x);
              den += wgt;
            }
          }
          out(r, c) = std::clamp(num / den, lo, hi);
        }
      }
    });
    current = Image<Scalar>::from_matrix(out);
  }
  return current;
}

namespace detail {

// Half-sample symmetric reflection: ... b a | a b c | c b ...
inline Eigen::Index mirror_index(Eigen::Index i, Eigen::Index n) {
  const Eigen::Index period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

}  // namespace detail

/// Nonlocal means on a 2D image. Patch distance is the Gaussian-weighted (std rho, normalised
/// over the patch) squared difference with mirror extension; weights are K_h(sqrt(d^2)) over a
/// search window of radius window_radius (default 10), clipped at the border.
template <typename Scalar>
Image<Scalar> nlm(const Image<Scalar>& img, const Kernel<Scalar>& k, const SpatialConfig& sp, int iterations = 1) {
  if (img.dimension() != 2) throw UnsupportedDimension("nlm: only 2D images are supported");
  sp.validate();
  const int p = sp.patch_radius;
  const int window = sp.nlm_window();

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> patch(2 * p + 1, 2 * p + 1);
  for (int dy = -p; dy <= p; ++dy) {
    for (int dx = -p; dx <= p; ++dx) {
      patch(dy + p, dx + p) = std::exp(-Scalar(dx * dx + dy * dy) / Scalar(2 * sp.rho * sp.rho));
    }
  }
  patch /= patch.sum();

  Image<Scalar> current = img;
  for (int it = 0; it < iterations; ++it) {
    const auto u = current.as_matrix();
    const Eigen::Index rows = u.rows();
    const Eigen::Index cols = u.cols();
    const Scalar lo = u.minCoeff();
    const Scalar hi = u.maxCoeff();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> padded(rows + 2 * p, cols + 2 * p);
    for (Eigen::Index r = 0; r < padded.rows(); ++r) {
      for (Eigen::Index c = 0; c < padded.cols(); ++c) {
        padded(r, c) = u(detail::mirror_index(r - p, rows), detail::mirror_index(c - p, cols));
      }
    }

    typename Image<Scalar>::RowMajorMatrix out(rows, cols);
    parallel_for<Eigen::Index>(0, rows, 2, [&](Eigen::Index r0, Eigen::Index r1) {
      for (Eigen::Index r = r0; r < r1; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
          const auto ref = padded.block(r, c, 2 * p + 1, 2 * p + 1);
          Scalar num = 0;
          Scalar den = 0;
          for (Eigen::Index y = std::max<Eigen::Index>(0, r - window); y <= std::min(rows - 1, r + window); ++y) {
            for (Eigen::Index x = std::max<Eigen::Index>(0, c - window); x <= std::min(cols - 1, c + window); ++x) {
              const Scalar d2 = (patch.array() * (ref - padded.block(y, x, 2 * p + 1, 2 * p + 1)).array().square()).sum();
              const Scalar wgt = k(std::sqrt(d2));
              num += wgt * u(y, x);
              den += wgt;
            }
          }
          out(r, c) = std::clamp(num / den, lo, hi);
        }
      }
    });
    current = Image<Scalar>::from_matrix(out);
  }
  return current;
}

}  // namespace nfr
