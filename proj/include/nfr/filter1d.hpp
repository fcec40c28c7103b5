#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "nfr/errors.hpp"
#include "nfr/kernels.hpp"
#include "nfr/parallel.hpp"
#include "nfr/rearrangement.hpp"

namespace nfr {

/// Whether the kernel weights follow the current iterate (nonlinear) or stay at v0 (linear).
enum class Scheme { varying_kernel, fixed_kernel };

enum class StopReason { tolerance, max_iterations };

inline std::string to_string(Scheme s) { return s == Scheme::varying_kernel ? "varying" : "fixed"; }
inline std::string to_string(StopReason r) { return r == StopReason::tolerance ? "tolerance" : "max_iterations"; }

template <typename Scalar>
struct FilterConfig {
  explicit FilterConfig(Kernel<Scalar> k, Scheme s = Scheme::varying_kernel) : kernel(std::move(k)), scheme(s) {}

  Kernel<Scalar> kernel;
  Scheme scheme = Scheme::varying_kernel;
  Scalar stop_tolerance = Scalar(1e-5);
  int max_iterations = 100;
  // When false the relative-J rule is ignored and exactly max_iterations steps are taken.
  bool stop_on_tolerance = true;

  void validate() const {
    if (!(stop_tolerance > 0)) throw InvalidArgument("stop_tolerance must be positive");
    if (max_iterations < 1) throw InvalidArgument("max_iterations must be at least 1");
  }
};

template <typename Scalar>
struct FilterTrace {
  std::vector<Rearrangement<Scalar>> iterates;  // v_0 ... v_n
  std::vector<Scalar> j_values;
  std::vector<Scalar> sup_norms;
  StopReason stop_reason = StopReason::tolerance;
  std::uint64_t kernel_evaluations = 0;

  int iterations() const { return static_cast<int>(iterates.size()) - 1; }
  const Rearrangement<Scalar>& final_iterate() const { return iterates.back(); }
};

namespace detail {

inline constexpr Eigen::Index kStepBlockRows = 64;

}  // namespace detail

/// One Neighborhood-filter step on a rearrangement:
///
///   out_i = sum_j K_h(w_i - w_j) m_j x_j / sum_j K_h(w_i - w_j) m_j
///
/// with w = weights.values(), x = values.values(), m the shared masses. Exactly Q^2 kernel
/// evaluations are made and added to `evaluations` when given. Each output is a convex
/// combination of x, so it is clamped to [min x, max x] to keep that bound exact under rounding.
/// Equal weights give bit-identical outputs.
template <typename Scalar>
Rearrangement<Scalar> nf_step(const Rearrangement<Scalar>& weights, const Rearrangement<Scalar>& values,
                              const Kernel<Scalar>& k, std::uint64_t* evaluations = nullptr) {
  if (!weights.same_partition(values)) throw InvalidArgument("nf_step: weight and value partitions differ");

  const Eigen::Index q = values.size();
  const VectorX<Scalar>& w = weights.values();
  const VectorX<Scalar>& m = values.masses();
  const VectorX<Scalar> mx = m.cwiseProduct(values.values());
  const Scalar lo = values.values().minCoeff();
  const Scalar hi = values.values().maxCoeff();

  VectorX<Scalar> out(q);
  const Eigen::Index blocks = (q + detail::kStepBlockRows - 1) / detail::kStepBlockRows;
  parallel_for<Eigen::Index>(0, blocks, 1, [&](Eigen::Index b0, Eigen::Index b1) {
    for (Eigen::Index b = b0; b < b1; ++b) {
      const Eigen::Index r0 = b * detail::kStepBlockRows;
      const Eigen::Index rows = std::min(detail::kStepBlockRows, q - r0);
      const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> diff =
          w.segment(r0, rows).array().replicate(1, q) - w.transpose().array().replicate(rows, 1);
      const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> weight = k(diff).matrix();
      out.segment(r0, rows) = ((weight * mx).array() / (weight * m).array()).max(lo).min(hi).matrix();
    }
  });

  // The Gaussian step maps non-increasing data to non-increasing data; levels that have merged
  // numerically can still come out in the wrong order by an ulp, which this pass undoes.
  if (k.is_gaussian() && weights.is_non_increasing() && values.is_non_increasing()) {
    for (Eigen::Index i = 1; i < q; ++i) out[i] = std::min(out[i], out[i - 1]);
  }

  if (evaluations) *evaluations += static_cast<std::uint64_t>(q) * static_cast<std::uint64_t>(q);
  return values.with_values(std::move(out));
}

/// J_*(v) = sum_ij m_i m_j g((v_i - v_j)^2 / h^2), with g(s) = integral_0^s K(sqrt(t)) dt built
/// from the unit-scale profile. Under this normalisation varying-kernel steps never increase J.
template <typename Scalar>
Scalar functional_j(const Rearrangement<Scalar>& v, const Kernel<Scalar>& k) {
  const Eigen::Index q = v.size();
  const Scalar inv_h2 = Scalar(1) / (k.h() * k.h());
  const Kernel<Scalar> unit = k.rescaled(Scalar(1));
  const VectorX<Scalar>& x = v.values();
  const VectorX<Scalar>& m = v.masses();

  VectorX<Scalar> row_sums(q);
  parallel_for<Eigen::Index>(0, q, 32, [&](Eigen::Index i0, Eigen::Index i1) {
    for (Eigen::Index i = i0; i < i1; ++i) {
      Scalar acc = 0;
      if (unit.is_gaussian()) {
        acc = -m.dot((-(x.array() - x[i]).square() * inv_h2).expm1().matrix());
      } else {
        for (Eigen::Index j = 0; j < q; ++j) {
          const Scalar d = x[i] - x[j];
          acc += m[j] * g_primitive(unit, d * d * inv_h2);
        }
      }
      row_sums[i] = m[i] * acc;
    }
  });
  return row_sums.sum();
}

/// Runs the 1D Neighborhood filter from v0 and records every iterate.
///
/// Stops when |J(v_{n+1}) - J(v_n)| / |J(v_n)| < stop_tolerance (or J reaches 0, a constant
/// fixed point), or after max_iterations steps.
template <typename Scalar>
FilterTrace<Scalar> iterate(const Rearrangement<Scalar>& v0, const FilterConfig<Scalar>& cfg) {
  cfg.validate();
  FilterTrace<Scalar> trace;
  trace.iterates.push_back(v0);
  trace.j_values.push_back(functional_j(v0, cfg.kernel));
  trace.sup_norms.push_back(v0.sup_norm());

  if (cfg.stop_on_tolerance && trace.j_values.back() == 0) {
    trace.stop_reason = StopReason::tolerance;
    return trace;
  }

  for (int n = 0; n < cfg.max_iterations; ++n) {
    const Rearrangement<Scalar>& current = trace.iterates.back();
    const Rearrangement<Scalar>& weights = cfg.scheme == Scheme::varying_kernel ? current : v0;
    Rearrangement<Scalar> next = nf_step(weights, current, cfg.kernel, &trace.kernel_evaluations);

    const Scalar j_prev = trace.j_values.back();
    const Scalar j_next = functional_j(next, cfg.kernel);
    trace.sup_norms.push_back(next.sup_norm());
    trace.j_values.push_back(j_next);
    trace.iterates.push_back(std::move(next));

    if (cfg.stop_on_tolerance && (j_next == 0 || std::abs(j_next - j_prev) / std::abs(j_prev) < cfg.stop_tolerance)) {
      trace.stop_reason = StopReason::tolerance;
      return trace;
    }
  }
  trace.stop_reason = StopReason::max_iterations;
  return trace;
}

template <typename Scalar>
struct ExpansionResidual {
  VectorX<Scalar> positions;  // interior sample positions t
  VectorX<Scalar> residual;   // v_1(t) minus the truncated expansion, interior only
  VectorX<Scalar> k_tilde;    // border function at every sample

  Scalar max_abs_residual() const { return residual.cwiseAbs().maxCoeff(); }
};

/// Compares one Gaussian NF step on a sampled strictly decreasing function against
///
///   v(t) + a1 k~_h(t) v'(t) h - a2 v''(t) / v'(t)^2 h^2,   a1 = 1/sqrt(pi), a2 = 1,
///
/// where k~_h(t) = K_h(v(t) - v(L)) / v'(L) - K_h(v(t) - v(0)) / v'(0). Samples sit at the
/// cell midpoints of [0, L], each carrying mass L/M; derivatives are central differences
/// (one-sided at the ends). The residual covers the middle half of the domain.
template <typename Scalar>
ExpansionResidual<Scalar> expansion_residual(const VectorX<Scalar>& samples, Scalar domain_length,
                                             const Kernel<Scalar>& k) {
  const Eigen::Index n = samples.size();
  if (n < 256) throw InvalidArgument("expansion_residual: need at least 256 samples");
  if (!k.is_gaussian()) throw InvalidArgument("expansion_residual: Gaussian kernel required");
  if (!(domain_length > 0)) throw InvalidArgument("expansion_residual: domain length must be positive");
  for (Eigen::Index i = 1; i < n; ++i) {
    if (!(samples[i] < samples[i - 1])) throw InvalidArgument("expansion_residual: samples must be strictly decreasing");
  }

  const Scalar dt = domain_length / Scalar(n);
  VectorX<Scalar> d1(n);
  VectorX<Scalar> d2(n);
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    d1[i] = (samples[i + 1] - samples[i - 1]) / (2 * dt);
    d2[i] = (samples[i + 1] - 2 * samples[i] + samples[i - 1]) / (dt * dt);
  }
  d1[0] = (-3 * samples[0] + 4 * samples[1] - samples[2]) / (2 * dt);
  d1[n - 1] = (3 * samples[n - 1] - 4 * samples[n - 2] + samples[n - 3]) / (2 * dt);
  d2[0] = d2[1];
  d2[n - 1] = d2[n - 2];
  if (d1.cwiseAbs().minCoeff() < Scalar(1e-8)) {
    throw InvalidArgument("expansion_residual: slope too small, v''/(v')^2 is unstable");
  }

  const Rearrangement<Scalar> v0(samples, VectorX<Scalar>::Constant(n, dt));
  const Rearrangement<Scalar> v1 = nf_step(v0, v0, k);

  const Scalar h = k.h();
  const Scalar a1 = Scalar(1) / std::sqrt(std::numbers::pi_v<Scalar>);
  const Scalar a2 = Scalar(1);
  const Scalar v_first = samples[0];
  const Scalar v_last = samples[n - 1];

  ExpansionResidual<Scalar> out;
  out.k_tilde.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.k_tilde[i] = k(samples[i] - v_last) / d1[n - 1] - k(samples[i] - v_first) / d1[0];
  }

  const Eigen::Index begin = n / 4;
  const Eigen::Index end = n - n / 4;
  out.positions.resize(end - begin);
  out.residual.resize(end - begin);
  for (Eigen::Index i = begin; i < end; ++i) {
    const Scalar predicted =
        samples[i] + a1 * out.k_tilde[i] * d1[i] * h - a2 * d2[i] / (d1[i] * d1[i]) * h * h;
    out.positions[i - begin] = (Scalar(i) + Scalar(0.5)) * dt;
    out.residual[i - begin] = v1.values()[i] - predicted;
  }
  return out;
}

}  // namespace nfr
