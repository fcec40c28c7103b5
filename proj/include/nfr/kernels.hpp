#pragma once

#include <Eigen/Core>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "nfr/errors.hpp"

namespace nfr {

/// K(s) = exp(-s^2).
struct GaussianProfile {};

/// K(s) = 1 / (1 + |s|^p), p > 1.
template <typename Scalar>
struct PowerDecayProfile {
  Scalar p = 2;
};

/// User-supplied profile with its derivative. The monotonicity guarantees of the filter
/// only hold when the profile satisfies the decay condition (see check_decay_condition).
template <typename Scalar>
struct CustomProfile {
  std::string name;
  std::function<Scalar(Scalar)> value;
  std::function<Scalar(Scalar)> derivative;
};

/// Nonnegative kernel profile K with scale h; evaluates K_h(xi) = K(xi / h).
template <typename Scalar>
class Kernel {
public:
  using Profile = std::variant<GaussianProfile, PowerDecayProfile<Scalar>, CustomProfile<Scalar>>;

  Kernel(Profile profile, Scalar h) : profile_(std::move(profile)), h_(h) {
    if (!(h_ > 0) || !std::isfinite(h_)) throw InvalidArgument("kernel scale h must be positive and finite");
    if (const auto* pd = std::get_if<PowerDecayProfile<Scalar>>(&profile_); pd && !(pd->p > 1)) {
      throw InvalidArgument("power-decay exponent p must exceed 1");
    }
    if (const auto* c = std::get_if<CustomProfile<Scalar>>(&profile_)) {
      if (!c->value || !c->derivative) throw InvalidArgument("custom kernel needs value and derivative");
      if (!(c->value(Scalar(0)) > 0)) throw InvalidArgument("custom kernel must satisfy K(0) > 0");
    }
  }

  static Kernel gaussian(Scalar h) { return Kernel(GaussianProfile{}, h); }
  static Kernel power_decay(Scalar h, Scalar p = 2) { return Kernel(PowerDecayProfile<Scalar>{p}, h); }

  Scalar h() const { return h_; }
  const Profile& profile() const { return profile_; }
  bool is_gaussian() const { return std::holds_alternative<GaussianProfile>(profile_); }

  /// Same profile at another scale.
  Kernel rescaled(Scalar h) const { return Kernel(profile_, h); }

  std::string name() const {
    return std::visit(
        [](const auto& p) -> std::string {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, GaussianProfile>) {
            return "gaussian";
          } else if constexpr (std::is_same_v<P, PowerDecayProfile<Scalar>>) {
            return "power";
          } else {
            return p.name;
          }
        },
        profile_);
  }

  /// Unscaled profile K(s).
  Scalar profile_value(Scalar s) const {
    return std::visit(
        [s](const auto& p) -> Scalar {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, GaussianProfile>) {
            const Scalar e = -s * s;
            return e < gaussian_cutoff() ? Scalar(0) : std::exp(e);
          } else if constexpr (std::is_same_v<P, PowerDecayProfile<Scalar>>) {
            return Scalar(1) / (Scalar(1) + std::pow(std::abs(s), p.p));
          } else {
            return p.value(s);
          }
        },
        profile_);
  }

  /// K'(s).
  Scalar profile_derivative(Scalar s) const {
    return std::visit(
        [s](const auto& p) -> Scalar {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, GaussianProfile>) {
            return Scalar(-2) * s * std::exp(-s * s);
          } else if constexpr (std::is_same_v<P, PowerDecayProfile<Scalar>>) {
            const Scalar a = std::abs(s);
            if (a == 0) return Scalar(0);
            const Scalar denom = Scalar(1) + std::pow(a, p.p);
            const Scalar sign = s < 0 ? Scalar(-1) : Scalar(1);
            return -p.p * std::pow(a, p.p - 1) * sign / (denom * denom);
          } else {
            return p.derivative(s);
          }
        },
        profile_);
  }

  /// K_h(xi) = K(xi / h).
  Scalar operator()(Scalar xi) const { return profile_value(xi / h_); }

  /// d/dxi K_h(xi).
  Scalar derivative(Scalar xi) const { return profile_derivative(xi / h_) / h_; }

  /// Coefficient-wise K_h over an array expression.
  template <typename Derived>
  Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> operator()(const Eigen::ArrayBase<Derived>& xi) const {
    const Scalar inv_h = Scalar(1) / h_;
    return std::visit(
        [&](const auto& p) -> Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, GaussianProfile>) {
            const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> e = -(xi * inv_h).square();
            return (e < gaussian_cutoff()).select(Scalar(0), e.exp());
          } else if constexpr (std::is_same_v<P, PowerDecayProfile<Scalar>>) {
            return ((xi * inv_h).abs().pow(p.p) + Scalar(1)).inverse();
          } else {
            return (xi * inv_h).unaryExpr([&p](Scalar s) { return p.value(s); });
          }
        },
        profile_);
  }

private:
  // Gaussian values below the smallest normal number are flushed to zero. The vectorized exp
  // saturates near there instead of underflowing, so both paths need the same cutoff.
  static Scalar gaussian_cutoff() { return std::log(std::numeric_limits<Scalar>::min()); }

  Profile profile_;
  Scalar h_;
};

template <typename Scalar>
Scalar eval_scaled(const Kernel<Scalar>& k, Scalar xi) {
  return k(xi);
}

/// g(s) = integral over [0, s] of K_h(sqrt(t)) dt.
///
/// Closed form h^2 (1 - exp(-s/h^2)) for the Gaussian; adaptive Gauss-Kronrod otherwise,
/// integrated in r = sqrt(t) so the integrand 2 r K_h(r) stays smooth at the origin.
template <typename Scalar>
Scalar g_primitive(const Kernel<Scalar>& k, Scalar s) {
  if (!(s >= 0)) throw InvalidArgument("g_primitive: argument must be nonnegative");
  if (s == 0) return Scalar(0);
  const Scalar h = k.h();
  if (k.is_gaussian()) return h * h * -std::expm1(-s / (h * h));

  auto integrand = [&k](Scalar r) { return Scalar(2) * r * k(r); };
  Scalar error = 0;
  const Scalar value = boost::math::quadrature::gauss_kronrod<Scalar, 31>::integrate(
      integrand, Scalar(0), std::sqrt(s), 20, Scalar(1e-14), &error);
  return value;
}

/// R_1 = (xi1 - xi2) (K'(xi - xi1) K(xi - xi2) - K'(xi - xi2) K(xi - xi1)) for the scaled kernel.
template <typename Scalar>
Scalar decay_residual(const Kernel<Scalar>& k, Scalar xi, Scalar xi1, Scalar xi2) {
  const Scalar a = xi - xi1;
  const Scalar b = xi - xi2;
  return (xi1 - xi2) * (k.derivative(a) * k(b) - k.derivative(b) * k(a));
}

/// R_2 = (xi1 - xi2) (K'/K (xi - xi1) - K'/K (xi - xi2)); needs K > 0.
template <typename Scalar>
Scalar growth_residual(const Kernel<Scalar>& k, Scalar xi, Scalar xi1, Scalar xi2) {
  const Scalar a = xi - xi1;
  const Scalar b = xi - xi2;
  return (xi1 - xi2) * (k.derivative(a) / k(a) - k.derivative(b) / k(b));
}

namespace detail {

// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <typename Scalar, typename Predicate>
bool all_sampled_triples(const Kernel<Scalar>& k, std::uint64_t samples, std::uint64_t seed, Predicate&& ok) {
  std::mt19937_64 rng(seed);
  const Scalar half_width = Scalar(4) * k.h();
  auto draw = [&] { return static_cast<Scalar>((2 * unit_uniform(rng) - 1)) * half_width; };
  for (std::uint64_t i = 0; i < samples; ++i) {
    const Scalar xi = draw();
    const Scalar xi1 = draw();
    const Scalar xi2 = draw();
    if (!ok(xi, xi1, xi2)) return false;
  }
  return true;
}

}  // namespace detail

/// Monte-Carlo proxy for the symmetric-decay condition R_1 >= 0: samples triples uniformly
/// in [-4h, 4h]^3 and reports whether R_1 >= -1e-12 on all of them.
template <typename Scalar>
bool check_decay_condition(const Kernel<Scalar>& k, std::uint64_t samples = 100000, std::uint64_t seed = 0) {
  if (samples == 0) throw InvalidArgument("check_decay_condition: samples must be positive");
  return detail::all_sampled_triples(k, samples, seed, [&k](Scalar xi, Scalar xi1, Scalar xi2) {
    return decay_residual(k, xi, xi1, xi2) >= Scalar(-1e-12);
  });
}

/// Monte-Carlo proxy for R_2 <= phi(h) |xi1 - xi2|^q (relative slack 1e-12).
template <typename Scalar>
bool check_growth_condition(const Kernel<Scalar>& k, Scalar phi, Scalar q, std::uint64_t samples = 100000,
                            std::uint64_t seed = 0) {
  if (samples == 0) throw InvalidArgument("check_growth_condition: samples must be positive");
  return detail::all_sampled_triples(k, samples, seed, [&](Scalar xi, Scalar xi1, Scalar xi2) {
    const Scalar bound = phi * std::pow(std::abs(xi1 - xi2), q);
    return growth_residual(k, xi, xi1, xi2) <= bound * (Scalar(1) + Scalar(1e-12)) + Scalar(1e-15);
  });
}

}  // namespace nfr
