#include <doctest.h>

#include <cmath>
#include <random>

#include "nfr/kernels.hpp"

using namespace nfr;

TEST_CASE("eval_scaled examples") {
  const auto g = Kernel<double>::gaussian(10.0);
  CHECK(eval_scaled(g, 0.0) == 1.0);
  CHECK(eval_scaled(g, 10.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(eval_scaled(g, 10.0) == doctest::Approx(0.367879).epsilon(1e-6));
  CHECK(eval_scaled(Kernel<double>::power_decay(5.0, 2.0), 5.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("kernel validation") {
  CHECK_THROWS_AS(Kernel<double>::gaussian(0.0), InvalidArgument);
  CHECK_THROWS_AS(Kernel<double>::gaussian(-1.0), InvalidArgument);
  CHECK_THROWS_AS(Kernel<double>::power_decay(1.0, 1.0), InvalidArgument);
}

TEST_CASE("kernel properties: symmetry, decay, scale consistency") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> xi(-200.0, 200.0);
  std::uniform_real_distribution<double> scale(0.1, 50.0);
  for (int t = 0; t < 2000; ++t) {
    const double h = scale(rng);
    for (const auto& k : {Kernel<double>::gaussian(h), Kernel<double>::power_decay(h, 2.0),
                          Kernel<double>::power_decay(h, 3.5)}) {
      const double a = std::abs(xi(rng));
      const double b = a + std::abs(xi(rng));
      REQUIRE(k(a) == k(-a));
      REQUIRE(k(a) >= k(b));
      REQUIRE(k(a) >= 0.0);
      REQUIRE(k(a) == doctest::Approx(k.rescaled(1.0)(a / h)).epsilon(1e-14));
    }
  }
}

TEST_CASE("array evaluation agrees with scalar evaluation") {
  Eigen::ArrayXXd xi(2, 3);
  xi << -30, -1, 0, 0.5, 7, 120;
  for (const auto& k : {Kernel<double>::gaussian(9.0), Kernel<double>::power_decay(9.0, 2.5)}) {
    const Eigen::ArrayXXd out = k(xi);
    for (Eigen::Index i = 0; i < xi.size(); ++i) CHECK(out(i) == doctest::Approx(k(xi(i))).epsilon(1e-14));
  }
}

TEST_CASE("analytic derivatives match central differences") {
  for (const auto& k : {Kernel<double>::gaussian(3.0), Kernel<double>::power_decay(3.0, 2.0),
                        Kernel<double>::power_decay(3.0, 4.0)}) {
    for (double x : {-7.0, -2.0, -0.3, 0.4, 1.0, 5.0}) {
      const double step = 1e-6;
      const double fd = (k(x + step) - k(x - step)) / (2 * step);
      CHECK(k.derivative(x) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("g_primitive") {
  SUBCASE("empty integral") {
    CHECK(g_primitive(Kernel<double>::gaussian(3.0), 0.0) == 0.0);
    CHECK(g_primitive(Kernel<double>::power_decay(3.0), 0.0) == 0.0);
  }
  SUBCASE("Gaussian closed form") {
    CHECK(g_primitive(Kernel<double>::gaussian(1.0), 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
    CHECK(g_primitive(Kernel<double>::gaussian(1.0), 1.0) == doctest::Approx(0.632121).epsilon(1e-6));
  }
  SUBCASE("power decay against a fine midpoint rule") {
    // K(sqrt t) = 1 / (1 + t) on [0, 1] for p = 2, h = 1.
    const auto k = Kernel<double>::power_decay(1.0, 2.0);
    const int n = 1'000'000;
    double midpoint = 0;
    for (int i = 0; i < n; ++i) midpoint += k(std::sqrt((i + 0.5) / n));
    midpoint /= n;
    CHECK(std::abs(g_primitive(k, 1.0) - midpoint) < 1e-8);
    CHECK(std::abs(g_primitive(k, 1.0) - std::log(2.0)) < 1e-10);
  }
  SUBCASE("power decay with non-even exponent") {
    // p = 3, h = 2: integrand of the r-form is 2 r / (1 + (r/2)^3).
    const auto k = Kernel<double>::power_decay(2.0, 3.0);
    const double s = 9.0;
    const int n = 2'000'000;
    double midpoint = 0;
    for (int i = 0; i < n; ++i) midpoint += k(std::sqrt(s * (i + 0.5) / n));
    midpoint *= s / n;
    CHECK(std::abs(g_primitive(k, s) - midpoint) < 1e-7);
  }
  SUBCASE("negative argument") { CHECK_THROWS_AS(g_primitive(Kernel<double>::gaussian(1.0), -0.1), InvalidArgument); }
  SUBCASE("non-decreasing and bounded by s K(0)") {
    for (const auto& k : {Kernel<double>::gaussian(2.0), Kernel<double>::power_decay(2.0, 2.0)}) {
      double previous = 0;
      for (double s = 0; s < 40; s += 0.37) {
        const double g = g_primitive(k, s);
        CHECK(g >= previous);
        CHECK(g <= s * k(0.0) + 1e-12);
        previous = g;
      }
    }
  }
}

TEST_CASE("decay condition R1 >= 0") {
  SUBCASE("Gaussian passes at several scales") {
    for (double h : {0.5, 5.0, 80.0}) CHECK(check_decay_condition(Kernel<double>::gaussian(h), 100000, 3));
  }
  SUBCASE("coincident xi1 = xi2 gives R1 = 0") {
    const auto k = Kernel<double>::power_decay(1.0);
    CHECK(decay_residual(k, 0.3, 1.7, 1.7) == 0.0);
    CHECK(decay_residual(Kernel<double>::gaussian(1.0), -2.0, 0.25, 0.25) == 0.0);
  }
  SUBCASE("an increasing profile is rejected") {
    const Kernel<double> bad(CustomProfile<double>{"increasing", [](double s) { return s * s + 1; },
                                                   [](double s) { return 2 * s; }},
                             1.0);
    // xi = 0, xi1 = 0, xi2 = 0.5: (xi1 - xi2)(K'(0) K(-0.5) - K'(-0.5) K(0)) = -0.5 * (0 + 1) < 0.
    CHECK(decay_residual(bad, 0.0, 0.0, 0.5) == doctest::Approx(-0.5));
    CHECK_FALSE(check_decay_condition(bad, 1000, 1));
  }
  SUBCASE("the Cauchy-type power kernel is not log-concave") {
    // 2s/(1+s^2) decreases beyond |s| = 1, so R1 < 0 at xi = 0, xi1 = -2, xi2 = -3.
    const auto k = Kernel<double>::power_decay(1.0, 2.0);
    CHECK(decay_residual(k, 0.0, -2.0, -3.0) < 0.0);
    CHECK_FALSE(check_decay_condition(k, 100000, 1));
  }
}

TEST_CASE("growth condition R2 for the Gaussian") {
  // K_h'/K_h(s) = -2 s / h^2, hence R2 = 2 (xi1 - xi2)^2 / h^2 exactly.
  const double h = 4.0;
  const auto k = Kernel<double>::gaussian(h);
  CHECK(growth_residual(k, 1.0, 3.0, -2.0) == doctest::Approx(2.0 * 25.0 / (h * h)));
  CHECK(check_growth_condition(k, 2.0 / (h * h), 2.0, 100000, 5));
  CHECK_FALSE(check_growth_condition(k, 1.0 / (h * h), 2.0, 100000, 5));
}
