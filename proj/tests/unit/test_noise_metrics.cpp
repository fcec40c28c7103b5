#include <doctest.h>

#include <cmath>

#include "nfr/noise_metrics.hpp"
#include "nfr/synthetic.hpp"

using namespace nfr;

namespace {

// Alternating +-51.2 pattern: sigma exactly 51.2.
Image<double> checker(Eigen::Index side) {
  VectorX<double> data(side * side);
  for (Eigen::Index i = 0; i < data.size(); ++i) data[i] = 128.0 + ((i + i / side) % 2 ? 51.2 : -51.2);
  return Image<double>(data, Shape{side, side});
}

}  // namespace

TEST_CASE("add_gaussian_noise follows the SNR convention") {
  const auto img = checker(512);
  REQUIRE(empirical_std(img.data()) == doctest::Approx(51.2).epsilon(1e-12));
  const auto noisy = add_gaussian_noise(img, NoiseSpec{10.0, 42});
  const VectorX<double> noise = noisy.data() - img.data();
  CHECK(std::abs(empirical_std(noise) - 5.12) / 5.12 < 0.02);
  CHECK(std::abs(noise.mean()) < 3 * 5.12 / std::sqrt(double(noise.size())));
}

TEST_CASE("add_gaussian_noise is deterministic per seed") {
  const auto img = synthetic::squares<double>(32);
  const auto a = add_gaussian_noise(img, NoiseSpec{10.0, 7});
  const auto b = add_gaussian_noise(img, NoiseSpec{10.0, 7});
  const auto c = add_gaussian_noise(img, NoiseSpec{10.0, 8});
  CHECK(a.data() == b.data());
  CHECK(a.data() != c.data());
}

TEST_CASE("add_gaussian_noise rejects undefined SNR") {
  CHECK_THROWS_AS(add_gaussian_noise(Image<double>::constant(Shape{4, 4}, 3.0), NoiseSpec{10.0, 1}), InvalidArgument);
  CHECK_THROWS_AS(add_gaussian_noise(synthetic::squares<double>(4), NoiseSpec{0.0, 1}), InvalidArgument);
}

TEST_CASE("Gaussian stream moments") {
  GaussianStream g(123);
  const int n = 200000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = g.next();
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::abs(sum / n) < 3.0 / std::sqrt(double(n)));
  CHECK(std::abs(sum2 / n - 1.0) < 0.02);
}

TEST_CASE("rmse and snr_measure") {
  const auto zero = Image<double>::constant(Shape{2, 2}, 0.0);
  const auto two = Image<double>::constant(Shape{2, 2}, 2.0);
  CHECK(rmse(zero, zero) == 0.0);
  CHECK(rmse(zero, two) == 2.0);
  CHECK_THROWS_AS(rmse(zero, Image<double>::constant(Shape{4}, 0.0)), InvalidArgument);

  const auto img = checker(512);
  const auto noisy = add_gaussian_noise(img, NoiseSpec{10.0, 99});
  CHECK(std::abs(snr_measure(img, noisy) - 10.0) / 10.0 < 0.02);
  CHECK_THROWS_AS(snr_measure(img, zero), InvalidArgument);
}
