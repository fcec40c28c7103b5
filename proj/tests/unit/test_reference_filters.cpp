#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <cmath>
#include <vector>

#include "nfr/filter1d.hpp"
#include "nfr/reference_filters.hpp"
#include "nfr/synthetic.hpp"
#include "test_support.hpp"

using namespace nfr;
using nfr::testing::close_rel;

namespace {

bool images_close(const Image<double>& a, const Image<double>& b, double rel) {
  if (a.shape() != b.shape()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!close_rel(a[i], b[i], rel)) return false;
  }
  return true;
}

// Untruncated bilateral filter written from the definition.
Image<double> bilateral_brute(const Image<double>& img, const Kernel<double>& k, double rho) {
  const auto u = img.as_matrix();
  Image<double>::RowMajorMatrix out(u.rows(), u.cols());
  for (Eigen::Index r = 0; r < u.rows(); ++r) {
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
      double num = 0, den = 0;
      for (Eigen::Index y = 0; y < u.rows(); ++y) {
        for (Eigen::Index x = 0; x < u.cols(); ++x) {
          const double d2 = double((r - y) * (r - y) + (c - x) * (c - x));
          const double w = k(u(r, c) - u(y, x)) * std::exp(-d2 / (rho * rho));
          num += w * u(y, x);
          den += w;
        }
      }
      out(r, c) = num / den;
    }
  }
  return Image<double>::from_matrix(out);
}

Eigen::Index reflect(Eigen::Index i, Eigen::Index n) {
  while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - i - 1;
  return i;
}

// Nonlocal means as a plain quadruple loop with its own reflection and patch weights.
Image<double> nlm_naive(const Image<double>& img, double h, double rho, int patch, int window) {
  const auto u = img.as_matrix();
  const Eigen::Index rows = u.rows(), cols = u.cols();
  double norm = 0;
  for (int dy = -patch; dy <= patch; ++dy)
    for (int dx = -patch; dx <= patch; ++dx) norm += std::exp(-(dx * dx + dy * dy) / (2 * rho * rho));
  Image<double>::RowMajorMatrix out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      double num = 0, den = 0;
      for (Eigen::Index y = r - window; y <= r + window; ++y) {
        for (Eigen::Index x = c - window; x <= c + window; ++x) {
          if (y < 0 || x < 0 || y >= rows || x >= cols) continue;
          double d2 = 0;
          for (int dy = -patch; dy <= patch; ++dy) {
            for (int dx = -patch; dx <= patch; ++dx) {
              const double g = std::exp(-(dx * dx + dy * dy) / (2 * rho * rho)) / norm;
              const double diff = u(reflect(r + dy, rows), reflect(c + dx, cols)) - u(reflect(y + dy, rows), reflect(x + dx, cols));
              d2 += g * diff * diff;
            }
          }
          const double w = std::exp(-d2 / (h * h));
          num += w * u(y, x);
          den += w;
        }
      }
      out(r, c) = num / den;
    }
  }
  return Image<double>::from_matrix(out);
}

}  // namespace

TEST_CASE("direct_nf examples") {
  const auto k = Kernel<double>::gaussian(30.0);

  SUBCASE("constant image is a fixed point") {
    const auto img = Image<double>::constant(Shape{5, 4}, 17.5);
    CHECK(direct_nf(img, k, 3).data() == img.data());
  }

  SUBCASE("two-row image matches the two-level closed form") {
    const double a = 140, b = 100;
    Image<double>::RowMajorMatrix m(2, 2);
    m << a, a, b, b;
    const auto out = direct_nf(Image<double>::from_matrix(m), k, 1);
    const double kab = std::exp(-((a - b) / 30.0) * ((a - b) / 30.0));
    const double top = (2 * a + kab * 2 * b) / (2 + kab * 2);
    const double bottom = (kab * 2 * a + 2 * b) / (kab * 2 + 2);
    CHECK(out[0] == doctest::Approx(top).epsilon(1e-14));
    CHECK(out[1] == out[0]);
    CHECK(out[2] == doctest::Approx(bottom).epsilon(1e-14));
  }

  SUBCASE("equals reconstruct o iterate on random images") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto img = synthetic::random_levels<double>(Shape{16, 16}, 32, 300 + seed);
      for (auto scheme : {Scheme::varying_kernel, Scheme::fixed_kernel}) {
        FilterConfig<double> cfg(Kernel<double>::gaussian(20.0), scheme);
        cfg.stop_on_tolerance = false;
        cfg.max_iterations = 5;
        const auto [v0, levels] = decreasing_rearrangement(img);
        const auto oned = reconstruct(levels, iterate(v0, cfg).final_iterate());
        CHECK(images_close(oned, direct_nf(img, cfg.kernel, 5, scheme), 1e-10));
      }
    }
  }

  SUBCASE("evaluation count is N^2 per iteration") {
    std::uint64_t evals = 0;
    direct_nf(synthetic::random_levels<double>(Shape{6, 7}, 5, 1), k, 2, Scheme::varying_kernel, &evals);
    CHECK(evals == 2u * 42u * 42u);
  }
}

TEST_CASE("direct_nf preserves level sets and intensity order") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto img = synthetic::random_levels<double>(Shape{12, 12}, 20, 900 + seed);
    for (double h : {8.0, 40.0}) {
      const auto out = direct_nf(img, Kernel<double>::gaussian(h), 3);
      std::vector<Eigen::Index> order(static_cast<std::size_t>(img.size()));
      std::iota(order.begin(), order.end(), Eigen::Index{0});
      std::sort(order.begin(), order.end(), [&](auto a, auto b) { return img[a] < img[b]; });
      for (std::size_t i = 1; i < order.size(); ++i) {
        const auto prev = order[i - 1], cur = order[i];
        REQUIRE(out[cur] >= out[prev]);
        if (img[cur] == img[prev]) REQUIRE(out[cur] == out[prev]);
      }
      REQUIRE(out.data().maxCoeff() <= img.data().maxCoeff());
      REQUIRE(out.data().minCoeff() >= img.data().minCoeff());
    }
  }
}

TEST_CASE("histogram-driven direct step equals the pixel loop") {
  const auto img = synthetic::random_levels<double>(Shape{10, 10}, 16, 12);
  const auto k = Kernel<double>::gaussian(25.0);
  std::uint64_t evals = 0;
  const auto fast = direct_nf_step_histogram(img, k, &evals);
  CHECK(images_close(fast, direct_nf_step(img, img, k), 1e-12));
  CHECK(evals == std::uint64_t(img.size()) * histogram(img).size());
}

TEST_CASE("bilateral") {
  const auto k = Kernel<double>::gaussian(25.0);

  SUBCASE("constant image is unchanged") {
    const auto img = Image<double>::constant(Shape{8, 8}, 64.0);
    SpatialConfig sp;
    sp.rho = 2.0;
    CHECK(bilateral(img, k, sp).data() == img.data());
  }

  SUBCASE("tiny rho keeps the image") {
    const auto img = synthetic::random_levels<double>(Shape{10, 10}, 50, 2);
    SpatialConfig sp;
    sp.rho = 0.05;
    sp.window_radius = 1;
    CHECK((bilateral(img, k, sp).data() - img.data()).cwiseAbs().maxCoeff() < 1e-6);
  }

  SUBCASE("truncated window matches the untruncated definition for small rho") {
    const auto img = synthetic::random_levels<double>(Shape{16, 16}, 64, 3);
    SpatialConfig sp;
    sp.rho = 0.4;
    sp.window_radius = 3;
    const auto fast = bilateral(img, k, sp);
    const auto brute = bilateral_brute(img, k, sp.rho);
    CHECK((fast.data() - brute.data()).cwiseAbs().maxCoeff() < 1e-9);
  }

  SUBCASE("default window is ceil(3 rho)") {
    SpatialConfig sp;
    sp.rho = 1.2;
    CHECK(sp.bilateral_window() == 4);
  }

  SUBCASE("only 2D images") {
    SpatialConfig sp;
    CHECK_THROWS_AS(bilateral(Image<double>::constant(Shape{9}, 1.0), k, sp), UnsupportedDimension);
    CHECK_THROWS_AS(bilateral(Image<double>::constant(Shape{2, 2, 2}, 1.0), k, sp), UnsupportedDimension);
  }
}

TEST_CASE("nlm") {
  const double h = 30.0;
  const auto k = Kernel<double>::gaussian(h);

  SUBCASE("constant image is unchanged") {
    const auto img = Image<double>::constant(Shape{7, 9}, 12.0);
    SpatialConfig sp;
    CHECK(nlm(img, k, sp).data() == img.data());
  }

  SUBCASE("zero patch and whole-image window is one direct NF step") {
    const auto img = synthetic::random_levels<double>(Shape{9, 11}, 30, 6);
    SpatialConfig sp;
    sp.patch_radius = 0;
    sp.window_radius = 11;
    CHECK(images_close(nlm(img, k, sp), direct_nf(img, k, 1), 1e-12));
  }

  SUBCASE("matches the naive quadruple loop") {
    const auto img = synthetic::random_levels<double>(Shape{12, 12}, 40, 8);
    SpatialConfig sp;
    sp.rho = 1.0;
    sp.patch_radius = 1;
    sp.window_radius = 5;
    const auto fast = nlm(img, k, sp);
    const auto naive = nlm_naive(img, h, sp.rho, 1, 5);
    CHECK((fast.data() - naive.data()).cwiseAbs().maxCoeff() < 1e-9);
  }

  SUBCASE("mirror index") {
    CHECK(detail::mirror_index(-1, 5) == 0);
    CHECK(detail::mirror_index(-2, 5) == 1);
    CHECK(detail::mirror_index(5, 5) == 4);
    CHECK(detail::mirror_index(6, 5) == 3);
    CHECK(detail::mirror_index(-7, 3) == 0);
  }

  SUBCASE("only 2D images") {
    CHECK_THROWS_AS(nlm(Image<double>::constant(Shape{9}, 1.0), k, SpatialConfig{}), UnsupportedDimension);
  }

  SUBCASE("invalid spatial config") {
    SpatialConfig sp;
    sp.rho = 0;
    CHECK_THROWS_AS(nlm(Image<double>::constant(Shape{3, 3}, 1.0), k, sp), InvalidArgument);
  }
}
