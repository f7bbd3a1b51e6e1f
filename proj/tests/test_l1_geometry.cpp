#include "irlbound/l1_geometry.hpp"

#include <doctest.h>

#include <array>
#include <cmath>

using namespace irlbound;

TEST_SUITE("l1_geometry") {

TEST_CASE("inverse double-exponential CDF") {
  CHECK(inverse_cdf_double_exponential(0.5) == 0.0);
  CHECK(inverse_cdf_double_exponential(0.25) == doctest::Approx(std::log(0.5)));
  CHECK(inverse_cdf_double_exponential(0.75) == doctest::Approx(0.693147).epsilon(1e-6));
  double prev = -INFINITY;
  for (int i = 1; i < 10000; ++i) {
    const double x = inverse_cdf_double_exponential(i / 10000.0);
    CHECK(x >= prev);
    prev = x;
  }
}

TEST_CASE("sphere sampler") {
  Rng rng(17);
  SUBCASE("d = 1") {
    int plus = 0;
    for (int i = 0; i < 2000; ++i) {
      const double x = sample_l1_sphere(1, rng)[0];
      CHECK(std::abs(x) == 1.0);
      plus += x > 0;
    }
    CHECK(std::abs(plus - 1000) < 4 * std::sqrt(500.0));
  }
  SUBCASE("norm and marginal symmetry") {
    const int n = 100000;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(5);
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd w = sample_l1_sphere(5, rng);
      CHECK(std::abs(w.lpNorm<1>() - 1.0) <= 1e-12);
      sum += w;
    }
    // Each coordinate has variance E[w_i^2] = 2 / (d (d + 1)).
    const double sigma = std::sqrt(2.0 / (5 * 6));
    CHECK((sum / n).cwiseAbs().maxCoeff() < 4 * sigma / std::sqrt(double(n)));
  }
  SUBCASE("orthants are uniform") {
    std::array<int, 8> counts{};
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd w = sample_l1_sphere(3, rng);
      counts[(w[0] > 0) * 4 + (w[1] > 0) * 2 + (w[2] > 0)]++;
    }
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - n / 8.0) * (c - n / 8.0) / (n / 8.0);
    // 0.99 quantile of chi-square with 7 degrees of freedom.
    CHECK(chi2 < 18.475);
  }
}

TEST_CASE("manifold step") {
  auto [a, b] = l1_manifold_step(0.5, 0.5, Rotation::kClockwise, 0.2);
  CHECK(a == doctest::Approx(0.7));
  CHECK(b == doctest::Approx(0.3));

  auto [c, d] = l1_manifold_step(0.3, -0.1, Rotation::kCounterclockwise, 0.0);
  CHECK(c == doctest::Approx(0.3));
  CHECK(d == doctest::Approx(-0.1));

  CHECK_THROWS_AS(l1_manifold_step(0.0, 0.0, Rotation::kClockwise, 0.1), InvalidInput);

  Rng rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> step(0.0, 0.5);
  for (int i = 0; i < 10000; ++i) {
    const double w1 = u(rng), w2 = u(rng), s = step(rng);
    const auto [x, y] = l1_manifold_step(w1, w2, Rotation::kClockwise, s);
    CHECK(std::abs(std::abs(x) + std::abs(y) - std::abs(w1) - std::abs(w2)) <= 1e-12);
    const auto [bx, by] = l1_manifold_step(x, y, Rotation::kCounterclockwise, s);
    CHECK(bx == doctest::Approx(w1).epsilon(1e-12).scale(1.0));
    CHECK(by == doctest::Approx(w2).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("manifold step wraps through every quadrant") {
  // A full clockwise lap of the diamond of slack 1 has length 4.
  double x = 1.0, y = 0.0;
  for (int i = 0; i < 40; ++i) {
    std::tie(x, y) = l1_manifold_step(x, y, Rotation::kClockwise, 0.1);
    CHECK(std::abs(x) + std::abs(y) == doctest::Approx(1.0));
  }
  CHECK(x == doctest::Approx(1.0));
  CHECK(y == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("ball walk") {
  Rng rng(3);
  SUBCASE("two dimensions stay within one step") {
    const Eigen::VectorXd w = l1_ball_walk({Eigen::Vector2d(1.0, 0.0), 0.01}, rng);
    CHECK(w.lpNorm<1>() == doctest::Approx(1.0));
    CHECK((w - Eigen::Vector2d(1.0, 0.0)).lpNorm<1>() <= 0.02 + 1e-12);
  }
  SUBCASE("norm conserved over long walks") {
    WalkState state{sample_l1_sphere(8, rng), 0.01};
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
      state.w = l1_ball_walk(state, rng);
      worst = std::max(worst, std::abs(state.w.lpNorm<1>() - 1.0));
    }
    CHECK(worst <= 1e-9);
  }
  SUBCASE("deterministic given seed") {
    Rng a(99), b(99);
    WalkState s1{Eigen::Vector3d(0.2, -0.3, 0.5), 0.05}, s2 = s1;
    for (int i = 0; i < 100; ++i) {
      s1.w = l1_ball_walk(s1, a);
      s2.w = l1_ball_walk(s2, b);
    }
    CHECK(s1.w == s2.w);
  }
}

}  // TEST_SUITE
