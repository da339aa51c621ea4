#include <cmath>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "shapedens/errors.hpp"
#include "shapedens/rng.hpp"
#include "shapedens/sample.hpp"
#include "shapedens/triangular_mix.hpp"
#include "test_util.hpp"

using namespace shapedens;
using testutil::thrown_code;

TEST_CASE("sample construction sorts and validates") {
  Sample s = Sample::from_raw({2.0, 1.0, 3.0});
  CHECK(s.values() == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(s.size() == 3);
  CHECK_FALSE(s.has_ties());

  Sample one = Sample::from_raw({1.0});
  CHECK(one.size() == 1);
  CHECK(one.min() == 1.0);

  CHECK(thrown_code([] { Sample::from_raw({0.0, 1.0}); }) ==
        Errc::NonPositiveValue);
  CHECK(thrown_code([] { Sample::from_raw({}); }) == Errc::EmptyInput);
  CHECK(thrown_code([] {
          Sample::from_raw({1.0, std::nan("")});
        }) == Errc::NonFiniteValue);

  CHECK(Sample::from_raw({1.0, 1.0, 2.0}).has_ties());
}

TEST_CASE("empirical cdf evaluation") {
  Sample s = Sample::from_raw({1.0, 2.0, 3.0});
  CHECK(s.ecdf(2.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(s.ecdf(0.5) == 0.0);
  CHECK(s.ecdf(10.0) == 1.0);
  CHECK(s.ecdf_left(2.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("integrated empirical cdf closed form") {
  Sample two = Sample::from_raw({1.0, 2.0});
  CHECK(two.ecdf_integral(3.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(two.ecdf_integral(1.0) == 0.0);

  Sample three = Sample::from_raw({1.0, 2.0, 3.0});
  CHECK(three.ecdf_integral(2.5) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(thrown_code([&] { three.ecdf_integral(-0.1); }) ==
        Errc::NegativeArgument);

  // Piecewise evaluation of the step function agrees with the closed form:
  // split [0, r] at the observations and sum midpoint value times length.
  CounterRng rng(41);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> raw;
    const int n = 1 + static_cast<int>(rng.next() * 8);
    for (int i = 0; i < n; ++i) raw.push_back(rng.next(0.05, 5.0));
    Sample s = Sample::from_raw(raw);
    const double r = rng.next(0.0, 6.0);
    std::vector<double> cuts = {0.0, r};
    for (double x : s.values()) {
      if (x < r) cuts.push_back(x);
    }
    std::sort(cuts.begin(), cuts.end());
    double piecewise = 0.0;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
      piecewise += s.ecdf(0.5 * (cuts[p] + cuts[p + 1])) *
                   (cuts[p + 1] - cuts[p]);
    }
    CHECK(std::abs(s.ecdf_integral(r) - piecewise) <= 1e-12);
  }

  CHECK(moment_term(three, 2.5) == three.ecdf_integral(2.5));
}

TEST_CASE("mixture evaluation") {
  TriangularMix lse_one({3.0}, {2.0 / 9.0});
  CHECK(lse_one.eval(0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  TriangularMix half({2.0}, {0.5});
  CHECK(half.eval(2.0) == 0.0);
  CHECK(half.eval(5.0) == 0.0);

  TriangularMix pair({1.0, 2.0}, {1.0, 0.5});
  CHECK(pair.eval(0.5) == doctest::Approx(1.25).epsilon(1e-15));
}

TEST_CASE("mixture cdf and integrated cdf closed forms") {
  TriangularMix lse_one({3.0}, {2.0 / 9.0});
  CHECK(lse_one.cdf(3.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(lse_one.cdf(0.0) == 0.0);
  CHECK(lse_one.cdf_integral(3.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(lse_one.cdf_integral(0.0) == 0.0);

  TriangularMix half({2.0}, {0.5});
  CHECK(half.cdf(1.0) == doctest::Approx(0.75).epsilon(1e-15));

  TriangularMix tall({1.0}, {3.0});
  CHECK(tall.cdf_integral(2.0) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("mixture mass") {
  CHECK(TriangularMix({3.0}, {2.0 / 9.0}).mass() ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(TriangularMix({1.0, 2.0}, {1.0, 1.0}).mass() ==
        doctest::Approx(2.5).epsilon(1e-15));
  CHECK(TriangularMix({}, {}).mass() == 0.0);
}

TEST_CASE("cdf functions are exact antiderivatives") {
  CounterRng rng(97);
  for (int rep = 0; rep < 15; ++rep) {
    TriangularMix h = oracles::random_mix(rng, 4.0);
    double u = rng.next(0.0, 5.0);
    double v = rng.next(0.0, 5.0);
    if (u > v) std::swap(u, v);
    const double dens_quad = oracles::integrate(
        [&](double x) { return h.eval(x); }, u, v, h.knots(), 64);
    CHECK(std::abs(h.cdf(v) - h.cdf(u) - dens_quad) <= 1e-10);
    const double cdf_quad = oracles::integrate(
        [&](double x) { return h.cdf(x); }, u, v, h.knots(), 64);
    CHECK(std::abs(h.cdf_integral(v) - h.cdf_integral(u) - cdf_quad) <= 1e-10);
  }
}

TEST_CASE("gram closed form") {
  CHECK(gram(1.0, 2.0) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(gram(1.0, 2.0) == gram(2.0, 1.0));
  CHECK(thrown_code([] { gram(0.0, 1.0); }) == Errc::NonPositiveKnot);
  CHECK(thrown_code([] { gram(1.0, -2.0); }) == Errc::NonPositiveKnot);

  CounterRng rng(7);
  for (int rep = 0; rep < 25; ++rep) {
    const double tau = rng.next(0.01, 10.0);
    CHECK(gram(tau, tau) ==
          doctest::Approx(tau * tau * tau / 3.0).epsilon(1e-14));
    const double sigma = rng.next(0.01, 10.0);
    const double quad = oracles::integrate(
        [&](double x) {
          return std::max(tau - x, 0.0) * std::max(sigma - x, 0.0);
        },
        0.0, std::min(tau, sigma), {}, 64);
    CHECK(std::abs(gram(tau, sigma) - quad) <= 1e-10);
  }
}

TEST_CASE("generator cdf closed forms match quadrature") {
  CounterRng rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    const double tau = rng.next(0.1, 5.0);
    const double r = rng.next(0.0, 8.0);
    const double psi_quad = oracles::integrate(
        [&](double x) { return std::max(tau - x, 0.0); }, 0.0, r, {tau}, 64);
    CHECK(std::abs(generator_cdf(tau, r) - psi_quad) <= 1e-10);
    const double xi_quad = oracles::integrate(
        [&](double x) { return generator_cdf(tau, x); }, 0.0, r, {tau}, 64);
    CHECK(std::abs(generator_cdf_integral(tau, r) - xi_quad) <= 1e-10);
  }
}

TEST_CASE("knot-value form is convex, non-increasing, zero at the end") {
  CounterRng rng(23);
  for (int rep = 0; rep < 15; ++rep) {
    TriangularMix h = oracles::random_mix(rng, 3.0);
    auto pts = h.knot_points();
    CHECK(pts.back().second == 0.0);
    for (std::size_t k = 0; k + 2 < pts.size(); ++k) {
      const double s0 = (pts[k + 1].second - pts[k].second) /
                        (pts[k + 1].first - pts[k].first);
      const double s1 = (pts[k + 2].second - pts[k + 1].second) /
                        (pts[k + 2].first - pts[k + 1].first);
      CHECK(s1 >= s0 - 1e-12);
      CHECK(s0 <= 1e-12);  // non-increasing
    }
  }
}

TEST_CASE("mixture constructor validation and knot merging") {
  CHECK(thrown_code([] { TriangularMix({-1.0}, {1.0}); }) ==
        Errc::NonPositiveKnot);
  CHECK(thrown_code([] { TriangularMix({1.0, 2.0}, {1.0}); }) ==
        Errc::ParameterOutOfRange);

  // Knots closer than the merge tolerance collapse, coefficients summed.
  TriangularMix merged({1.0, 1.0 + 1e-14}, {0.25, 0.5});
  CHECK(merged.knots().size() == 1);
  CHECK(merged.coefficients()[0] == doctest::Approx(0.75).epsilon(1e-15));
}
