#include <cmath>
#include <utility>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "shapedens/errors.hpp"
#include "shapedens/grenander.hpp"
#include "shapedens/models.hpp"
#include "shapedens/sample.hpp"
#include "shapedens/simulate.hpp"
#include "test_util.hpp"

using namespace shapedens;
using testutil::thrown_code;

namespace {

std::vector<std::pair<double, double>> ecdf_points(const Sample& s) {
  std::vector<std::pair<double, double>> pts = {{0.0, 0.0}};
  const auto& v = s.distinct_values();
  const auto& c = s.cumulative_counts();
  const double n = static_cast<double>(s.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    pts.emplace_back(v[j], static_cast<double>(c[j]) / n);
  }
  return pts;
}

}  // namespace

TEST_CASE("least concave majorant on already concave inputs") {
  ConcaveMajorant line = least_concave_majorant({{0.0, 0.0}, {1.0, 1.0}});
  CHECK(line.x() == std::vector<double>{0.0, 1.0});
  CHECK(line.y() == std::vector<double>{0.0, 1.0});
  CHECK(line(0.5) == doctest::Approx(0.5).epsilon(1e-15));

  ConcaveMajorant kept =
      least_concave_majorant({{0.0, 0.0}, {1.0, 0.5}, {3.0, 1.0}});
  CHECK(kept.x() == std::vector<double>{0.0, 1.0, 3.0});
  CHECK(kept.y() == std::vector<double>{0.0, 0.5, 1.0});
}

TEST_CASE("least concave majorant drops dominated vertices") {
  ConcaveMajorant cm =
      least_concave_majorant({{0.0, 0.0}, {1.0, 0.2}, {2.0, 1.0}});
  CHECK(cm.x() == std::vector<double>{0.0, 2.0});
  CHECK(cm.y() == std::vector<double>{0.0, 1.0});
  CHECK(cm.slope(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(cm(1.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("least concave majorant input validation") {
  CHECK(thrown_code([] { least_concave_majorant({{0.0, 0.0}}); }) ==
        Errc::ParameterOutOfRange);
  CHECK(thrown_code([] {
          least_concave_majorant({{0.5, 0.0}, {1.0, 1.0}});
        }) == Errc::ParameterOutOfRange);
  CHECK(thrown_code([] {
          least_concave_majorant({{0.0, 0.0}, {1.0, 0.5}, {1.0, 1.0}});
        }) == Errc::UnsortedInput);
}

TEST_CASE("majorant dominates the input and is minimal at its vertices") {
  CounterRng rng(301);
  for (int rep = 0; rep < 25; ++rep) {
    std::vector<std::pair<double, double>> pts = {{0.0, 0.0}};
    const int m = 2 + static_cast<int>(rng.next() * 8);
    double x = 0.0, y = 0.0;
    for (int i = 0; i < m; ++i) {
      x += rng.next(0.05, 1.0);
      y += rng.next(0.0, 0.4);
      pts.emplace_back(x, y);
    }
    ConcaveMajorant cm = least_concave_majorant(pts);

    for (const auto& p : pts) CHECK(cm(p.first) >= p.second - 1e-12);

    // Slopes strictly decrease.
    for (std::size_t k = 0; k + 1 < cm.segments(); ++k) {
      CHECK(cm.slope(k) > cm.slope(k + 1));
    }

    // Vertices are a subsequence of the input at the input values: the
    // majorant touches the data there, so lowering any vertex would break
    // dominance. Interior values agree with the two-line oracle.
    for (std::size_t k = 0; k < cm.x().size(); ++k) {
      bool found = false;
      for (const auto& p : pts) {
        if (p.first == cm.x()[k] && std::abs(p.second - cm.y()[k]) <= 1e-12) {
          found = true;
        }
      }
      CHECK(found);
    }
    for (int i = 0; i <= 40; ++i) {
      const double t = x * i / 40.0;
      CHECK(std::abs(cm(t) - oracles::lcm_value_at(pts, t)) <= 2e-9 * (1 + y));
    }
  }
}

TEST_CASE("grenander fit closed forms") {
  StepDensity one = grenander_fit(Sample::from_raw({1.0}));
  CHECK(one.breakpoints() == std::vector<double>{0.0, 1.0});
  CHECK(one.heights() == std::vector<double>{1.0});
  CHECK(one.eval(0.5) == 1.0);
  CHECK(one.eval(1.0) == 1.0);
  CHECK(one.eval(1.5) == 0.0);
  CHECK(one.mass() == 1.0);

  StepDensity two = grenander_fit(Sample::from_raw({1.0, 3.0}));
  CHECK(two.breakpoints() == std::vector<double>{0.0, 1.0, 3.0});
  CHECK(two.heights()[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(two.heights()[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(two.cdf(1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(two.mass() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("grenander fit equals the hull oracle") {
  Sample s = Sample::from_raw({1.0, 1.1, 3.0});
  StepDensity fit = grenander_fit(s);
  auto pts = ecdf_points(s);
  ConcaveMajorant cm = fit.majorant();
  for (int i = 0; i <= 60; ++i) {
    const double t = 3.0 * i / 60.0;
    CHECK(std::abs(cm(t) - oracles::lcm_value_at(pts, t)) <= 2e-9);
    CHECK(std::abs(fit.cdf(t) - cm(t)) <= 1e-12);
  }
  // First two observations pool: a single slope carries (0, 1.1].
  CHECK(fit.heights().size() == 2);
  CHECK(fit.heights()[0] == doctest::Approx(2.0 / 3.0 / 1.1).epsilon(1e-12));

  CounterRng seeds(71);
  TrueModel model = TrueModel::exponential(1.0);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 1 + static_cast<std::size_t>(seeds.next() * 40);
    Sample r = sample_model(model, n, 1000 + static_cast<std::uint64_t>(rep));
    StepDensity g = grenander_fit(r);
    CHECK(g.mass() == doctest::Approx(1.0).epsilon(1e-12));
    auto rpts = ecdf_points(r);
    ConcaveMajorant rcm = g.majorant();
    for (int i = 0; i <= 25; ++i) {
      const double t = r.max() * i / 25.0;
      CHECK(std::abs(rcm(t) - oracles::lcm_value_at(rpts, t)) <= 4e-9);
    }
    // Heights strictly decrease; the step mass reproduces the ecdf at the
    // breakpoints that survived pooling.
    for (std::size_t k = 0; k + 1 < g.heights().size(); ++k) {
      CHECK(g.heights()[k] > g.heights()[k + 1]);
    }
    CHECK(g.cdf(r.max()) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("grenander handles ties") {
  Sample s = Sample::from_raw({1.0, 1.0, 2.0});
  StepDensity fit = grenander_fit(s);
  CHECK(fit.cdf(1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(fit.cdf(2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.heights()[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("marshall inequality single observation") {
  Sample s = Sample::from_raw({std::log(2.0)});
  TrueModel model = TrueModel::exponential(1.0);
  MarshallCheck chk = marshall_check(grenander_fit(s), s, model);
  CHECK(chk.sup_emp == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(chk.sup_hat == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(chk.sup_hat <= chk.sup_emp + chk.tolerance);
  CHECK(chk.ok);
}

TEST_CASE("marshall requires a concave model cdf") {
  TrueModel bad = TrueModel::custom(
      "increasing-density", [](double x) { return x < 1.0 ? 2.0 * x : 0.0; },
      [](double x) {
        const double t = std::min(std::max(x, 0.0), 1.0);
        return t * t;
      },
      [](double u) { return std::sqrt(u); }, true, false, {1.0}, 1.0);
  Sample s = Sample::from_raw({0.5});
  CHECK(thrown_code([&] { marshall_check(grenander_fit(s), s, bad); }) ==
        Errc::NonConcaveModel);
}

TEST_CASE("marshall inequality on random exponential samples") {
  TrueModel model = TrueModel::exponential(1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + static_cast<std::size_t>(rep % 25);
    Sample s = sample_model(model, n, 555 + static_cast<std::uint64_t>(rep));
    MarshallCheck chk = marshall_check(grenander_fit(s), s, model);
    CHECK(chk.ok);
    CHECK(chk.sup_hat <= chk.sup_emp + 1e-12);
  }
}
