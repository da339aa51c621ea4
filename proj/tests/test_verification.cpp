#include <cmath>
#include <functional>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "shapedens/errors.hpp"
#include "shapedens/grenander.hpp"
#include "shapedens/models.hpp"
#include "shapedens/sample.hpp"
#include "shapedens/simulate.hpp"
#include "shapedens/solvers.hpp"
#include "shapedens/verification.hpp"
#include "test_util.hpp"

using namespace shapedens;
using testutil::thrown_code;

namespace {

TriangularMix scale_coeffs(const TriangularMix& mix, double factor) {
  std::vector<double> a = mix.coefficients();
  for (double& v : a) v *= factor;
  return TriangularMix(mix.knots(), a);
}

TrueModel model_from_mix(const TriangularMix& mix) {
  return TrueModel::custom(
      "frozen-fit", [mix](double x) { return mix.eval(x); },
      [mix](double x) { return x <= 0.0 ? 0.0 : mix.cdf(x); },
      [](double) { return 0.0; }, true, true, mix.knots(), mix.last_knot());
}

}  // namespace

TEST_CASE("knot placement checks") {
  TrueModel model = TrueModel::exponential(1.0);
  Sample s = sample_model(model, 25, 4242);
  FitResult fit = lse_fit(s);
  CHECK(check_knot_placement(fit.mix, s).all_pass());

  Sample tiny = Sample::from_raw({1.0, 2.0, 5.0});

  VerificationReport crowded =
      check_knot_placement(TriangularMix({3.0, 4.0, 6.0}, {0.1, 0.1, 0.1}),
                           tiny);
  CHECK_FALSE(crowded.all_pass());
  CHECK_FALSE(crowded.find("one knot per gap")->pass);
  CHECK(crowded.find("single knot beyond largest observation")->pass);

  VerificationReport touching =
      check_knot_placement(TriangularMix({2.0, 6.0}, {0.1, 0.1}), tiny);
  CHECK_FALSE(touching.find("knots clear of observations")->pass);

  VerificationReport short_support =
      check_knot_placement(TriangularMix({3.0}, {0.2}), tiny);
  CHECK_FALSE(
      short_support.find("single knot beyond largest observation")->pass);

  VerificationReport two_beyond = check_knot_placement(
      TriangularMix({6.0, 7.0}, {0.05, 0.05}), tiny);
  CHECK_FALSE(
      two_beyond.find("single knot beyond largest observation")->pass);
}

TEST_CASE("least-squares optimality characterization") {
  Sample s = Sample::from_raw({1.0});
  FitResult fit = lse_fit(s);
  VerificationReport ok = check_lse_optimality(fit.mix, s);
  CHECK(ok.all_pass());
  CHECK(ok.find("certificate minimum") != nullptr);
  CHECK(ok.find("knot residual equalities") != nullptr);
  CHECK(ok.find("knot cdf equalities") != nullptr);
  CHECK(ok.find("unit mass") != nullptr);

  // Inflating the coefficient keeps the insertion residual nonnegative but
  // breaks the mass; deflating flips the residual sign past the last knot.
  VerificationReport inflated =
      check_lse_optimality(scale_coeffs(fit.mix, 1.01), s);
  CHECK_FALSE(inflated.all_pass());
  CHECK_FALSE(inflated.find("unit mass")->pass);
  CHECK(inflated.find("certificate minimum")->pass);

  VerificationReport deflated =
      check_lse_optimality(scale_coeffs(fit.mix, 0.99), s);
  CHECK_FALSE(deflated.find("certificate minimum")->pass);
}

TEST_CASE("likelihood optimality characterization") {
  Sample s = Sample::from_raw({1.0});
  FitResult fit = mle_fit(s);
  VerificationReport ok = check_mle_optimality(fit.mix, s);
  CHECK(ok.all_pass());
  CHECK(ok.find("interval integral dominance") != nullptr);

  VerificationReport inflated =
      check_mle_optimality(scale_coeffs(fit.mix, 1.01), s);
  CHECK_FALSE(inflated.find("unit mass")->pass);
  CHECK(inflated.find("certificate minimum")->pass);

  VerificationReport deflated =
      check_mle_optimality(scale_coeffs(fit.mix, 0.99), s);
  CHECK_FALSE(deflated.find("certificate minimum")->pass);
}

TEST_CASE("cdf deviation extrema: empirical overload") {
  Sample s = Sample::from_raw({std::log(2.0)});
  TrueModel model = TrueModel::exponential(1.0);
  Extrema e = sup_inf_difference(s, model);
  CHECK(e.sup == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(e.inf == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(e.arg_sup == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("cdf deviation extrema: estimate equal to the model") {
  TrueModel gen = TrueModel::exponential(1.0);
  Sample s = sample_model(gen, 12, 17);
  FitResult fit = lse_fit(s);
  Extrema e = sup_inf_difference(fit.mix, model_from_mix(fit.mix));
  CHECK(std::abs(e.sup) <= 1e-12);
  CHECK(std::abs(e.inf) <= 1e-12);
}

TEST_CASE("cdf deviation extrema agree with a dense grid") {
  TrueModel model = TrueModel::exponential(1.0);
  for (int rep = 0; rep < 5; ++rep) {
    Sample s = sample_model(model, 10 + 5 * rep, 60 + rep);
    FitResult ls = lse_fit(s);
    Extrema lib = sup_inf_difference(ls.mix, model);
    const double span = std::max(ls.mix.last_knot(), 6.0 * s.max());
    auto mix_diff = [&](double x) { return ls.mix.cdf(x) - model.cdf(x); };
    Extrema grid = oracles::grid_extrema(mix_diff, 0.0, span, 20000);
    for (double t : ls.mix.knots()) grid.absorb(mix_diff(t), t);
    grid.absorb(ls.mix.mass() - 1.0, span);
    CHECK(lib.sup >= grid.sup - 1e-12);
    CHECK(lib.inf <= grid.inf + 1e-12);
    CHECK(lib.sup <= grid.sup + 1e-6);
    CHECK(lib.inf >= grid.inf - 1e-6);

    StepDensity g = grenander_fit(s);
    ConcaveMajorant cm = g.majorant();
    Extrema clib = sup_inf_difference(cm, model);
    auto cm_diff = [&](double x) { return cm(x) - model.cdf(x); };
    Extrema cgrid = oracles::grid_extrema(cm_diff, 0.0, span, 20000);
    for (double t : cm.x()) cgrid.absorb(cm_diff(t), t);
    cgrid.absorb(g.mass() - 1.0, span);
    CHECK(clib.sup >= cgrid.sup - 1e-12);
    CHECK(clib.inf <= cgrid.inf + 1e-12);
    CHECK(clib.sup <= cgrid.sup + 1e-6);
    CHECK(clib.inf >= cgrid.inf - 1e-6);
  }
}

TEST_CASE("deviation bounds for a single observation") {
  Sample s = Sample::from_raw({1.0});
  TrueModel model = TrueModel::exponential(1.0);
  FitResult ml = mle_fit(s);
  FitResult ls = lse_fit(s);
  VerificationReport rep = deviation_bound_margins(ml.mix, ls.mix, s, model);
  CHECK(rep.all_pass());
  CHECK(rep.find("ml lower deviation bound")->margin >= 0.0);
  CHECK(rep.find("ls lower deviation bound")->margin >= 0.0);
  CHECK(rep.find("ls upper deviation bound")->margin >= 0.0);
  CHECK(rep.find("ls sup-norm factor two")->margin >= 0.0);

  TrueModel concave_only = TrueModel::custom(
      "sqrt-cdf", [](double x) { return x < 1.0 ? 0.5 / std::sqrt(x) : 0.0; },
      [](double x) { return std::sqrt(std::clamp(x, 0.0, 1.0)); },
      [](double u) { return u * u; }, false, true, {}, 1.0);
  CHECK(thrown_code([&] {
          deviation_bound_margins(ml.mix, ls.mix, s, concave_only);
        }) == Errc::NonConvexModel);
}

TEST_CASE("interval scenarios replay the envelope bound") {
  TrueModel model = TrueModel::exponential(1.0);
  Sample s = sample_model(model, 20, 2024);

  FitResult ls = lse_fit(s);
  Extrema combined = Extrema::empty();
  for (const IntervalScenario& sc : knot_interval_scenarios(ls.mix, s, model)) {
    VerificationReport up = check_interval_bound(sc, BoundForm::kUpper);
    VerificationReport lo = check_interval_bound(sc, BoundForm::kLower);
    CHECK(up.all_pass());
    CHECK(lo.all_pass());
    combined.absorb(sc.fitted_minus_model_extrema());
  }
  combined.absorb(ls.mix.mass() - 1.0, ls.mix.last_knot());
  Extrema global = sup_inf_difference(ls.mix, model);
  CHECK(combined.sup == doctest::Approx(global.sup).epsilon(1e-10));
  CHECK(combined.inf == doctest::Approx(global.inf).epsilon(1e-10));

  FitResult ml = mle_fit(s);
  for (const IntervalScenario& sc : knot_interval_scenarios(ml.mix, s, model)) {
    VerificationReport lo = check_interval_bound(sc, BoundForm::kLower);
    CHECK(lo.all_pass());
  }

  IntervalScenario bad;
  bad.a = 1.0;
  bad.b = 1.0;
  CHECK(thrown_code([&] { check_interval_bound(bad, BoundForm::kUpper); }) ==
        Errc::ParameterOutOfRange);
}

TEST_CASE("sharpness fixture reproduces the closed-form triple") {
  for (double c : {1.0, 2.0}) {
    for (double eps : {0.5, 0.1, 0.01}) {
      SharpnessFixture fx = sharpness_fixture(c, eps);
      CHECK(fx.sup_fitted_minus_model ==
            doctest::Approx(c - eps * eps).epsilon(1e-15));
      CHECK(fx.sup_empirical_minus_model ==
            doctest::Approx(c - 1.0 / 3.0).epsilon(1e-15));
      CHECK(fx.empirical_minus_model_at_end ==
            doctest::Approx(c - 1.0).epsilon(1e-15));

      VerificationReport rep =
          check_interval_bound(fx.scenario, BoundForm::kUpper);
      CHECK(rep.all_pass());
      const CheckItem* concl = rep.find("upper envelope");
      REQUIRE(concl != nullptr);
      CHECK(std::abs(concl->margin - eps * eps) <= 1e-12);
    }
  }
  CHECK(thrown_code([] { sharpness_fixture(0.9, 0.1); }) ==
        Errc::ParameterOutOfRange);
  CHECK(thrown_code([] { sharpness_fixture(1.0, 0.0); }) ==
        Errc::ParameterOutOfRange);
  CHECK(thrown_code([] { sharpness_fixture(1.0, 0.6); }) ==
        Errc::ParameterOutOfRange);
}

TEST_CASE("violated hypotheses are reported, not thrown") {
  // Fhat = 2x - x^2 pushes mass early: integral dominance fails on [0, 1]
  // and the conclusion margin goes negative, flagged as unsupported.
  IntervalScenario sc;
  sc.a = 0.0;
  sc.b = 1.0;
  sc.model_cdf = [](double x) { return x; };
  sc.empirical_cdf = [](double x) { return x; };
  sc.fitted_cdf = [](double x) { return 2.0 * x - x * x; };
  sc.empirical_cdf_integral = [](double r) { return r * r / 2.0; };
  sc.fitted_cdf_integral = [](double r) { return r * r - r * r * r / 3.0; };

  VerificationReport rep = check_interval_bound(sc, BoundForm::kUpper);
  CHECK_FALSE(rep.all_pass());
  CHECK(rep.find("endpoints match")->pass);
  CHECK(rep.find("fitted derivative linear")->pass);
  CHECK(rep.find("model derivative convex")->pass);
  CHECK_FALSE(rep.find("integral dominance")->pass);
  const CheckItem* concl = rep.find("upper envelope");
  REQUIRE(concl != nullptr);
  CHECK_FALSE(concl->pass);
  CHECK(concl->margin == doctest::Approx(-0.25).epsilon(1e-9));
  CHECK(concl->note.find("unsupported") != std::string::npos);
}
