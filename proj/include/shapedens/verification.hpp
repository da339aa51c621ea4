#ifndef SHAPEDENS_VERIFICATION_HPP_
#define SHAPEDENS_VERIFICATION_HPP_

#include <functional>
#include <string>
#include <vector>

#include "shapedens/grenander.hpp"
#include "shapedens/models.hpp"
#include "shapedens/numerics.hpp"
#include "shapedens/sample.hpp"
#include "shapedens/solvers.hpp"
#include "shapedens/triangular_mix.hpp"

namespace shapedens {

// One named inequality or equality check.  `margin` is the signed slack of
// the inequality (>= 0 when it holds exactly); the check passes when
// margin >= -tolerance.  `location` is the argument at which the margin is
// attained, when that makes sense for the check.
struct CheckItem {
  std::string name;
  double margin = 0.0;
  double tolerance = 0.0;
  double location = 0.0;
  bool pass = false;
  std::string note;
};

struct VerificationReport {
  std::vector<CheckItem> items;

  void add(CheckItem item);
  bool all_pass() const;
  const CheckItem* find(const std::string& name) const;
};

// Structural checks on the knot set of a fitted mixture against the sample:
//   "one knot per gap":   at most one knot strictly between consecutive
//                         distinct order statistics,
//   "knots clear of observations":  no knot within tol_loc of any
//                         observation (margin = min distance - tol_loc),
//   "single knot beyond largest observation".
// Ties in the sample collapse to distinct order statistics first.
// tol_loc == 0 resolves to 1e-7 * (1 + max observation).
VerificationReport check_knot_placement(const TriangularMix& mix,
                                        const Sample& s,
                                        double tol_loc = 0.0);

// Optimality characterization of a least-squares fit:
//   "certificate minimum":        min over tau > 0 of the insertion
//                                 residual is >= -tol (exact per-piece
//                                 minimizer, not a grid),
//   "knot residual equalities":   the residual vanishes at every knot,
//   "knot cdf equalities":        fitted and empirical CDFs agree at 0 and
//                                 at every knot,
//   "unit mass".
VerificationReport check_lse_optimality(const TriangularMix& mix,
                                        const Sample& s, double tol = 1e-8);

// Optimality characterization of a maximum-likelihood fit:
//   "certificate minimum", "knot residual equalities",
//   "knot cdf equalities", "unit mass" as above (with the likelihood
//   residual), plus
//   "interval integral dominance": for consecutive knots t_k < r <= t_{k+1},
//       integral of the empirical CDF over [t_k, r] is at most the integral
//       of the fitted CDF, checked on a 64-point grid per interval plus
//       endpoints.
// Throws Error(Errc::ZeroDensityAtObservation) if the fitted density
// vanishes at an observation.
VerificationReport check_mle_optimality(const TriangularMix& mix,
                                        const Sample& s, double tol = 1e-8);

// Extrema of (estimated CDF - model CDF) over [0, infinity).
//
// Sample overload: exact order-statistic formulas for the empirical CDF,
// including left limits at jumps; the origin and the far tail contribute
// the value 0.  TriangularMix overload: per-piece scan with golden-section
// refinement over [0, last knot], knots and model breakpoints as critical
// points, plus the tail limit (mass - 1).  ConcaveMajorant overload: the
// same per-segment treatment of the majorant.
Extrema sup_inf_difference(const Sample& s, const TrueModel& model);
Extrema sup_inf_difference(const TriangularMix& mix, const TrueModel& model);
Extrema sup_inf_difference(const ConcaveMajorant& cm, const TrueModel& model);

// Marshall-type envelope margins for a pair of fits against the model that
// generated the sample.  Writing e* = sup(Fhat - F), e_* = inf(Fhat - F),
// d* = sup(Femp - F), d_* = inf(Femp - F), the items are
//   "ml lower deviation bound":   e_*(ml) - [ (3/2) d_* - (1/2) d* ] >= 0,
//   "ls lower deviation bound":   e_*(ls) - [ (3/2) d_* - (1/2) d* ] >= 0,
//   "ls upper deviation bound":   [ (3/2) d* - (1/2) d_* ] - e*(ls) >= 0,
//   "ls sup-norm factor two":     2 ||Femp - F||_inf - ||Fls - F||_inf >= 0,
// each with tolerance 1e-8.  Throws Error(Errc::NonConvexModel) when the
// model density is not convex (the bounds are not asserted there).
VerificationReport deviation_bound_margins(const TriangularMix& fit_ml,
                                           const TriangularMix& fit_ls,
                                           const Sample& s,
                                           const TrueModel& model);

// A self-contained scenario on an interval [a, b] for the one-interval
// envelope bound: a model CDF F, a fitted CDF Fhat, and an empirical CDF
// Femp, with the running integrals of the latter two from a.  The scan
// fallback for extrema assumes the handles are continuous inside (a, b)
// except at the listed breakpoints; supply the exact extrema engines for
// step functions.
struct IntervalScenario {
  double a = 0.0;
  double b = 0.0;
  std::function<double(double)> model_cdf;
  std::function<double(double)> fitted_cdf;
  std::function<double(double)> empirical_cdf;
  // r -> integral over [a, r] of the corresponding CDF.
  std::function<double(double)> fitted_cdf_integral;
  std::function<double(double)> empirical_cdf_integral;
  // Kinks or jumps strictly inside (a, b), used as scan critical points.
  std::vector<double> breakpoints;
  // The model-derivative convexity hypothesis is checked on
  // (max(a, convexity_from), b); scenarios with a known kink set this past
  // the kink and record the fact in `note`.
  double convexity_from = 0.0;
  std::string note;
  // Optional exact extrema engines over [a, b]; scanned when empty.
  std::function<Extrema()> fitted_minus_model_extrema;
  std::function<Extrema()> empirical_minus_model_extrema;
};

enum class BoundForm {
  kUpper,  // sup(Fhat - F) <= (3/2) sup(Femp - F) - (1/2) (Femp - F)(b)
  kLower,  // inf(Fhat - F) >= (3/2) inf(Femp - F) - (1/2) (Femp - F)(a)
};

// Checks the hypotheses and the conclusion of the one-interval envelope
// bound on [a, b].  Hypothesis items:
//   "endpoints match":            Fhat = Femp at a and b (1e-10),
//   "fitted derivative linear":   third differences of Fhat vanish on a
//                                 256-point grid (1e-10),
//   "model derivative convex":    second differences of a numerically
//                                 differentiated F are >= -1e-8,
//   "integral dominance":         for kUpper, integral of Fhat over [r, b]
//                                 is at most that of Femp for all r; for
//                                 kLower, integral of Fhat over [a, r] is
//                                 at least that of Femp; 256-point r-grid.
// The conclusion item ("upper envelope" or "lower envelope") is always
// evaluated; when a hypothesis fails, the conclusion carries a note naming
// the violated hypotheses instead of the report throwing.
VerificationReport check_interval_bound(const IntervalScenario& sc,
                                        BoundForm form);

// One scenario per knot interval [t_k, t_{k+1}] of a fitted mixture
// (t_0 = 0), with exact empirical-vs-model extrema engines.  Used to replay
// the envelope bound interval by interval.
std::vector<IntervalScenario> knot_interval_scenarios(const TriangularMix& mix,
                                                      const Sample& s,
                                                      const TrueModel& model);

// Worst-case fixture on [0, 1] showing the (3/2, 1/2) constants cannot be
// improved.  For c >= 1 and 0 < eps <= 1/2:
//   F(x)    = x^2 - c  on [eps, 1],  linearly interpolated to F(0) = 0,
//   Fhat    = 0,
//   Femp(x) = x^2 - 1/3 on (0, 1), 0 at the endpoints.
// The upper-envelope slack is exactly eps^2:
//   sup(Fhat - F) = c - eps^2,  sup(Femp - F) = c - 1/3,
//   (Femp - F)(1) = c - 1.
// F has a derivative kink at eps, so the scenario checks derivative
// convexity on (eps, 1) and notes the kink.  Throws
// Error(Errc::ParameterOutOfRange) for c < 1 or eps outside (0, 1/2].
struct SharpnessFixture {
  IntervalScenario scenario;
  double sup_fitted_minus_model = 0.0;    // c - eps^2
  double sup_empirical_minus_model = 0.0; // c - 1/3
  double empirical_minus_model_at_end = 0.0;  // c - 1
};

SharpnessFixture sharpness_fixture(double c, double eps);

}  // namespace shapedens

#endif  // SHAPEDENS_VERIFICATION_HPP_
