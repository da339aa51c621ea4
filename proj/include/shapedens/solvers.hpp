#ifndef SHAPEDENS_SOLVERS_HPP_
#define SHAPEDENS_SOLVERS_HPP_

#include <string>
#include <vector>

#include "shapedens/sample.hpp"
#include "shapedens/triangular_mix.hpp"

namespace shapedens {

/// Solver knobs. Zero means "derive from the sample":
/// tol_cert = 1e-10 * (1 + X_(n)), tau_cap = 4 * X_(n).
struct FitConfig {
  double tol_cert = 0.0;
  int max_iter = 500;
  double tau_cap = 0.0;
  /// Final Newton refinement of (knots, coefficients) jointly. Support
  /// reduction alone leaves knot locations accurate only to about the
  /// square root of tol_cert; the polish drives the knot equalities down
  /// to rounding error.
  bool polish = true;

  double resolved_tol(const Sample& s) const;
  double resolved_cap(const Sample& s) const;
};

struct FitResult {
  TriangularMix mix;
  int iterations = 0;
  /// Most negative value of the optimality residual over (0, tau_cap].
  double final_residual = 0.0;
  double objective = 0.0;
  bool converged = false;
  std::vector<std::string> warnings;
  /// Objective after each outer iteration (strictly decreasing).
  std::vector<double> objective_history;
};

struct KnotCandidate {
  double tau = 0.0;
  double value = 0.0;
};

/// Least-squares criterion integral of h^2 minus twice integral of h dF_n,
/// evaluated through the Gram/moment closed forms.
double lse_objective(const TriangularMix& h, const Sample& s);

/// g(tau) = Hhat(tau) - H(tau), the integrated-CDF gap. Nonnegative
/// everywhere and zero at the knots exactly at the optimum.
double lse_residual(const TriangularMix& h, const Sample& s, double tau);

/// Exact global minimizer of lse_residual over (0, cap]. The residual is
/// cubic between consecutive points of {order statistics, knots}, so each
/// piece is minimized in closed form. Ties within 1e-14 go to the smaller
/// tau.
KnotCandidate lse_best_knot(const TriangularMix& h, const Sample& s,
                            double cap);

/// Support-reduction fit of the least-squares convex density.
FitResult lse_fit(const Sample& s, const FitConfig& cfg = {});

/// mass(h) - mean log h(X_i), the negated log-likelihood criterion.
/// Throws ZeroDensityAtObservation when some h(X_i) <= 0.
double mle_objective(const TriangularMix& h, const Sample& s);

/// d(tau) = tau^2/2 - (1/n) sum (tau - X_i)_+ / h(X_i).
double mle_residual(const TriangularMix& h, const Sample& s, double tau);

/// Exact global minimizer of mle_residual over (0, cap]: the residual is a
/// convex quadratic between consecutive order statistics.
KnotCandidate mle_best_knot(const TriangularMix& h, const Sample& s,
                            double cap);

/// Support-reduction fit of the maximum-likelihood convex density.
FitResult mle_fit(const Sample& s, const FitConfig& cfg = {});

}  // namespace shapedens

#endif  // SHAPEDENS_SOLVERS_HPP_
