#ifndef SHAPEDENS_TRIANGULAR_MIX_HPP_
#define SHAPEDENS_TRIANGULAR_MIX_HPP_

#include <cstddef>
#include <utility>
#include <vector>

namespace shapedens {

/// Inner product of two triangular generators,
/// integral over [0, inf) of (tau - x)_+ (sigma - x)_+ dx.
/// Throws NonPositiveKnot for tau <= 0 or sigma <= 0.
double gram(double tau, double sigma);

/// psi(tau, r) = integral over [0, r] of (tau - x)_+ dx:
/// tau r - r^2/2 for r <= tau, tau^2/2 beyond.
double generator_cdf(double tau, double r);

/// xi(tau, r) = integral over [0, r] of psi(tau, .):
/// tau r^2/2 - r^3/6 for r <= tau, tau^3/3 + (r - tau) tau^2/2 beyond.
double generator_cdf_integral(double tau, double r);

/// Nonnegative mixture of triangular generators,
///   h(x) = sum_j a_j (tau_j - x)_+ ,
/// the canonical form of a convex, non-increasing, integrable piecewise
/// linear function on [0, inf). Knots are kept strictly increasing; knots
/// closer than 1e-12 * (1 + tau) are merged by summing coefficients.
/// The empty mix is h == 0. Immutable after construction.
class TriangularMix {
 public:
  TriangularMix() = default;

  /// Throws NonPositiveKnot / NonPositiveValue / NonFiniteValue on invalid
  /// generators. Input need not be sorted.
  TriangularMix(std::vector<double> knots, std::vector<double> coefficients);

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  std::size_t size() const { return knots_.size(); }
  bool empty() const { return knots_.empty(); }
  double last_knot() const { return knots_.empty() ? 0.0 : knots_.back(); }

  /// h(x). Zero for x >= last knot.
  double eval(double x) const;

  /// F(r) = integral of h over [0, r]; equals mass() for r >= last knot.
  double cdf(double r) const;

  /// Integral of the cdf over [0, r].
  double cdf_integral(double r) const;

  /// Total mass, sum a_j tau_j^2 / 2.
  double mass() const;

  /// Vertices (x_k, h(x_k)) of the piecewise linear graph: x_0 = 0 followed
  /// by the knots. Convexity shows up as non-decreasing slopes.
  std::vector<std::pair<double, double>> knot_points() const;

 private:
  std::vector<double> knots_;   // strictly increasing, > 0
  std::vector<double> coeffs_;  // > 0
};

}  // namespace shapedens

#endif  // SHAPEDENS_TRIANGULAR_MIX_HPP_
