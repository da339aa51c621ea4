#include "shapedens/triangular_mix.hpp"

#include <algorithm>
#include <cmath>

#include "shapedens/errors.hpp"

namespace shapedens {

double generator_cdf(double tau, double r) {
  double m = std::min(tau, r);
  return tau * m - 0.5 * m * m;
}

double generator_cdf_integral(double tau, double r) {
  double m = std::min(tau, r);
  double out = 0.5 * tau * m * m - m * m * m / 6.0;
  if (r > tau) out += (r - tau) * 0.5 * tau * tau;
  return out;
}

double gram(double tau, double sigma) {
  if (!(tau > 0.0) || !(sigma > 0.0)) {
    throw Error(Errc::NonPositiveKnot, "gram requires positive knots");
  }
  double m = std::min(tau, sigma);
  return tau * sigma * m - 0.5 * (tau + sigma) * m * m + m * m * m / 3.0;
}

TriangularMix::TriangularMix(std::vector<double> knots,
                             std::vector<double> coefficients) {
  if (knots.size() != coefficients.size()) {
    throw Error(Errc::ParameterOutOfRange,
                "knot and coefficient counts differ");
  }
  for (std::size_t j = 0; j < knots.size(); ++j) {
    if (!std::isfinite(knots[j]) || !std::isfinite(coefficients[j])) {
      throw Error(Errc::NonFiniteValue, "non-finite generator",
                  static_cast<long>(j));
    }
    if (knots[j] <= 0.0) {
      throw Error(Errc::NonPositiveKnot, "generator knot must be positive",
                  static_cast<long>(j));
    }
    if (coefficients[j] <= 0.0) {
      throw Error(Errc::NonPositiveValue,
                  "generator coefficient must be positive",
                  static_cast<long>(j));
    }
  }

  std::vector<std::size_t> order(knots.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return knots[i] < knots[j]; });

  for (std::size_t j : order) {
    double tau = knots[j];
    if (!knots_.empty() && tau - knots_.back() <= 1e-12 * (1.0 + tau)) {
      coeffs_.back() += coefficients[j];  // merge coincident knots
    } else {
      knots_.push_back(tau);
      coeffs_.push_back(coefficients[j]);
    }
  }
}

double TriangularMix::eval(double x) const {
  double v = 0.0;
  for (std::size_t j = 0; j < knots_.size(); ++j) {
    if (knots_[j] > x) v += coeffs_[j] * (knots_[j] - x);
  }
  return v;
}

double TriangularMix::cdf(double r) const {
  double v = 0.0;
  for (std::size_t j = 0; j < knots_.size(); ++j) {
    v += coeffs_[j] * generator_cdf(knots_[j], r);
  }
  return v;
}

double TriangularMix::cdf_integral(double r) const {
  double v = 0.0;
  for (std::size_t j = 0; j < knots_.size(); ++j) {
    v += coeffs_[j] * generator_cdf_integral(knots_[j], r);
  }
  return v;
}

double TriangularMix::mass() const {
  double v = 0.0;
  for (std::size_t j = 0; j < knots_.size(); ++j) {
    v += 0.5 * coeffs_[j] * knots_[j] * knots_[j];
  }
  return v;
}

std::vector<std::pair<double, double>> TriangularMix::knot_points() const {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(knots_.size() + 1);
  pts.emplace_back(0.0, eval(0.0));
  for (double t : knots_) pts.emplace_back(t, eval(t));
  return pts;
}

}  // namespace shapedens
