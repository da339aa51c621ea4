#include "shapedens/grenander.hpp"

#include <algorithm>
#include <cmath>

#include "shapedens/errors.hpp"
#include "shapedens/numerics.hpp"

namespace shapedens {

ConcaveMajorant::ConcaveMajorant(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() < 2 || x_.size() != y_.size()) {
    throw Error(Errc::ParameterOutOfRange,
                "majorant needs >= 2 matching vertices");
  }
  for (std::size_t i = 1; i < x_.size(); ++i) {
    if (!(x_[i] > x_[i - 1])) {
      throw Error(Errc::UnsortedInput, "vertex abscissae must increase",
                  static_cast<long>(i));
    }
  }
}

double ConcaveMajorant::slope(std::size_t segment) const {
  return (y_[segment + 1] - y_[segment]) / (x_[segment + 1] - x_[segment]);
}

double ConcaveMajorant::operator()(double t) const {
  if (t <= x_.front()) return y_.front();
  if (t >= x_.back()) return y_.back();
  auto it = std::upper_bound(x_.begin(), x_.end(), t);
  std::size_t k = static_cast<std::size_t>(it - x_.begin());
  double w = (t - x_[k - 1]) / (x_[k] - x_[k - 1]);
  return y_[k - 1] + w * (y_[k] - y_[k - 1]);
}

ConcaveMajorant least_concave_majorant(
    const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) {
    throw Error(Errc::ParameterOutOfRange, "need at least 2 points");
  }
  if (points.front().first != 0.0 || points.front().second != 0.0) {
    throw Error(Errc::ParameterOutOfRange, "first point must be (0, 0)");
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].first > points[i - 1].first)) {
      throw Error(Errc::UnsortedInput, "abscissae must strictly increase",
                  static_cast<long>(i));
    }
  }

  // Monotone scan for the upper hull: keep a vertex only while it lies
  // strictly above the chord joining its neighbours.
  std::vector<std::pair<double, double>> hull;
  hull.reserve(points.size());
  for (const auto& p : points) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      double lhs = (b.second - a.second) * (p.first - a.first);
      double rhs = (p.second - a.second) * (b.first - a.first);
      if (lhs > rhs) break;
      hull.pop_back();
    }
    hull.push_back(p);
  }

  std::vector<double> x(hull.size()), y(hull.size());
  for (std::size_t i = 0; i < hull.size(); ++i) {
    x[i] = hull[i].first;
    y[i] = hull[i].second;
  }
  return ConcaveMajorant(std::move(x), std::move(y));
}

StepDensity::StepDensity(std::vector<double> breakpoints,
                         std::vector<double> heights)
    : breaks_(std::move(breakpoints)), heights_(std::move(heights)) {
  if (breaks_.size() < 2 || heights_.size() + 1 != breaks_.size()) {
    throw Error(Errc::ParameterOutOfRange,
                "step density needs breakpoints = heights + 1, sizes >= 2/1");
  }
  if (breaks_.front() != 0.0) {
    throw Error(Errc::ParameterOutOfRange, "first breakpoint must be 0");
  }
  cum_.resize(breaks_.size(), 0.0);
  for (std::size_t k = 1; k < breaks_.size(); ++k) {
    if (!(breaks_[k] > breaks_[k - 1])) {
      throw Error(Errc::UnsortedInput, "breakpoints must strictly increase",
                  static_cast<long>(k));
    }
    if (!(heights_[k - 1] > 0.0)) {
      throw Error(Errc::ParameterOutOfRange, "heights must be positive",
                  static_cast<long>(k - 1));
    }
    if (k >= 2 && !(heights_[k - 1] < heights_[k - 2])) {
      throw Error(Errc::ParameterOutOfRange,
                  "heights must strictly decrease", static_cast<long>(k - 1));
    }
    cum_[k] = cum_[k - 1] + heights_[k - 1] * (breaks_[k] - breaks_[k - 1]);
  }
}

double StepDensity::eval(double x) const {
  if (x < 0.0 || x > breaks_.back()) return 0.0;
  if (x == 0.0) return heights_.front();
  auto it = std::lower_bound(breaks_.begin(), breaks_.end(), x);
  std::size_t k = static_cast<std::size_t>(it - breaks_.begin());
  return heights_[k == 0 ? 0 : k - 1];
}

double StepDensity::cdf(double r) const {
  if (r <= 0.0) return 0.0;
  if (r >= breaks_.back()) return cum_.back();
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), r);
  std::size_t k = static_cast<std::size_t>(it - breaks_.begin());
  return cum_[k - 1] + heights_[k - 1] * (r - breaks_[k - 1]);
}

ConcaveMajorant StepDensity::majorant() const {
  return ConcaveMajorant(breaks_, cum_);
}

StepDensity grenander_fit(const Sample& s) {
  const auto& values = s.distinct_values();
  const auto& counts = s.cumulative_counts();
  const double n = static_cast<double>(s.size());

  std::vector<std::pair<double, double>> points;
  points.reserve(values.size() + 1);
  points.emplace_back(0.0, 0.0);
  for (std::size_t j = 0; j < values.size(); ++j) {
    points.emplace_back(values[j], static_cast<double>(counts[j]) / n);
  }

  ConcaveMajorant lcm = least_concave_majorant(points);
  std::vector<double> heights(lcm.segments());
  for (std::size_t k = 0; k < heights.size(); ++k) heights[k] = lcm.slope(k);
  return StepDensity(lcm.x(), std::move(heights));
}

MarshallCheck marshall_check(const StepDensity& fit, const Sample& sample,
                             const TrueModel& model) {
  if (!model.density_nonincreasing()) {
    throw Error(Errc::NonConcaveModel,
                "Marshall check needs a concave model CDF");
  }

  MarshallCheck out;

  // Empirical side: on each constant piece of F_n the difference F_n - F is
  // decreasing, so the extremes sit at order statistics and their left
  // limits.
  const auto& xs = sample.values();
  const double n = static_cast<double>(sample.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double fx = model.cdf(xs[i]);
    double up = static_cast<double>(i + 1) / n - fx;
    double down = fx - static_cast<double>(i) / n;
    out.sup_emp = std::max({out.sup_emp, up, down});
  }

  // Fitted side: F_hat is linear between breakpoints and F is concave, so
  // F_hat - F is convex per segment. Its maximum sits at segment endpoints;
  // the interior minimum is unimodal, found by golden section.
  const auto& b = fit.breakpoints();
  for (std::size_t k = 0; k < b.size(); ++k) {
    out.sup_hat = std::max(out.sup_hat, std::abs(fit.cdf(b[k]) - model.cdf(b[k])));
  }
  auto diff = [&](double x) { return fit.cdf(x) - model.cdf(x); };
  const double xtol = 1e-10 * (1.0 + b.back());
  for (std::size_t k = 1; k < b.size(); ++k) {
    double dmin = diff(golden_min(diff, b[k - 1], b[k], xtol));
    if (dmin < 0.0) out.sup_hat = std::max(out.sup_hat, -dmin);
  }

  out.ok = out.sup_hat <= out.sup_emp + out.tolerance;
  return out;
}

}  // namespace shapedens
