#ifndef SHAPEDENS_GRENANDER_HPP_
#define SHAPEDENS_GRENANDER_HPP_

#include <cstddef>
#include <utility>
#include <vector>

#include "shapedens/models.hpp"
#include "shapedens/sample.hpp"

namespace shapedens {

// Concave piecewise-linear function given by its vertices. Evaluation is
// constant outside [x.front(), x.back()].
class ConcaveMajorant {
 public:
  ConcaveMajorant(std::vector<double> x, std::vector<double> y);

  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }
  std::size_t segments() const { return x_.size() - 1; }
  double slope(std::size_t segment) const;
  double operator()(double t) const;

 private:
  std::vector<double> x_;
  std::vector<double> y_;
};

// Smallest concave function dominating the linear interpolant of the given
// points. Vertices are a subsequence of the input; slopes strictly decrease.
// Requires >= 2 points, first point (0, 0), x strictly increasing.
ConcaveMajorant least_concave_majorant(
    const std::vector<std::pair<double, double>>& points);

// Non-increasing step density: height h_k on (b_{k-1}, b_k], zero beyond.
class StepDensity {
 public:
  StepDensity(std::vector<double> breakpoints, std::vector<double> heights);

  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& heights() const { return heights_; }
  double eval(double x) const;  // left-continuous: eval(b_k) = h_k
  double cdf(double r) const;
  double mass() const { return cum_.back(); }
  ConcaveMajorant majorant() const;

 private:
  std::vector<double> breaks_;   // b_0 = 0 < b_1 < ... < b_K
  std::vector<double> heights_;  // h_1 > h_2 > ... > h_K > 0
  std::vector<double> cum_;      // cdf at each breakpoint
};

// Left derivative of the least concave majorant of the empirical CDF.
StepDensity grenander_fit(const Sample& s);

struct MarshallCheck {
  double sup_hat = 0.0;  // sup |F_hat - F|
  double sup_emp = 0.0;  // sup |F_n - F|
  bool ok = false;       // sup_hat <= sup_emp + tolerance
  double tolerance = 1e-12;
};

// Classical Marshall inequality, checked pathwise. The model CDF must be
// concave (non-increasing density), otherwise NonConcaveModel is thrown.
MarshallCheck marshall_check(const StepDensity& fit, const Sample& sample,
                             const TrueModel& model);

}  // namespace shapedens

#endif  // SHAPEDENS_GRENANDER_HPP_
