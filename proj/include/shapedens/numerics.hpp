#ifndef SHAPEDENS_NUMERICS_HPP_
#define SHAPEDENS_NUMERICS_HPP_

#include <functional>
#include <vector>

namespace shapedens {

/// Extremum pair of a scalar function, with the locations that achieve it.
/// Default state has sup = inf = 0, i.e. a zero candidate already absorbed
/// (the tail behaviour of CDF differences); start from empty() otherwise.
struct Extrema {
  double sup = 0.0;
  double inf = 0.0;
  double arg_sup = 0.0;
  double arg_inf = 0.0;

  static Extrema empty();

  void absorb(double value, double x);
  void absorb(const Extrema& other);
};

/// Location of the maximum of a unimodal f on [lo, hi] by golden-section.
double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  double xtol);

/// Location of the minimum of a unimodal f on [lo, hi].
double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double xtol);

/// Root of f on [lo, hi] by bisection; f(lo) and f(hi) must have opposite
/// signs (either may be zero).
double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double xtol);

/// Real roots of a*x^2 + b*x + c = 0, ascending. Handles the linear case.
std::vector<double> quadratic_roots(double a, double b, double c);

/// Extrema of f over [lo, hi] by a dense scan refined with golden-section
/// around the best cells. `critical` points (kinks, jumps) are added to the
/// candidate set and used as cell boundaries, so piecewise-smooth functions
/// are resolved exactly at their breakpoints.
Extrema scan_extrema(const std::function<double(double)>& f, double lo,
                     double hi, const std::vector<double>& critical,
                     int grid_points = 512);

}  // namespace shapedens

#endif  // SHAPEDENS_NUMERICS_HPP_
