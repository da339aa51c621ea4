#include "shapedens/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace shapedens {

Extrema Extrema::empty() {
  Extrema e;
  e.sup = -std::numeric_limits<double>::infinity();
  e.inf = std::numeric_limits<double>::infinity();
  return e;
}

void Extrema::absorb(double value, double x) {
  if (value > sup) {
    sup = value;
    arg_sup = x;
  }
  if (value < inf) {
    inf = value;
    arg_inf = x;
  }
}

void Extrema::absorb(const Extrema& other) {
  absorb(other.sup, other.arg_sup);
  absorb(other.inf, other.arg_inf);
}

double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  double xtol) {
  static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > xtol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double xtol) {
  return golden_max([&](double x) { return -f(x); }, lo, hi, xtol);
}

double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double xtol) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  double fhi = f(hi);
  if (fhi == 0.0) return hi;
  // tolerate same-sign brackets caused by rounding at the edges
  if ((flo > 0.0) == (fhi > 0.0)) {
    return std::abs(flo) < std::abs(fhi) ? lo : hi;
  }
  while (hi - lo > xtol) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> quadratic_roots(double a, double b, double c) {
  std::vector<double> roots;
  if (a == 0.0) {
    if (b != 0.0) roots.push_back(-c / b);
    return roots;
  }
  double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return roots;
  double sq = std::sqrt(disc);
  // Citardauq pairing avoids cancellation.
  double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
  double r1 = q / a;
  if (q != 0.0) {
    double r2 = c / q;
    roots = {r1, r2};
    std::sort(roots.begin(), roots.end());
  } else {
    roots = {r1, -b / a - r1};
    std::sort(roots.begin(), roots.end());
  }
  return roots;
}

Extrema scan_extrema(const std::function<double(double)>& f, double lo,
                     double hi, const std::vector<double>& critical,
                     int grid_points) {
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(grid_points) + critical.size() + 2);
  for (int i = 0; i <= grid_points; ++i) {
    xs.push_back(lo + (hi - lo) * static_cast<double>(i) /
                          static_cast<double>(grid_points));
  }
  for (double c : critical) {
    if (c >= lo && c <= hi) xs.push_back(c);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  Extrema ex = Extrema::empty();
  std::vector<double> vs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    vs[i] = f(xs[i]);
    ex.absorb(vs[i], xs[i]);
  }

  // Refine around every grid-local extremum, so near-ties between separate
  // bumps cannot cost grid-resolution accuracy.
  double xtol = 1e-13 * (1.0 + std::abs(hi));
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    if (vs[i] >= vs[i - 1] && vs[i] >= vs[i + 1]) {
      double x = golden_max(f, xs[i - 1], xs[i + 1], xtol);
      ex.absorb(f(x), x);
    }
    if (vs[i] <= vs[i - 1] && vs[i] <= vs[i + 1]) {
      double x = golden_min(f, xs[i - 1], xs[i + 1], xtol);
      ex.absorb(f(x), x);
    }
  }
  return ex;
}

}  // namespace shapedens
