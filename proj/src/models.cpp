#include "shapedens/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "shapedens/errors.hpp"
#include "shapedens/numerics.hpp"

namespace shapedens {

namespace {

std::string format_param(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double triangular_cdf(double width, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= width) return 1.0;
  double u = 1.0 - x / width;
  return 1.0 - u * u;
}

}  // namespace

TrueModel TrueModel::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw Error(Errc::ParameterOutOfRange, "exponential rate must be > 0");
  }
  TrueModel m;
  m.name_ = "exponential";
  m.spec_ = "exp:" + format_param(rate);
  m.pdf_ = [rate](double x) { return x < 0.0 ? 0.0 : rate * std::exp(-rate * x); };
  m.cdf_ = [rate](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-rate * x); };
  m.quantile_ = [rate](double u) { return -std::log1p(-u) / rate; };
  m.density_convex_ = true;
  m.density_nonincreasing_ = true;
  m.support_end_ = std::numeric_limits<double>::infinity();
  return m;
}

TrueModel TrueModel::triangular(double width) {
  return triangular_mixture({1.0}, {width});
}

TrueModel TrueModel::triangular_mixture(std::vector<double> weights,
                                        std::vector<double> widths) {
  if (weights.empty() || weights.size() != widths.size()) {
    throw Error(Errc::ParameterOutOfRange,
                "mixture needs matching non-empty weights and widths");
  }
  double wsum = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!(weights[k] > 0.0) || !std::isfinite(weights[k])) {
      throw Error(Errc::ParameterOutOfRange, "mixture weights must be > 0");
    }
    if (!(widths[k] > 0.0) || !std::isfinite(widths[k])) {
      throw Error(Errc::ParameterOutOfRange, "triangular widths must be > 0");
    }
    wsum += weights[k];
  }
  for (double& w : weights) w /= wsum;

  TrueModel m;
  if (weights.size() == 1) {
    m.name_ = "triangular";
    m.spec_ = "tri:" + format_param(widths[0]);
  } else {
    m.name_ = "triangular-mixture";
    std::ostringstream os;
    os << "mix:";
    for (std::size_t k = 0; k < weights.size(); ++k) {
      if (k > 0) os << "+";
      os << format_param(weights[k]) << "*tri:" << format_param(widths[k]);
    }
    m.spec_ = os.str();
  }

  std::vector<double> bps = widths;
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  m.breakpoints_ = bps;
  m.support_end_ = bps.back();

  auto weights_c = weights;
  auto widths_c = widths;
  m.pdf_ = [weights_c, widths_c](double x) {
    if (x < 0.0) return 0.0;
    double v = 0.0;
    for (std::size_t k = 0; k < widths_c.size(); ++k) {
      double th = widths_c[k];
      if (x < th) v += weights_c[k] * 2.0 * (th - x) / (th * th);
    }
    return v;
  };
  m.cdf_ = [weights_c, widths_c](double x) {
    double v = 0.0;
    for (std::size_t k = 0; k < widths_c.size(); ++k) {
      v += weights_c[k] * triangular_cdf(widths_c[k], x);
    }
    return v;
  };
  // The CDF is an increasing piecewise quadratic with pieces delimited by
  // the distinct widths, so the quantile solves one quadratic per piece.
  auto cdf = m.cdf_;
  auto pieces = bps;
  m.quantile_ = [weights_c, widths_c, cdf, pieces](double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return pieces.back();
    double lo = 0.0;
    double hi = pieces.back();
    for (double p : pieces) {
      if (cdf(p) >= u) {
        hi = p;
        break;
      }
      lo = p;
    }
    // On (lo, hi): F(x) = alpha x^2 + beta x + gamma from the still-active
    // components, constant 1-contributions from the exhausted ones.
    double alpha = 0.0, beta = 0.0, gamma = 0.0;
    for (std::size_t k = 0; k < widths_c.size(); ++k) {
      double th = widths_c[k];
      if (th > lo) {
        alpha -= weights_c[k] / (th * th);
        beta += 2.0 * weights_c[k] / th;
      } else {
        gamma += weights_c[k];
      }
    }
    auto roots = quadratic_roots(alpha, beta, gamma - u);
    for (double r : roots) {
      if (r >= lo - 1e-12 && r <= hi + 1e-12) {
        return std::clamp(r, lo, hi);
      }
    }
    // fall back to bisection (should not happen)
    double a = lo, b = hi;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (a + b);
      (cdf(mid) < u ? a : b) = mid;
    }
    return 0.5 * (a + b);
  };
  m.density_convex_ = true;
  m.density_nonincreasing_ = true;
  return m;
}

TrueModel TrueModel::custom(std::string name,
                            std::function<double(double)> pdf,
                            std::function<double(double)> cdf,
                            std::function<double(double)> quantile,
                            bool density_convex, bool density_nonincreasing,
                            std::vector<double> breakpoints,
                            double support_end) {
  TrueModel m;
  m.name_ = std::move(name);
  m.spec_ = "custom:" + m.name_;
  m.pdf_ = std::move(pdf);
  m.cdf_ = std::move(cdf);
  m.quantile_ = std::move(quantile);
  m.density_convex_ = density_convex;
  m.density_nonincreasing_ = density_nonincreasing;
  m.breakpoints_ = std::move(breakpoints);
  m.support_end_ = support_end;
  return m;
}

double TrueModel::pdf(double x) const { return pdf_(x); }
double TrueModel::cdf(double x) const { return cdf_(x); }

double TrueModel::quantile(double u) const {
  if (!(u >= 0.0) || !(u <= 1.0)) {
    throw Error(Errc::ParameterOutOfRange, "quantile argument outside [0, 1]");
  }
  return quantile_(u);
}

namespace {

double parse_positive_real(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(text, &pos);
    if (pos != text.size() || !std::isfinite(v) || v <= 0.0) {
      throw std::invalid_argument(what);
    }
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::InvalidModelSpec, "invalid " + what + ": '" + text + "'");
  }
}

}  // namespace

TrueModel parse_model_spec(const std::string& spec) {
  if (spec.rfind("exp:", 0) == 0) {
    return TrueModel::exponential(parse_positive_real(spec.substr(4), "rate"));
  }
  if (spec.rfind("tri:", 0) == 0) {
    return TrueModel::triangular(parse_positive_real(spec.substr(4), "width"));
  }
  if (spec.rfind("mix:", 0) == 0) {
    std::vector<double> weights, widths;
    std::string body = spec.substr(4);
    std::size_t start = 0;
    while (start <= body.size()) {
      std::size_t plus = body.find('+', start);
      std::string term = body.substr(
          start, plus == std::string::npos ? std::string::npos : plus - start);
      std::size_t star = term.find("*tri:");
      if (star == std::string::npos) {
        throw Error(Errc::InvalidModelSpec,
                    "mixture term must look like w*tri:width, got '" + term +
                        "'");
      }
      weights.push_back(parse_positive_real(term.substr(0, star), "weight"));
      widths.push_back(parse_positive_real(term.substr(star + 5), "width"));
      if (plus == std::string::npos) break;
      start = plus + 1;
    }
    if (weights.empty()) {
      throw Error(Errc::InvalidModelSpec, "empty mixture spec");
    }
    return TrueModel::triangular_mixture(weights, widths);
  }
  throw Error(Errc::InvalidModelSpec,
              "unknown model spec '" + spec +
                  "' (expected exp:RATE, tri:WIDTH or mix:w*tri:t+...)");
}

}  // namespace shapedens
