#ifndef SHAPEDENS_MODELS_HPP_
#define SHAPEDENS_MODELS_HPP_

#include <functional>
#include <string>
#include <vector>

namespace shapedens {

/// Analytic reference distribution on [0, inf): density, CDF and quantile
/// in closed form, plus the shape flags the inequality checks rely on.
///
/// Built-in families:
///   exponential(rate)      f(x) = rate * exp(-rate x)
///   triangular(width)      f(x) = 2 (width - x)_+ / width^2
///   mixture of triangulars f = sum w_k * triangular(width_k)
/// All three have convex, non-increasing densities.
class TrueModel {
 public:
  static TrueModel exponential(double rate);
  static TrueModel triangular(double width);
  static TrueModel triangular_mixture(std::vector<double> weights,
                                      std::vector<double> widths);

  /// Escape hatch for handle-defined models (tests, replay scenarios).
  static TrueModel custom(std::string name, std::function<double(double)> pdf,
                          std::function<double(double)> cdf,
                          std::function<double(double)> quantile,
                          bool density_convex, bool density_nonincreasing,
                          std::vector<double> breakpoints, double support_end);

  double pdf(double x) const;
  double cdf(double x) const;
  /// Inverse CDF for u in [0, 1].
  double quantile(double u) const;

  bool density_convex() const { return density_convex_; }
  bool density_nonincreasing() const { return density_nonincreasing_; }

  /// Kinks of the density (piece boundaries of mixtures); empty when smooth.
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  /// Smallest x with F(x) = 1; +inf for unbounded support.
  double support_end() const { return support_end_; }

  const std::string& name() const { return name_; }

  /// Round-trippable spec string: exp:R, tri:W, mix:w1*tri:t1+...
  const std::string& spec_string() const { return spec_; }

 private:
  TrueModel() = default;

  std::string name_;
  std::string spec_;
  std::function<double(double)> pdf_;
  std::function<double(double)> cdf_;
  std::function<double(double)> quantile_;
  bool density_convex_ = false;
  bool density_nonincreasing_ = false;
  std::vector<double> breakpoints_;
  double support_end_ = 0.0;
};

/// Parses the model grammar `exp:RATE`, `tri:WIDTH`,
/// `mix:w1*tri:t1+w2*tri:t2+...`. Mixture weights must be positive and are
/// normalized to sum to one. Throws InvalidModelSpec.
TrueModel parse_model_spec(const std::string& spec);

}  // namespace shapedens

#endif  // SHAPEDENS_MODELS_HPP_
