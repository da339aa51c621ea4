#ifndef SHAPEDENS_SAMPLE_HPP_
#define SHAPEDENS_SAMPLE_HPP_

#include <cstddef>
#include <vector>

namespace shapedens {

/// Sorted positive observations together with the usual views of the
/// empirical distribution: the step CDF x -> #{X_i <= x}/n and its exact
/// running integral. Immutable after construction.
class Sample {
 public:
  /// Validates, sorts and stores the observations. Throws EmptyInput,
  /// NonPositiveValue or NonFiniteValue (index refers to the raw input).
  static Sample from_raw(const std::vector<double>& raw);

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double min() const { return values_.front(); }
  double max() const { return values_.back(); }
  double mean() const { return sum_ / static_cast<double>(values_.size()); }

  /// True when the input contained tied observations.
  bool has_ties() const { return has_ties_; }

  /// Right-continuous empirical CDF, #{X_i <= x}/n.
  double ecdf(double x) const;

  /// Left limit of the empirical CDF, #{X_i < x}/n.
  double ecdf_left(double x) const;

  /// H(r) = integral of the empirical CDF over [0, r], computed in closed
  /// form as (1/n) sum (r - X_i)_+ . Throws NegativeArgument for r < 0.
  double ecdf_integral(double r) const;

  /// Distinct observation values with cumulative counts (ties collapsed).
  const std::vector<double>& distinct_values() const { return distinct_; }
  const std::vector<std::size_t>& cumulative_counts() const { return cum_counts_; }

 private:
  Sample() = default;

  std::vector<double> values_;      // ascending
  std::vector<double> prefix_sum_;  // prefix_sum_[k] = sum of first k values
  std::vector<double> distinct_;
  std::vector<std::size_t> cum_counts_;
  double sum_ = 0.0;
  bool has_ties_ = false;
};

/// Exact closed-form moment c(tau) = integral of (tau - x)_+ d ecdf.
/// The linear term of the least-squares objective; identical to
/// s.ecdf_integral(tau).
double moment_term(const Sample& s, double tau);

}  // namespace shapedens

#endif  // SHAPEDENS_SAMPLE_HPP_
