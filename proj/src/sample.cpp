#include "shapedens/sample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shapedens/errors.hpp"

namespace shapedens {

Sample Sample::from_raw(const std::vector<double>& raw) {
  if (raw.empty()) {
    throw Error(Errc::EmptyInput, "sample is empty");
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i])) {
      throw Error(Errc::NonFiniteValue,
                  "non-finite observation at index " + std::to_string(i),
                  static_cast<long>(i));
    }
    if (raw[i] <= 0.0) {
      throw Error(Errc::NonPositiveValue,
                  "non-positive observation at index " + std::to_string(i),
                  static_cast<long>(i));
    }
  }

  Sample s;
  s.values_ = raw;
  std::sort(s.values_.begin(), s.values_.end());
  s.sum_ = std::accumulate(s.values_.begin(), s.values_.end(), 0.0);

  s.prefix_sum_.resize(s.values_.size() + 1);
  s.prefix_sum_[0] = 0.0;
  for (std::size_t i = 0; i < s.values_.size(); ++i) {
    s.prefix_sum_[i + 1] = s.prefix_sum_[i] + s.values_[i];
  }

  for (std::size_t i = 0; i < s.values_.size(); ++i) {
    if (i > 0 && s.values_[i] == s.values_[i - 1]) {
      s.has_ties_ = true;
      s.cum_counts_.back() = i + 1;
    } else {
      s.distinct_.push_back(s.values_[i]);
      s.cum_counts_.push_back(i + 1);
    }
  }
  return s;
}

double Sample::ecdf(double x) const {
  auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) /
         static_cast<double>(values_.size());
}

double Sample::ecdf_left(double x) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) /
         static_cast<double>(values_.size());
}

double Sample::ecdf_integral(double r) const {
  if (r < 0.0) {
    throw Error(Errc::NegativeArgument, "ecdf_integral requires r >= 0");
  }
  // (1/n) sum (r - X_i)_+ over the k observations <= r.
  auto it = std::upper_bound(values_.begin(), values_.end(), r);
  auto k = static_cast<std::size_t>(it - values_.begin());
  double acc = static_cast<double>(k) * r - prefix_sum_[k];
  return acc / static_cast<double>(values_.size());
}

double moment_term(const Sample& s, double tau) { return s.ecdf_integral(tau); }

}  // namespace shapedens
