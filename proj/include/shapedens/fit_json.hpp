#ifndef SHAPEDENS_FIT_JSON_HPP_
#define SHAPEDENS_FIT_JSON_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "shapedens/grenander.hpp"
#include "shapedens/sample.hpp"
#include "shapedens/solvers.hpp"
#include "shapedens/triangular_mix.hpp"

namespace shapedens {

// Flat, serialization-friendly view of a fitted estimate.  Mixture fits
// ("ls", "ml") store generator coefficients in `values`; step fits
// ("grenander") store the step heights, with `knots` holding the step
// breakpoints after 0.
struct FitRecord {
  std::string estimator;
  std::size_t n = 0;
  std::vector<double> knots;
  std::vector<double> values;
  double mass = 0.0;
  double objective = 0.0;
  double residual = 0.0;
  int iterations = 0;
  double tol = 0.0;

  bool is_step() const { return estimator == "grenander"; }
  // Reconstruct the estimate; throws Error(Errc::InvalidFitFile) when the
  // record's estimator does not match the requested shape.
  TriangularMix mixture() const;
  StepDensity step_density() const;
};

FitRecord make_fit_record(const std::string& estimator, const FitResult& fit,
                          const Sample& s, double tol);
FitRecord make_fit_record(const StepDensity& fit, const Sample& s);

// JSON with fixed key order and numbers at 17 significant digits, so that
// serialize-parse round trips reproduce every double bit for bit.
std::string to_json(const FitRecord& rec);
FitRecord fit_record_from_json(const std::string& text);

void write_fit_file(const std::string& path, const FitRecord& rec);
FitRecord read_fit_file(const std::string& path);

// The %.17g rendering used for every number this library writes.
std::string format_double(double v);

}  // namespace shapedens

#endif  // SHAPEDENS_FIT_JSON_HPP_
