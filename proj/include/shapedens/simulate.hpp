#ifndef SHAPEDENS_SIMULATE_HPP_
#define SHAPEDENS_SIMULATE_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "shapedens/models.hpp"
#include "shapedens/numerics.hpp"
#include "shapedens/sample.hpp"
#include "shapedens/solvers.hpp"

namespace shapedens {

// Inverse-CDF sample of size n from a counter-based uniform stream keyed by
// seed. Deterministic: the same (model, n, seed) always yields the same
// sample, independent of any global state.
Sample sample_model(const TrueModel& model, std::size_t n, std::uint64_t seed);

struct ExperimentConfig {
  std::string family = "exp:1";  // model spec, e.g. "exp:1", "tri:2", "mix:..."
  std::vector<std::size_t> sizes;
  std::size_t replications = 1;
  std::uint64_t base_seed = 0;
  // Any subset of {"ml", "ls", "grenander"}; order irrelevant.
  std::vector<std::string> estimators = {"ml", "ls", "grenander"};
  FitConfig fit;
  int threads = 1;
};

// One row per (size, replication). Estimators that were not requested (or
// whose fit failed) have their `done` flag false and fields zeroed.
struct EstimatorCells {
  bool done = false;
  double sup = 0.0;   // sup of (fitted CDF - model CDF)
  double inf = 0.0;   // inf of (fitted CDF - model CDF)
  int iterations = 0;
  double residual = 0.0;
  bool pass = false;  // all deviation-bound margins for this estimator hold
};

struct ExperimentRow {
  std::size_t size_index = 0;
  std::size_t replication = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double emp_sup = 0.0;  // sup of (empirical CDF - model CDF)
  double emp_inf = 0.0;
  EstimatorCells ml;
  double ml_lower_margin = 0.0;
  EstimatorCells ls;
  double ls_lower_margin = 0.0;
  double ls_upper_margin = 0.0;
  double ls_norm_margin = 0.0;
  EstimatorCells grenander;
  double marshall_margin = 0.0;
  std::string error;  // non-empty when the replication failed; never throws
};

struct ExperimentSummary {
  std::size_t rows = 0;
  std::size_t errors = 0;
  std::size_t ml_violations = 0;
  std::size_t ls_violations = 0;
  std::size_t marshall_violations = 0;
  // Quantiles of ||Fhat - F|| / ||Femp - F|| at levels 0.5, 0.9, 1.0;
  // empty when the estimator never ran.
  std::vector<double> ml_ratio_quantiles;
  std::vector<double> ls_ratio_quantiles;
  std::vector<double> grenander_ratio_quantiles;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;  // sorted by (n index, replication)
  ExperimentSummary summary;
};

// Runs the full grid. Per-replication seeds are derived from
// (base_seed, size index, replication), rows are written into preallocated
// slots, and the summary is computed after all rows exist, so the output is
// a pure function of the config regardless of cfg.threads. Fit failures
// land in the row's error tag; the batch never aborts.
ExperimentResult run_monte_carlo(const ExperimentConfig& cfg);

// Fixed-column CSV (header mandatory, comma separator, LF endings, numbers
// at 17 significant digits). Columns:
//   family,n,replication,seed,emp_sup,emp_inf,
//   ml_sup,ml_inf,ml_lower_margin,ml_iterations,ml_residual,ml_pass,
//   ls_sup,ls_inf,ls_lower_margin,ls_upper_margin,ls_norm_margin,
//   ls_iterations,ls_residual,ls_pass,
//   grenander_sup,grenander_inf,marshall_margin,grenander_pass,error
// Cells of estimators that did not run are empty.
std::string experiment_csv(const ExperimentConfig& cfg,
                           const std::vector<ExperimentRow>& rows);

}  // namespace shapedens

#endif  // SHAPEDENS_SIMULATE_HPP_
