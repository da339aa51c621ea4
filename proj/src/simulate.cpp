#include "shapedens/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <utility>

#include "shapedens/errors.hpp"
#include "shapedens/fit_json.hpp"
#include "shapedens/grenander.hpp"
#include "shapedens/rng.hpp"
#include "shapedens/verification.hpp"

namespace shapedens {

namespace {

constexpr double kMarginTol = 1e-8;

bool wants(const ExperimentConfig& cfg, const char* name) {
  return std::find(cfg.estimators.begin(), cfg.estimators.end(), name) !=
         cfg.estimators.end();
}

std::string sanitize(std::string text) {
  for (char& c : text) {
    if (c == ',') c = ';';
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

ExperimentRow compute_row(const ExperimentConfig& cfg, const TrueModel& model,
                          std::size_t size_index, std::size_t replication) {
  ExperimentRow row;
  row.size_index = size_index;
  row.replication = replication;
  row.n = cfg.sizes[size_index];
  row.seed = derive_seed(cfg.base_seed, size_index, replication);
  try {
    Sample s = sample_model(model, row.n, row.seed);
    Extrema d = sup_inf_difference(s, model);
    row.emp_sup = d.sup;
    row.emp_inf = d.inf;
    const double lower_bound = 1.5 * d.inf - 0.5 * d.sup;
    const double upper_bound = 1.5 * d.sup - 0.5 * d.inf;
    const double d_norm = std::max(d.sup, -d.inf);

    if (wants(cfg, "ml")) {
      FitResult fit = mle_fit(s, cfg.fit);
      Extrema e = sup_inf_difference(fit.mix, model);
      row.ml.done = true;
      row.ml.sup = e.sup;
      row.ml.inf = e.inf;
      row.ml.iterations = fit.iterations;
      row.ml.residual = fit.final_residual;
      row.ml_lower_margin = e.inf - lower_bound;
      row.ml.pass = row.ml_lower_margin >= -kMarginTol;
    }
    if (wants(cfg, "ls")) {
      FitResult fit = lse_fit(s, cfg.fit);
      Extrema e = sup_inf_difference(fit.mix, model);
      row.ls.done = true;
      row.ls.sup = e.sup;
      row.ls.inf = e.inf;
      row.ls.iterations = fit.iterations;
      row.ls.residual = fit.final_residual;
      row.ls_lower_margin = e.inf - lower_bound;
      row.ls_upper_margin = upper_bound - e.sup;
      row.ls_norm_margin = 2.0 * d_norm - std::max(e.sup, -e.inf);
      row.ls.pass = row.ls_lower_margin >= -kMarginTol &&
                    row.ls_upper_margin >= -kMarginTol &&
                    row.ls_norm_margin >= -kMarginTol;
    }
    if (wants(cfg, "grenander")) {
      StepDensity fit = grenander_fit(s);
      MarshallCheck mc = marshall_check(fit, s, model);
      Extrema e = sup_inf_difference(fit.majorant(), model);
      row.grenander.done = true;
      row.grenander.sup = e.sup;
      row.grenander.inf = e.inf;
      row.marshall_margin = mc.sup_emp - mc.sup_hat;
      row.grenander.pass = mc.ok;
    }
  } catch (const Error& e) {
    row.error = sanitize(std::string(e.tag()) + ": " + e.what());
  } catch (const std::exception& e) {
    row.error = sanitize(std::string("InternalError: ") + e.what());
  }
  return row;
}

std::vector<double> ratio_quantiles(std::vector<double> ratios) {
  if (ratios.empty()) return {};
  std::sort(ratios.begin(), ratios.end());
  const double levels[] = {0.5, 0.9, 1.0};
  std::vector<double> out;
  for (double q : levels) {
    auto idx = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(ratios.size())));
    idx = std::min(std::max<std::size_t>(idx, 1), ratios.size()) - 1;
    out.push_back(ratios[idx]);
  }
  return out;
}

}  // namespace

Sample sample_model(const TrueModel& model, std::size_t n,
                    std::uint64_t seed) {
  if (n == 0) {
    throw Error(Errc::EmptyInput, "sample size must be at least 1");
  }
  std::vector<double> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    raw[i] = model.quantile(uniform_open(seed, i));
  }
  return Sample::from_raw(raw);
}

ExperimentResult run_monte_carlo(const ExperimentConfig& cfg) {
  if (cfg.sizes.empty() || cfg.replications == 0) {
    throw Error(Errc::ParameterOutOfRange,
                "experiment needs at least one size and one replication");
  }
  for (std::size_t n : cfg.sizes) {
    if (n == 0) {
      throw Error(Errc::ParameterOutOfRange, "sample sizes must be >= 1");
    }
  }
  for (const std::string& est : cfg.estimators) {
    if (est != "ml" && est != "ls" && est != "grenander") {
      throw Error(Errc::ParameterOutOfRange,
                  "unknown estimator '" + est + "'");
    }
  }
  const TrueModel model = parse_model_spec(cfg.family);
  if ((wants(cfg, "ml") || wants(cfg, "ls")) && !model.density_convex()) {
    throw Error(Errc::NonConvexModel,
                "deviation bounds need a convex model density");
  }
  if (wants(cfg, "grenander") && !model.density_nonincreasing()) {
    throw Error(Errc::NonConcaveModel,
                "the Marshall check needs a non-increasing model density");
  }

  const std::size_t total = cfg.sizes.size() * cfg.replications;
  ExperimentResult result;
  result.rows.resize(total);

  auto fill = [&](std::size_t worker, std::size_t stride) {
    for (std::size_t idx = worker; idx < total; idx += stride) {
      const std::size_t size_index = idx / cfg.replications;
      const std::size_t replication = idx % cfg.replications;
      result.rows[idx] = compute_row(cfg, model, size_index, replication);
    }
  };

  const std::size_t workers = std::min<std::size_t>(
      std::max(cfg.threads, 1), std::max<std::size_t>(total, 1));
  if (workers <= 1) {
    fill(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back(fill, w, workers);
    }
    for (std::thread& t : pool) t.join();
  }

  ExperimentSummary& sum = result.summary;
  sum.rows = total;
  std::vector<double> ml_ratios, ls_ratios, gr_ratios;
  for (const ExperimentRow& row : result.rows) {
    if (!row.error.empty()) {
      ++sum.errors;
      continue;
    }
    const double d_norm = std::max(row.emp_sup, -row.emp_inf);
    if (row.ml.done) {
      if (!row.ml.pass) ++sum.ml_violations;
      if (d_norm > 0.0) {
        ml_ratios.push_back(std::max(row.ml.sup, -row.ml.inf) / d_norm);
      }
    }
    if (row.ls.done) {
      if (!row.ls.pass) ++sum.ls_violations;
      if (d_norm > 0.0) {
        ls_ratios.push_back(std::max(row.ls.sup, -row.ls.inf) / d_norm);
      }
    }
    if (row.grenander.done) {
      if (!row.grenander.pass) ++sum.marshall_violations;
      if (d_norm > 0.0) {
        gr_ratios.push_back(std::max(row.grenander.sup, -row.grenander.inf) /
                            d_norm);
      }
    }
  }
  sum.ml_ratio_quantiles = ratio_quantiles(std::move(ml_ratios));
  sum.ls_ratio_quantiles = ratio_quantiles(std::move(ls_ratios));
  sum.grenander_ratio_quantiles = ratio_quantiles(std::move(gr_ratios));
  return result;
}

std::string experiment_csv(const ExperimentConfig& cfg,
                           const std::vector<ExperimentRow>& rows) {
  std::string out =
      "family,n,replication,seed,emp_sup,emp_inf,"
      "ml_sup,ml_inf,ml_lower_margin,ml_iterations,ml_residual,ml_pass,"
      "ls_sup,ls_inf,ls_lower_margin,ls_upper_margin,ls_norm_margin,"
      "ls_iterations,ls_residual,ls_pass,"
      "grenander_sup,grenander_inf,marshall_margin,grenander_pass,error\n";
  auto num = [](bool done, double v) {
    return done ? format_double(v) : std::string();
  };
  auto count = [](bool done, long v) {
    return done ? std::to_string(v) : std::string();
  };
  for (const ExperimentRow& row : rows) {
    out += cfg.family;
    out += ',' + std::to_string(row.n);
    out += ',' + std::to_string(row.replication);
    out += ',' + std::to_string(row.seed);
    out += ',' + format_double(row.emp_sup);
    out += ',' + format_double(row.emp_inf);
    out += ',' + num(row.ml.done, row.ml.sup);
    out += ',' + num(row.ml.done, row.ml.inf);
    out += ',' + num(row.ml.done, row.ml_lower_margin);
    out += ',' + count(row.ml.done, row.ml.iterations);
    out += ',' + num(row.ml.done, row.ml.residual);
    out += ',' + count(row.ml.done, row.ml.pass ? 1 : 0);
    out += ',' + num(row.ls.done, row.ls.sup);
    out += ',' + num(row.ls.done, row.ls.inf);
    out += ',' + num(row.ls.done, row.ls_lower_margin);
    out += ',' + num(row.ls.done, row.ls_upper_margin);
    out += ',' + num(row.ls.done, row.ls_norm_margin);
    out += ',' + count(row.ls.done, row.ls.iterations);
    out += ',' + num(row.ls.done, row.ls.residual);
    out += ',' + count(row.ls.done, row.ls.pass ? 1 : 0);
    out += ',' + num(row.grenander.done, row.grenander.sup);
    out += ',' + num(row.grenander.done, row.grenander.inf);
    out += ',' + num(row.grenander.done, row.marshall_margin);
    out += ',' + count(row.grenander.done, row.grenander.pass ? 1 : 0);
    out += ',' + row.error;
    out += '\n';
  }
  return out;
}

}  // namespace shapedens
