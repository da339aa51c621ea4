#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shapedens/errors.hpp"
#include "shapedens/fit_json.hpp"
#include "shapedens/grenander.hpp"
#include "shapedens/models.hpp"
#include "shapedens/sample.hpp"
#include "shapedens/simulate.hpp"
#include "shapedens/solvers.hpp"
#include "shapedens/verification.hpp"

namespace {

using namespace shapedens;

void print_error(const char* code, const std::string& message) {
  std::string clean = message;
  for (char& c : clean) {
    if (c == '"') c = '\'';
    if (c == '\n' || c == '\r') c = ' ';
  }
  std::cerr << "error code=" << code << " message=\"" << clean << "\"\n";
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(current);
  return parts;
}

std::vector<double> parse_double_list(const std::string& text,
                                      const char* flag) {
  std::vector<double> out;
  for (const std::string& part : split(text, ',')) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != part.size() || part.empty()) {
      throw Error(Errc::ParameterOutOfRange,
                  std::string(flag) + ": '" + part + "' is not a number");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text,
                                         const char* flag) {
  std::vector<std::size_t> out;
  for (double v : parse_double_list(text, flag)) {
    if (v < 1.0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw Error(Errc::ParameterOutOfRange,
                  std::string(flag) + ": sizes must be positive integers");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

// One positive decimal per line; text after '#' is a comment; blank lines
// are skipped.
std::vector<double> read_data_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::IoError, "cannot open '" + path + "' for reading");
  }
  std::vector<double> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const std::size_t last = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(first, last - first + 1);
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != token.size()) {
      throw Error(Errc::InvalidDataFile,
                  path + ":" + std::to_string(line_no) + ": '" + token +
                      "' is not a number",
                  line_no);
    }
    out.push_back(v);
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(Errc::IoError, "cannot open '" + path + "' for writing");
  }
  out << text;
  if (!out) {
    throw Error(Errc::IoError, "failed writing '" + path + "'");
  }
}

void print_report(const std::string& title, const VerificationReport& rep) {
  std::cout << title << "\n";
  for (const CheckItem& it : rep.items) {
    std::cout << (it.pass ? "PASS" : "FAIL") << "  " << it.name
              << "  margin=" << format_double(it.margin)
              << " tol=" << format_double(it.tolerance)
              << " at=" << format_double(it.location);
    if (!it.note.empty()) std::cout << "  (" << it.note << ")";
    std::cout << "\n";
  }
}

int cmd_fit(const std::string& estimator, const std::string& input, double tol,
            const std::string& output) {
  Sample s = Sample::from_raw(read_data_file(input));
  FitRecord rec;
  if (estimator == "grenander") {
    rec = make_fit_record(grenander_fit(s), s);
  } else {
    FitConfig cfg;
    cfg.tol_cert = tol;
    FitResult fit = estimator == "ml" ? mle_fit(s, cfg) : lse_fit(s, cfg);
    for (const std::string& w : fit.warnings) {
      std::cerr << "note: " << w << "\n";
    }
    rec = make_fit_record(estimator, fit, s, cfg.resolved_tol(s));
  }
  if (output.empty()) {
    std::cout << to_json(rec);
  } else {
    write_fit_file(output, rec);
  }
  return 0;
}

int cmd_verify(const std::string& estimator, const std::string& input,
               const std::string& model_spec, double tol) {
  Sample s = Sample::from_raw(read_data_file(input));
  FitConfig cfg;
  cfg.tol_cert = tol;
  FitResult fit = estimator == "ml" ? mle_fit(s, cfg) : lse_fit(s, cfg);
  for (const std::string& w : fit.warnings) {
    std::cerr << "note: " << w << "\n";
  }

  bool ok = true;
  VerificationReport characterization =
      estimator == "ml" ? check_mle_optimality(fit.mix, s)
                        : check_lse_optimality(fit.mix, s);
  print_report("optimality checks", characterization);
  ok = ok && characterization.all_pass();

  VerificationReport placement = check_knot_placement(fit.mix, s);
  print_report("knot placement checks", placement);
  ok = ok && placement.all_pass();

  if (!model_spec.empty()) {
    const TrueModel model = parse_model_spec(model_spec);
    if (!model.density_convex()) {
      throw Error(Errc::NonConvexModel,
                  "deviation bounds need a convex model density");
    }
    const Extrema d = sup_inf_difference(s, model);
    const Extrema e = sup_inf_difference(fit.mix, model);
    const double lower_bound = 1.5 * d.inf - 0.5 * d.sup;
    VerificationReport margins;
    CheckItem lower;
    lower.name = estimator + " lower deviation bound";
    lower.margin = e.inf - lower_bound;
    lower.tolerance = 1e-8;
    lower.location = e.arg_inf;
    lower.pass = lower.margin >= -lower.tolerance;
    margins.add(lower);
    if (estimator == "ls") {
      CheckItem upper;
      upper.name = "ls upper deviation bound";
      upper.margin = (1.5 * d.sup - 0.5 * d.inf) - e.sup;
      upper.tolerance = 1e-8;
      upper.location = e.arg_sup;
      upper.pass = upper.margin >= -upper.tolerance;
      margins.add(upper);
      CheckItem norm;
      norm.name = "ls sup-norm factor two";
      norm.margin = 2.0 * std::max(d.sup, -d.inf) - std::max(e.sup, -e.inf);
      norm.tolerance = 1e-8;
      norm.location = e.sup >= -e.inf ? e.arg_sup : e.arg_inf;
      norm.pass = norm.margin >= -norm.tolerance;
      margins.add(norm);
    }
    print_report("deviation bound margins vs " + model.spec_string(), margins);
    ok = ok && margins.all_pass();
  }
  return ok ? 0 : 1;
}

int cmd_simulate(const std::string& family, const std::string& sizes,
                 std::size_t reps, std::uint64_t seed, const std::string& out,
                 const std::string& estimators, int threads, double tol) {
  ExperimentConfig cfg;
  cfg.family = family;
  cfg.sizes = parse_size_list(sizes, "--sizes");
  cfg.replications = reps;
  cfg.base_seed = seed;
  cfg.estimators = split(estimators, ',');
  cfg.fit.tol_cert = tol;
  cfg.threads = threads;

  ExperimentResult result = run_monte_carlo(cfg);
  write_text_file(out, experiment_csv(cfg, result.rows));

  const ExperimentSummary& sum = result.summary;
  std::cout << "rows=" << sum.rows << " errors=" << sum.errors
            << " ml_violations=" << sum.ml_violations
            << " ls_violations=" << sum.ls_violations
            << " marshall_violations=" << sum.marshall_violations << "\n";
  auto quant = [](const char* name, const std::vector<double>& q) {
    if (q.empty()) return;
    std::cout << name << " ratio quantiles (0.5, 0.9, 1.0): "
              << format_double(q[0]) << ", " << format_double(q[1]) << ", "
              << format_double(q[2]) << "\n";
  };
  quant("ml", sum.ml_ratio_quantiles);
  quant("ls", sum.ls_ratio_quantiles);
  quant("grenander", sum.grenander_ratio_quantiles);
  return 0;
}

int cmd_sharpness(const std::string& c_list, const std::string& eps_list,
                  const std::string& out) {
  std::string csv =
      "c,eps,sup_fitted,sup_empirical,end_value,gap,hypotheses_pass,"
      "conclusion_pass\n";
  bool ok = true;
  for (double c : parse_double_list(c_list, "--c")) {
    for (double eps : parse_double_list(eps_list, "--eps")) {
      SharpnessFixture fx = sharpness_fixture(c, eps);
      VerificationReport rep =
          check_interval_bound(fx.scenario, BoundForm::kUpper);
      const CheckItem* conclusion = rep.find("upper envelope");
      bool hyp_pass = true;
      for (const CheckItem& it : rep.items) {
        if (it.name != "upper envelope") hyp_pass = hyp_pass && it.pass;
      }
      csv += format_double(c);
      csv += ',' + format_double(eps);
      csv += ',' + format_double(fx.sup_fitted_minus_model);
      csv += ',' + format_double(fx.sup_empirical_minus_model);
      csv += ',' + format_double(fx.empirical_minus_model_at_end);
      csv += ',' + format_double(conclusion ? conclusion->margin : 0.0);
      csv += ',' + std::string(hyp_pass ? "1" : "0");
      csv += ',' + std::string(conclusion && conclusion->pass ? "1" : "0");
      csv += '\n';
      ok = ok && hyp_pass && conclusion && conclusion->pass;
    }
  }
  if (out.empty()) {
    std::cout << csv;
  } else {
    write_text_file(out, csv);
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shape-constrained density estimation on the half line"};
  app.require_subcommand(1);

  std::string estimator, input, output, model_spec;
  double tol = 0.0;
  CLI::App* fit = app.add_subcommand("fit", "Fit one estimator to a data file");
  fit->add_option("--estimator", estimator, "ml, ls, or grenander")
      ->required()
      ->check(CLI::IsMember({"ml", "ls", "grenander"}));
  fit->add_option("--input", input, "data file, one positive decimal per line")
      ->required();
  fit->add_option("--tol", tol, "certificate tolerance (0 = automatic)");
  fit->add_option("--output", output, "fit JSON path (stdout when omitted)");

  CLI::App* verify = app.add_subcommand(
      "verify", "Fit and verify the optimality characterization");
  verify->add_option("--estimator", estimator, "ml or ls")
      ->required()
      ->check(CLI::IsMember({"ml", "ls"}));
  verify->add_option("--input", input, "data file")->required();
  verify->add_option("--model", model_spec,
                     "model spec (exp:RATE, tri:WIDTH, mix:w*tri:t+...)");
  verify->add_option("--tol", tol, "certificate tolerance (0 = automatic)");

  std::string family, sizes = "10,50,200", estimators = "ml,ls,grenander";
  std::size_t reps = 1;
  std::uint64_t seed = 0;
  int threads = 1;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Monte Carlo margins experiment");
  simulate->add_option("--family", family, "model spec")->required();
  simulate->add_option("--sizes", sizes, "comma-separated sample sizes");
  simulate->add_option("--reps", reps, "replications per size")->required();
  simulate->add_option("--seed", seed, "base seed")->required();
  simulate->add_option("--out", output, "CSV output path")->required();
  simulate->add_option("--estimators", estimators,
                       "comma-separated subset of ml,ls,grenander");
  simulate->add_option("--threads", threads, "worker threads (default 1)");
  simulate->add_option("--tol", tol, "certificate tolerance (0 = automatic)");

  std::string c_list, eps_list;
  CLI::App* sharpness = app.add_subcommand(
      "sharpness", "Sharpness fixture sweep for the envelope constants");
  sharpness->add_option("--c", c_list, "comma-separated c values (c >= 1)")
      ->required();
  sharpness
      ->add_option("--eps", eps_list, "comma-separated eps values in (0, 1/2]")
      ->required();
  sharpness->add_option("--out", output, "CSV output path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_error("UsageError", e.what());
    return 2;
  }

  try {
    if (fit->parsed()) return cmd_fit(estimator, input, tol, output);
    if (verify->parsed()) return cmd_verify(estimator, input, model_spec, tol);
    if (simulate->parsed()) {
      return cmd_simulate(family, sizes, reps, seed, output, estimators,
                          threads, tol);
    }
    if (sharpness->parsed()) return cmd_sharpness(c_list, eps_list, output);
  } catch (const Error& e) {
    print_error(e.tag(), e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error("InternalError", e.what());
    return 2;
  }
  return 2;
}
