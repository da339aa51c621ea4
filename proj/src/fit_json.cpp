#include "shapedens/fit_json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "shapedens/errors.hpp"

namespace shapedens {

namespace {

double grenander_log_likelihood_objective(const StepDensity& fit,
                                          const Sample& s) {
  double sum = 0.0;
  for (double x : s.values()) sum += std::log(fit.eval(x));
  return -sum / static_cast<double>(s.size());
}

void append_array(std::string& out, const char* key,
                  const std::vector<double>& vals) {
  out += "  \"";
  out += key;
  out += "\": [";
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i) out += ", ";
    out += format_double(vals[i]);
  }
  out += "]";
}

const nlohmann::json& require_field(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw Error(Errc::InvalidFitFile,
                std::string("fit file is missing field '") + key + "'");
  }
  return *it;
}

double require_number(const nlohmann::json& j, const char* key) {
  const nlohmann::json& f = require_field(j, key);
  if (!f.is_number()) {
    throw Error(Errc::InvalidFitFile,
                std::string("fit file field '") + key + "' must be a number");
  }
  return f.get<double>();
}

std::vector<double> require_number_array(const nlohmann::json& j,
                                         const char* key) {
  const nlohmann::json& f = require_field(j, key);
  if (!f.is_array()) {
    throw Error(Errc::InvalidFitFile,
                std::string("fit file field '") + key + "' must be an array");
  }
  std::vector<double> out;
  out.reserve(f.size());
  for (const auto& v : f) {
    if (!v.is_number()) {
      throw Error(Errc::InvalidFitFile,
                  std::string("fit file field '") + key +
                      "' must contain only numbers");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

TriangularMix FitRecord::mixture() const {
  if (is_step()) {
    throw Error(Errc::InvalidFitFile,
                "record stores a step fit, not a mixture");
  }
  return TriangularMix(knots, values);
}

StepDensity FitRecord::step_density() const {
  if (!is_step()) {
    throw Error(Errc::InvalidFitFile,
                "record stores a mixture fit, not a step fit");
  }
  std::vector<double> breaks;
  breaks.reserve(knots.size() + 1);
  breaks.push_back(0.0);
  breaks.insert(breaks.end(), knots.begin(), knots.end());
  return StepDensity(std::move(breaks), values);
}

FitRecord make_fit_record(const std::string& estimator, const FitResult& fit,
                          const Sample& s, double tol) {
  FitRecord rec;
  rec.estimator = estimator;
  rec.n = s.size();
  rec.knots = fit.mix.knots();
  rec.values = fit.mix.coefficients();
  rec.mass = fit.mix.mass();
  rec.objective = fit.objective;
  rec.residual = fit.final_residual;
  rec.iterations = fit.iterations;
  rec.tol = tol;
  return rec;
}

FitRecord make_fit_record(const StepDensity& fit, const Sample& s) {
  FitRecord rec;
  rec.estimator = "grenander";
  rec.n = s.size();
  rec.knots.assign(fit.breakpoints().begin() + 1, fit.breakpoints().end());
  rec.values = fit.heights();
  rec.mass = fit.mass();
  rec.objective = grenander_log_likelihood_objective(fit, s);
  rec.residual = 0.0;
  rec.iterations = 0;
  rec.tol = 0.0;
  return rec;
}

std::string to_json(const FitRecord& rec) {
  std::string out = "{\n";
  out += "  \"estimator\": \"" + rec.estimator + "\",\n";
  out += "  \"n\": " + std::to_string(rec.n) + ",\n";
  append_array(out, "knots", rec.knots);
  out += ",\n";
  append_array(out, rec.is_step() ? "heights" : "coefficients", rec.values);
  out += ",\n";
  out += "  \"mass\": " + format_double(rec.mass) + ",\n";
  out += "  \"objective\": " + format_double(rec.objective) + ",\n";
  out += "  \"residual\": " + format_double(rec.residual) + ",\n";
  out += "  \"iterations\": " + std::to_string(rec.iterations) + ",\n";
  out += "  \"tol\": " + format_double(rec.tol) + "\n";
  out += "}\n";
  return out;
}

FitRecord fit_record_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidFitFile,
                std::string("fit file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw Error(Errc::InvalidFitFile, "fit file must hold a JSON object");
  }

  FitRecord rec;
  const nlohmann::json& est = require_field(j, "estimator");
  if (!est.is_string()) {
    throw Error(Errc::InvalidFitFile, "fit file field 'estimator' must be a string");
  }
  rec.estimator = est.get<std::string>();
  if (rec.estimator != "ls" && rec.estimator != "ml" &&
      rec.estimator != "grenander") {
    throw Error(Errc::InvalidFitFile,
                "unknown estimator '" + rec.estimator + "' in fit file");
  }

  const nlohmann::json& nj = require_field(j, "n");
  if (!nj.is_number_unsigned()) {
    throw Error(Errc::InvalidFitFile,
                "fit file field 'n' must be a nonnegative integer");
  }
  rec.n = nj.get<std::size_t>();

  rec.knots = require_number_array(j, "knots");
  rec.values =
      require_number_array(j, rec.is_step() ? "heights" : "coefficients");
  if (rec.knots.size() != rec.values.size()) {
    throw Error(Errc::InvalidFitFile,
                "fit file knots and values have different lengths");
  }
  rec.mass = require_number(j, "mass");
  rec.objective = require_number(j, "objective");
  rec.residual = require_number(j, "residual");
  const nlohmann::json& itj = require_field(j, "iterations");
  if (!itj.is_number_integer()) {
    throw Error(Errc::InvalidFitFile,
                "fit file field 'iterations' must be an integer");
  }
  rec.iterations = itj.get<int>();
  rec.tol = require_number(j, "tol");
  return rec;
}

void write_fit_file(const std::string& path, const FitRecord& rec) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(Errc::IoError, "cannot open '" + path + "' for writing");
  }
  out << to_json(rec);
  if (!out) {
    throw Error(Errc::IoError, "failed writing '" + path + "'");
  }
}

FitRecord read_fit_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::IoError, "cannot open '" + path + "' for reading");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return fit_record_from_json(buf.str());
}

}  // namespace shapedens
