#include "shapedens/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <utility>

#include "shapedens/errors.hpp"

namespace shapedens {

namespace {

CheckItem make_item(std::string name, double margin, double tolerance,
                    double location, std::string note = {}) {
  CheckItem item;
  item.name = std::move(name);
  item.margin = margin;
  item.tolerance = tolerance;
  item.location = location;
  item.pass = margin >= -tolerance;
  item.note = std::move(note);
  return item;
}

double resolve_tol_loc(const Sample& s, double tol_loc) {
  return tol_loc > 0.0 ? tol_loc : 1e-7 * (1.0 + s.max());
}

// Search span for the certificate minimum: generous enough that a mass
// defect would surface as a negative residual out in the tail.
double certificate_cap(const TriangularMix& mix, const Sample& s) {
  return std::max(4.0 * s.max(), 2.0 * mix.last_knot());
}

std::vector<double> knot_grid_with_origin(const TriangularMix& mix) {
  std::vector<double> ts;
  ts.reserve(mix.knots().size() + 1);
  ts.push_back(0.0);
  ts.insert(ts.end(), mix.knots().begin(), mix.knots().end());
  return ts;
}

}  // namespace

void VerificationReport::add(CheckItem item) { items.push_back(std::move(item)); }

bool VerificationReport::all_pass() const {
  return std::all_of(items.begin(), items.end(),
                     [](const CheckItem& it) { return it.pass; });
}

const CheckItem* VerificationReport::find(const std::string& name) const {
  for (const CheckItem& it : items) {
    if (it.name == name) return &it;
  }
  return nullptr;
}

VerificationReport check_knot_placement(const TriangularMix& mix,
                                        const Sample& s, double tol_loc) {
  const double tl = resolve_tol_loc(s, tol_loc);
  const std::vector<double>& obs = s.distinct_values();
  const std::vector<double>& knots = mix.knots();
  VerificationReport rep;

  int worst_count = 0;
  double worst_gap = 0.0;
  for (std::size_t i = 0; i + 1 < obs.size(); ++i) {
    auto lo = std::upper_bound(knots.begin(), knots.end(), obs[i]);
    auto hi = std::lower_bound(knots.begin(), knots.end(), obs[i + 1]);
    int count = static_cast<int>(hi - lo);
    if (count > worst_count) {
      worst_count = count;
      worst_gap = obs[i];
    }
  }
  rep.add(make_item("one knot per gap",
                    -static_cast<double>(std::max(0, worst_count - 1)), 0.0,
                    worst_gap));

  double min_dist = std::numeric_limits<double>::infinity();
  double at_obs = 0.0;
  for (double t : knots) {
    auto it = std::lower_bound(obs.begin(), obs.end(), t);
    if (it != obs.end() && std::abs(*it - t) < min_dist) {
      min_dist = std::abs(*it - t);
      at_obs = *it;
    }
    if (it != obs.begin() && std::abs(t - *(it - 1)) < min_dist) {
      min_dist = std::abs(t - *(it - 1));
      at_obs = *(it - 1);
    }
  }
  rep.add(make_item("knots clear of observations", min_dist - tl, 0.0, at_obs,
                    knots.empty() ? "no knots" : ""));

  int beyond = static_cast<int>(
      knots.end() - std::upper_bound(knots.begin(), knots.end(), s.max()));
  rep.add(make_item("single knot beyond largest observation",
                    -std::abs(static_cast<double>(beyond) - 1.0), 0.0,
                    knots.empty() ? 0.0 : knots.back()));
  return rep;
}

VerificationReport check_lse_optimality(const TriangularMix& mix,
                                        const Sample& s, double tol) {
  VerificationReport rep;
  KnotCandidate best = lse_best_knot(mix, s, certificate_cap(mix, s));
  rep.add(make_item("certificate minimum", best.value, tol, best.tau));

  double worst_res = 0.0, at_res = 0.0;
  double worst_cdf = 0.0, at_cdf = 0.0;
  for (double t : mix.knots()) {
    double g = lse_residual(mix, s, t);
    if (std::abs(g) > worst_res) {
      worst_res = std::abs(g);
      at_res = t;
    }
    double dc = mix.cdf(t) - s.ecdf(t);
    if (std::abs(dc) > worst_cdf) {
      worst_cdf = std::abs(dc);
      at_cdf = t;
    }
  }
  rep.add(make_item("knot residual equalities", -worst_res, tol, at_res));
  rep.add(make_item("knot cdf equalities", -worst_cdf, tol, at_cdf));
  rep.add(make_item("unit mass", -std::abs(mix.mass() - 1.0), tol,
                    mix.last_knot()));
  return rep;
}

VerificationReport check_mle_optimality(const TriangularMix& mix,
                                        const Sample& s, double tol) {
  VerificationReport rep;
  KnotCandidate best = mle_best_knot(mix, s, certificate_cap(mix, s));
  rep.add(make_item("certificate minimum", best.value, tol, best.tau));

  double worst_res = 0.0, at_res = 0.0;
  double worst_cdf = 0.0, at_cdf = 0.0;
  for (double t : mix.knots()) {
    double d = mle_residual(mix, s, t);
    if (std::abs(d) > worst_res) {
      worst_res = std::abs(d);
      at_res = t;
    }
    double dc = mix.cdf(t) - s.ecdf(t);
    if (std::abs(dc) > worst_cdf) {
      worst_cdf = std::abs(dc);
      at_cdf = t;
    }
  }
  rep.add(make_item("knot residual equalities", -worst_res, tol, at_res));
  rep.add(make_item("knot cdf equalities", -worst_cdf, tol, at_cdf));

  // Between consecutive knots the integral of the empirical CDF from the
  // left knot never exceeds that of the fitted CDF.
  std::vector<double> ts = knot_grid_with_origin(mix);
  double min_slack = std::numeric_limits<double>::infinity();
  double at_slack = 0.0;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    const double a = ts[k], b = ts[k + 1];
    const double ia = mix.cdf_integral(a), ea = s.ecdf_integral(a);
    for (int j = 0; j <= 64; ++j) {
      double r = a + (b - a) * static_cast<double>(j) / 64.0;
      double slack = (mix.cdf_integral(r) - ia) - (s.ecdf_integral(r) - ea);
      if (slack < min_slack) {
        min_slack = slack;
        at_slack = r;
      }
    }
  }
  if (ts.size() < 2) min_slack = 0.0;
  rep.add(make_item("interval integral dominance", min_slack, tol, at_slack));
  rep.add(make_item("unit mass", -std::abs(mix.mass() - 1.0), tol,
                    mix.last_knot()));
  return rep;
}

Extrema sup_inf_difference(const Sample& s, const TrueModel& model) {
  Extrema e = Extrema::empty();
  e.absorb(0.0, 0.0);  // the origin and the far tail
  const std::vector<double>& v = s.distinct_values();
  const std::vector<std::size_t>& c = s.cumulative_counts();
  const double n = static_cast<double>(s.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double F = model.cdf(v[i]);
    e.absorb(static_cast<double>(c[i]) / n - F, v[i]);
    const double prev = i == 0 ? 0.0 : static_cast<double>(c[i - 1]);
    e.absorb(prev / n - F, v[i]);  // left limit at the jump
  }
  return e;
}

Extrema sup_inf_difference(const TriangularMix& mix, const TrueModel& model) {
  Extrema e = Extrema::empty();
  const double tail = mix.mass() - 1.0;
  const double tail_arg = std::isfinite(model.support_end())
                              ? std::max(model.support_end(), mix.last_knot())
                              : std::numeric_limits<double>::infinity();
  if (mix.empty()) {
    e.absorb(0.0, 0.0);
    e.absorb(tail, tail_arg);
    return e;
  }
  std::vector<double> critical = mix.knots();
  for (double b : model.breakpoints()) {
    if (b > 0.0 && b < mix.last_knot()) critical.push_back(b);
  }
  auto diff = [&](double x) { return mix.cdf(x) - model.cdf(x); };
  e = scan_extrema(diff, 0.0, mix.last_knot(), critical, 512);
  e.absorb(tail, tail_arg);
  return e;
}

Extrema sup_inf_difference(const ConcaveMajorant& cm, const TrueModel& model) {
  Extrema e = Extrema::empty();
  const std::vector<double>& xs = cm.x();
  auto diff = [&](double t) { return cm(t) - model.cdf(t); };
  e.absorb(diff(xs.front()), xs.front());
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    // Linear majorant minus concave model CDF is convex on the segment:
    // suprema sit at the endpoints, the infimum at one interior point.
    e.absorb(diff(xs[k + 1]), xs[k + 1]);
    double xtol = 1e-12 * (1.0 + xs.back());
    double xmin = golden_min(diff, xs[k], xs[k + 1], xtol);
    e.absorb(diff(xmin), xmin);
  }
  const double tail = cm.y().back() - 1.0;
  e.absorb(tail, std::isfinite(model.support_end())
                     ? std::max(model.support_end(), xs.back())
                     : std::numeric_limits<double>::infinity());
  if (xs.front() > 0.0) e.absorb(cm.y().front() - model.cdf(0.0), 0.0);
  return e;
}

VerificationReport deviation_bound_margins(const TriangularMix& fit_ml,
                                           const TriangularMix& fit_ls,
                                           const Sample& s,
                                           const TrueModel& model) {
  if (!model.density_convex()) {
    throw Error(Errc::NonConvexModel,
                "deviation bounds require a convex model density; got '" +
                    model.name() + "'");
  }
  const double tol = 1e-8;
  const Extrema d = sup_inf_difference(s, model);
  const Extrema eml = sup_inf_difference(fit_ml, model);
  const Extrema els = sup_inf_difference(fit_ls, model);
  const double lower_bound = 1.5 * d.inf - 0.5 * d.sup;
  const double upper_bound = 1.5 * d.sup - 0.5 * d.inf;

  VerificationReport rep;
  rep.add(make_item("ml lower deviation bound", eml.inf - lower_bound, tol,
                    eml.arg_inf));
  rep.add(make_item("ls lower deviation bound", els.inf - lower_bound, tol,
                    els.arg_inf));
  rep.add(make_item("ls upper deviation bound", upper_bound - els.sup, tol,
                    els.arg_sup));
  const double d_norm = std::max(d.sup, -d.inf);
  const double ls_norm = std::max(els.sup, -els.inf);
  rep.add(make_item("ls sup-norm factor two", 2.0 * d_norm - ls_norm, tol,
                    els.sup >= -els.inf ? els.arg_sup : els.arg_inf));
  return rep;
}

namespace {

std::vector<double> uniform_grid(double a, double b, int pieces) {
  std::vector<double> xs(static_cast<std::size_t>(pieces) + 1);
  for (int i = 0; i <= pieces; ++i) {
    xs[static_cast<std::size_t>(i)] =
        a + (b - a) * static_cast<double>(i) / static_cast<double>(pieces);
  }
  return xs;
}

// Minimum second difference of a central-difference derivative of F on
// (lo, hi). Used for the convex-derivative hypothesis.
std::pair<double, double> min_derivative_second_difference(
    const std::function<double(double)>& F, double lo, double hi) {
  const int kPoints = 256;
  const double delta = (hi - lo) / 2048.0;
  const double left = lo + delta, right = hi - delta;
  std::vector<double> xs = uniform_grid(left, right, kPoints - 1);
  std::vector<double> fp(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    fp[i] = (F(xs[i] + delta) - F(xs[i] - delta)) / (2.0 * delta);
  }
  double min_d2 = std::numeric_limits<double>::infinity();
  double at = left;
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    double d2 = fp[i + 1] - 2.0 * fp[i] + fp[i - 1];
    if (d2 < min_d2) {
      min_d2 = d2;
      at = xs[i];
    }
  }
  return {min_d2, at};
}

Extrema scan_scenario_difference(const std::function<double(double)>& lhs,
                                 const std::function<double(double)>& rhs,
                                 const IntervalScenario& sc) {
  auto diff = [&](double x) { return lhs(x) - rhs(x); };
  return scan_extrema(diff, sc.a, sc.b, sc.breakpoints, 512);
}

}  // namespace

VerificationReport check_interval_bound(const IntervalScenario& sc,
                                        BoundForm form) {
  if (!(sc.b > sc.a)) {
    throw Error(Errc::ParameterOutOfRange,
                "interval scenario requires a < b");
  }
  VerificationReport rep;
  const double a = sc.a, b = sc.b;

  {
    double ea = std::abs(sc.fitted_cdf(a) - sc.empirical_cdf(a));
    double eb = std::abs(sc.fitted_cdf(b) - sc.empirical_cdf(b));
    rep.add(make_item("endpoints match", -std::max(ea, eb), 1e-10,
                      ea >= eb ? a : b));
  }

  {
    std::vector<double> xs = uniform_grid(a, b, 256);
    std::vector<double> fh(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) fh[i] = sc.fitted_cdf(xs[i]);
    double worst = 0.0, at = a;
    for (std::size_t i = 0; i + 3 < xs.size(); ++i) {
      double d3 = fh[i + 3] - 3.0 * fh[i + 2] + 3.0 * fh[i + 1] - fh[i];
      if (std::abs(d3) > worst) {
        worst = std::abs(d3);
        at = xs[i + 1];
      }
    }
    rep.add(make_item("fitted derivative linear", -worst, 1e-10, at));
  }

  {
    const double lo = std::max(a, sc.convexity_from);
    auto [min_d2, at] = min_derivative_second_difference(sc.model_cdf, lo, b);
    // Central differencing amplifies rounding by 1/delta; widen the
    // tolerance by that floor so very short intervals do not false-alarm.
    const double delta = (b - lo) / 2048.0;
    const double tol5 = 1e-8 + 4e-16 / delta;
    std::string note = sc.note;
    if (lo > a) {
      auto [full_d2, full_at] = min_derivative_second_difference(
          sc.model_cdf, a, b);
      if (full_d2 < -tol5) {
        std::ostringstream os;
        if (!note.empty()) note += "; ";
        os << "second differences on the full interval reach " << full_d2
           << " near " << full_at;
        note += os.str();
      }
    }
    rep.add(make_item("model derivative convex", min_d2, tol5, at, note));
  }

  {
    std::vector<double> rs = uniform_grid(a, b, 256);
    rs.insert(rs.end(), sc.breakpoints.begin(), sc.breakpoints.end());
    const double fit_total = sc.fitted_cdf_integral(b);
    const double emp_total = sc.empirical_cdf_integral(b);
    double min_slack = std::numeric_limits<double>::infinity();
    double at = a;
    for (double r : rs) {
      double slack =
          form == BoundForm::kUpper
              ? (emp_total - sc.empirical_cdf_integral(r)) -
                    (fit_total - sc.fitted_cdf_integral(r))
              : sc.fitted_cdf_integral(r) - sc.empirical_cdf_integral(r);
      if (slack < min_slack) {
        min_slack = slack;
        at = r;
      }
    }
    rep.add(make_item("integral dominance", min_slack, 1e-8, at));
  }

  Extrema fitted = sc.fitted_minus_model_extrema
                       ? sc.fitted_minus_model_extrema()
                       : scan_scenario_difference(sc.fitted_cdf, sc.model_cdf,
                                                  sc);
  Extrema empirical =
      sc.empirical_minus_model_extrema
          ? sc.empirical_minus_model_extrema()
          : scan_scenario_difference(sc.empirical_cdf, sc.model_cdf, sc);

  std::string unsupported;
  for (const CheckItem& it : rep.items) {
    if (!it.pass) {
      if (unsupported.empty()) {
        unsupported = "unsupported: hypothesis failed: " + it.name;
      } else {
        unsupported += ", " + it.name;
      }
    }
  }

  if (form == BoundForm::kUpper) {
    const double end_gap = sc.empirical_cdf(b) - sc.model_cdf(b);
    const double bound = 1.5 * empirical.sup - 0.5 * end_gap;
    rep.add(make_item("upper envelope", bound - fitted.sup, 1e-8,
                      fitted.arg_sup, unsupported));
  } else {
    const double start_gap = sc.empirical_cdf(a) - sc.model_cdf(a);
    const double bound = 1.5 * empirical.inf - 0.5 * start_gap;
    rep.add(make_item("lower envelope", fitted.inf - bound, 1e-8,
                      fitted.arg_inf, unsupported));
  }
  return rep;
}

std::vector<IntervalScenario> knot_interval_scenarios(const TriangularMix& mix,
                                                      const Sample& s,
                                                      const TrueModel& model) {
  std::vector<IntervalScenario> out;
  std::vector<double> ts = knot_grid_with_origin(mix);
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    const double a = ts[k], b = ts[k + 1];
    IntervalScenario sc;
    sc.a = a;
    sc.b = b;
    sc.model_cdf = [model](double x) { return model.cdf(x); };
    sc.fitted_cdf = [mix](double x) { return mix.cdf(x); };
    sc.empirical_cdf = [s](double x) { return s.ecdf(x); };
    sc.fitted_cdf_integral = [mix, a](double r) {
      return mix.cdf_integral(r) - mix.cdf_integral(a);
    };
    sc.empirical_cdf_integral = [s, a](double r) {
      return s.ecdf_integral(r) - s.ecdf_integral(a);
    };
    for (double bp : model.breakpoints()) {
      if (bp > a && bp < b) sc.breakpoints.push_back(bp);
    }
    for (double v : s.distinct_values()) {
      if (v > a && v < b) sc.breakpoints.push_back(v);
    }
    std::sort(sc.breakpoints.begin(), sc.breakpoints.end());
    sc.convexity_from = a;

    std::vector<double> model_bps;
    for (double bp : model.breakpoints()) {
      if (bp > a && bp < b) model_bps.push_back(bp);
    }
    sc.fitted_minus_model_extrema = [mix, model, a, b, model_bps]() {
      auto diff = [&](double x) { return mix.cdf(x) - model.cdf(x); };
      return scan_extrema(diff, a, b, model_bps, 512);
    };
    sc.empirical_minus_model_extrema = [s, model, a, b]() {
      Extrema e = Extrema::empty();
      e.absorb(s.ecdf(a) - model.cdf(a), a);
      const std::vector<double>& v = s.distinct_values();
      const std::vector<std::size_t>& c = s.cumulative_counts();
      const double n = static_cast<double>(s.size());
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] <= a || v[i] > b) continue;
        const double F = model.cdf(v[i]);
        e.absorb(static_cast<double>(c[i]) / n - F, v[i]);
        const double prev = i == 0 ? 0.0 : static_cast<double>(c[i - 1]);
        e.absorb(prev / n - F, v[i]);
      }
      e.absorb(s.ecdf(b) - model.cdf(b), b);
      return e;
    };
    out.push_back(std::move(sc));
  }
  return out;
}

SharpnessFixture sharpness_fixture(double c, double eps) {
  if (!(c >= 1.0)) {
    throw Error(Errc::ParameterOutOfRange, "sharpness fixture requires c >= 1");
  }
  if (!(eps > 0.0) || !(eps <= 0.5)) {
    throw Error(Errc::ParameterOutOfRange,
                "sharpness fixture requires 0 < eps <= 1/2");
  }
  IntervalScenario sc;
  sc.a = 0.0;
  sc.b = 1.0;
  sc.model_cdf = [c, eps](double x) {
    if (x >= eps) return x * x - c;
    return (x / eps) * (eps * eps - c);
  };
  sc.fitted_cdf = [](double) { return 0.0; };
  sc.empirical_cdf = [](double x) {
    return (x > 0.0 && x < 1.0) ? x * x - 1.0 / 3.0 : 0.0;
  };
  sc.fitted_cdf_integral = [](double) { return 0.0; };
  sc.empirical_cdf_integral = [](double r) {
    const double rr = std::clamp(r, 0.0, 1.0);
    return rr * rr * rr / 3.0 - rr / 3.0;
  };
  sc.breakpoints = {eps};
  sc.convexity_from = eps;
  sc.note =
      "model derivative has a kink at eps; convexity is checked on (eps, 1)";

  SharpnessFixture fx;
  fx.scenario = std::move(sc);
  fx.sup_fitted_minus_model = c - eps * eps;
  fx.sup_empirical_minus_model = c - 1.0 / 3.0;
  fx.empirical_minus_model_at_end = c - 1.0;
  return fx;
}

}  // namespace shapedens
