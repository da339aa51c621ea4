#include "shapedens/solvers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "shapedens/errors.hpp"
#include "shapedens/numerics.hpp"

namespace shapedens {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInsertSkipTol = 1e-10;  // relative knot-coincidence guard
constexpr double kTieTol = 1e-14;         // best-knot tie-break window
constexpr double kPruneTol = 1e-12;       // coefficient pruning threshold
constexpr double kRcondFloor = 1e-12;     // Gram condition limit (1e12)
constexpr double kInf = std::numeric_limits<double>::infinity();

double raw_eval(const std::vector<double>& tau, const std::vector<double>& a,
                double x) {
  double v = 0.0;
  for (std::size_t j = 0; j < tau.size(); ++j) {
    if (tau[j] > x) v += a[j] * (tau[j] - x);
  }
  return v;
}

double raw_cdf(const std::vector<double>& tau, const std::vector<double>& a,
               double r) {
  double v = 0.0;
  for (std::size_t j = 0; j < tau.size(); ++j) {
    v += a[j] * generator_cdf(tau[j], r);
  }
  return v;
}

double raw_icdf(const std::vector<double>& tau, const std::vector<double>& a,
                double r) {
  double v = 0.0;
  for (std::size_t j = 0; j < tau.size(); ++j) {
    v += a[j] * generator_cdf_integral(tau[j], r);
  }
  return v;
}

double raw_mass(const std::vector<double>& tau, const std::vector<double>& a) {
  double v = 0.0;
  for (std::size_t j = 0; j < tau.size(); ++j) {
    v += 0.5 * a[j] * tau[j] * tau[j];
  }
  return v;
}

double lse_obj_raw(const std::vector<double>& tau, const std::vector<double>& a,
                   const Sample& s) {
  double quad = 0.0, lin = 0.0;
  for (std::size_t j = 0; j < tau.size(); ++j) {
    for (std::size_t k = 0; k < tau.size(); ++k) {
      quad += a[j] * a[k] * gram(tau[j], tau[k]);
    }
    lin += a[j] * s.ecdf_integral(tau[j]);
  }
  return quad - 2.0 * lin;
}

double lse_res_raw(const std::vector<double>& tau, const std::vector<double>& a,
                   const Sample& s, double r) {
  return raw_icdf(tau, a, r) - s.ecdf_integral(r);
}

// Density values at the observations; index of the first nonpositive one, or
// -1 when all are positive.
long obs_density(const std::vector<double>& tau, const std::vector<double>& a,
                 const Sample& s, std::vector<double>& h) {
  const auto& xs = s.values();
  h.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    h[i] = raw_eval(tau, a, xs[i]);
    if (!(h[i] > 0.0)) return static_cast<long>(i);
  }
  return -1;
}

double mle_obj_raw(const std::vector<double>& tau, const std::vector<double>& a,
                   const Sample& s) {
  std::vector<double> h;
  if (obs_density(tau, a, s, h) >= 0) return kInf;
  double loglik = 0.0;
  for (double v : h) loglik += std::log(v);
  return raw_mass(tau, a) - loglik / static_cast<double>(s.size());
}

double mle_res_raw(const std::vector<double>&, const std::vector<double>&,
                   const Sample& s, double r, const std::vector<double>& w) {
  const auto& xs = s.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size() && xs[i] < r; ++i) {
    acc += (r - xs[i]) * w[i];
  }
  return 0.5 * r * r - acc / static_cast<double>(s.size());
}

void consider_candidate(KnotCandidate& best, double t, double v) {
  if (v < best.value - kTieTol ||
      (v < best.value + kTieTol && t < best.tau)) {
    best = {t, v};
  }
}

KnotCandidate lse_best_knot_raw(const std::vector<double>& tau,
                                const std::vector<double>& a, const Sample& s,
                                double cap) {
  std::vector<double> pts;
  pts.push_back(0.0);
  for (double x : s.values()) {
    if (x < cap) pts.push_back(x);
  }
  for (double t : tau) {
    if (t < cap) pts.push_back(t);
  }
  pts.push_back(cap);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  KnotCandidate best{kInf, kInf};
  for (std::size_t p = 1; p < pts.size(); ++p) {
    double lo = pts[p - 1], hi = pts[p];
    if (!(hi > lo)) continue;
    // g'(t) = Fhat(t) - F_n(t) = (A - step) + B t + C t^2 on (lo, hi)
    double A = 0.0, B = 0.0, C = 0.0;
    for (std::size_t j = 0; j < tau.size(); ++j) {
      if (tau[j] <= lo) {
        A += 0.5 * a[j] * tau[j] * tau[j];
      } else {
        B += a[j] * tau[j];
        C -= 0.5 * a[j];
      }
    }
    double step = s.ecdf(lo);
    for (double r : quadratic_roots(C, B, A - step)) {
      if (r > lo && r < hi) {
        consider_candidate(best, r, lse_res_raw(tau, a, s, r));
      }
    }
    consider_candidate(best, hi, lse_res_raw(tau, a, s, hi));
  }
  return best;
}

KnotCandidate mle_best_knot_raw(const std::vector<double>& tau,
                                const std::vector<double>& a, const Sample& s,
                                double cap) {
  std::vector<double> h;
  long bad = obs_density(tau, a, s, h);
  if (bad >= 0) {
    throw Error(Errc::ZeroDensityAtObservation,
                "density vanishes at an observation", bad);
  }
  const auto& xs = s.values();
  const double n = static_cast<double>(xs.size());
  std::vector<double> w(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) w[i] = 1.0 / h[i];
  std::vector<double> prefw(xs.size() + 1, 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) prefw[i + 1] = prefw[i] + w[i];

  std::vector<double> pts;
  pts.push_back(0.0);
  for (double x : xs) {
    if (x < cap) pts.push_back(x);
  }
  pts.push_back(cap);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  KnotCandidate best{kInf, kInf};
  for (std::size_t p = 1; p < pts.size(); ++p) {
    double lo = pts[p - 1], hi = pts[p];
    if (!(hi > lo)) continue;
    std::size_t k = static_cast<std::size_t>(
        std::upper_bound(xs.begin(), xs.end(), lo) - xs.begin());
    double vertex = prefw[k] / n;  // d is t^2/2 - linear on (lo, hi]
    if (vertex > lo && vertex < hi) {
      consider_candidate(best, vertex, mle_res_raw(tau, a, s, vertex, w));
    }
    consider_candidate(best, hi, mle_res_raw(tau, a, s, hi, w));
  }
  return best;
}

void merge_closest_knots(std::vector<double>& tau, std::vector<double>& a,
                         std::vector<std::string>& warnings) {
  std::size_t jmin = 0;
  double gap = kInf;
  for (std::size_t j = 0; j + 1 < tau.size(); ++j) {
    if (tau[j + 1] - tau[j] < gap) {
      gap = tau[j + 1] - tau[j];
      jmin = j;
    }
  }
  std::ostringstream os;
  os << "merged nearly coincident knots " << tau[jmin] << " and "
     << tau[jmin + 1] << " (ill-conditioned Gram matrix)";
  warnings.push_back(os.str());
  a[jmin] += a[jmin + 1];
  tau.erase(tau.begin() + static_cast<long>(jmin) + 1);
  a.erase(a.begin() + static_cast<long>(jmin) + 1);
}

// Non-negative least squares on the fixed support: solve the normal
// equations, and while some coefficient comes out nonpositive, step from the
// previous feasible point to the first zero crossing, drop that generator
// and re-solve. tau and a shrink together; on return all entries of a are
// strictly positive.
void nnls_restricted(std::vector<double>& tau, std::vector<double>& a,
                     const Sample& s, std::vector<std::string>& warnings) {
  int guard = 0;
  const int guard_max = 8 * static_cast<int>(tau.size()) + 16;
  for (;;) {
    if (tau.empty()) {
      throw Error(Errc::SingularGram, "support emptied during NNLS");
    }
    if (++guard > guard_max) {
      throw Error(Errc::SingularGram, "NNLS inner loop failed to settle");
    }
    const std::size_t m = tau.size();
    MatrixXd G(m, m);
    VectorXd c(m);
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t k = 0; k <= j; ++k) {
        G(j, k) = G(k, j) = gram(tau[j], tau[k]);
      }
      c(static_cast<long>(j)) = s.ecdf_integral(tau[j]);
    }
    Eigen::LLT<MatrixXd> llt(G);
    if (llt.info() != Eigen::Success || llt.rcond() < kRcondFloor) {
      if (m == 1) {
        throw Error(Errc::SingularGram, "singular 1x1 Gram matrix");
      }
      merge_closest_knots(tau, a, warnings);
      continue;
    }
    VectorXd sol = llt.solve(c);
    if (sol.minCoeff() > 0.0) {
      for (std::size_t j = 0; j < m; ++j) a[j] = sol(static_cast<long>(j));
      return;
    }
    // first zero crossing on the segment from the feasible a toward sol
    double t = 1.0;
    std::size_t drop = 0;
    for (std::size_t j = 0; j < m; ++j) {
      double sj = sol(static_cast<long>(j));
      if (sj <= 0.0) {
        double denom = a[j] - sj;
        double ratio = denom > 0.0 ? a[j] / denom : 0.0;
        if (ratio < t) {
          t = ratio;
          drop = j;
        }
      }
    }
    for (std::size_t j = 0; j < m; ++j) {
      a[j] = std::max(0.0, a[j] + t * (sol(static_cast<long>(j)) - a[j]));
    }
    tau.erase(tau.begin() + static_cast<long>(drop));
    a.erase(a.begin() + static_cast<long>(drop));
  }
}

bool near_existing_knot(const std::vector<double>& tau, double t) {
  for (double k : tau) {
    if (std::abs(t - k) <= kInsertSkipTol * (1.0 + t)) return true;
  }
  return false;
}

void insert_knot(std::vector<double>& tau, std::vector<double>& a, double t,
                 double coeff) {
  auto it = std::upper_bound(tau.begin(), tau.end(), t);
  long pos = it - tau.begin();
  tau.insert(it, t);
  a.insert(a.begin() + pos, coeff);
}

// Open observation gap (lo, hi) containing t; hi is +inf beyond the largest
// observation. Returns false when t sits exactly on an observation.
bool observation_gap(const Sample& s, double t, double& lo, double& hi) {
  const auto& xs = s.values();
  auto it = std::lower_bound(xs.begin(), xs.end(), t);
  hi = (it == xs.end()) ? kInf : *it;
  lo = (it == xs.begin()) ? 0.0 : *(it - 1);
  return t > lo && t < hi;
}

// Index of the open gap between distinct order statistics containing t
// (0 = before the smallest observation), or -1 when t sits on one.
long gap_index(const Sample& s, double t) {
  const auto& xs = s.distinct_values();
  auto it = std::lower_bound(xs.begin(), xs.end(), t);
  if (it != xs.end() && *it == t) return -1;
  return it - xs.begin();
}

// Collapse knots sharing an observation gap to their coefficient-weighted
// average (coefficients add). The weighted average preserves the fitted
// density at every observation exactly, since no observation separates the
// merged knots; it restores the one-knot-per-gap structure of the optimum
// so the Newton refinement has the right number of unknowns.
bool merge_gap_clusters(std::vector<double>& tau, std::vector<double>& a,
                        const Sample& s) {
  bool changed = false;
  std::size_t k = 0;
  while (k + 1 < tau.size()) {
    const long g0 = gap_index(s, tau[k]);
    const long g1 = gap_index(s, tau[k + 1]);
    if (g0 >= 0 && g0 == g1) {
      const double w = a[k] + a[k + 1];
      tau[k] = (a[k] * tau[k] + a[k + 1] * tau[k + 1]) / w;
      a[k] = w;
      tau.erase(tau.begin() + static_cast<long>(k) + 1);
      a.erase(a.begin() + static_cast<long>(k) + 1);
      changed = true;
    } else {
      ++k;
    }
  }
  return changed;
}

struct PolishProblem {
  // Fills F (size 2m) with the stationarity residuals; false = infeasible.
  std::function<bool(const std::vector<double>&, const std::vector<double>&,
                     VectorXd&)>
      residual;
  // Fills the 2m x 2m Jacobian at the current point.
  std::function<void(const std::vector<double>&, const std::vector<double>&,
                     MatrixXd&)>
      jacobian;
};

// Joint Newton refinement of (knots, coefficients). Knots are confined to
// their observation gaps (the residuals are smooth there), coefficients stay
// positive. Keeps the best iterate by residual norm, so the result is never
// worse than the input.
bool polish_support(std::vector<double>& tau, std::vector<double>& a,
                    const Sample& s, const PolishProblem& prob,
                    std::vector<std::string>& warnings) {
  const std::size_t m = tau.size();
  if (m == 0) return false;
  std::vector<double> lo(m), hi(m);
  for (std::size_t k = 0; k < m; ++k) {
    if (!observation_gap(s, tau[k], lo[k], hi[k])) {
      warnings.push_back("polish skipped: knot coincides with an observation");
      return false;
    }
  }
  auto feasible = [&](const std::vector<double>& t,
                      const std::vector<double>& c) {
    for (std::size_t k = 0; k < m; ++k) {
      if (!(t[k] > lo[k] && t[k] < hi[k] && c[k] > 0.0)) return false;
      if (k > 0 && !(t[k] > t[k - 1])) return false;
    }
    return true;
  };

  VectorXd F(2 * static_cast<long>(m));
  if (!prob.residual(tau, a, F)) return false;
  double best_norm = F.lpNorm<Eigen::Infinity>();
  std::vector<double> best_tau = tau, best_a = a;
  const double atol = 1e-15 * (1.0 + s.max());

  MatrixXd J(2 * static_cast<long>(m), 2 * static_cast<long>(m));
  std::vector<double> cand_tau(m), cand_a(m);
  VectorXd Fc(2 * static_cast<long>(m));
  for (int iter = 0; iter < 30 && best_norm > atol; ++iter) {
    prob.jacobian(tau, a, J);
    Eigen::FullPivLU<MatrixXd> lu(J);
    if (!lu.isInvertible()) break;
    VectorXd step = lu.solve(-F);
    bool accepted = false;
    double t = 1.0;
    for (int halve = 0; halve < 50; ++halve, t *= 0.5) {
      for (std::size_t k = 0; k < m; ++k) {
        cand_tau[k] = tau[k] + t * step(static_cast<long>(k));
        cand_a[k] = a[k] + t * step(static_cast<long>(m + k));
      }
      if (!feasible(cand_tau, cand_a)) continue;
      if (!prob.residual(cand_tau, cand_a, Fc)) continue;
      double norm = Fc.lpNorm<Eigen::Infinity>();
      if (norm < best_norm) {
        tau = cand_tau;
        a = cand_a;
        F = Fc;
        best_norm = norm;
        best_tau = tau;
        best_a = a;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  tau = best_tau;
  a = best_a;
  return true;
}

// LSE stationarity: g(t_k) = 0 and g'(t_k) = 0 with g = Hhat - H. The
// second family is exactly the knot equality Fhat(t_k) = F_n(t_k).
void polish_lse(std::vector<double>& tau, std::vector<double>& a,
                const Sample& s, std::vector<std::string>& warnings) {
  PolishProblem prob;
  prob.residual = [&s](const std::vector<double>& t,
                       const std::vector<double>& c, VectorXd& F) {
    const long m = static_cast<long>(t.size());
    for (long k = 0; k < m; ++k) {
      double tk = t[static_cast<std::size_t>(k)];
      F(k) = raw_icdf(t, c, tk) - s.ecdf_integral(tk);
      F(m + k) = raw_cdf(t, c, tk) - s.ecdf(tk);
    }
    return true;
  };
  prob.jacobian = [&s](const std::vector<double>& t,
                       const std::vector<double>& c, MatrixXd& J) {
    const long m = static_cast<long>(t.size());
    for (long k = 0; k < m; ++k) {
      double tk = t[static_cast<std::size_t>(k)];
      double gprime = raw_cdf(t, c, tk) - s.ecdf(tk);
      double dens = raw_eval(t, c, tk);
      for (long j = 0; j < m; ++j) {
        double tj = t[static_cast<std::size_t>(j)];
        double aj = c[static_cast<std::size_t>(j)];
        // d xi(tau, r)/d tau = psi(r, tau); d psi(tau, r)/d tau = min(tau, r)
        J(k, j) = aj * generator_cdf(tk, tj) + (j == k ? gprime : 0.0);
        J(k, m + j) = generator_cdf_integral(tj, tk);
        J(m + k, j) = aj * std::min(tj, tk) + (j == k ? dens : 0.0);
        J(m + k, m + j) = generator_cdf(tj, tk);
      }
    }
  };
  polish_support(tau, a, s, prob, warnings);
}

// MLE stationarity: d(t_k) = 0 and d'(t_k) = 0 (the latter is objective
// stationarity in the knot location since d psi/d tau_k = a_k d'(t_k)).
void polish_mle(std::vector<double>& tau, std::vector<double>& a,
                const Sample& s, std::vector<std::string>& warnings) {
  const auto& xs = s.values();
  const double n = static_cast<double>(xs.size());
  PolishProblem prob;
  prob.residual = [&s, &xs, n](const std::vector<double>& t,
                               const std::vector<double>& c, VectorXd& F) {
    std::vector<double> h;
    if (obs_density(t, c, s, h) >= 0) return false;
    const long m = static_cast<long>(t.size());
    for (long k = 0; k < m; ++k) {
      double tk = t[static_cast<std::size_t>(k)];
      double hinge = 0.0, ind = 0.0;
      for (std::size_t i = 0; i < xs.size() && xs[i] < tk; ++i) {
        hinge += (tk - xs[i]) / h[i];
        ind += 1.0 / h[i];
      }
      F(k) = 0.5 * tk * tk - hinge / n;
      F(m + k) = tk - ind / n;
    }
    return true;
  };
  prob.jacobian = [&s, &xs, n](const std::vector<double>& t,
                               const std::vector<double>& c, MatrixXd& J) {
    std::vector<double> h;
    obs_density(t, c, s, h);
    const long m = static_cast<long>(t.size());
    J.setZero();
    for (long k = 0; k < m; ++k) {
      double tk = t[static_cast<std::size_t>(k)];
      double dk_direct = tk, ek_direct = 1.0;
      for (std::size_t i = 0; i < xs.size() && xs[i] < tk; ++i) {
        dk_direct -= (1.0 / h[i]) / n;
      }
      for (long j = 0; j < m; ++j) {
        double tj = t[static_cast<std::size_t>(j)];
        double aj = c[static_cast<std::size_t>(j)];
        double dd_a = 0.0, dd_t = 0.0, de_a = 0.0, de_t = 0.0;
        for (std::size_t i = 0; i < xs.size() && xs[i] < tk; ++i) {
          double u = 1.0 / (h[i] * h[i]);
          double eji = std::max(0.0, tj - xs[i]);
          double iji = xs[i] < tj ? 1.0 : 0.0;
          double eki = tk - xs[i];
          dd_a += eki * eji * u;
          dd_t += eki * aj * iji * u;
          de_a += eji * u;
          de_t += aj * iji * u;
        }
        // observations beyond t_k still enter the a-columns of row d_k
        // through nothing: E_ki = 0 there, so the truncation is exact.
        J(k, j) = dd_t / n + (j == k ? dk_direct : 0.0);
        J(k, m + j) = dd_a / n;
        J(m + k, j) = de_t / n + (j == k ? ek_direct : 0.0);
        J(m + k, m + j) = de_a / n;
      }
    }
  };
  polish_support(tau, a, s, prob, warnings);
}

// Damped Newton over coefficients on the fixed support, with projection to
// the first zero crossing and pruning of coefficients that settle at zero.
void mle_inner_newton(std::vector<double>& tau, std::vector<double>& a,
                      const Sample& s, double gtol,
                      std::vector<std::string>& warnings) {
  const auto& xs = s.values();
  const double n = static_cast<double>(xs.size());
  for (int inner = 0; inner < 100; ++inner) {
    const std::size_t m = tau.size();
    std::vector<double> h;
    if (obs_density(tau, a, s, h) >= 0) {
      throw Error(Errc::ZeroDensityAtObservation,
                  "infeasible iterate in Newton loop");
    }
    MatrixXd E(m, xs.size());
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        E(static_cast<long>(j), static_cast<long>(i)) =
            std::max(0.0, tau[j] - xs[i]);
      }
    }
    VectorXd grad(m);
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        acc += E(static_cast<long>(j), static_cast<long>(i)) / h[i];
      }
      grad(static_cast<long>(j)) = 0.5 * tau[j] * tau[j] - acc / n;
    }
    if (grad.lpNorm<Eigen::Infinity>() <= gtol) return;

    MatrixXd H(m, m);
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t k = 0; k <= j; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          acc += E(static_cast<long>(j), static_cast<long>(i)) *
                 E(static_cast<long>(k), static_cast<long>(i)) /
                 (h[i] * h[i]);
        }
        H(static_cast<long>(j), static_cast<long>(k)) =
            H(static_cast<long>(k), static_cast<long>(j)) = acc / n;
      }
    }
    Eigen::LLT<MatrixXd> llt(H);
    VectorXd dir;
    if (llt.info() == Eigen::Success && llt.rcond() > 1e-14) {
      dir = llt.solve(-grad);
    } else {
      MatrixXd Hr = H;
      double ridge = 1e-12 * (1.0 + H.diagonal().maxCoeff());
      Hr.diagonal().array() += ridge;
      dir = Hr.llt().solve(-grad);
    }

    double tmax = kInf;
    for (std::size_t j = 0; j < m; ++j) {
      double dj = dir(static_cast<long>(j));
      if (dj < 0.0) tmax = std::min(tmax, a[j] / -dj);
    }
    double obj0 = raw_mass(tau, a);
    for (double v : h) obj0 -= std::log(v) / n;
    double t = std::min(1.0, tmax);
    bool accepted = false;
    std::vector<double> cand(m);
    for (int halve = 0; halve < 60 && t > 0.0; ++halve, t *= 0.5) {
      for (std::size_t j = 0; j < m; ++j) {
        cand[j] = std::max(0.0, a[j] + t * dir(static_cast<long>(j)));
      }
      double obj = mle_obj_raw(tau, cand, s);
      if (obj < obj0) {
        a = cand;
        accepted = true;
        break;
      }
    }
    if (!accepted) return;  // numerical floor reached

    for (std::size_t j = m; j-- > 0;) {
      if (a[j] <= kPruneTol) {
        tau.erase(tau.begin() + static_cast<long>(j));
        a.erase(a.begin() + static_cast<long>(j));
      }
    }
    if (tau.empty()) {
      throw Error(Errc::SingularGram, "support emptied during Newton loop");
    }
  }
  warnings.push_back("inner Newton loop hit its iteration limit");
}

}  // namespace

double FitConfig::resolved_tol(const Sample& s) const {
  double t = tol_cert > 0.0 ? tol_cert : 1e-10 * (1.0 + s.max());
  if (!(t > 0.0)) {
    throw Error(Errc::ParameterOutOfRange, "tol_cert must be positive");
  }
  return t;
}

double FitConfig::resolved_cap(const Sample& s) const {
  double c = tau_cap > 0.0 ? tau_cap : 4.0 * s.max();
  if (!(c > s.max())) {
    throw Error(Errc::ParameterOutOfRange,
                "tau_cap must exceed the largest observation");
  }
  return c;
}

double lse_objective(const TriangularMix& h, const Sample& s) {
  return lse_obj_raw(h.knots(), h.coefficients(), s);
}

double lse_residual(const TriangularMix& h, const Sample& s, double tau) {
  if (tau < 0.0) {
    throw Error(Errc::NegativeArgument, "residual argument must be >= 0");
  }
  return lse_res_raw(h.knots(), h.coefficients(), s, tau);
}

KnotCandidate lse_best_knot(const TriangularMix& h, const Sample& s,
                            double cap) {
  if (!(cap > 0.0)) {
    throw Error(Errc::ParameterOutOfRange, "cap must be positive");
  }
  return lse_best_knot_raw(h.knots(), h.coefficients(), s, cap);
}

double mle_objective(const TriangularMix& h, const Sample& s) {
  std::vector<double> dens;
  long bad = obs_density(h.knots(), h.coefficients(), s, dens);
  if (bad >= 0) {
    throw Error(Errc::ZeroDensityAtObservation,
                "density vanishes at an observation", bad);
  }
  double loglik = 0.0;
  for (double v : dens) loglik += std::log(v);
  return h.mass() - loglik / static_cast<double>(s.size());
}

double mle_residual(const TriangularMix& h, const Sample& s, double tau) {
  if (!(tau > 0.0)) {
    throw Error(Errc::ParameterOutOfRange, "residual argument must be > 0");
  }
  std::vector<double> dens;
  long bad = obs_density(h.knots(), h.coefficients(), s, dens);
  if (bad >= 0) {
    throw Error(Errc::ZeroDensityAtObservation,
                "density vanishes at an observation", bad);
  }
  std::vector<double> w(dens.size());
  for (std::size_t i = 0; i < dens.size(); ++i) w[i] = 1.0 / dens[i];
  return mle_res_raw(h.knots(), h.coefficients(), s, tau, w);
}

KnotCandidate mle_best_knot(const TriangularMix& h, const Sample& s,
                            double cap) {
  if (!(cap > 0.0)) {
    throw Error(Errc::ParameterOutOfRange, "cap must be positive");
  }
  return mle_best_knot_raw(h.knots(), h.coefficients(), s, cap);
}

namespace {

void note_cap_extension(double cap, std::vector<std::string>& warnings) {
  std::ostringstream os;
  os << "candidate-knot cap extended to " << cap
     << " (support reached the previous cap)";
  warnings.push_back(os.str());
}

}  // namespace

FitResult lse_fit(const Sample& s, const FitConfig& cfg) {
  const double tol = cfg.resolved_tol(s);
  double cap = cfg.resolved_cap(s);
  if (cfg.max_iter < 1) {
    throw Error(Errc::ParameterOutOfRange, "max_iter must be >= 1");
  }

  FitResult out;
  std::vector<double> tau{3.0 * s.mean()};
  std::vector<double> a{0.0};
  KnotCandidate best{0.0, 0.0};
  bool certified = false;
  bool stalled = false;
  double last_inserted = -1.0;

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    out.iterations = iter + 1;
    nnls_restricted(tau, a, s, out.warnings);
    out.objective_history.push_back(lse_obj_raw(tau, a, s));
    if (tau.back() >= 0.99 * cap) {
      cap *= 2.0;
      note_cap_extension(cap, out.warnings);
    }
    best = lse_best_knot_raw(tau, a, s, cap);
    if (best.value >= -tol) {
      certified = true;
      break;
    }
    if (near_existing_knot(tau, best.tau)) {
      out.warnings.push_back(
          "stopped: best candidate knot coincides with the support");
      stalled = true;
      break;
    }
    if (last_inserted >= 0.0 &&
        std::abs(best.tau - last_inserted) <= kTieTol * (1.0 + best.tau)) {
      out.warnings.push_back(
          "stopped: candidate knot was pruned straight back out");
      stalled = true;
      break;
    }
    insert_knot(tau, a, best.tau, 0.0);
    last_inserted = best.tau;
  }
  if (!certified && !stalled) {
    out.warnings.push_back("MaxIterExceeded: certificate not reached");
  }

  if (cfg.polish) polish_lse(tau, a, s, out.warnings);

  out.mix = TriangularMix(tau, a);
  best = lse_best_knot_raw(tau, a, s, cap);
  out.final_residual = best.value;
  out.objective = lse_obj_raw(tau, a, s);
  out.converged = best.value >= -tol;
  return out;
}

FitResult mle_fit(const Sample& s, const FitConfig& cfg) {
  const double tol = cfg.resolved_tol(s);
  double cap = cfg.resolved_cap(s);
  if (cfg.max_iter < 1) {
    throw Error(Errc::ParameterOutOfRange, "max_iter must be >= 1");
  }

  double tau0 = s.max() + s.mean();
  if (!(tau0 > s.max())) {
    throw Error(Errc::InitialSupportInfeasible,
                "initial knot does not exceed the largest observation");
  }
  FitResult out;
  std::vector<double> tau{tau0};
  std::vector<double> a{2.0 / (tau0 * tau0)};
  KnotCandidate best{0.0, 0.0};
  bool certified = false;
  bool stalled = false;
  double last_inserted = -1.0;

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    out.iterations = iter + 1;
    mle_inner_newton(tau, a, s, 0.1 * tol, out.warnings);
    out.objective_history.push_back(mle_obj_raw(tau, a, s));
    if (tau.back() >= 0.99 * cap) {
      cap *= 2.0;
      note_cap_extension(cap, out.warnings);
    }
    best = mle_best_knot_raw(tau, a, s, cap);
    if (best.value >= -tol) {
      certified = true;
      break;
    }
    if (near_existing_knot(tau, best.tau)) {
      out.warnings.push_back(
          "stopped: best candidate knot coincides with the support");
      stalled = true;
      break;
    }
    if (last_inserted >= 0.0 &&
        std::abs(best.tau - last_inserted) <= kTieTol * (1.0 + best.tau)) {
      out.warnings.push_back(
          "stopped: candidate knot was pruned straight back out");
      stalled = true;
      break;
    }
    // seed the new generator just above the pruning threshold, scaled so
    // its mass contribution is about 1e-6
    insert_knot(tau, a, best.tau, 2e-6 / (1.0 + best.tau * best.tau));
    last_inserted = best.tau;
  }
  if (!certified && !stalled) {
    out.warnings.push_back("MaxIterExceeded: certificate not reached");
  }

  if (cfg.polish) polish_mle(tau, a, s, out.warnings);

  out.mix = TriangularMix(tau, a);
  best = mle_best_knot_raw(tau, a, s, cap);
  out.final_residual = best.value;
  out.objective = mle_obj_raw(tau, a, s);
  out.converged = best.value >= -tol;
  return out;
}

}  // namespace shapedens
