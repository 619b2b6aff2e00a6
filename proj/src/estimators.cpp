#include "dspecies/estimators.hpp"

#include "dspecies/errors.hpp"
#include "dspecies/stirling.hpp"

#include <algorithm>
#include <cmath>

namespace dspecies {

namespace {

double dbl(Index x) { return static_cast<double>(x); }

void check_kp(const char* who, Index k, Index p) {
  if (k < 1 || p < 1 || p > k)
    throw DomainError(std::string(who) + ": requires 1 <= P <= k");
}

RootOptions tight_options(double lo, double hi) {
  RootOptions opts;
  opts.tol = 1e-14;
  opts.lower_limit = lo;
  opts.upper_limit = hi;
  return opts;
}

void set_n(EstimateReport& r, double n) {
  r.n_real = n;
  r.n_floor = static_cast<Index>(std::floor(n));
}

// E[P] - P at (n, theta) for finite theta, and its theta -> infinity limit.
double mle_residual(double n, double theta, Index k, Index p) {
  if (n <= 1.0) return n - dbl(p);
  const double lr = std::isinf(theta) ? dbl(k) * std::log1p(-1.0 / n)
                                      : log_pochhammer_ratio((n - 1.0) * theta, n * theta, k);
  return -n * std::expm1(lr) - dbl(p);
}

double bell_ratio(double theta, Index k, Index p) {
  if (p <= 1) return 0.0;
  const Eigen::VectorXd row = log_bell_row(theta, k, p);
  return std::exp(row(p - 1) - row(p));
}

double stirling2_ratio(Index k, Index p) {
  if (p <= 1) return 0.0;
  const Eigen::VectorXd row = log_stirling2_row(k, p);
  return std::exp(row(p - 1) - row(p));
}

}  // namespace

std::string to_string(EstimateFlag flag) {
  switch (flag) {
    case EstimateFlag::none: return "none";
    case EstimateFlag::divergence: return "divergence";
    case EstimateFlag::no_solution: return "no_solution";
    case EstimateFlag::boundary_zero: return "boundary_zero";
    case EstimateFlag::boundary_infinite: return "boundary_infinite";
  }
  return "none";
}

EstimateFlag estimate_flag_from_string(const std::string& s) {
  for (auto f : {EstimateFlag::none, EstimateFlag::divergence, EstimateFlag::no_solution,
                 EstimateFlag::boundary_zero, EstimateFlag::boundary_infinite})
    if (to_string(f) == s) return f;
  throw ValidationError("unknown estimate flag '" + s + "'");
}

namespace {

std::string shape_name(const ConditionalModel& shape) {
  if (const auto* t = std::get_if<ThetaShape>(&shape)) {
    if (!(t->theta > 0.0) || !std::isfinite(t->theta))
      throw DomainError("theta must be positive and finite");
    return t->theta == 1.0 ? "bose-einstein" : "dirichlet";
  }
  if (std::holds_alternative<MaxwellBoltzmannShape>(shape)) return "maxwell-boltzmann";
  throw UnsupportedModelError("n is infinite under the Kingman model; use kingman_gamma");
}

EstimateReport base_report(const char* estimator, const ConditionalModel& shape, Index k, Index p) {
  EstimateReport r;
  r.estimator = estimator;
  r.model = shape_name(shape);
  r.statistic_used = "P";
  r.k = k;
  r.p = p;
  if (const auto* t = std::get_if<ThetaShape>(&shape)) r.theta_input = t->theta;
  return r;
}

}  // namespace

EstimateReport mle_n(const ConditionalModel& shape, Index k, Index p) {
  check_kp("mle_n", k, p);
  EstimateReport r = base_report("mle_n", shape, k, p);
  if (p == k) {
    r.flag = EstimateFlag::divergence;
    return r;
  }
  if (p == 1) {
    set_n(r, 1.0);
    return r;
  }
  const auto* t = std::get_if<ThetaShape>(&shape);
  if (t && t->theta == 1.0) {
    set_n(r, dbl(p) * dbl(k - 1) / dbl(k - p));
    r.residual = mle_residual(*r.n_real, 1.0, k, p);
    return r;
  }
  const double theta = t ? t->theta : std::numeric_limits<double>::infinity();
  const auto h = [&](double n) { return mle_residual(n, theta, k, p); };
  try {
    const RootResult root =
        solve_monotone(h, 0.0, dbl(p), std::min(2.0 * dbl(p), kNCap), tight_options(dbl(p), kNCap));
    set_n(r, root.x);
    r.iterations = root.evaluations;
    r.residual = root.residual;
  } catch (const NoSolutionError& e) {
    r.flag = EstimateFlag::divergence;
    r.n_real = e.last_hi();
  }
  return r;
}

EstimateReport mle_n(double theta, Index k, Index p) { return mle_n(ThetaShape{theta}, k, p); }

EstimateReport umvb_n(const ConditionalModel& shape, Index k, Index p) {
  check_kp("umvb_n", k, p);
  EstimateReport r = base_report("umvb_n", shape, k, p);
  const auto* t = std::get_if<ThetaShape>(&shape);
  if (t && t->theta == 1.0)
    set_n(r, dbl(p) * dbl(k) / dbl(k - p + 1));
  else if (t)
    set_n(r, dbl(p) + bell_ratio(t->theta, k, p));
  else
    set_n(r, dbl(p) + stirling2_ratio(k, p));
  return r;
}

EstimateReport umvb_n(double theta, Index k, Index p) { return umvb_n(ThetaShape{theta}, k, p); }

double kingman_mean_p(double gamma, Index k) {
  double s = 0.0;
  for (Index l = 0; l < k; ++l) s += gamma / (gamma + dbl(l));
  return s;
}

EstimateReport kingman_gamma(Index k, Index p) {
  check_kp("kingman_gamma", k, p);
  EstimateReport r;
  r.estimator = "kingman_gamma";
  r.model = "kingman";
  r.statistic_used = "P";
  r.k = k;
  r.p = p;
  if (p == 1) {
    r.flag = EstimateFlag::boundary_zero;
    r.gamma_hat = 0.0;
    return r;
  }
  if (p == k) {
    r.flag = EstimateFlag::boundary_infinite;
    r.gamma_hat = std::numeric_limits<double>::infinity();
    return r;
  }
  RootOptions opts;
  opts.tol = 1e-14;
  opts.lower_limit = 0.0;
  opts.max_expansions = 2000;  // halving toward 0 for P close to 1
  const RootResult root =
      solve_monotone([k](double g) { return kingman_mean_p(g, k); }, dbl(p), 0.5, 2.0, opts);
  r.gamma_hat = root.x;
  r.iterations = root.evaluations;
  r.residual = root.residual;
  return r;
}

double umvb_rational(Index l, Index k, Index p) {
  if (l < 1 || l > k) throw DomainError("umvb_rational: requires 1 <= l <= k");
  if (p < 1 || p > k) throw DomainError("umvb_rational: s_{k,P} is zero");
  if (p - 1 > k - l) return 0.0;
  const double num = log_stirling1_row(k - l, p - 1)(p - 1);
  const double den = log_stirling1_row(k, p)(p);
  return num == kNegInf ? 0.0 : std::exp(num - den);
}

EstimateReport joint_estimate(JointStatistic statistic, Index k, Index p, double stat_value,
                              NEstimator n_estimator, JointScheme scheme) {
  if (!(stat_value > 0.0 && stat_value < 1.0))
    throw DomainError("joint_estimate: statistic must lie in (0, 1)");
  check_kp("joint_estimate", k, p);
  const double s = stat_value;
  EstimateReport r;
  r.estimator = "joint";
  r.model = n_estimator == NEstimator::mle ? "mle" : "umvb";
  r.statistic_used = statistic == JointStatistic::D ? "P,D" : "P,psi";
  r.scheme = scheme == JointScheme::one_step ? "one_step" : "fixed_point";
  r.k = k;
  r.p = p;
  r.stat_value = s;
  const auto theta_of = [s](double n) { return (1.0 - s) / (n * s - 1.0); };

  if (scheme == JointScheme::one_step) {
    const EstimateReport n_rep =
        n_estimator == NEstimator::mle ? mle_n(1.0, k, p) : umvb_n(1.0, k, p);
    if (n_rep.flag != EstimateFlag::none || !n_rep.n_real) {
      r.flag = EstimateFlag::divergence;
      return r;
    }
    const double n = *n_rep.n_real;
    set_n(r, n);
    if (n * s <= 1.0) {
      r.flag = EstimateFlag::no_solution;
      return r;
    }
    r.theta_hat = theta_of(n);
    r.residual = n_rep.residual;
    return r;
  }

  // Coupled system: residual of the n-equation along theta(n).
  const double n_lo = std::max(dbl(p), (1.0 / s) * (1.0 + 1e-9));
  if (n_lo >= kNCap) {
    r.flag = EstimateFlag::no_solution;
    return r;
  }
  int evaluations = 0;
  const auto h = [&](double n) {
    ++evaluations;
    const double theta = theta_of(n);
    if (n_estimator == NEstimator::mle) return mle_residual(n, theta, k, p);
    return n - dbl(p) - bell_ratio(theta, k, p);
  };

  // Geometric scan for the first sign change, then bisection inside it.
  constexpr double kScanFactor = 1.1;
  double a = n_lo;
  double ha = h(a);
  double b = a;
  double hb = ha;
  bool bracketed = ha == 0.0;
  while (!bracketed && a < kNCap && evaluations < kJointEvaluationCap) {
    b = std::min(a * kScanFactor, kNCap);
    hb = h(b);
    if (hb == 0.0 || (hb > 0.0) != (ha > 0.0)) {
      bracketed = true;
      break;
    }
    a = b;
    ha = hb;
  }
  if (!bracketed) {
    r.flag = EstimateFlag::divergence;
    r.n_real = b;
    r.theta_hat = theta_of(b);
    r.iterations = evaluations;
    r.residual = hb;
    return r;
  }
  if (ha == 0.0) b = a;
  if (hb != 0.0 && ha != 0.0) {
    RootOptions opts = tight_options(a, b);
    opts.max_evaluations = std::max(1, kJointEvaluationCap - evaluations);
    const RootResult root = solve_monotone(h, 0.0, a, b, opts);
    b = root.x;
    hb = root.residual;
  }
  set_n(r, b);
  r.theta_hat = theta_of(b);
  r.iterations = evaluations;
  r.residual = ha == 0.0 ? 0.0 : hb;
  return r;
}

double rho_star(double rho, double theta) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("rho_star: requires 0 < rho < 1");
  if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("rho_star: theta must be positive");
  if (theta == 1.0) return rho / (1.0 - rho);
  const auto f = [theta](double x) {
    const double q = theta * x / (1.0 + theta * x);
    return -x * std::expm1(theta * std::log(q));
  };
  RootOptions opts;
  opts.tol = 1e-15;
  opts.lower_limit = 0.0;
  return solve_monotone(f, rho, rho, 2.0 * rho + 1.0, opts).x;
}

}  // namespace dspecies
