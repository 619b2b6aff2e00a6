#include "dspecies/numerics.hpp"

#include "dspecies/errors.hpp"

#include <algorithm>
#include <cmath>
#include <new>
#include <string>
#include <vector>

namespace dspecies {

double log_add(double a, double b) noexcept {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double log_sum_exp(std::span<const double> xs) noexcept {
  if (xs.empty()) return kNegInf;
  const double m = *std::max_element(xs.begin(), xs.end());
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& xs) noexcept {
  if (xs.size() == 0) return kNegInf;
  const double m = xs.maxCoeff();
  if (m == kNegInf) return kNegInf;
  return m + std::log((xs.array() - m).exp().sum());
}

LogReal LogReal::from_linear(double x) {
  if (!(x >= 0.0)) throw DomainError("LogReal::from_linear: negative or NaN value");
  return from_log(x == 0.0 ? kNegInf : std::log(x));
}

double LogReal::value() const { return is_zero() ? 0.0 : std::exp(log_); }

LogReal& LogReal::operator/=(LogReal rhs) {
  if (rhs.is_zero()) throw DomainError("LogReal: division by zero");
  log_ = is_zero() ? kNegInf : log_ - rhs.log_;
  return *this;
}

void SignedLogSum::add(double log_magnitude, int sign) {
  if (log_magnitude == kNegInf || sign == 0) return;
  if (sign > 0)
    pos_ = log_add(pos_, log_magnitude);
  else
    neg_ = log_add(neg_, log_magnitude);
}

double SignedLogSum::log_total(double relative_slack) const {
  if (neg_ == kNegInf) return pos_;
  if (pos_ == kNegInf || neg_ > pos_) {
    const double excess = (pos_ == kNegInf) ? 1.0 : -std::expm1(pos_ - neg_);
    if (pos_ == kNegInf || excess > relative_slack)
      throw DomainError("SignedLogSum: negative total");
    return kNegInf;
  }
  const double diff = -std::expm1(neg_ - pos_);  // 1 - exp(neg - pos)
  if (diff <= 0.0) return kNegInf;
  return pos_ + std::log(diff);
}

double log_factorial(Index k) {
  if (k < 0) throw DomainError("log_factorial: negative argument");
  return std::lgamma(static_cast<double>(k) + 1.0);
}

double log_binomial(Index n, Index k) {
  if (k < 0 || n < 0 || k > n) return kNegInf;
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double log_binomial_real(double x, Index k) {
  if (k < 0) return kNegInf;
  if (k == 0) return 0.0;
  if (x < static_cast<double>(k) - 1.0) throw DomainError("log_binomial_real: x < k - 1");
  if (x == static_cast<double>(k) - 1.0) return kNegInf;
  return std::lgamma(x + 1.0) - std::lgamma(x - static_cast<double>(k) + 1.0) -
         log_factorial(k);
}

namespace {
// Direct summation is exact to rounding for moderate k and does not suffer
// the cancellation of lgamma differences at large arguments.
constexpr Index kDirectSumLimit = 4096;
// The ratio is evaluated at n up to 1e10 by the estimators, where the
// lgamma difference has no correct digits left; summation stays exact.
constexpr Index kRatioSumLimit = Index{1} << 22;
}  // namespace

LogReal log_pochhammer(double theta, Index k) {
  if (!(theta > 0.0)) throw DomainError("log_pochhammer: theta must be positive");
  if (k < 0) throw DomainError("log_pochhammer: negative k");
  if (k == 0) return LogReal::one();
  if (k <= kDirectSumLimit) {
    double s = 0.0;
    for (Index l = 0; l < k; ++l) s += std::log(theta + static_cast<double>(l));
    return LogReal::from_log(s);
  }
  return LogReal::from_log(std::lgamma(theta + static_cast<double>(k)) - std::lgamma(theta));
}

double log_pochhammer_ratio(double a, double b, Index k) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("log_pochhammer_ratio: arguments must be positive");
  if (k < 0) throw DomainError("log_pochhammer_ratio: negative k");
  if (k <= kRatioSumLimit) {
    const double d = a - b;
    double s = 0.0;
    for (Index l = 0; l < k; ++l) s += std::log1p(d / (b + static_cast<double>(l)));
    return s;
  }
  const double kk = static_cast<double>(k);
  return (std::lgamma(a + kk) - std::lgamma(a)) - (std::lgamma(b + kk) - std::lgamma(b));
}

LogReal log_theta_bracket(double theta, double n, Index k, double m) {
  if (!(theta > 0.0)) throw DomainError("log_theta_bracket: theta must be positive");
  if (m < 0.0 || m >= n) throw DomainError("log_theta_bracket: requires 0 <= m < n");
  if (k < 0) throw DomainError("log_theta_bracket: negative k");
  if (m == 0.0 || k == 0) return LogReal::one();
  return LogReal::from_log(log_pochhammer_ratio((n - m) * theta, n * theta, k));
}

LogReal log_theta_bracket(double theta, Index n, Index k, Index m) {
  return log_theta_bracket(theta, static_cast<double>(n), k, static_cast<double>(m));
}

BellTable::BellTable(double theta, Index k_max) : theta_(theta), k_max_(k_max) {
  if (!(theta > 0.0)) throw DomainError("BellTable: theta must be positive");
  if (k_max < 1) throw DomainError("BellTable: k_max must be >= 1");
  const double bytes = std::pow(static_cast<double>(k_max) + 1.0, 2) * sizeof(double);
  if (bytes > static_cast<double>(std::size_t{1} << 32))
    throw ResourceError("BellTable: k_max = " + std::to_string(k_max) + " exceeds the table budget");
  try {
    log_.setConstant(k_max + 1, k_max + 1, kNegInf);
  } catch (const std::bad_alloc&) {
    throw ResourceError("BellTable: allocation failed");
  }
  log_(0, 0) = 0.0;
  const double log_theta = std::log(theta);
  for (Index k = 0; k < k_max; ++k) {
    for (Index p = 1; p <= k + 1; ++p) {
      const double carry = log_(k, p - 1) + log_theta;
      const double stay = (p <= k) ? log_(k, p) + std::log(static_cast<double>(p) * theta +
                                                             static_cast<double>(k))
                                   : kNegInf;
      log_(k + 1, p) = log_add(carry, stay);
    }
  }
}

LogReal BellTable::operator()(Index k, Index p) const {
  if (k < 0 || p < 0 || p > k) return LogReal::zero();
  if (k > k_max_) throw DomainError("BellTable: k beyond k_max");
  return LogReal::from_log(log_(k, p));
}

Eigen::VectorXd log_bell_row(double theta, Index k, Index p_max) {
  if (!(theta > 0.0)) throw DomainError("log_bell_row: theta must be positive");
  if (k < 0 || p_max < 0) throw DomainError("log_bell_row: negative index");
  Eigen::VectorXd row = Eigen::VectorXd::Constant(p_max + 1, kNegInf);
  row(0) = 0.0;
  const double log_theta = std::log(theta);
  for (Index kk = 0; kk < k; ++kk) {
    const Index top = std::min(kk + 1, p_max);
    for (Index p = top; p >= 1; --p) {
      const double stay =
          row(p) == kNegInf
              ? kNegInf
              : row(p) + std::log(static_cast<double>(p) * theta + static_cast<double>(kk));
      row(p) = log_add(row(p - 1) + log_theta, stay);
    }
    row(0) = kNegInf;
  }
  return row;
}

namespace {

void enumerate_compositions(Index remaining, Index parts, const std::vector<double>& weight,
                            double product, double& total) {
  if (parts == 1) {
    total += product * weight[static_cast<std::size_t>(remaining)];
    return;
  }
  for (Index b = 1; b <= remaining - (parts - 1); ++b)
    enumerate_compositions(remaining - b, parts - 1, weight,
                           product * weight[static_cast<std::size_t>(b)], total);
}

}  // namespace

LogReal bell_via_compositions(double theta, Index k, Index p) {
  if (!(theta > 0.0)) throw DomainError("bell_via_compositions: theta must be positive");
  if (k > 25) throw MethodError("bell_via_compositions: enumeration refused for k > 25");
  if (k == 0 && p == 0) return LogReal::one();
  if (p < 1 || p > k) return LogReal::zero();
  // weight[b] = (theta)_b / b!, scaled by theta^{-b} so products stay O(1)
  // for large theta; the scale factor theta^{k} is restored in log space.
  std::vector<double> weight(static_cast<std::size_t>(k) + 1, 0.0);
  for (Index b = 1; b <= k; ++b)
    weight[static_cast<std::size_t>(b)] =
        std::exp(log_pochhammer(theta, b).log() - log_factorial(b) -
                 static_cast<double>(b) * std::log(theta));
  double total = 0.0;
  enumerate_compositions(k, p, weight, 1.0, total);
  return LogReal::from_log(std::log(total) + static_cast<double>(k) * std::log(theta) +
                           log_factorial(k) - log_factorial(p));
}

RootResult solve_monotone(const std::function<double(double)>& f, double target, double lo,
                          double hi, const RootOptions& options) {
  if (!(lo <= hi)) std::swap(lo, hi);
  lo = std::max(lo, options.lower_limit);
  hi = std::min(hi, options.upper_limit);
  int evaluations = 0;
  auto h = [&](double x) {
    ++evaluations;
    return f(x) - target;
  };
  double h_lo = h(lo);
  double h_hi = h(hi);
  if (h_lo == 0.0) return {lo, 0.0, evaluations};
  if (h_hi == 0.0) return {hi, 0.0, evaluations};

  int expansions = 0;
  while ((h_lo > 0.0) == (h_hi > 0.0)) {
    const bool lo_blocked = lo <= options.lower_limit;
    const bool hi_blocked = hi >= options.upper_limit;
    if (expansions >= options.max_expansions || (lo_blocked && hi_blocked) ||
        evaluations >= options.max_evaluations)
      throw NoSolutionError("solve_monotone: no sign change in bracket", lo, hi);
    // For monotone f the root lies beyond the endpoint closer to target.
    bool go_up = std::abs(h_hi) <= std::abs(h_lo);
    if (go_up && hi_blocked) go_up = false;
    if (!go_up && lo_blocked) go_up = true;
    const double width = hi - lo;
    if (go_up) {
      const double next = hi > 0.0 ? 2.0 * hi : hi + std::max(width, 1.0);
      lo = hi;
      h_lo = h_hi;
      hi = std::min(next, options.upper_limit);
      h_hi = h(hi);
    } else {
      double next = (lo > 0.0 && options.lower_limit >= 0.0) ? 0.5 * lo : lo - std::max(width, 1.0);
      next = std::max(next, options.lower_limit);
      hi = lo;
      h_hi = h_lo;
      lo = next;
      h_lo = h(lo);
    }
    ++expansions;
    if (h_lo == 0.0) return {lo, 0.0, evaluations};
    if (h_hi == 0.0) return {hi, 0.0, evaluations};
  }

  double mid = 0.5 * (lo + hi);
  double h_mid = 0.0;
  while (evaluations < options.max_evaluations) {
    mid = 0.5 * (lo + hi);
    h_mid = h(mid);
    if (h_mid == 0.0 || std::abs(h_mid) <= options.ftol) break;
    if ((h_mid > 0.0) == (h_lo > 0.0)) {
      lo = mid;
      h_lo = h_mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= options.tol * std::max(1.0, std::abs(mid))) {
      mid = 0.5 * (lo + hi);
      h_mid = h(mid);
      break;
    }
  }
  return {mid, h_mid, evaluations};
}

}  // namespace dspecies
