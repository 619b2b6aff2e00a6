#pragma once

// Log-domain arithmetic, rising factorials, the Bell-polynomial table
// B_{k,p}(theta) and a bracketing root finder.

#include <Eigen/Core>

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>

namespace dspecies {

using Index = std::int64_t;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)) without overflow.
double log_add(double a, double b) noexcept;

/// log(sum_i exp(x_i)); returns -inf for an empty input.
double log_sum_exp(std::span<const double> xs) noexcept;
double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& xs) noexcept;

// A nonnegative real held as its logarithm. log(0) is -inf.
class LogReal {
 public:
  constexpr LogReal() = default;

  static constexpr LogReal zero() { return LogReal{}; }
  static constexpr LogReal one() { return from_log(0.0); }
  static constexpr LogReal from_log(double log_value) {
    LogReal r;
    r.log_ = log_value;
    return r;
  }
  /// Throws DomainError for negative or NaN input.
  static LogReal from_linear(double x);

  constexpr double log() const { return log_; }
  double value() const;
  constexpr bool is_zero() const { return log_ == kNegInf; }

  LogReal& operator*=(LogReal rhs) {
    log_ = (is_zero() || rhs.is_zero()) ? kNegInf : log_ + rhs.log_;
    return *this;
  }
  LogReal& operator/=(LogReal rhs);
  LogReal& operator+=(LogReal rhs) {
    log_ = log_add(log_, rhs.log_);
    return *this;
  }

  friend LogReal operator*(LogReal a, LogReal b) { return a *= b; }
  friend LogReal operator/(LogReal a, LogReal b) { return a /= b; }
  friend LogReal operator+(LogReal a, LogReal b) { return a += b; }
  friend constexpr auto operator<=>(LogReal a, LogReal b) { return a.log_ <=> b.log_; }
  friend constexpr bool operator==(LogReal a, LogReal b) { return a.log_ == b.log_; }

 private:
  double log_ = kNegInf;
};

// Accumulates a signed sum of terms given as (log magnitude, sign) and
// returns log of the (nonnegative) total. Positive and negative parts are
// kept apart and subtracted once at the end.
class SignedLogSum {
 public:
  void add(double log_magnitude, int sign);
  /// log(total). Throws DomainError if the total is negative beyond
  /// `relative_slack` of the positive part.
  double log_total(double relative_slack = 1e-12) const;
  double log_positive() const { return pos_; }
  double log_negative() const { return neg_; }

 private:
  double pos_ = kNegInf;
  double neg_ = kNegInf;
};

double log_factorial(Index k);
double log_binomial(Index n, Index k);
/// Real-argument binomial coefficient log C(x, k) for x >= k - 1.
double log_binomial_real(double x, Index k);

/// log((theta)_k) = log Gamma(theta + k) - log Gamma(theta).
LogReal log_pochhammer(double theta, Index k);

/// log((a)_k / (b)_k) for a, b > 0. Accurate when a and b are close,
/// which is where the species estimators evaluate it.
double log_pochhammer_ratio(double a, double b, Index k);

/// log(((n - m) theta)_k / (n theta)_k) with real n; requires 0 <= m < n.
LogReal log_theta_bracket(double theta, double n, Index k, double m);
LogReal log_theta_bracket(double theta, Index n, Index k, Index m);

// Triangular table of log B_{k,p}(theta), 0 <= p <= k <= k_max, filled by
// B_{k+1,p} = theta B_{k,p-1} + (p theta + k) B_{k,p} with B_{0,0} = 1 and
// B_{k,0} = B_{0,p} = 0 otherwise. Immutable once built.
class BellTable {
 public:
  BellTable(double theta, Index k_max);

  double theta() const { return theta_; }
  Index k_max() const { return k_max_; }

  /// B_{k,p}(theta); zero outside 0 <= p <= k.
  LogReal operator()(Index k, Index p) const;
  double log_entry(Index k, Index p) const { return (*this)(k, p).log(); }

  /// Full (k_max+1) x (k_max+1) matrix of log entries, -inf above the diagonal.
  const Eigen::MatrixXd& log_entries() const { return log_; }

 private:
  double theta_;
  Index k_max_;
  Eigen::MatrixXd log_;
};

/// Row k of the Bell table, entries p = 0..p_max, computed with O(p_max)
/// memory. Used where only B_{k,P} and its neighbours are needed.
Eigen::VectorXd log_bell_row(double theta, Index k, Index p_max);

/// Independent oracle for B_{k,p}(theta): explicit enumeration of all
/// compositions of k into p positive parts. Refuses k > 25.
LogReal bell_via_compositions(double theta, Index k, Index p);

struct RootOptions {
  double tol = 1e-10;           // on the argument, relative for |x| > 1
  double ftol = 0.0;            // early exit when |f(x) - target| <= ftol
  int max_expansions = 200;     // geometric (factor 2) bracket expansions
  int max_evaluations = 10000;
  double lower_limit = -std::numeric_limits<double>::infinity();
  double upper_limit = std::numeric_limits<double>::infinity();
};

struct RootResult {
  double x = 0.0;
  double residual = 0.0;  // f(x) - target
  int evaluations = 0;
};

/// Root of f(x) = target for monotone f by bisection. The bracket
/// [lo, hi] is widened geometrically until f - target changes sign;
/// throws NoSolutionError when no sign change is found.
RootResult solve_monotone(const std::function<double(double)>& f, double target, double lo,
                          double hi, const RootOptions& options = {});

}  // namespace dspecies
