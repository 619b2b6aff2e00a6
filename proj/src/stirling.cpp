#include "dspecies/stirling.hpp"

#include "dspecies/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dspecies {

StirlingTables::StirlingTables(Index k_max) : k_max_(k_max) {
  if (k_max < 0) throw DomainError("StirlingTables: negative k_max");
  log_second_.setConstant(k_max + 1, k_max + 1, kNegInf);
  log_first_.setConstant(k_max + 1, k_max + 1, kNegInf);
  log_second_(0, 0) = 0.0;
  log_first_(0, 0) = 0.0;
  // S_{k+1,p} = p S_{k,p} + S_{k,p-1};  s_{k+1,p} = k s_{k,p} + s_{k,p-1}
  for (Index k = 0; k < k_max; ++k) {
    const double log_k = k > 0 ? std::log(static_cast<double>(k)) : kNegInf;
    for (Index p = 1; p <= k + 1; ++p) {
      const double log_p = std::log(static_cast<double>(p));
      log_second_(k + 1, p) = log_add(log_second_(k, p) + log_p, log_second_(k, p - 1));
      log_first_(k + 1, p) = log_add(log_first_(k, p) + log_k, log_first_(k, p - 1));
    }
  }
  if (!has_exact()) return;
  const auto n = static_cast<std::size_t>(k_max + 1);
  exact_second_.assign(n, std::vector<BigInt>(n, 0));
  exact_first_.assign(n, std::vector<BigInt>(n, 0));
  exact_second_[0][0] = 1;
  exact_first_[0][0] = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    for (std::size_t p = 1; p <= k + 1; ++p) {
      exact_second_[k + 1][p] = BigInt(p) * exact_second_[k][p] + exact_second_[k][p - 1];
      exact_first_[k + 1][p] = BigInt(k) * exact_first_[k][p] + exact_first_[k][p - 1];
    }
  }
}

void StirlingTables::check(Index k) const {
  if (k > k_max_) throw DomainError("StirlingTables: k beyond k_max");
}

LogReal StirlingTables::second_kind(Index k, Index p) const {
  if (k < 0 || p < 0 || p > k) return LogReal::zero();
  check(k);
  return LogReal::from_log(log_second_(k, p));
}

LogReal StirlingTables::first_kind(Index k, Index p) const {
  if (k < 0 || p < 0 || p > k) return LogReal::zero();
  check(k);
  return LogReal::from_log(log_first_(k, p));
}

namespace {
const BigInt kZero = 0;
}

const BigInt& StirlingTables::second_kind_exact(Index k, Index p) const {
  if (!has_exact()) throw DomainError("StirlingTables: exact values only for k_max <= 60");
  if (k < 0 || p < 0 || p > k) return kZero;
  check(k);
  return exact_second_[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)];
}

const BigInt& StirlingTables::first_kind_exact(Index k, Index p) const {
  if (!has_exact()) throw DomainError("StirlingTables: exact values only for k_max <= 60");
  if (k < 0 || p < 0 || p > k) return kZero;
  check(k);
  return exact_first_[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)];
}

BigInt StirlingTables::bell_number_exact(Index k) const {
  BigInt total = 0;
  for (Index p = 0; p <= k; ++p) total += second_kind_exact(k, p);
  return total;
}

namespace {

template <class Multiplier>
Eigen::VectorXd rolling_row(Index k, Index p_max, Multiplier multiplier) {
  if (k < 0 || p_max < 0) throw DomainError("stirling row: negative index");
  Eigen::VectorXd row = Eigen::VectorXd::Constant(p_max + 1, kNegInf);
  row(0) = 0.0;
  for (Index kk = 0; kk < k; ++kk) {
    for (Index p = std::min(kk + 1, p_max); p >= 1; --p) {
      const double m = multiplier(kk, p);
      const double stay = (row(p) == kNegInf || m <= 0.0) ? kNegInf : row(p) + std::log(m);
      row(p) = log_add(stay, row(p - 1));
    }
    row(0) = kNegInf;
  }
  return row;
}

}  // namespace

Eigen::VectorXd log_stirling2_row(Index k, Index p_max) {
  return rolling_row(k, p_max, [](Index, Index p) { return static_cast<double>(p); });
}

Eigen::VectorXd log_stirling1_row(Index k, Index p_max) {
  return rolling_row(k, p_max, [](Index kk, Index) { return static_cast<double>(kk); });
}

BigInt factorial_exact(Index k) {
  BigInt r = 1;
  for (Index i = 2; i <= k; ++i) r *= i;
  return r;
}

}  // namespace dspecies
