#pragma once

// Stirling numbers of the second kind S_{k,p} and unsigned first kind
// s_{k,p}, held in log form for any size and exactly (big integers) up to
// k = 60.

#include "dspecies/numerics.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <vector>

namespace dspecies {

using BigInt = boost::multiprecision::cpp_int;

class StirlingTables {
 public:
  static constexpr Index kExactLimit = 60;

  explicit StirlingTables(Index k_max);

  Index k_max() const { return k_max_; }
  bool has_exact() const { return k_max_ <= kExactLimit; }

  /// S_{k,p}; zero outside 0 <= p <= k.
  LogReal second_kind(Index k, Index p) const;
  /// s_{k,p} = |first kind|; zero outside 0 <= p <= k.
  LogReal first_kind(Index k, Index p) const;

  /// Exact values; throw DomainError when k_max > kExactLimit.
  const BigInt& second_kind_exact(Index k, Index p) const;
  const BigInt& first_kind_exact(Index k, Index p) const;
  /// Bell number: sum_p S_{k,p}.
  BigInt bell_number_exact(Index k) const;

  const Eigen::MatrixXd& log_second_kind() const { return log_second_; }
  const Eigen::MatrixXd& log_first_kind() const { return log_first_; }

 private:
  void check(Index k) const;

  Index k_max_;
  Eigen::MatrixXd log_second_;
  Eigen::MatrixXd log_first_;
  std::vector<std::vector<BigInt>> exact_second_;
  std::vector<std::vector<BigInt>> exact_first_;
};

/// Row k of log S_{k,p} (second kind) or log s_{k,p} (unsigned first kind)
/// for p = 0..p_max, with O(p_max) memory.
Eigen::VectorXd log_stirling2_row(Index k, Index p_max);
Eigen::VectorXd log_stirling1_row(Index k, Index p_max);

/// Exact factorial, for oracle checks.
BigInt factorial_exact(Index k);

}  // namespace dspecies
