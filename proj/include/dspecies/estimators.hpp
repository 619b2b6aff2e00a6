#pragma once

// Species-number estimators: the MLE and UMVB estimates of n with theta
// known, the Kingman gamma estimate, the UMVB rational estimators, joint
// (theta, n) estimation from (P, D) or (P, psi), and the rho* asymptote.
// All of them consume only (k, P) and, for the joint case, one statistic.

#include "dspecies/distributions.hpp"
#include "dspecies/numerics.hpp"

#include <optional>
#include <string>

namespace dspecies {

enum class EstimateFlag {
  none,
  divergence,         // no finite estimate; last iterate is carried
  no_solution,        // theta(n) would be nonpositive everywhere
  boundary_zero,      // gamma-hat = 0 (P = 1)
  boundary_infinite,  // gamma-hat = infinity (P = k)
};

std::string to_string(EstimateFlag flag);
EstimateFlag estimate_flag_from_string(const std::string& s);

enum class NEstimator { mle, umvb };
enum class JointStatistic { D, psi };
// one_step: n at theta = 1 followed by the moment step for theta.
// fixed_point: the coupled system n = N(theta(n)) solved by root search.
enum class JointScheme { one_step, fixed_point };

struct EstimateReport {
  std::string estimator;       // "mle_n", "umvb_n", "kingman_gamma", "joint"
  std::string model;           // shape used for the n-equation
  std::string statistic_used;  // "P", "P,D" or "P,psi"
  std::string scheme;          // joint only
  Index k = 0;
  Index p = 0;
  std::optional<double> theta_input;
  std::optional<double> stat_value;

  std::optional<double> n_real;
  std::optional<Index> n_floor;
  std::optional<double> theta_hat;
  std::optional<double> gamma_hat;
  EstimateFlag flag = EstimateFlag::none;
  int iterations = 0;
  double residual = 0.0;

  bool diverged() const { return flag == EstimateFlag::divergence || flag == EstimateFlag::no_solution; }
};

inline constexpr double kNCap = 1e10;
inline constexpr int kJointEvaluationCap = 10000;

/// Real root of n - P - n ((n-1) theta)_k / (n theta)_k = 0 over n >= P,
/// and its floor. P = k raises the divergence flag.
EstimateReport mle_n(const ConditionalModel& shape, Index k, Index p);
EstimateReport mle_n(double theta, Index k, Index p);

/// n-tilde = P + B_{k,P-1} / B_{k,P}; closed forms for theta = 1 and MB.
EstimateReport umvb_n(const ConditionalModel& shape, Index k, Index p);
EstimateReport umvb_n(double theta, Index k, Index p);

/// Root of sum_{l<k} gamma / (gamma + l) = P.
EstimateReport kingman_gamma(Index k, Index p);

/// xi_k(gamma) = sum_{l<k} gamma / (gamma + l), the mean of P under Kingman.
double kingman_mean_p(double gamma, Index k);

/// s_{k-l,P-1} / s_{k,P}, unbiased under Kingman for
/// r_l(gamma) = gamma (gamma)_{k-l} / (gamma)_k. l = 1 gives the
/// new-species probability gamma / (gamma + k - 1).
double umvb_rational(Index l, Index k, Index p);

EstimateReport joint_estimate(JointStatistic statistic, Index k, Index p, double stat_value,
                              NEstimator n_estimator = NEstimator::mle,
                              JointScheme scheme = JointScheme::one_step);

/// Positive root of rho = x (1 - (theta x / (1 + theta x))^theta).
double rho_star(double rho, double theta);

}  // namespace dspecies
