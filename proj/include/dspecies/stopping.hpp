#pragma once

// Stopping rules for the sampling process: the wait until the smallest
// fragment is visited, the coupon-collector completion law, and the first
// sample size at which the estimated new-species probability drops below
// epsilon.

#include "dspecies/distributions.hpp"
#include "dspecies/numerics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dspecies {

enum class StopMethod { closed_form, monte_carlo };

struct TailEstimate {
  double probability = 0.0;
  double std_error = 0.0;  // zero for the closed form
  StopMethod method = StopMethod::closed_form;
  Index replications = 0;
};

inline constexpr Index kSmallestFragmentReps = 10000;

/// P(K_(n) > k): probability that the smallest fragment is still unvisited
/// after k throws. The closed form exists only for theta = 1 (MethodError
/// otherwise); Monte Carlo averages (1 - S_(n))^k over `reps` partitions.
TailEstimate smallest_fragment_tail(Index n, double theta, Index k, StopMethod method,
                                    std::uint64_t seed = 0, Index reps = kSmallestFragmentReps);

/// P(all n species seen within k draws). Zero for k < n.
/// Kingman: UnsupportedModelError.
double coupon_cdf(const Model& model, Index k);

using Trajectory = std::vector<std::pair<Index, Index>>;  // (k, P) pairs

/// (k, P(k)) for k = 1..labels.size() along a label sequence.
Trajectory trajectory_from_labels(const std::vector<Index>& labels);

struct EpsilonPoint {
  Index k = 0;
  Index p = 0;
  std::optional<double> r_hat;    // from the MLE of n (or gamma)
  std::optional<double> r_tilde;  // from the UMVB estimate
};

struct EpsilonStop {
  double epsilon = 0.0;
  std::string model;
  std::vector<EpsilonPoint> points;
  std::optional<Index> k_hat;    // first k with r_hat < epsilon
  std::optional<Index> k_tilde;  // first k with r_tilde < epsilon
  std::vector<Index> skipped;    // k where r_hat is undefined (P = k)
};

/// r-hat and r-tilde along a trajectory. theta = 1 uses the closed forms
/// P(P-1)/(k^2-P) and P(P-1)/(k(k+1)); Kingman uses gamma-hat/(gamma-hat+k)
/// and s_{k-1,P-1}/s_{k,P}.
EpsilonStop epsilon_stop(const ConditionalModel& shape, double epsilon, const Trajectory& trajectory);

struct StoppingReport {
  std::string rule;    // "smallest_fragment", "coupon" or "epsilon"
  std::string method;  // "closed_form" or "monte_carlo"
  std::string model;
  std::vector<Index> k_values;
  std::vector<double> probabilities;
  std::vector<double> std_errors;
  std::optional<std::uint64_t> seed;
  std::optional<Index> replications;
  std::optional<EpsilonStop> epsilon;
};

std::string to_string(StopMethod method);

}  // namespace dspecies
