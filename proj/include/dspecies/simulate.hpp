#pragma once

// Estimation over simulated data: one Dirichlet partition per (n, theta),
// R label sequences over it, and estimator means and standard deviations at
// each sample size. Smaller sample sizes reuse prefixes of the same label
// sequences.

#include "dspecies/estimators.hpp"
#include "dspecies/numerics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dspecies {

inline constexpr Index kDefaultReps = 500;

struct SimulationConfig {
  Index n = 100;
  double theta = 1.0;
  std::vector<Index> k_values;  // empty: 2n/3, n, 3n/2
  Index reps = kDefaultReps;
  std::uint64_t seed = 0;
  bool include_umvb = false;
  JointScheme scheme = JointScheme::one_step;
};

struct EstimatorSummary {
  std::string name;     // n_hat, n_tilde, n_hat_1, theta_hat_1, n_hat_2, theta_hat_2
  double mean = 0.0;    // over replications with a numeric value
  double std_dev = 0.0; // sample standard deviation
  Index count = 0;      // replications with a numeric value
  Index flagged = 0;    // divergence or no_solution flags
};

struct SimulationRow {
  Index k = 0;
  double mean_p = 0.0;
  std::vector<EstimatorSummary> estimators;
};

struct SimulationReport {
  SimulationConfig config;
  std::vector<SimulationRow> rows;
};

/// The paper's default grid of sample sizes for n: round(2n/3), n, round(3n/2).
std::vector<Index> default_k_values(Index n);

SimulationReport simulate(const SimulationConfig& config);

const EstimatorSummary& find_summary(const SimulationRow& row, const std::string& name);

}  // namespace dspecies
