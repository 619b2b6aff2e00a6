#include "dspecies/simulate.hpp"

#include "dspecies/errors.hpp"
#include "dspecies/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>

namespace dspecies {

namespace {

class Accumulator {
 public:
  void add(std::optional<double> x, bool flagged) {
    if (flagged) ++flagged_;
    if (!x || !std::isfinite(*x)) return;
    ++count_;
    const double delta = *x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (*x - mean_);
  }
  EstimatorSummary summary(std::string name) const {
    EstimatorSummary s;
    s.name = std::move(name);
    s.count = count_;
    s.flagged = flagged_;
    s.mean = count_ > 0 ? mean_ : std::nan("");
    s.std_dev = count_ > 1 ? std::sqrt(m2_ / static_cast<double>(count_ - 1)) : 0.0;
    return s;
  }

 private:
  Index count_ = 0;
  Index flagged_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct CellAccumulators {
  Accumulator p, n_hat, n_tilde, n_hat_1, theta_hat_1, n_hat_2, theta_hat_2;
};

void add_joint(JointStatistic stat, Index k, Index p, double value, const SimulationConfig& cfg,
               Accumulator& n_acc, Accumulator& theta_acc) {
  if (!(value > 0.0 && value < 1.0) || p >= k) {
    n_acc.add(std::nullopt, true);
    theta_acc.add(std::nullopt, true);
    return;
  }
  const EstimateReport r = joint_estimate(stat, k, p, value, NEstimator::mle, cfg.scheme);
  n_acc.add(r.n_real, r.diverged());
  theta_acc.add(r.theta_hat, r.diverged());
}

}  // namespace

std::vector<Index> default_k_values(Index n) {
  return {std::max<Index>(2, (2 * n) / 3), n, (3 * n) / 2};
}

SimulationReport simulate(const SimulationConfig& config) {
  if (config.n < 1) throw DomainError("simulate: n must be >= 1");
  if (!(config.theta > 0.0)) throw DomainError("simulate: theta must be positive");
  if (config.reps < 1) throw DomainError("simulate: reps must be >= 1");
  SimulationReport report;
  report.config = config;
  if (report.config.k_values.empty()) report.config.k_values = default_k_values(config.n);
  const std::vector<Index>& ks = report.config.k_values;
  for (Index k : ks)
    if (k < 2) throw DomainError("simulate: every k must be >= 2");
  const Index k_max = *std::max_element(ks.begin(), ks.end());

  const PartitionWeights partition = sample_partition(config.n, config.theta, derive_seed(config.seed, 0));
  std::vector<CellAccumulators> acc(ks.size());

  for (Index r = 0; r < config.reps; ++r) {
    const std::vector<Index> labels =
        throw_labels(partition, k_max, derive_seed(config.seed, static_cast<std::uint64_t>(r) + 1));
    for (std::size_t c = 0; c < ks.size(); ++c) {
      const Index k = ks[c];
      const OccupancyVector occ =
          occupancy_from_labels(config.n, std::span<const Index>(labels.data(), static_cast<std::size_t>(k)));
      const OccupancySummary stats = occupancy_stats(occ);
      const Index p = stats.p;
      CellAccumulators& a = acc[c];
      a.p.add(static_cast<double>(p), false);

      const EstimateReport nh = mle_n(config.theta, k, p);
      a.n_hat.add(nh.n_real, nh.diverged());
      if (config.include_umvb) {
        const EstimateReport nt = umvb_n(config.theta, k, p);
        a.n_tilde.add(nt.n_real, nt.diverged());
      }
      add_joint(JointStatistic::D, k, p, pair_match_D(stats.a), config, a.n_hat_1, a.theta_hat_1);
      add_joint(JointStatistic::psi, k, p, psi_simpson(stats.a), config, a.n_hat_2, a.theta_hat_2);
    }
  }

  for (std::size_t c = 0; c < ks.size(); ++c) {
    SimulationRow row;
    row.k = ks[c];
    row.mean_p = acc[c].p.summary("p").mean;
    row.estimators.push_back(acc[c].n_hat.summary("n_hat"));
    if (config.include_umvb) row.estimators.push_back(acc[c].n_tilde.summary("n_tilde"));
    row.estimators.push_back(acc[c].n_hat_1.summary("n_hat_1"));
    row.estimators.push_back(acc[c].theta_hat_1.summary("theta_hat_1"));
    row.estimators.push_back(acc[c].n_hat_2.summary("n_hat_2"));
    row.estimators.push_back(acc[c].theta_hat_2.summary("theta_hat_2"));
    report.rows.push_back(std::move(row));
  }
  return report;
}

const EstimatorSummary& find_summary(const SimulationRow& row, const std::string& name) {
  for (const auto& s : row.estimators)
    if (s.name == name) return s;
  throw ValidationError("no estimator named '" + name + "' in simulation row");
}

}  // namespace dspecies
