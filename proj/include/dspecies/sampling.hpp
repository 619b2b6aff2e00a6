#pragma once

// Random Dirichlet partitions, uniform throws and Polya-urn sampling, and
// the reduction of a sample to its observables (P, B, A, D, psi).

#include "dspecies/numerics.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

namespace dspecies {

/// SplitMix64 mixing of (base, stream); used to give each replication or
/// sub-task its own reproducible seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Seeded generator. The engine is std::mt19937_64, whose output sequence is
// fixed by the standard; the variate transforms below are written out so
// that a seed yields the same numbers on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  double normal();
  /// log of a gamma(shape, 1) variate. Stays finite for tiny shapes where
  /// the variate itself underflows.
  double log_gamma_variate(double shape);
  double gamma(double shape);
  /// Uniform on {0, ..., n-1}.
  Index uniform_index(Index n);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// n positive weights summing to one (a point of the open simplex).
class PartitionWeights {
 public:
  /// Throws ValidationError unless all weights are > 0 and sum to 1
  /// within 1e-12.
  explicit PartitionWeights(Eigen::VectorXd weights);

  static PartitionWeights uniform(Index n);

  const Eigen::VectorXd& weights() const { return weights_; }
  Index size() const { return weights_.size(); }
  double operator[](Index m) const { return weights_(m); }

 private:
  Eigen::VectorXd weights_;
};

// Visit counts of the n fragments after k throws.
class OccupancyVector {
 public:
  explicit OccupancyVector(std::vector<Index> counts);

  const std::vector<Index>& counts() const { return counts_; }
  Index n() const { return static_cast<Index>(counts_.size()); }
  Index k() const { return k_; }

 private:
  std::vector<Index> counts_;
  Index k_ = 0;
};

// Positive per-species counts B_1..B_P of the visited species.
class SpeciesCounts {
 public:
  explicit SpeciesCounts(std::vector<Index> counts);

  const std::vector<Index>& counts() const { return counts_; }
  Index p() const { return static_cast<Index>(counts_.size()); }
  Index k() const { return k_; }

 private:
  std::vector<Index> counts_;
  Index k_ = 0;
};

// Species vector count: i -> A(i), the number of species seen exactly i
// times. Only i >= 1 is stored; A(0) is not observable.
class FrequencySpectrum {
 public:
  /// Throws ValidationError on an empty map, i < 1 or A(i) < 1.
  explicit FrequencySpectrum(std::map<Index, Index> spectrum);

  static FrequencySpectrum from_counts(const SpeciesCounts& b);

  const std::map<Index, Index>& entries() const { return spectrum_; }
  /// A(i), zero when absent.
  Index operator[](Index i) const;
  Index k() const { return k_; }
  Index p() const { return p_; }

  friend bool operator==(const FrequencySpectrum& a, const FrequencySpectrum& b) {
    return a.spectrum_ == b.spectrum_;
  }

 private:
  std::map<Index, Index> spectrum_;
  Index k_ = 0;
  Index p_ = 0;
};

struct OccupancySummary {
  Index p;
  SpeciesCounts b;
  FrequencySpectrum a;
};

PartitionWeights sample_partition(Index n, double theta, std::uint64_t seed);

/// Fragment labels (0-based) hit by k iid uniform throws on the partition.
/// A prefix of length k' < k is itself a k'-sample, which gives common
/// random numbers across sample sizes.
std::vector<Index> throw_labels(const PartitionWeights& partition, Index k, std::uint64_t seed);

OccupancyVector sample_throws(const PartitionWeights& partition, Index k, std::uint64_t seed);

/// Visit counts of the given labels over n fragments.
OccupancyVector occupancy_from_labels(Index n, std::span<const Index> labels);

/// Sequential Polya-urn labels: the first is uniform, and each later draw
/// picks label m with probability (theta + count_m) / (n theta + draws).
std::vector<Index> polya_sequence(Index n, double theta, Index k, std::uint64_t seed);

OccupancyVector sample_polya(Index n, double theta, Index k, std::uint64_t seed);

/// P, B (positive counts in index order) and A. Throws DomainError on an
/// all-zero occupancy.
OccupancySummary occupancy_stats(const OccupancyVector& occupancy);

/// Pair-matching statistic D = sum_i A(i) i (i-1) / (k (k-1)).
double pair_match_D(const FrequencySpectrum& spectrum);
/// Same statistic from the per-species counts.
double pair_match_D(const SpeciesCounts& b);

/// Coverage-adjusted Simpson estimate
/// psi = sum_i A(i) (i/k)^2 / (1 - (1 - i/k)^k).
double psi_simpson(const FrequencySpectrum& spectrum);

enum class DiversityKind { simpson, shannon, renyi };

/// simpson: sum S^2; shannon: -sum S log S; renyi: log(sum S^alpha)/(1-alpha).
/// renyi with alpha == 1 is evaluated as shannon.
double diversity_index(const PartitionWeights& partition, DiversityKind kind, double alpha = 2.0);

/// Posterior mean (theta + k_m) / (n theta + k) of the weights.
PartitionWeights posterior_mean(double theta, const OccupancyVector& occupancy);

}  // namespace dspecies
