#include "dspecies/sampling.hpp"

#include "dspecies/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace dspecies {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * scale;
  has_spare_ = true;
  return u * scale;
}

double Rng::log_gamma_variate(double shape) {
  if (!(shape > 0.0)) throw DomainError("gamma variate: shape must be positive");
  if (shape < 1.0) {
    // G(a) = G(a + 1) U^{1/a}
    const double boosted = log_gamma_variate(shape + 1.0);
    return boosted + std::log(uniform()) / shape;
  }
  // Marsaglia-Tsang
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double log_u = std::log(uniform());
    if (log_u < 0.5 * x * x + d - d * v + d * std::log(v)) return std::log(d) + std::log(v);
  }
}

double Rng::gamma(double shape) { return std::exp(log_gamma_variate(shape)); }

Index Rng::uniform_index(Index n) {
  if (n < 1) throw DomainError("uniform_index: n must be >= 1");
  const unsigned __int128 wide =
      static_cast<unsigned __int128>(engine_()) * static_cast<std::uint64_t>(n);
  return static_cast<Index>(wide >> 64);
}

PartitionWeights::PartitionWeights(Eigen::VectorXd weights) : weights_(std::move(weights)) {
  if (weights_.size() < 1) throw ValidationError("PartitionWeights: empty");
  if (!(weights_.array() > 0.0).all())
    throw ValidationError("PartitionWeights: weights must be strictly positive");
  if (std::abs(weights_.sum() - 1.0) > 1e-12)
    throw ValidationError("PartitionWeights: weights must sum to 1");
}

PartitionWeights PartitionWeights::uniform(Index n) {
  if (n < 1) throw DomainError("PartitionWeights::uniform: n must be >= 1");
  return PartitionWeights(Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
}

OccupancyVector::OccupancyVector(std::vector<Index> counts) : counts_(std::move(counts)) {
  if (counts_.empty()) throw ValidationError("OccupancyVector: no fragments");
  for (Index c : counts_) {
    if (c < 0) throw ValidationError("OccupancyVector: negative count");
    k_ += c;
  }
}

SpeciesCounts::SpeciesCounts(std::vector<Index> counts) : counts_(std::move(counts)) {
  if (counts_.empty()) throw ValidationError("SpeciesCounts: no species");
  for (Index c : counts_) {
    if (c < 1) throw ValidationError("SpeciesCounts: counts must be >= 1");
    k_ += c;
  }
}

FrequencySpectrum::FrequencySpectrum(std::map<Index, Index> spectrum)
    : spectrum_(std::move(spectrum)) {
  if (spectrum_.empty()) throw ValidationError("FrequencySpectrum: empty spectrum");
  for (const auto& [i, a] : spectrum_) {
    if (i < 1) throw ValidationError("FrequencySpectrum: occurrence class must be >= 1");
    if (a < 1)
      throw ValidationError("FrequencySpectrum: species count for class " + std::to_string(i) +
                            " must be >= 1");
    k_ += i * a;
    p_ += a;
  }
}

FrequencySpectrum FrequencySpectrum::from_counts(const SpeciesCounts& b) {
  std::map<Index, Index> a;
  for (Index c : b.counts()) ++a[c];
  return FrequencySpectrum(std::move(a));
}

Index FrequencySpectrum::operator[](Index i) const {
  const auto it = spectrum_.find(i);
  return it == spectrum_.end() ? 0 : it->second;
}

PartitionWeights sample_partition(Index n, double theta, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample_partition: n must be >= 1");
  if (!(theta > 0.0)) throw DomainError("sample_partition: theta must be positive");
  Rng rng(seed);
  Eigen::VectorXd log_x(n);
  for (int attempt = 0; attempt < 100; ++attempt) {
    for (Index m = 0; m < n; ++m) log_x(m) = rng.log_gamma_variate(theta);
    const double log_total = log_sum_exp(log_x);
    Eigen::VectorXd w = (log_x.array() - log_total).exp().matrix();
    if ((w.array() > 0.0).all()) {
      w /= w.sum();
      return PartitionWeights(std::move(w));
    }
  }
  throw DomainError("sample_partition: fragment weights underflow for theta = " +
                    std::to_string(theta) + "; use sample_polya for this regime");
}

std::vector<Index> throw_labels(const PartitionWeights& partition, Index k, std::uint64_t seed) {
  if (k < 0) throw DomainError("throw_labels: negative k");
  const Eigen::VectorXd& w = partition.weights();
  std::vector<double> cumulative(static_cast<std::size_t>(w.size()));
  std::partial_sum(w.data(), w.data() + w.size(), cumulative.begin());
  const double total = cumulative.back();
  Rng rng(seed);
  std::vector<Index> labels(static_cast<std::size_t>(k));
  for (auto& label : labels) {
    const double u = rng.uniform() * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    label = std::min<Index>(static_cast<Index>(it - cumulative.begin()), w.size() - 1);
  }
  return labels;
}

OccupancyVector occupancy_from_labels(Index n, std::span<const Index> labels) {
  std::vector<Index> counts(static_cast<std::size_t>(n), 0);
  for (Index label : labels) {
    if (label < 0 || label >= n) throw DomainError("occupancy_from_labels: label out of range");
    ++counts[static_cast<std::size_t>(label)];
  }
  return OccupancyVector(std::move(counts));
}

OccupancyVector sample_throws(const PartitionWeights& partition, Index k, std::uint64_t seed) {
  if (k < 1) throw DomainError("sample_throws: k must be >= 1");
  const auto labels = throw_labels(partition, k, seed);
  return occupancy_from_labels(partition.size(), labels);
}

std::vector<Index> polya_sequence(Index n, double theta, Index k, std::uint64_t seed) {
  if (n < 1) throw DomainError("polya_sequence: n must be >= 1");
  if (!(theta > 0.0)) throw DomainError("polya_sequence: theta must be positive");
  if (k < 0) throw DomainError("polya_sequence: negative k");
  Rng rng(seed);
  const double mass = static_cast<double>(n) * theta;
  std::vector<Index> labels;
  labels.reserve(static_cast<std::size_t>(k));
  // (theta + c_m)/(n theta + j) mixes a fresh uniform label with weight
  // n theta and a copy of a past draw with weight j.
  for (Index j = 0; j < k; ++j) {
    const double fresh = mass / (mass + static_cast<double>(j));
    if (rng.uniform() < fresh)
      labels.push_back(rng.uniform_index(n));
    else
      labels.push_back(labels[static_cast<std::size_t>(rng.uniform_index(j))]);
  }
  return labels;
}

OccupancyVector sample_polya(Index n, double theta, Index k, std::uint64_t seed) {
  if (k < 1) throw DomainError("sample_polya: k must be >= 1");
  const auto labels = polya_sequence(n, theta, k, seed);
  return occupancy_from_labels(n, labels);
}

OccupancySummary occupancy_stats(const OccupancyVector& occupancy) {
  std::vector<Index> positive;
  for (Index c : occupancy.counts())
    if (c > 0) positive.push_back(c);
  if (positive.empty()) throw DomainError("occupancy_stats: all-zero occupancy");
  SpeciesCounts b(std::move(positive));
  FrequencySpectrum a = FrequencySpectrum::from_counts(b);
  return {b.p(), std::move(b), std::move(a)};
}

double pair_match_D(const FrequencySpectrum& spectrum) {
  const Index k = spectrum.k();
  if (k < 2) throw DomainError("pair_match_D: requires k >= 2");
  double pairs = 0.0;
  for (const auto& [i, a] : spectrum.entries())
    pairs += static_cast<double>(a) * static_cast<double>(i) * static_cast<double>(i - 1);
  return pairs / (static_cast<double>(k) * static_cast<double>(k - 1));
}

double pair_match_D(const SpeciesCounts& b) {
  const Index k = b.k();
  if (k < 2) throw DomainError("pair_match_D: requires k >= 2");
  double pairs = 0.0;
  for (Index c : b.counts()) pairs += static_cast<double>(c) * static_cast<double>(c - 1);
  return pairs / (static_cast<double>(k) * static_cast<double>(k - 1));
}

double psi_simpson(const FrequencySpectrum& spectrum) {
  const double k = static_cast<double>(spectrum.k());
  double psi = 0.0;
  for (const auto& [i, a] : spectrum.entries()) {
    const double s = static_cast<double>(i) / k;
    // 1 - (1 - s)^k, exactly 1 when s == 1
    const double seen = (i == spectrum.k()) ? 1.0 : -std::expm1(k * std::log1p(-s));
    psi += static_cast<double>(a) * s * s / seen;
  }
  return psi;
}

double diversity_index(const PartitionWeights& partition, DiversityKind kind, double alpha) {
  const auto w = partition.weights().array();
  switch (kind) {
    case DiversityKind::simpson:
      return w.square().sum();
    case DiversityKind::shannon:
      return -(w * w.log()).sum();
    case DiversityKind::renyi:
      if (!(alpha >= 1.0)) throw DomainError("diversity_index: renyi order must be >= 1");
      if (alpha == 1.0) return -(w * w.log()).sum();
      return std::log(w.pow(alpha).sum()) / (1.0 - alpha);
  }
  throw DomainError("diversity_index: unknown kind");
}

PartitionWeights posterior_mean(double theta, const OccupancyVector& occupancy) {
  if (!(theta > 0.0)) throw DomainError("posterior_mean: theta must be positive");
  const Index n = occupancy.n();
  const double denom = static_cast<double>(n) * theta + static_cast<double>(occupancy.k());
  Eigen::VectorXd w(n);
  for (Index m = 0; m < n; ++m)
    w(m) = (theta + static_cast<double>(occupancy.counts()[static_cast<std::size_t>(m)])) / denom;
  w /= w.sum();
  return PartitionWeights(std::move(w));
}

}  // namespace dspecies
