#include "dspecies/dataio.hpp"
#include "dspecies/errors.hpp"
#include "dspecies/sampling.hpp"
#include "testing.hpp"

#include <array>
#include <cmath>
#include <map>
#include <random>

using namespace dspecies;

namespace {

FrequencySpectrum spec(std::map<Index, Index> m) { return FrequencySpectrum(std::move(m)); }

struct Moments {
  double n = 0, mean = 0, m2 = 0;
  void add(double x) {
    n += 1;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double var() const { return m2 / (n - 1); }
  double se() const { return std::sqrt(var() / n); }
};

}  // namespace

TEST_CASE("sample_partition") {
  CHECK(sample_partition(1, 0.3, 7).weights()(0) == 1.0);
  Moments first, first_sq;
  const int reps = 10000;
  for (int r = 0; r < reps; ++r) {
    const PartitionWeights w = sample_partition(100, 1.0, derive_seed(11, r));
    CHECK(std::abs(w.weights().sum() - 1.0) < 1e-12);
    first.add(w[0]);
    first_sq.add(w[0] * w[0]);
  }
  CHECK(std::abs(first.mean - 0.01) <= 3 * first.se());
  const double var_target = 99.0 / (1e4 * 101.0);
  CHECK(std::abs(first.var() - var_target) <= 3 * first_sq.se());
  // tiny theta still gives positive weights
  const PartitionWeights tiny = sample_partition(50, 0.01, 3);
  CHECK(tiny.weights().minCoeff() > 0.0);
  // deterministic
  CHECK(sample_partition(20, 0.5, 99).weights() == sample_partition(20, 0.5, 99).weights());
  CHECK_THROWS_AS(PartitionWeights(Eigen::VectorXd::Constant(2, 0.4)), ValidationError);
  Eigen::VectorXd bad(2);
  bad << 1.0, 0.0;
  CHECK_THROWS_AS(PartitionWeights{bad}, ValidationError);
}

TEST_CASE("sample_throws") {
  CHECK(sample_throws(PartitionWeights::uniform(1), 17, 5).counts() == std::vector<Index>{17});
  const Index k = 100000;
  const OccupancyVector occ = sample_throws(PartitionWeights::uniform(2), k, 21);
  CHECK(occ.k() == k);
  const double sigma = std::sqrt(0.25 / static_cast<double>(k));
  CHECK(std::abs(static_cast<double>(occ.counts()[0]) / k - 0.5) <= 3 * sigma);
}

TEST_CASE("sample_polya") {
  std::vector<double> placed(4, 0.0);
  for (int r = 0; r < 4000; ++r) {
    const OccupancyVector occ = sample_polya(4, 0.7, 1, derive_seed(5, r));
    Index ones = 0;
    for (std::size_t m = 0; m < 4; ++m)
      if (occ.counts()[m] == 1) {
        ++ones;
        placed[m] += 1;
      }
    CHECK(ones == 1);
  }
  CHECK(chi2_pvalue(placed, {0.25, 0.25, 0.25, 0.25}) > 0.01);

  const int runs = 100000;
  int same = 0;
  for (int r = 0; r < runs; ++r) {
    const auto seq = polya_sequence(2, 1.0, 2, derive_seed(6, r));
    same += seq[0] == seq[1];
  }
  const double sigma = std::sqrt((2.0 / 3.0) * (1.0 / 3.0) / runs);
  CHECK(std::abs(static_cast<double>(same) / runs - 2.0 / 3.0) <= 3 * sigma);
}

TEST_CASE("Polya urn and partition-then-throw agree") {
  // n=3, theta=1, k=4: law of the sorted occupancy vector
  const auto key = [](const OccupancyVector& o) {
    std::array<Index, 3> c{o.counts()[0], o.counts()[1], o.counts()[2]};
    return c[0] * 25 + c[1] * 5 + c[2];
  };
  const int runs = 100000;
  std::map<Index, double> urn, two_stage;
  for (int r = 0; r < runs; ++r) {
    urn[key(sample_polya(3, 1.0, 4, derive_seed(7, r)))] += 1;
    const PartitionWeights w = sample_partition(3, 1.0, derive_seed(8, r));
    two_stage[key(sample_throws(w, 4, derive_seed(9, r)))] += 1;
  }
  // Bose-Einstein: every occupancy vector with sum 4 over 3 cells has probability 1/C(6,2)
  std::vector<double> o1, o2, probs;
  for (Index a = 0; a <= 4; ++a)
    for (Index b = 0; a + b <= 4; ++b) {
      const Index c = 4 - a - b;
      const Index kk = a * 25 + b * 5 + c;
      o1.push_back(urn[kk]);
      o2.push_back(two_stage[kk]);
      probs.push_back(1.0 / 15.0);
    }
  CHECK(chi2_pvalue(o1, probs) > 0.01);
  CHECK(chi2_pvalue(o2, probs) > 0.01);
}

TEST_CASE("Polya sequence is exchangeable") {
  // exact law of (M1, M2, M3) is prod (theta)_{k_m} / (3 theta)_3
  const double theta = 0.5;
  std::vector<double> observed(27, 0.0), probs(27, 0.0);
  for (int r = 0; r < 100000; ++r) {
    const auto s = polya_sequence(3, theta, 3, derive_seed(10, r));
    observed[static_cast<std::size_t>(s[0] * 9 + s[1] * 3 + s[2])] += 1;
  }
  for (Index a = 0; a < 3; ++a)
    for (Index b = 0; b < 3; ++b)
      for (Index c = 0; c < 3; ++c) {
        std::array<Index, 3> cnt{0, 0, 0};
        ++cnt[a];
        ++cnt[b];
        ++cnt[c];
        double lp = -log_pochhammer(3 * theta, 3).log();
        for (Index m : cnt) lp += log_pochhammer(theta, m).log();
        probs[static_cast<std::size_t>(a * 9 + b * 3 + c)] = std::exp(lp);
      }
  CHECK(chi2_pvalue(observed, probs) > 0.01);
  // permuted positions have the same law
  std::vector<double> permuted(27, 0.0);
  for (Index a = 0; a < 3; ++a)
    for (Index b = 0; b < 3; ++b)
      for (Index c = 0; c < 3; ++c)
        permuted[static_cast<std::size_t>(c * 9 + a * 3 + b)] =
            observed[static_cast<std::size_t>(a * 9 + b * 3 + c)];
  CHECK(chi2_pvalue(permuted, probs) > 0.01);
}

TEST_CASE("empirical frequencies converge to the partition") {
  int decreasing = 0;
  for (int s = 1; s <= 10; ++s) {
    const PartitionWeights w = sample_partition(5, 1.0, derive_seed(100, s));
    const auto labels = throw_labels(w, 100000, derive_seed(200, s));
    std::array<double, 3> dev{};
    std::size_t j = 0;
    for (Index k : {1000, 10000, 100000}) {
      const OccupancyVector occ = occupancy_from_labels(5, std::span<const Index>(labels.data(), k));
      double worst = 0.0;
      for (Index m = 0; m < 5; ++m)
        worst = std::max(worst, std::abs(static_cast<double>(occ.counts()[m]) / k - w[m]));
      dev[j++] = worst;
    }
    decreasing += dev[0] > dev[1] && dev[1] > dev[2];
    CHECK(dev[2] < 0.02);
  }
  CHECK(decreasing >= 9);
}

TEST_CASE("occupancy_stats") {
  const OccupancySummary s = occupancy_stats(OccupancyVector({3, 0, 1}));
  CHECK(s.p == 2);
  CHECK(s.b.counts() == std::vector<Index>{3, 1});
  CHECK(s.a == spec({{1, 1}, {3, 1}}));
  const OccupancySummary t = occupancy_stats(OccupancyVector({1, 1, 1}));
  CHECK(t.p == 3);
  CHECK(t.a == spec({{1, 3}}));
  CHECK_THROWS_AS(occupancy_stats(OccupancyVector({0, 0})), DomainError);
  for (int r = 0; r < 50; ++r) {
    const OccupancyVector occ = sample_polya(30, 0.4, 57, derive_seed(12, r));
    const OccupancySummary u = occupancy_stats(occ);
    Index k = 0, p = 0;
    for (const auto& [i, ai] : u.a.entries()) {
      k += i * ai;
      p += ai;
    }
    CHECK(k == 57);
    CHECK(p == u.p);
    const OccupancySummary again = occupancy_stats(occ);
    CHECK(again.a == u.a);
    CHECK(again.b.counts() == u.b.counts());
  }
}

TEST_CASE("pair_match_D") {
  CHECK(pair_match_D(spec({{1, 9}})) == 0.0);
  CHECK(pair_match_D(spec({{9, 1}})) == 1.0);
  const Dataset madison = bundled_dataset("madison");
  CHECK(pair_match_D(madison.spectrum) == doctest::Approx(204.0 / 29412.0).epsilon(1e-14));
  CHECK_THROWS_AS(pair_match_D(spec({{1, 1}})), DomainError);
  // A-form equals B-form on random spectra
  std::mt19937_64 gen(2024);
  for (int r = 0; r < 100; ++r) {
    std::vector<Index> b;
    const int p = 1 + static_cast<int>(gen() % 30);
    for (int q = 0; q < p; ++q) b.push_back(1 + static_cast<Index>(gen() % 12));
    const SpeciesCounts counts(b);
    if (counts.k() < 2) continue;
    CHECK(pair_match_D(FrequencySpectrum::from_counts(counts)) == pair_match_D(counts));
  }
}

TEST_CASE("psi_simpson") {
  CHECK(psi_simpson(spec({{7, 1}})) == 1.0);
  CHECK(psi_simpson(spec({{1, 2}})) == doctest::Approx(2.0 / 3.0));
  Moments m;
  const PartitionWeights w = PartitionWeights::uniform(1);
  (void)w;
  for (int r = 0; r < 10000; ++r) {
    const OccupancyVector occ = sample_polya(5, 1.0, 2000, derive_seed(13, r));
    m.add(psi_simpson(occupancy_stats(occ).a));
  }
  CHECK(std::abs(m.mean - 1.0 / 3.0) <= 3 * m.se());
}

TEST_CASE("diversity_index") {
  const PartitionWeights u = PartitionWeights::uniform(8);
  CHECK(diversity_index(u, DiversityKind::simpson) == doctest::Approx(0.125));
  CHECK(diversity_index(u, DiversityKind::shannon) == doctest::Approx(std::log(8.0)));
  CHECK(diversity_index(u, DiversityKind::renyi, 3.0) == doctest::Approx(std::log(8.0)));
  const PartitionWeights one = PartitionWeights::uniform(1);
  CHECK(diversity_index(one, DiversityKind::simpson) == 1.0);
  CHECK(diversity_index(one, DiversityKind::shannon) == 0.0);
  const PartitionWeights w = sample_partition(6, 0.8, 4);
  CHECK(diversity_index(w, DiversityKind::renyi, 1.0) == diversity_index(w, DiversityKind::shannon));
  CHECK(diversity_index(w, DiversityKind::renyi, 2.0) ==
        doctest::Approx(-std::log(diversity_index(w, DiversityKind::simpson))));
  Moments m;
  for (int r = 0; r < 20000; ++r)
    m.add(diversity_index(sample_partition(4, 2.0, derive_seed(14, r)), DiversityKind::simpson));
  CHECK(std::abs(m.mean - 3.0 / 9.0) <= 3 * m.se());
}

TEST_CASE("posterior_mean") {
  const PartitionWeights prior = posterior_mean(2.0, OccupancyVector({0, 0, 0, 0}));
  for (Index m = 0; m < 4; ++m) CHECK(prior[m] == doctest::Approx(0.25));
  const PartitionWeights pm = posterior_mean(1.0, OccupancyVector({2, 0}));
  CHECK(pm[0] == doctest::Approx(0.75));
  CHECK(pm[1] == doctest::Approx(0.25));
  const PartitionWeights flat = posterior_mean(1e9, OccupancyVector({5, 0, 1}));
  for (Index m = 0; m < 3; ++m) CHECK(flat[m] == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("seeds are reproducible") {
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(polya_sequence(10, 0.5, 40, 77) == polya_sequence(10, 0.5, 40, 77));
  const auto w = sample_partition(10, 0.5, 3);
  CHECK(throw_labels(w, 30, 8) == throw_labels(w, 30, 8));
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) CHECK(a.gamma(0.3) == b.gamma(0.3));
}
