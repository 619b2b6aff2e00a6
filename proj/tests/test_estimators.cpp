#include "dspecies/dataio.hpp"
#include "dspecies/errors.hpp"
#include "dspecies/estimators.hpp"
#include "dspecies/sampling.hpp"
#include "dspecies/stirling.hpp"
#include "testing.hpp"

#include <cmath>

using namespace dspecies;

TEST_CASE("mle_n examples") {
  const EstimateReport r = mle_n(1.0, 10, 5);
  CHECK(*r.n_real == doctest::Approx(9.0).epsilon(1e-10));
  CHECK(*r.n_floor == 9);
  CHECK(r.statistic_used == "P");
  for (Index k : {2, 7, 50}) CHECK(*mle_n(1.0, k, 1).n_real == doctest::Approx(1.0));
  CHECK(*mle_n(1.0, 5, 4).n_real == doctest::Approx(16.0).epsilon(1e-10));
  const EstimateReport div = mle_n(0.7, 6, 6);
  CHECK(div.flag == EstimateFlag::divergence);
  CHECK(div.diverged());
  CHECK_THROWS_AS(mle_n(1.0, 5, 6), DomainError);
  CHECK_THROWS_AS(mle_n(1.0, 5, 0), DomainError);
  CHECK_THROWS_AS(mle_n(KingmanShape{}, 5, 2), UnsupportedModelError);
}

TEST_CASE("mle_n report invariants") {
  for (double theta : {0.3, 1.0, 4.0})
    for (Index k : {5, 40, 300})
      for (Index p = 1; p < k; p += std::max<Index>(1, k / 7)) {
        const EstimateReport r = mle_n(theta, k, p);
        REQUIRE(r.n_real);
        CHECK(static_cast<double>(*r.n_floor) <= *r.n_real);
        CHECK(*r.n_real < static_cast<double>(*r.n_floor) + 1.0);
        CHECK(*r.n_real >= static_cast<double>(p) - 1e-9);
        CHECK(std::abs(r.residual) <= 1e-8 * std::max(1.0, *r.n_real));
      }
  // Maxwell-Boltzmann shape agrees with a very large theta
  CHECK(*mle_n(MaxwellBoltzmannShape{}, 10, 5).n_real ==
        doctest::Approx(*mle_n(1e8, 10, 5).n_real).epsilon(1e-5));
}

TEST_CASE("umvb_n examples") {
  CHECK(*umvb_n(1.0, 10, 5).n_real == doctest::Approx(50.0 / 6.0));
  for (double theta : {0.2, 1.0, 3.0}) CHECK(*umvb_n(theta, 9, 1).n_real == doctest::Approx(1.0));
  CHECK(*umvb_n(MaxwellBoltzmannShape{}, 3, 2).n_real == doctest::Approx(2.0 + 1.0 / 3.0));
  CHECK_THROWS_AS(umvb_n(1.0, 5, 0), DomainError);
  // general-theta route agrees with the closed form at theta = 1
  for (Index k = 2; k <= 30; ++k)
    for (Index p = 1; p <= k; ++p) {
      const double closed = static_cast<double>(p * k) / static_cast<double>(k - p + 1);
      CHECK_REL(*umvb_n(ThetaShape{1.0}, k, p).n_real, closed, 1e-10);
      CHECK_REL(*umvb_n(1.0 + 1e-12, k, p).n_real, closed, 1e-8);
    }
}

TEST_CASE("UMVB expectation identity") {
  for (double theta : {0.5, 1.0, 2.0})
    for (Index k = 1; k <= 10; ++k)
      for (Index n = 1; n <= k; ++n) {
        const BellTable t(theta, k);
        const Model m{DirichletModel{n, theta}};
        double total = 0.0;
        for (Index p = 1; p <= std::min(n, k); ++p)
          total += p_logpmf(m, k, p).value() * std::exp(t(k, p - 1).log() - t(k, p).log());
        const double target = n == 1 ? 0.0
                                     : static_cast<double>(n) *
                                           std::exp(log_pochhammer((n - 1) * theta, k).log() -
                                                    log_pochhammer(n * theta, k).log());
        CHECK(std::abs(total - target) <= 1e-9 * std::max(1.0, target));
      }
}

TEST_CASE("Bose-Einstein ordering and monotonicity") {
  for (Index k = 2; k <= 60; ++k)
    for (Index p = 1; p < k; ++p) CHECK(*mle_n(1.0, k, p).n_real >= *umvb_n(1.0, k, p).n_real - 1e-9);
  for (double theta : {0.5, 1.0, 2.0})
    for (Index k : {10, 40}) {
      double prev_mle = 0.0, prev_umvb = 0.0;
      for (Index p = 1; p < k; ++p) {
        const double a = *mle_n(theta, k, p).n_real;
        const double b = *umvb_n(theta, k, p).n_real;
        CHECK(a >= prev_mle - 1e-9);
        CHECK(b >= prev_umvb - 1e-9);
        prev_mle = a;
        prev_umvb = b;
      }
    }
}

TEST_CASE("kingman_gamma") {
  CHECK(*kingman_gamma(3, 2).gamma_hat == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  CHECK(kingman_gamma(2, 2).flag == EstimateFlag::boundary_infinite);
  CHECK(kingman_gamma(5, 1).flag == EstimateFlag::boundary_zero);
  CHECK(*kingman_gamma(5, 1).gamma_hat == 0.0);
  for (Index k : {5, 50, 500})
    for (Index p = 2; p < k; p += std::max<Index>(1, k / 6)) {
      const double g = *kingman_gamma(k, p).gamma_hat;
      CHECK(std::abs(kingman_mean_p(g, k) - static_cast<double>(p)) < 1e-8 * static_cast<double>(p));
    }
  // Consistency on the large-n surrogate. The band [1.5, 2.5] holds about
  // two thirds of the exact law at k = 5000, so the hit rate is compared with
  // that probability rather than with a fixed count.
  const Index k = 5000;
  const Eigen::VectorXd pmf = p_pmf(KingmanModel{2.0}, k);
  const double lo = kingman_mean_p(1.5, k), hi = kingman_mean_p(2.5, k);
  double band = 0.0;
  for (Index p = 1; p <= k; ++p)
    if (p >= lo && p <= hi) band += pmf(p);
  const int seeds = 100;
  int inside = 0;
  for (int s = 1; s <= seeds; ++s) {
    const OccupancyVector occ = sample_polya(100000, 2.0 / 100000, k, derive_seed(51, s));
    const double g = *kingman_gamma(k, occupancy_stats(occ).p).gamma_hat;
    inside += g >= 1.5 && g <= 2.5;
  }
  const double sigma = std::sqrt(band * (1 - band) / seeds);
  CHECK(std::abs(inside / static_cast<double>(seeds) - band) <= 3 * sigma);
  CHECK(band > 0.6);
}

TEST_CASE("umvb_rational") {
  CHECK(umvb_rational(1, 2, 2) == doctest::Approx(1.0));
  CHECK(umvb_rational(1, 3, 1) == 0.0);
  CHECK_THROWS_AS(umvb_rational(1, 3, 4), DomainError);
  for (double gamma : {0.5, 1.0, 3.0})
    for (Index k = 1; k <= 10; ++k) {
      const Eigen::VectorXd pmf = p_pmf(KingmanModel{gamma}, k);
      for (Index l = 1; l <= k; ++l) {
        double total = 0.0;
        for (Index p = 1; p <= k; ++p) total += pmf(p) * umvb_rational(l, k, p);
        // r_l(gamma) = gamma (gamma)_{k-l} / (gamma)_k
        const double target =
            gamma * std::exp(log_pochhammer(gamma, k - l).log() - log_pochhammer(gamma, k).log());
        CHECK(std::abs(total - target) < 1e-10);
      }
      if (k >= 2) CHECK(umvb_rational(1, k, k) == doctest::Approx(1.0));
    }
}

TEST_CASE("joint estimation on the bundled data") {
  const Dataset madison = bundled_dataset("madison");
  const EstimateReport m =
      joint_estimate(JointStatistic::D, madison.spectrum.k(), madison.spectrum.p(), pair_match_D(madison.spectrum));
  CHECK(m.statistic_used == "P,D");
  CHECK(*m.n_real == doctest::Approx(274.6).epsilon(5e-4));
  CHECK(*m.theta_hat == doctest::Approx(1.09).epsilon(0.01));
  const Dataset hamilton = bundled_dataset("hamilton");
  const EstimateReport h = joint_estimate(JointStatistic::D, hamilton.spectrum.k(), hamilton.spectrum.p(),
                                          pair_match_D(hamilton.spectrum));
  CHECK(*h.n_real == doctest::Approx(253.5).epsilon(5e-4));
  CHECK(*h.theta_hat == doctest::Approx(0.85).epsilon(0.01));
  const EstimateReport psi = joint_estimate(JointStatistic::psi, madison.spectrum.k(), madison.spectrum.p(),
                                            psi_simpson(madison.spectrum));
  CHECK(psi.statistic_used == "P,psi");
  CHECK(*psi.n_real == *m.n_real);
}

TEST_CASE("joint estimation edge cases") {
  // n * stat <= 1 leaves no positive theta
  const EstimateReport none = joint_estimate(JointStatistic::D, 10, 5, 0.01);
  CHECK(none.flag == EstimateFlag::no_solution);
  CHECK(none.diverged());
  CHECK_THROWS_AS(joint_estimate(JointStatistic::D, 10, 5, 1.5), DomainError);
  CHECK_THROWS_AS(joint_estimate(JointStatistic::D, 10, 5, 0.0), DomainError);
  CHECK(joint_estimate(JointStatistic::D, 10, 10, 0.1).flag == EstimateFlag::divergence);
  // fixed-point scheme: the reported pair satisfies both equations
  const EstimateReport fp = joint_estimate(JointStatistic::D, 172, 106, 204.0 / 29412.0, NEstimator::mle,
                                           JointScheme::fixed_point);
  REQUIRE(fp.flag == EstimateFlag::none);
  const double theta = *fp.theta_hat;
  CHECK(theta == doctest::Approx((1 - 204.0 / 29412.0) / (*fp.n_real * 204.0 / 29412.0 - 1)).epsilon(1e-9));
  CHECK(*mle_n(theta, 172, 106).n_real == doctest::Approx(*fp.n_real).epsilon(1e-6));
  CHECK(fp.iterations <= kJointEvaluationCap);
  const EstimateReport fpu = joint_estimate(JointStatistic::D, 172, 106, 204.0 / 29412.0, NEstimator::umvb,
                                            JointScheme::fixed_point);
  if (fpu.flag == EstimateFlag::none)
    CHECK(*umvb_n(*fpu.theta_hat, 172, 106).n_real == doctest::Approx(*fpu.n_real).epsilon(1e-6));
}

TEST_CASE("joint estimation self-consistency") {
  // exact E(D) with P at its mode; n = 200, theta = 1, k = 300
  const Eigen::VectorXd pmf = p_pmf(DirichletModel{200, 1.0}, 300);
  Index mode = 0;
  pmf.maxCoeff(&mode);
  const double d = 2.0 / 201.0;
  for (JointScheme scheme : {JointScheme::one_step, JointScheme::fixed_point}) {
    const EstimateReport r = joint_estimate(JointStatistic::D, 300, mode, d, NEstimator::mle, scheme);
    REQUIRE(r.theta_hat);
    CHECK(std::abs(*r.theta_hat - 1.0) <= 0.2);
  }
}

TEST_CASE("rho_star") {
  CHECK(rho_star(0.5, 1.0) == doctest::Approx(1.0));
  CHECK(rho_star(0.25, 1.0) == doctest::Approx(1.0 / 3.0));
  const double x = rho_star(0.5, 2.0);
  const double back = x * (1.0 - std::pow(2.0 * x / (1.0 + 2.0 * x), 2.0));
  CHECK(std::abs(back - 0.5) < 1e-10);
  for (double theta : {0.3, 1.0, 5.0})
    for (double rho : {0.1, 0.5, 0.9}) {
      const double r = rho_star(rho, theta);
      CHECK(r > 0.0);
      CHECK(std::abs(r * (1.0 - std::pow(theta * r / (1.0 + theta * r), theta)) - rho) < 1e-10);
    }
  CHECK_THROWS_AS(rho_star(1.0, 1.0), DomainError);
}

TEST_CASE("flag names round-trip") {
  for (EstimateFlag f : {EstimateFlag::none, EstimateFlag::divergence, EstimateFlag::no_solution,
                         EstimateFlag::boundary_zero, EstimateFlag::boundary_infinite})
    CHECK(estimate_flag_from_string(to_string(f)) == f);
  CHECK_THROWS(estimate_flag_from_string("bogus"));
}
