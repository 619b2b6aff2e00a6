#include "dspecies/errors.hpp"
#include "dspecies/numerics.hpp"
#include "dspecies/stirling.hpp"
#include "testing.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <vector>

using namespace dspecies;

TEST_CASE("log_add and LogReal arithmetic") {
  CHECK(log_add(kNegInf, 1.5) == 1.5);
  CHECK(log_add(700.0, 700.0) == doctest::Approx(700.0 + std::log(2.0)));
  const LogReal a = LogReal::from_log(700.0);
  const LogReal sum = a + a;
  CHECK(std::isfinite(sum.log()));
  CHECK((LogReal::from_linear(0.25) * LogReal::from_linear(4.0)).value() == doctest::Approx(1.0));
  CHECK((LogReal::from_linear(0.0) + LogReal::from_linear(0.5)).value() == doctest::Approx(0.5));
  CHECK(LogReal::zero().is_zero());
  CHECK(LogReal::zero() < LogReal::one());
  CHECK_THROWS_AS(LogReal::from_linear(-1.0), DomainError);
  CHECK_THROWS_AS(LogReal::one() / LogReal::zero(), DomainError);
  const std::vector<double> xs{std::log(1.0), std::log(2.0), std::log(3.0)};
  CHECK(log_sum_exp(std::span<const double>(xs)) == doctest::Approx(std::log(6.0)));
}

TEST_CASE("SignedLogSum subtracts once") {
  SignedLogSum s;
  s.add(std::log(5.0), 1);
  s.add(std::log(3.0), -1);
  CHECK(std::exp(s.log_total()) == doctest::Approx(2.0));
  SignedLogSum neg;
  neg.add(0.0, -1);
  CHECK_THROWS_AS(neg.log_total(), DomainError);
}

TEST_CASE("log_pochhammer examples") {
  CHECK(log_pochhammer(1.0, 3).log() == doctest::Approx(std::log(6.0)));
  CHECK(log_pochhammer(2.7, 0).log() == 0.0);
  CHECK(log_pochhammer(0.5, 4).log() == doctest::Approx(std::log(6.5625)).epsilon(1e-14));
  CHECK_THROWS_AS(log_pochhammer(0.0, 3), DomainError);
  CHECK_THROWS_AS(log_pochhammer(-1.0, 3), DomainError);
}

TEST_CASE("log_pochhammer functional equation") {
  for (double theta : {0.1, 0.5, 1.0, 3.3, 50.0})
    for (Index a : {0, 1, 7, 40, 5000})
      for (Index b : {0, 3, 11, 6000}) {
        const double lhs = log_pochhammer(theta, a + b).log();
        const double rhs = log_pochhammer(theta, a).log() + log_pochhammer(theta + a, b).log();
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
      }
}

TEST_CASE("log_pochhammer_ratio agrees with the direct difference") {
  for (double a : {0.5, 3.0, 99.0})
    for (double b : {0.7, 3.0, 100.0})
      for (Index k : {0, 1, 10, 300}) {
        const double direct = log_pochhammer(a, k).log() - log_pochhammer(b, k).log();
        CHECK(log_pochhammer_ratio(a, b, k) == doctest::Approx(direct).epsilon(1e-11));
      }
}

TEST_CASE("log_theta_bracket examples") {
  CHECK(log_theta_bracket(2.0, Index{5}, 7, Index{0}).log() == 0.0);
  CHECK(log_theta_bracket(1.0, Index{2}, 2, Index{1}).value() == doctest::Approx(1.0 / 3.0));
  CHECK(log_theta_bracket(0.3, Index{4}, 0, Index{2}).log() == 0.0);
  CHECK_THROWS_AS(log_theta_bracket(1.0, Index{3}, 2, Index{3}), DomainError);
  CHECK(log_theta_bracket(1.5, Index{6}, 9, Index{2}).value() <= 1.0);
}

TEST_CASE("Bell table invariants and examples") {
  const BellTable t1(1.0, 30);
  CHECK(t1(0, 0).log() == 0.0);
  CHECK(t1(3, 0).is_zero());
  CHECK(t1(0, 2).is_zero());
  CHECK(t1(3, 2).value() == doctest::Approx(6.0));
  // Lah numbers
  for (Index k = 1; k <= 30; ++k)
    for (Index p = 1; p <= k; ++p) {
      const double lah = log_factorial(k) - log_factorial(p) + log_binomial(k - 1, p - 1);
      CHECK(std::abs(t1(k, p).log() - lah) <= 1e-9 * std::max(1.0, std::abs(lah)));
    }
  for (double theta : {0.25, 2.0, 17.0}) {
    const BellTable t(theta, 25);
    for (Index k = 1; k <= 25; ++k) CHECK_REL(t(k, 1).log(), log_pochhammer(theta, k).log(), 1e-12);
  }
  CHECK_THROWS_AS(BellTable(0.0, 5), DomainError);
  CHECK_THROWS_AS(BellTable(1.0, Index{1} << 20), ResourceError);
}

TEST_CASE("Bell table agrees with composition enumeration") {
  for (double theta : {0.25, 0.5, 1.0, 1.5, 5.0}) {
    const BellTable t(theta, 12);
    for (Index k = 1; k <= 12; ++k)
      for (Index p = 1; p <= k; ++p) {
        const double a = t(k, p).value();
        const double b = bell_via_compositions(theta, k, p).value();
        CHECK(std::abs(a - b) <= 1e-9 * b);
      }
  }
  CHECK(bell_via_compositions(1.0, 3, 2).value() == doctest::Approx(6.0));
  CHECK(bell_via_compositions(2.5, 6, 6).value() == doctest::Approx(std::pow(2.5, 6)));
  CHECK(bell_via_compositions(2.5, 6, 1).value() == doctest::Approx(log_pochhammer(2.5, 6).value()));
  CHECK_THROWS_AS(bell_via_compositions(1.0, 26, 3), MethodError);
}

TEST_CASE("log_bell_row matches the table") {
  const BellTable t(0.7, 40);
  for (Index k : {1, 5, 17, 40}) {
    const Eigen::VectorXd row = log_bell_row(0.7, k, k);
    for (Index p = 0; p <= k; ++p) {
      const double a = t(k, p).log();
      if (a == kNegInf)
        CHECK(row(p) == kNegInf);
      else
        CHECK_REL(row(p), a, 1e-12);
    }
  }
}

TEST_CASE("large-theta Bell ratio approaches Stirling numbers of the second kind") {
  const double theta = 1e6;
  const BellTable t(theta, 12);
  const StirlingTables st(12);
  for (Index k = 1; k <= 12; ++k)
    for (Index p = 1; p <= k; ++p) {
      const double ratio = std::exp(t(k, p).log() - static_cast<double>(k) * std::log(theta));
      CHECK(std::abs(ratio - st.second_kind(k, p).value()) <= 1e-4 * st.second_kind(k, p).value());
    }
}

TEST_CASE("Stirling tables") {
  const StirlingTables st(60);
  for (Index k = 1; k <= 60; ++k) {
    BigInt row1 = 0;
    for (Index p = 0; p <= k; ++p) row1 += st.first_kind_exact(k, p);
    CHECK(row1 == factorial_exact(k));
    BigInt row2 = 0;
    for (Index p = 0; p <= k; ++p) row2 += st.second_kind_exact(k, p);
    CHECK(row2 == st.bell_number_exact(k));
    CHECK(st.second_kind_exact(k, k) == 1);
    CHECK(st.first_kind_exact(k, k) == 1);
    CHECK(st.second_kind_exact(k, 1) == 1);
    CHECK(st.first_kind_exact(k, 1) == factorial_exact(k - 1));
  }
  // Bell numbers 1, 1, 2, 5, 15, 52, 203
  const std::vector<int> bell{1, 1, 2, 5, 15, 52, 203};
  for (std::size_t k = 0; k < bell.size(); ++k) CHECK(st.bell_number_exact(static_cast<Index>(k)) == bell[k]);
  // exact vs log representation
  for (Index k = 1; k <= 60; ++k)
    for (Index p = 1; p <= k; ++p) {
      const double l2 = std::log(st.second_kind_exact(k, p).convert_to<double>());
      const double l1 = std::log(st.first_kind_exact(k, p).convert_to<double>());
      CHECK(std::abs(std::exp(st.second_kind(k, p).log() - l2) - 1.0) <= 1e-10);
      CHECK(std::abs(std::exp(st.first_kind(k, p).log() - l1) - 1.0) <= 1e-10);
    }
  CHECK(st.second_kind_exact(5, 2) == 15);
  CHECK(st.first_kind_exact(5, 2) == 50);
  CHECK_THROWS_AS(StirlingTables(70).second_kind_exact(3, 1), DomainError);
}

TEST_CASE("Stirling rows match the tables") {
  const StirlingTables st(50);
  for (Index k : {1, 9, 50}) {
    const Eigen::VectorXd r1 = log_stirling1_row(k, k);
    const Eigen::VectorXd r2 = log_stirling2_row(k, k);
    for (Index p = 1; p <= k; ++p) {
      CHECK_REL(r1(p), st.first_kind(k, p).log(), 1e-12);
      CHECK_REL(r2(p), st.second_kind(k, p).log(), 1e-12);
    }
  }
}

TEST_CASE("solve_monotone examples") {
  CHECK(solve_monotone([](double x) { return x; }, 2.0, 0.0, 1.0).x == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(solve_monotone([](double x) { return x * x; }, 9.0, 0.0, 10.0).x ==
        doctest::Approx(3.0).epsilon(1e-10));
  const auto xi3 = [](double g) { return 1.0 + g / (g + 1.0) + g / (g + 2.0); };
  RootOptions opts;
  opts.lower_limit = 0.0;
  CHECK(solve_monotone(xi3, 2.0, 0.5, 1.0, opts).x == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  // deterministic
  const double a = solve_monotone([](double x) { return std::exp(x); }, 5.0, 0.0, 1.0).x;
  const double b = solve_monotone([](double x) { return std::exp(x); }, 5.0, 0.0, 1.0).x;
  CHECK(a == b);
  RootOptions bounded;
  bounded.lower_limit = 0.0;
  bounded.upper_limit = 10.0;
  CHECK_THROWS_AS(solve_monotone([](double x) { return x; }, 20.0, 0.0, 1.0, bounded), NoSolutionError);
  CHECK_THROWS_AS(solve_monotone([](double) { return 1.0; }, 2.0, 0.0, 1.0), NoSolutionError);
}
