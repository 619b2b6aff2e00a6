#include "dspecies/distributions.hpp"

#include "dspecies/errors.hpp"
#include "dspecies/stirling.hpp"

#include <cmath>
#include <sstream>

namespace dspecies {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double dbl(Index x) { return static_cast<double>(x); }

double log_falling(Index n, Index p) {  // log n!/(n-p)!
  return log_factorial(n) - log_factorial(n - p);
}

LogReal from_log(double x) { return LogReal::from_log(x); }

// Finite-n models carry an n and, for Dirichlet/BE, a theta.
struct FiniteView {
  Index n;
  double theta;  // infinity for Maxwell-Boltzmann
};

FiniteView finite_view(const Model& model, const char* who) {
  return std::visit(
      overloaded{
          [](const DirichletModel& m) { return FiniteView{m.n, m.theta}; },
          [](const BoseEinsteinModel& m) { return FiniteView{m.n, 1.0}; },
          [](const MaxwellBoltzmannModel& m) {
            return FiniteView{m.n, std::numeric_limits<double>::infinity()};
          },
          [who](const KingmanModel&) -> FiniteView {
            throw UnsupportedModelError(std::string(who) + ": not defined for the Kingman model");
          },
      },
      model);
}

}  // namespace

void validate(const Model& model) {
  std::visit(overloaded{
                 [](const DirichletModel& m) {
                   if (m.n < 1) throw DomainError("Dirichlet model: n must be >= 1");
                   if (!(m.theta > 0.0) || !std::isfinite(m.theta))
                     throw DomainError("Dirichlet model: theta must be positive and finite");
                 },
                 [](const BoseEinsteinModel& m) {
                   if (m.n < 1) throw DomainError("Bose-Einstein model: n must be >= 1");
                 },
                 [](const MaxwellBoltzmannModel& m) {
                   if (m.n < 1) throw DomainError("Maxwell-Boltzmann model: n must be >= 1");
                 },
                 [](const KingmanModel& m) {
                   if (!(m.gamma > 0.0) || !std::isfinite(m.gamma))
                     throw DomainError("Kingman model: gamma must be positive and finite");
                 },
             },
             model);
}

std::string describe(const Model& model) {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const DirichletModel& m) { os << "dirichlet(n=" << m.n << ",theta=" << m.theta << ")"; },
                 [&](const BoseEinsteinModel& m) { os << "bose-einstein(n=" << m.n << ")"; },
                 [&](const MaxwellBoltzmannModel& m) { os << "maxwell-boltzmann(n=" << m.n << ")"; },
                 [&](const KingmanModel& m) { os << "kingman(gamma=" << m.gamma << ")"; },
             },
             model);
  return os.str();
}

bool is_finite_n(const Model& model) { return !std::holds_alternative<KingmanModel>(model); }

LogReal occupancy_logpmf(const Model& model, const OccupancyVector& occupancy) {
  validate(model);
  const FiniteView v = finite_view(model, "occupancy_logpmf");
  if (occupancy.n() != v.n)
    throw DomainError("occupancy_logpmf: occupancy length differs from n");
  const Index k = occupancy.k();
  double log_p = log_factorial(k);
  for (Index c : occupancy.counts()) log_p -= log_factorial(c);
  if (std::isinf(v.theta)) return from_log(log_p - dbl(k) * std::log(dbl(v.n)));
  for (Index c : occupancy.counts()) log_p += log_pochhammer(v.theta, c).log();
  log_p -= log_pochhammer(dbl(v.n) * v.theta, k).log();
  return from_log(log_p);
}

LogReal esf1_logpmf(const Model& model, const SpeciesCounts& b) {
  validate(model);
  const Index k = b.k();
  const Index p = b.p();
  double log_fact_b = 0.0;
  for (Index c : b.counts()) log_fact_b += log_factorial(c);
  return std::visit(
      overloaded{
          [&](const KingmanModel& m) {
            double lp = log_factorial(k) - log_factorial(p) + dbl(p) * std::log(m.gamma) -
                        log_pochhammer(m.gamma, k).log();
            for (Index c : b.counts()) lp -= std::log(dbl(c));
            return from_log(lp);
          },
          [&](const auto&) {
            const FiniteView v = finite_view(model, "esf1_logpmf");
            if (p > v.n) return LogReal::zero();
            const double lead = log_binomial(v.n, p);
            if (v.theta == 1.0) return from_log(lead - log_binomial(v.n + k - 1, k));
            if (std::isinf(v.theta))
              return from_log(lead + log_factorial(k) - log_fact_b - dbl(k) * std::log(dbl(v.n)));
            double lp = lead + log_factorial(k) - log_fact_b -
                        log_pochhammer(dbl(v.n) * v.theta, k).log();
            for (Index c : b.counts()) lp += log_pochhammer(v.theta, c).log();
            return from_log(lp);
          },
      },
      model);
}

LogReal esf2_logpmf(const Model& model, const FrequencySpectrum& a) {
  validate(model);
  const Index k = a.k();
  const Index p = a.p();
  double log_fact_a = 0.0;
  for (const auto& [i, ai] : a.entries()) log_fact_a += log_factorial(ai);
  return std::visit(
      overloaded{
          [&](const KingmanModel& m) {
            double lp = log_factorial(k) + dbl(p) * std::log(m.gamma) -
                        log_pochhammer(m.gamma, k).log() - log_fact_a;
            for (const auto& [i, ai] : a.entries()) lp -= dbl(ai) * std::log(dbl(i));
            return from_log(lp);
          },
          [&](const auto&) {
            const FiniteView v = finite_view(model, "esf2_logpmf");
            if (p > v.n) return LogReal::zero();
            if (v.theta == 1.0)
              return from_log(log_factorial(p) + log_binomial(v.n, p) -
                              log_binomial(v.n + k - 1, k) - log_fact_a);
            double lp = log_falling(v.n, p) + log_factorial(k) - log_fact_a;
            for (const auto& [i, ai] : a.entries()) lp -= dbl(ai) * log_factorial(i);
            if (std::isinf(v.theta)) return from_log(lp - dbl(k) * std::log(dbl(v.n)));
            lp -= log_pochhammer(dbl(v.n) * v.theta, k).log();
            for (const auto& [i, ai] : a.entries())
              lp += dbl(ai) * log_pochhammer(v.theta, i).log();
            return from_log(lp);
          },
      },
      model);
}

namespace {

LogReal p_bell(const FiniteView& v, Index k, Index p) {
  const Eigen::VectorXd row = log_bell_row(v.theta, k, p);
  return from_log(log_falling(v.n, p) - log_pochhammer(dbl(v.n) * v.theta, k).log() + row(p));
}

LogReal p_alternating(const FiniteView& v, Index k, Index p) {
  if (k > kAlternatingLimit || v.n > kAlternatingLimit)
    throw MethodError("p_logpmf: alternating route refused for n or k above 40");
  // sum_q (-1)^{p-q} C(n,p) C(p,q) ((q theta)_k / (n theta)_k)
  SignedLogSum sum;
  const double lead = log_binomial(v.n, p);
  for (Index q = 1; q <= p; ++q) {
    const double ratio = std::isinf(v.theta)
                             ? dbl(k) * std::log(dbl(q) / dbl(v.n))
                             : (q == v.n ? 0.0
                                         : log_pochhammer_ratio(dbl(q) * v.theta,
                                                                dbl(v.n) * v.theta, k));
    sum.add(lead + log_binomial(p, q) + ratio, ((p - q) % 2 == 0) ? 1 : -1);
  }
  // Each term carries roughly 1e-15 relative error; refuse once cancellation
  // would amplify that past 1e-9 instead of returning a wrong value.
  const double top = std::max(sum.log_positive(), sum.log_negative());
  double total = kNegInf;
  try {
    total = sum.log_total(0.0);
  } catch (const DomainError&) {
  }
  if (total == kNegInf || top - total > std::log(1e6))
    throw MethodError("p_logpmf: alternating sum lost its precision to cancellation");
  return from_log(total);
}

LogReal p_special(const Model& model, Index k, Index p) {
  return std::visit(
      overloaded{
          [&](const DirichletModel& m) {
            if (m.theta != 1.0)
              throw MethodError("p_logpmf: no closed form for a general theta");
            return from_log(log_binomial(m.n, p) + log_binomial(k - 1, p - 1) -
                            log_binomial(m.n + k - 1, k));
          },
          [&](const BoseEinsteinModel& m) {
            return from_log(log_binomial(m.n, p) + log_binomial(k - 1, p - 1) -
                            log_binomial(m.n + k - 1, k));
          },
          [&](const MaxwellBoltzmannModel& m) {
            const Eigen::VectorXd s2 = log_stirling2_row(k, p);
            return from_log(log_falling(m.n, p) + s2(p) - dbl(k) * std::log(dbl(m.n)));
          },
          [&](const KingmanModel& m) {
            const Eigen::VectorXd s1 = log_stirling1_row(k, p);
            return from_log(dbl(p) * std::log(m.gamma) + s1(p) - log_pochhammer(m.gamma, k).log());
          },
      },
      model);
}

}  // namespace

LogReal p_logpmf(const Model& model, Index k, Index p, PMethod method) {
  validate(model);
  if (k < 0) throw DomainError("p_logpmf: negative k");
  if (k == 0) return p == 0 ? LogReal::one() : LogReal::zero();
  if (p < 1 || p > k) return LogReal::zero();
  if (is_finite_n(model) && p > finite_view(model, "p_logpmf").n) return LogReal::zero();

  if (method == PMethod::automatic)
    method = std::holds_alternative<DirichletModel>(model) ? PMethod::bell : PMethod::special;

  switch (method) {
    case PMethod::bell: {
      if (std::holds_alternative<MaxwellBoltzmannModel>(model) ||
          std::holds_alternative<KingmanModel>(model))
        throw MethodError("p_logpmf: the Bell route needs a finite theta and n");
      return p_bell(finite_view(model, "p_logpmf"), k, p);
    }
    case PMethod::alternating:
      return p_alternating(finite_view(model, "p_logpmf (alternating)"), k, p);
    case PMethod::special:
      return p_special(model, k, p);
    case PMethod::automatic:
      break;
  }
  throw MethodError("p_logpmf: unknown method");
}

Eigen::VectorXd p_pmf(const Model& model, Index k) {
  validate(model);
  if (k < 0) throw DomainError("p_pmf: negative k");
  Eigen::VectorXd pmf = Eigen::VectorXd::Zero(k + 1);
  if (k == 0) {
    pmf(0) = 1.0;
    return pmf;
  }
  std::visit(overloaded{
                 [&](const KingmanModel& m) {
                   const Eigen::VectorXd s1 = log_stirling1_row(k, k);
                   const double base = log_pochhammer(m.gamma, k).log();
                   for (Index p = 1; p <= k; ++p)
                     pmf(p) = std::exp(dbl(p) * std::log(m.gamma) + s1(p) - base);
                 },
                 [&](const MaxwellBoltzmannModel& m) {
                   const Index top = std::min(k, m.n);
                   const Eigen::VectorXd s2 = log_stirling2_row(k, top);
                   for (Index p = 1; p <= top; ++p)
                     pmf(p) = std::exp(log_falling(m.n, p) + s2(p) - dbl(k) * std::log(dbl(m.n)));
                 },
                 [&](const auto&) {
                   const FiniteView v = finite_view(model, "p_pmf");
                   const Index top = std::min(k, v.n);
                   const Eigen::VectorXd row = log_bell_row(v.theta, k, top);
                   const double base = log_pochhammer(dbl(v.n) * v.theta, k).log();
                   for (Index p = 1; p <= top; ++p)
                     pmf(p) = std::exp(log_falling(v.n, p) - base + row(p));
                 },
             },
             model);
  return pmf;
}

Eigen::VectorXd p_recursion_step(const Model& model, Index k, const Eigen::VectorXd& pmf_k) {
  validate(model);
  if (pmf_k.size() != k + 1) throw DomainError("p_recursion_step: pmf must have k + 1 entries");
  if (std::abs(pmf_k.sum() - 1.0) > 1e-10)
    throw DomainError("p_recursion_step: pmf does not sum to 1");
  // new-species and repeat probabilities from state p at size k
  auto rates = [&](Index p) -> std::pair<double, double> {
    return std::visit(
        overloaded{
            [&](const KingmanModel& m) {
              const double d = m.gamma + dbl(k);
              return std::pair{m.gamma / d, dbl(k) / d};
            },
            [&](const MaxwellBoltzmannModel& m) {
              return std::pair{dbl(m.n - p) / dbl(m.n), dbl(p) / dbl(m.n)};
            },
            [&](const auto&) {
              const FiniteView v = finite_view(model, "p_recursion_step");
              const double d = dbl(v.n) * v.theta + dbl(k);
              return std::pair{dbl(v.n - p) * v.theta / d, (dbl(p) * v.theta + dbl(k)) / d};
            },
        },
        model);
  };
  Eigen::VectorXd next = Eigen::VectorXd::Zero(k + 2);
  for (Index p = 0; p <= k; ++p) {
    if (pmf_k(p) == 0.0) continue;
    const auto [grow, stay] = rates(p);
    next(p + 1) += grow * pmf_k(p);
    next(p) += stay * pmf_k(p);
  }
  return next;
}

LogReal conditional_esf1_logpmf(const ConditionalModel& model, const SpeciesCounts& b) {
  const Index k = b.k();
  const Index p = b.p();
  const double lead = log_factorial(k) - log_factorial(p);
  return std::visit(overloaded{
                        [&](const ThetaShape& s) {
                          if (!(s.theta > 0.0)) throw DomainError("conditional_esf1: theta must be positive");
                          double lp = lead - log_bell_row(s.theta, k, p)(p);
                          for (Index c : b.counts())
                            lp += log_pochhammer(s.theta, c).log() - log_factorial(c);
                          return from_log(lp);
                        },
                        [&](const MaxwellBoltzmannShape&) {
                          double lp = lead - log_stirling2_row(k, p)(p);
                          for (Index c : b.counts()) lp -= log_factorial(c);
                          return from_log(lp);
                        },
                        [&](const KingmanShape&) {
                          double lp = lead - log_stirling1_row(k, p)(p);
                          for (Index c : b.counts()) lp -= std::log(dbl(c));
                          return from_log(lp);
                        },
                    },
                    model);
}

LogReal conditional_esf2_logpmf(const ConditionalModel& model, const FrequencySpectrum& a) {
  const Index k = a.k();
  const Index p = a.p();
  double lp = log_factorial(k);
  for (const auto& [i, ai] : a.entries()) lp -= log_factorial(ai);
  return std::visit(overloaded{
                        [&](const ThetaShape& s) {
                          if (!(s.theta > 0.0)) throw DomainError("conditional_esf2: theta must be positive");
                          lp -= log_bell_row(s.theta, k, p)(p);
                          for (const auto& [i, ai] : a.entries())
                            lp += dbl(ai) * (log_pochhammer(s.theta, i).log() - log_factorial(i));
                          return from_log(lp);
                        },
                        [&](const MaxwellBoltzmannShape&) {
                          lp -= log_stirling2_row(k, p)(p);
                          for (const auto& [i, ai] : a.entries()) lp -= dbl(ai) * log_factorial(i);
                          return from_log(lp);
                        },
                        [&](const KingmanShape&) {
                          lp -= log_stirling1_row(k, p)(p);
                          for (const auto& [i, ai] : a.entries()) lp -= dbl(ai) * std::log(dbl(i));
                          return from_log(lp);
                        },
                    },
                    model);
}

double succession_probability(const Model& model, Index k, Index p, Succession event, Index b_r) {
  validate(model);
  if (k < 0 || p < 0 || p > k) throw DomainError("succession_probability: requires 0 <= p <= k");
  if (event == Succession::seen && (b_r < 1 || b_r > k))
    throw DomainError("succession_probability: requires 1 <= b_r <= k");
  return std::visit(
      overloaded{
          [&](const KingmanModel& m) {
            const double d = m.gamma + dbl(k);
            return event == Succession::new_species ? m.gamma / d : dbl(b_r) / d;
          },
          [&](const MaxwellBoltzmannModel& m) {
            if (p > m.n) throw DomainError("succession_probability: p > n");
            return event == Succession::new_species ? dbl(m.n - p) / dbl(m.n) : 1.0 / dbl(m.n);
          },
          [&](const auto&) {
            const FiniteView v = finite_view(model, "succession_probability");
            if (p > v.n) throw DomainError("succession_probability: p > n");
            const double d = dbl(v.n) * v.theta + dbl(k);
            return event == Succession::new_species ? dbl(v.n - p) * v.theta / d
                                                    : (v.theta + dbl(b_r)) / d;
          },
      },
      model);
}

}  // namespace dspecies
