#include "dspecies/stopping.hpp"

#include "dspecies/errors.hpp"
#include "dspecies/estimators.hpp"
#include "dspecies/sampling.hpp"

#include <cmath>
#include <unordered_set>

namespace dspecies {

namespace {
double dbl(Index x) { return static_cast<double>(x); }
}  // namespace

std::string to_string(StopMethod method) {
  return method == StopMethod::closed_form ? "closed_form" : "monte_carlo";
}

TailEstimate smallest_fragment_tail(Index n, double theta, Index k, StopMethod method,
                                    std::uint64_t seed, Index reps) {
  if (n < 2) throw DomainError("smallest_fragment_tail: requires n >= 2");
  if (k < 0) throw DomainError("smallest_fragment_tail: negative k");
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw DomainError("smallest_fragment_tail: theta must be positive");
  TailEstimate out;
  out.method = method;
  if (k == 0) {
    out.probability = 1.0;
    return out;
  }
  if (method == StopMethod::closed_form) {
    if (theta != 1.0)
      throw MethodError("smallest_fragment_tail: closed form only for theta = 1");
    // 1 - (k/n)(1-1/n)^{k-1} sum_j C(k-1,j) (n-1)^{-j} / (n+j)
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(k));
    const double log_nm1 = std::log(dbl(n - 1));
    for (Index j = 0; j < k; ++j)
      terms.push_back(log_binomial(k - 1, j) - dbl(j) * log_nm1 - std::log(dbl(n + j)));
    const double log_sub = std::log(dbl(k) / dbl(n)) + dbl(k - 1) * std::log1p(-1.0 / dbl(n)) +
                           log_sum_exp(std::span<const double>(terms));
    out.probability = -std::expm1(log_sub);
    return out;
  }
  if (reps < 2) throw DomainError("smallest_fragment_tail: Monte Carlo needs reps >= 2");
  double mean = 0.0;
  double m2 = 0.0;
  for (Index r = 0; r < reps; ++r) {
    const PartitionWeights part = sample_partition(n, theta, derive_seed(seed, static_cast<std::uint64_t>(r)));
    const double s_min = part.weights().minCoeff();
    const double x = std::exp(dbl(k) * std::log1p(-s_min));
    const double delta = x - mean;
    mean += delta / dbl(r + 1);
    m2 += delta * (x - mean);
  }
  out.probability = mean;
  out.std_error = std::sqrt(m2 / dbl(reps - 1) / dbl(reps));
  out.replications = reps;
  return out;
}

double coupon_cdf(const Model& model, Index k) {
  validate(model);
  if (std::holds_alternative<KingmanModel>(model))
    throw UnsupportedModelError("coupon_cdf: never complete under the Kingman model");
  if (k < 0) throw DomainError("coupon_cdf: negative k");
  const Index n = std::visit(
      [](const auto& m) -> Index {
        if constexpr (requires { m.n; })
          return m.n;
        else
          return 0;
      },
      model);
  if (k < n) return 0.0;
  return p_logpmf(model, k, n).value();
}

Trajectory trajectory_from_labels(const std::vector<Index>& labels) {
  Trajectory out;
  out.reserve(labels.size());
  std::unordered_set<Index> seen;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    seen.insert(labels[j]);
    out.emplace_back(static_cast<Index>(j + 1), static_cast<Index>(seen.size()));
  }
  return out;
}

namespace {

std::string shape_label(const ConditionalModel& shape) {
  if (const auto* t = std::get_if<ThetaShape>(&shape))
    return t->theta == 1.0 ? "bose-einstein" : "dirichlet";
  if (std::holds_alternative<MaxwellBoltzmannShape>(shape)) return "maxwell-boltzmann";
  return "kingman";
}

std::optional<double> r_from_n(const EstimateReport& rep, double theta, Index k, Index p) {
  if (rep.flag != EstimateFlag::none || !rep.n_real) return std::nullopt;
  const double n = *rep.n_real;
  if (std::isinf(theta)) return (n - dbl(p)) / n;
  return (n - dbl(p)) * theta / (n * theta + dbl(k));
}

}  // namespace

EpsilonStop epsilon_stop(const ConditionalModel& shape, double epsilon, const Trajectory& trajectory) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon_stop: epsilon must lie in (0, 1)");
  EpsilonStop out;
  out.epsilon = epsilon;
  out.model = shape_label(shape);
  Index prev_k = 0;
  Index prev_p = 0;
  for (const auto& [k, p] : trajectory) {
    if (k <= prev_k || p < prev_p || p < 1 || p > k)
      throw DomainError("epsilon_stop: trajectory needs increasing k and nondecreasing 1 <= P <= k");
    prev_k = k;
    prev_p = p;
    EpsilonPoint pt{k, p, std::nullopt, std::nullopt};
    const auto* t = std::get_if<ThetaShape>(&shape);
    if (t && t->theta == 1.0) {
      const double pp = dbl(p) * dbl(p - 1);
      if (p < k) pt.r_hat = pp / (dbl(k) * dbl(k) - dbl(p));
      pt.r_tilde = pp / (dbl(k) * dbl(k + 1));
    } else if (std::holds_alternative<KingmanShape>(shape)) {
      if (p < k) {
        const EstimateReport g = kingman_gamma(k, p);
        pt.r_hat = *g.gamma_hat / (*g.gamma_hat + dbl(k));
      }
      pt.r_tilde = umvb_rational(1, k, p);
    } else {
      const double theta = t ? t->theta : std::numeric_limits<double>::infinity();
      pt.r_hat = r_from_n(mle_n(shape, k, p), theta, k, p);
      pt.r_tilde = r_from_n(umvb_n(shape, k, p), theta, k, p);
    }
    if (!pt.r_hat) out.skipped.push_back(k);
    if (!out.k_hat && pt.r_hat && *pt.r_hat < epsilon) out.k_hat = k;
    if (!out.k_tilde && pt.r_tilde && *pt.r_tilde < epsilon) out.k_tilde = k;
    out.points.push_back(pt);
  }
  return out;
}

}  // namespace dspecies
