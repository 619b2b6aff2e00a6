#include "dspecies/gof.hpp"

#include "dspecies/errors.hpp"
#include "dspecies/estimators.hpp"
#include "dspecies/stirling.hpp"

#include <cmath>
#include <limits>

namespace dspecies {

namespace {

double dbl(Index x) { return static_cast<double>(x); }

void check_i(Index k, Index i) {
  if (i < 1 || i > k) throw DomainError("alpha: requires 1 <= i <= k");
}

double kingman_alpha(double gamma, Index k, Index i, AlphaVariant variant) {
  const double lead = log_factorial(k) - log_factorial(k - i) - std::log(dbl(i)) + std::log(gamma);
  if (variant == AlphaVariant::paper) return std::exp(lead - std::log(gamma + dbl(i) - 1.0));
  // (gamma)_{k-i} / (gamma)_k = 1 / (gamma + k - i)_i
  return std::exp(lead - log_pochhammer(gamma + dbl(k - i), i).log());
}

// Column p_col, rows 0..k, of a triangular table T_{k+1,p} =
// c T_{k,p-1} + w(p, k) T_{k,p} with T_{0,0} = 1, in log form.
template <class StayWeight>
std::vector<double> log_triangle_column(Index k, Index p_col, double log_carry, StayWeight w) {
  std::vector<double> col(static_cast<std::size_t>(k) + 1, kNegInf);
  Eigen::VectorXd row = Eigen::VectorXd::Constant(p_col + 1, kNegInf);
  row(0) = 0.0;
  col[0] = row(p_col);
  for (Index kk = 0; kk < k; ++kk) {
    for (Index p = std::min(kk + 1, p_col); p >= 1; --p) {
      const double stay = row(p) == kNegInf ? kNegInf : row(p) + std::log(w(p, kk));
      row(p) = log_add(row(p - 1) + log_carry, stay);
    }
    row(0) = kNegInf;
    col[static_cast<std::size_t>(kk + 1)] = row(p_col);
  }
  return col;
}

std::vector<double> log_bell_column(double theta, Index k, Index p_col) {
  return log_triangle_column(k, p_col, std::log(theta),
                             [theta](Index p, Index kk) { return dbl(p) * theta + dbl(kk); });
}

}  // namespace

std::string to_string(AlphaVariant v) { return v == AlphaVariant::paper ? "paper" : "derived"; }

AlphaVariant alpha_variant_from_string(const std::string& s) {
  if (s == "paper") return AlphaVariant::paper;
  if (s == "derived") return AlphaVariant::derived;
  throw ValidationError("unknown alpha variant '" + s + "'");
}

double alpha_expected_real_n(double n, double theta, Index k, Index i, AlphaVariant variant) {
  check_i(k, i);
  if (!(n >= 1.0)) throw DomainError("alpha: requires n >= 1");
  if (!(theta > 0.0)) throw DomainError("alpha: theta must be positive");
  const Index rest = k - i;
  const bool single = n == 1.0;
  if (single && rest > 0) return 0.0;
  const bool mb = std::isinf(theta);
  if (variant == AlphaVariant::paper) {
    double lp = std::log(n) + std::log(dbl(i)) + log_binomial(k, i);
    if (!single && rest > 0)
      lp += mb ? dbl(rest) * std::log1p(-1.0 / n)
               : log_pochhammer_ratio((n - 1.0) * theta, n * theta, rest);
    return std::exp(lp);
  }
  double lp = std::log(n) + log_binomial(k, i);
  if (mb) {
    lp += -dbl(i) * std::log(n) + (single ? 0.0 : dbl(rest) * std::log1p(-1.0 / n));
  } else {
    lp += log_pochhammer_ratio(theta, n * theta, i);
    if (rest > 0) lp += log_pochhammer_ratio((n - 1.0) * theta, n * theta + dbl(i), rest);
  }
  return std::exp(lp);
}

double alpha_expected(const Model& model, Index k, Index i, AlphaVariant variant) {
  validate(model);
  check_i(k, i);
  if (const auto* m = std::get_if<KingmanModel>(&model)) return kingman_alpha(m->gamma, k, i, variant);
  if (const auto* m = std::get_if<DirichletModel>(&model))
    return alpha_expected_real_n(dbl(m->n), m->theta, k, i, variant);
  if (const auto* m = std::get_if<BoseEinsteinModel>(&model))
    return alpha_expected_real_n(dbl(m->n), 1.0, k, i, variant);
  const auto& m = std::get<MaxwellBoltzmannModel>(model);
  return alpha_expected_real_n(dbl(m.n), std::numeric_limits<double>::infinity(), k, i, variant);
}

std::vector<double> alpha_umvb_all(double theta, Index k, Index p, AlphaVariant variant) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("alpha_umvb: theta must be positive");
  if (p < 1 || p > k) throw DomainError("alpha_umvb: requires 1 <= P <= k");
  const std::vector<double> col = log_bell_column(theta, k, p - 1);
  const double log_bkp = log_bell_row(theta, k, p)(p);
  std::vector<double> out(static_cast<std::size_t>(k), 0.0);
  for (Index i = 1; i <= k; ++i) {
    const double b = col[static_cast<std::size_t>(k - i)];
    if (b == kNegInf) continue;
    const double lead = variant == AlphaVariant::paper ? -log_factorial(i - 1) : log_binomial(k, i);
    out[static_cast<std::size_t>(i - 1)] =
        std::exp(lead + log_pochhammer(theta, i).log() + b - log_bkp);
  }
  return out;
}

double alpha_umvb(double theta, Index k, Index p, Index i, AlphaVariant variant) {
  check_i(k, i);
  return alpha_umvb_all(theta, k, p, variant)[static_cast<std::size_t>(i - 1)];
}

double alpha_umvb_be_printed(Index k, Index p, Index i) {
  check_i(k, i);
  if (p < 1 || p > k) throw DomainError("alpha_umvb_be_printed: requires 1 <= P <= k");
  if (i == k || p == 1) return 0.0;  // (k-i-1)! or P(P-1) vanishes or is undefined
  return std::exp(std::log(dbl(i) * dbl(p) * dbl(p - 1) / dbl(k - i + 1)) + log_factorial(k - i - 1) +
                  log_factorial(k - p) - log_factorial(k) - log_factorial(k - 1));
}

namespace {

// E(A(i) | P) under the Maxwell-Boltzmann and Kingman limits.
std::vector<double> alpha_umvb_limit(bool kingman, Index k, Index p) {
  std::vector<double> out(static_cast<std::size_t>(k), 0.0);
  const double den = kingman ? log_stirling1_row(k, p)(p) : log_stirling2_row(k, p)(p);
  const std::vector<double> col =
      kingman ? log_triangle_column(k, p - 1, 0.0, [](Index, Index kk) { return dbl(kk); })
              : log_triangle_column(k, p - 1, 0.0, [](Index q, Index) { return dbl(q); });
  for (Index i = 1; i <= k; ++i) {
    const double num = col[static_cast<std::size_t>(k - i)];
    if (num == kNegInf) continue;
    const double lead = log_binomial(k, i) + (kingman ? log_factorial(i - 1) : 0.0);
    out[static_cast<std::size_t>(i - 1)] = std::exp(lead + num - den);
  }
  return out;
}

}  // namespace

std::vector<double> alpha_mle_all(const ConditionalModel& shape, Index k, Index p, AlphaVariant variant) {
  std::vector<double> out;
  if (std::holds_alternative<KingmanShape>(shape)) {
    const EstimateReport g = kingman_gamma(k, p);
    if (g.flag != EstimateFlag::none) return out;
    for (Index i = 1; i <= k; ++i) out.push_back(kingman_alpha(*g.gamma_hat, k, i, variant));
    return out;
  }
  const EstimateReport r = mle_n(shape, k, p);
  if (r.flag != EstimateFlag::none || !r.n_real) return out;
  const auto* t = std::get_if<ThetaShape>(&shape);
  const double theta = t ? t->theta : std::numeric_limits<double>::infinity();
  for (Index i = 1; i <= k; ++i) out.push_back(alpha_expected_real_n(*r.n_real, theta, k, i, variant));
  return out;
}

double chi2_unpooled(const FrequencySpectrum& observed, const std::vector<double>& alphas) {
  if (static_cast<Index>(alphas.size()) != observed.k())
    throw DomainError("chi2: need one expected count per i = 1..k");
  double s = 0.0;
  for (Index i = 1; i <= observed.k(); ++i) {
    const double e = alphas[static_cast<std::size_t>(i - 1)];
    if (!(e > 0.0)) throw DomainError("chi2: zero expected count at i = " + std::to_string(i));
    const double d = dbl(observed[i]) - e;
    s += d * d / e;
  }
  return s;
}

Chi2Result chi2(const FrequencySpectrum& observed, const std::vector<double>& alphas) {
  const Index k = observed.k();
  if (static_cast<Index>(alphas.size()) != k)
    throw DomainError("chi2: need one expected count per i = 1..k");
  for (double a : alphas)
    if (!(a >= 0.0)) throw DomainError("chi2: negative or NaN expected count");
  Chi2Result out;
  Index first_small = k + 1;
  for (Index i = 1; i <= k; ++i)
    if (alphas[static_cast<std::size_t>(i - 1)] < 1.0) {
      first_small = i;
      break;
    }
  double tail_e = 0.0;
  double tail_o = 0.0;
  for (Index i = first_small; i <= k; ++i) {
    tail_e += alphas[static_cast<std::size_t>(i - 1)];
    tail_o += dbl(observed[i]);
  }
  Index head_end = first_small - 1;  // cells 1..head_end stand alone
  while (first_small <= k && tail_e < 1.0 && head_end >= 1) {
    tail_e += alphas[static_cast<std::size_t>(head_end - 1)];
    tail_o += dbl(observed[head_end]);
    --head_end;
  }
  for (Index i = 1; i <= head_end; ++i) {
    const double e = alphas[static_cast<std::size_t>(i - 1)];
    const double d = dbl(observed[i]) - e;
    out.pooled += d * d / e;
    ++out.cells;
  }
  if (first_small <= k) {
    if (tail_e > 0.0) out.pooled += (tail_o - tail_e) * (tail_o - tail_e) / tail_e;
    ++out.cells;
    out.pooled_from = head_end + 1;
  }
  try {
    out.unpooled = chi2_unpooled(observed, alphas);
  } catch (const DomainError&) {
    out.unpooled.reset();
  }
  return out;
}

LogReal loglik(const Model& model, const FrequencySpectrum& observed) { return esf2_logpmf(model, observed); }

GofReport goodness_of_fit(const ConditionalModel& shape, const FrequencySpectrum& observed,
                          AlphaVariant variant) {
  GofReport rep;
  rep.alpha_variant = to_string(variant);
  rep.k = observed.k();
  rep.p = observed.p();
  rep.dof_note = "raw statistics; no reference distribution or degrees of freedom assigned";
  for (Index i = 1; i <= rep.k; ++i) rep.observed.push_back(observed[i]);

  const Index k = rep.k;
  const Index p = rep.p;
  std::optional<Model> fitted;
  if (const auto* t = std::get_if<ThetaShape>(&shape)) {
    rep.model = t->theta == 1.0 ? "bose-einstein" : "dirichlet";
    rep.theta_input = t->theta;
    rep.alpha_umvb = alpha_umvb_all(t->theta, k, p, variant);
    const EstimateReport r = mle_n(shape, k, p);
    if (r.flag == EstimateFlag::none) {
      rep.n_hat = r.n_real;
      fitted = t->theta == 1.0 ? Model{BoseEinsteinModel{*r.n_floor}}
                               : Model{DirichletModel{*r.n_floor, t->theta}};
    }
  } else if (std::holds_alternative<MaxwellBoltzmannShape>(shape)) {
    rep.model = "maxwell-boltzmann";
    rep.alpha_umvb = alpha_umvb_limit(false, k, p);
    const EstimateReport r = mle_n(shape, k, p);
    if (r.flag == EstimateFlag::none) {
      rep.n_hat = r.n_real;
      fitted = Model{MaxwellBoltzmannModel{*r.n_floor}};
    }
  } else {
    rep.model = "kingman";
    rep.alpha_umvb = alpha_umvb_limit(true, k, p);
    const EstimateReport g = kingman_gamma(k, p);
    if (g.flag == EstimateFlag::none) {
      rep.gamma_hat = g.gamma_hat;
      fitted = Model{KingmanModel{*g.gamma_hat}};
    }
  }
  rep.alpha_mle = alpha_mle_all(shape, k, p, variant);
  rep.chi2_umvb = chi2(observed, rep.alpha_umvb);
  if (!rep.alpha_mle.empty()) rep.chi2_mle = chi2(observed, rep.alpha_mle);
  if (fitted) rep.loglik = loglik(*fitted, observed).log();
  return rep;
}

}  // namespace dspecies
