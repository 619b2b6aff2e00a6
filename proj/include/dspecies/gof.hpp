#pragma once

// Expected species-vector counts alpha_i = E(A(i)), their UMVB and MLE
// estimates, Pearson statistics over the frequency spectrum, and the
// log-likelihood of an observed spectrum.
//
// Two formula variants are kept side by side. `paper` omits the C(k, i)
// multiplicity; `derived` is the moment computed from the sampling formula.
// Where they disagree the tests report which one matches simulation.

#include "dspecies/distributions.hpp"
#include "dspecies/numerics.hpp"
#include "dspecies/sampling.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dspecies {

enum class AlphaVariant { paper, derived };

std::string to_string(AlphaVariant v);
AlphaVariant alpha_variant_from_string(const std::string& s);

/// alpha_i under a fully specified model. paper: n i C(k,i) <theta>_{n,k-i;1}
/// (Kingman: k!/(i (k-i)!) gamma/(gamma+i-1)). derived:
/// n C(k,i) (theta)_i ((n-1)theta)_{k-i} / (n theta)_k and its limits.
double alpha_expected(const Model& model, Index k, Index i, AlphaVariant variant = AlphaVariant::paper);

/// Same with a real-valued n, as needed when n is an estimate.
double alpha_expected_real_n(double n, double theta, Index k, Index i, AlphaVariant variant);

/// E(A(i) | P). paper: (theta)_i/(i-1)! B_{k-i,P-1}/B_{k,P}. derived:
/// C(k,i) (theta)_i B_{k-i,P-1}/B_{k,P}. Zero when k - i < P - 1.
double alpha_umvb(double theta, Index k, Index p, Index i, AlphaVariant variant = AlphaVariant::paper);
/// All i = 1..k at once (entry i-1), sharing one Bell table.
std::vector<double> alpha_umvb_all(double theta, Index k, Index p, AlphaVariant variant);

/// Literal theta = 1 closed form without the multiplicity correction,
/// i P(P-1)/(k-i+1) (k-i-1)!(k-P)!/(k!(k-1)!), kept for comparison only.
double alpha_umvb_be_printed(Index k, Index p, Index i);

/// alpha at the estimated parameters: n-hat (theta known, or the MB limit)
/// or gamma-hat for Kingman. Entry i-1 holds alpha-hat_i.
std::vector<double> alpha_mle_all(const ConditionalModel& shape, Index k, Index p, AlphaVariant variant);

struct Chi2Result {
  double pooled = 0.0;
  std::optional<double> unpooled;  // absent when some expected count is zero
  Index cells = 0;                 // cells after pooling
  Index pooled_from = 0;           // first i of the right-tail cell
};

/// Pearson statistic of the spectrum against alphas (entry i-1 for
/// i = 1..k). Cells with expected count < 1 are pooled into the right tail.
Chi2Result chi2(const FrequencySpectrum& observed, const std::vector<double>& alphas);

/// Unpooled statistic; DomainError if any expected count is zero.
double chi2_unpooled(const FrequencySpectrum& observed, const std::vector<double>& alphas);

LogReal loglik(const Model& model, const FrequencySpectrum& observed);

struct GofReport {
  std::string model;
  std::string alpha_variant;
  Index k = 0;
  Index p = 0;
  std::optional<double> theta_input;
  std::optional<double> n_hat;
  std::optional<double> gamma_hat;
  std::vector<Index> observed;  // A(i), i = 1..k
  std::vector<double> alpha_umvb;
  std::vector<double> alpha_mle;
  std::optional<Chi2Result> chi2_umvb;
  std::optional<Chi2Result> chi2_mle;
  std::optional<double> loglik;  // at the fitted model
  std::string dof_note;
};

/// Fits the shape to the spectrum and returns both alpha estimates,
/// both chi-square statistics and the log-likelihood at the fit.
GofReport goodness_of_fit(const ConditionalModel& shape, const FrequencySpectrum& observed,
                          AlphaVariant variant = AlphaVariant::derived);

}  // namespace dspecies
