#pragma once

// Exact sampling-formula probabilities for k throws on a symmetric
// Dirichlet partition and its Bose-Einstein (theta = 1), Maxwell-Boltzmann
// (theta -> infinity) and Kingman (n -> infinity, n theta = gamma) cases.
// Everything is returned in log form.

#include "dspecies/numerics.hpp"
#include "dspecies/sampling.hpp"

#include <Eigen/Core>

#include <string>
#include <variant>

namespace dspecies {

struct DirichletModel {
  Index n;
  double theta;
};
struct BoseEinsteinModel {
  Index n;
};
struct MaxwellBoltzmannModel {
  Index n;
};
struct KingmanModel {
  double gamma;
};

using Model = std::variant<DirichletModel, BoseEinsteinModel, MaxwellBoltzmannModel, KingmanModel>;

/// Throws DomainError for nonpositive parameters.
void validate(const Model& model);
std::string describe(const Model& model);
bool is_finite_n(const Model& model);

// The laws conditional on P do not depend on n; they are indexed by theta
// alone, or by one of the two limits.
struct ThetaShape {
  double theta;
};
struct MaxwellBoltzmannShape {};
struct KingmanShape {};

using ConditionalModel = std::variant<ThetaShape, MaxwellBoltzmannShape, KingmanShape>;

/// Multinomial-Dirichlet law of the full occupancy vector.
/// Kingman has no finite occupancy vector: UnsupportedModelError.
LogReal occupancy_logpmf(const Model& model, const OccupancyVector& occupancy);

/// Joint law of the labelled positive counts (B_1..B_p) and P = p.
LogReal esf1_logpmf(const Model& model, const SpeciesCounts& b);

/// Joint law of the species vector count (A(1)..A(k)) and P = p.
LogReal esf2_logpmf(const Model& model, const FrequencySpectrum& a);

enum class PMethod {
  automatic,    // bell for Dirichlet, closed forms for the special cases
  bell,         // n!/(n-p)! B_{k,p}(theta) / (n theta)_k
  alternating,  // signed sum over q; refused above 40 or on cancellation
  special,      // Bose-Einstein, Maxwell-Boltzmann, Kingman closed forms
};

inline constexpr Index kAlternatingLimit = 40;

/// log P(P_{n,k} = p). Zero outside the support.
LogReal p_logpmf(const Model& model, Index k, Index p, PMethod method = PMethod::automatic);

/// Linear pmf of P_{n,k} over p = 0..k.
Eigen::VectorXd p_pmf(const Model& model, Index k);

/// Distribution of P at sample size k + 1 from the one at k (indexed by
/// p = 0..k; the result has k + 2 entries).
Eigen::VectorXd p_recursion_step(const Model& model, Index k, const Eigen::VectorXd& pmf_k);

/// Laws of B and A given P = p (n does not enter).
LogReal conditional_esf1_logpmf(const ConditionalModel& model, const SpeciesCounts& b);
LogReal conditional_esf2_logpmf(const ConditionalModel& model, const FrequencySpectrum& a);

enum class Succession { new_species, seen };

/// Probability that draw k + 1 is a new species, or one already seen
/// `b_r` times, given p species seen in k draws.
double succession_probability(const Model& model, Index k, Index p, Succession event,
                              Index b_r = 0);

}  // namespace dspecies
