#pragma once

#include "nest/kernel.hpp"

#include <span>
#include <variant>

namespace nest::expfam {

//! Euler-Mascheroni constant.
inline constexpr double kEulerGamma = 0.57721566490153286061;

struct Binomial
{
  int n_trials;
};

struct NegBinomial
{
  int r;
};

struct Gamma
{
  double alpha;
};

//! Data coordinate is z = log x with x in (0, 1).
struct Beta
{
  double beta;
};

using Family = std::variant<Binomial, NegBinomial, Gamma, Beta>;

//! An observation in the family's data coordinate: the count for Binomial
//! and NegBinomial, x > 0 for Gamma, z = log x < 0 for Beta.
struct FamilyPoint
{
  Family family;
  double value;
};

//! Estimate of d/dz log f(z), the marginal score in the data coordinate.
struct ScoreEstimate
{
  double lf1;
};

//! Throws DomainError for parameters or values outside the family support.
void validate(const FamilyPoint& p);

//! sum_{k=1}^{m} 1/k with Neumaier compensation; 0 for m <= 0.
double harmonic(long long m);

//! -l'_h for the family:
//!   Binomial     H_x + H_{n-x} - 2 gamma
//!   NegBinomial  sum_{k=x+1}^{x+r-1} 1/k  (0 when r = 1)
//!   Gamma        (1 - alpha) / x
//!   Beta         (beta - 1) x / (1 - x),  x = e^z
double lh_prime(const FamilyPoint& p);

//! Posterior mean of the natural-scale parameter:
//!   Binomial     E(log(p / (1 - p)) | x) = lh_prime + lf1
//!   NegBinomial  E(log p | x)            = lf1 + lh_prime
//!   Gamma        E(beta | x)             = (alpha - 1) / x - lf1
//!   Beta         E(alpha | z)            = (beta - 1) x / (1 - x) + lf1
double posterior_mean(const FamilyPoint& p, const ScoreEstimate& score);

//! Finite-difference surrogate for l'_f on an integer support 0..size-1:
//! central difference of log pmf in the interior, one-sided at the edges.
//! Throws ZeroMass when a pmf value it needs is not positive.
ScoreEstimate discrete_lf1(std::span<const double> pmf, int x);

//! Continuous-family provider: f1 / f from the weighted kernel estimator,
//! with the nuisance parameter theta in the role of sigma.
ScoreEstimate weighted_kde_lf1(const KernelContext& ctx, double value, double theta);

} // namespace nest::expfam
