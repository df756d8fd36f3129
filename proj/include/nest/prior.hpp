#pragma once

#include "nest/random.hpp"

#include <string>
#include <variant>
#include <vector>

namespace nest {

struct NormalPrior
{
  double mean;
  double tau;
};

//! Point mass at zero with probability p0, otherwise N(mean, tau^2).
struct SparseMixPrior
{
  double p0;
  double mean;
  double tau;
};

//! Point mass at a with probability p0, otherwise at b.
struct TwoPointPrior
{
  double p0;
  double a;
  double b;
};

struct PointMassPrior
{
  double at;
};

using PriorSpec =
  std::variant<NormalPrior, SparseMixPrior, TwoPointPrior, PointMassPrior>;

//! One Gaussian component of a prior; sd == 0 denotes an atom.
struct MixtureComponent
{
  double weight;
  double mean;
  double sd;
};

//! Throws InvalidArgument for probabilities outside [0, 1] or tau <= 0.
void validate_prior(const PriorSpec& prior);

std::vector<MixtureComponent> mixture_components(const PriorSpec& prior);

double prior_mean(const PriorSpec& prior);
double prior_variance(const PriorSpec& prior);
double sample_prior(const PriorSpec& prior, Rng& rng);
std::string describe(const PriorSpec& prior);

//! Closed-form marginal of X ~ N(mu, sigma^2), mu ~ prior.
double marginal_pdf(const PriorSpec& prior, double x, double sigma);
//! d/dx of marginal_pdf.
double marginal_pdf_d1(const PriorSpec& prior, double x, double sigma);
//! P(X > t | sigma), computed with erfc for accuracy in the far tail.
double marginal_upper_tail(const PriorSpec& prior, double t, double sigma);

//! E(mu | x, sigma). Component responsibilities use log-sum-exp, so the
//! result stays finite for any finite x.
double posterior_mean(const PriorSpec& prior, double x, double sigma);

// Noise-level laws --------------------------------------------------------

struct UniformSigma
{
  double lo;
  double hi;
};

//! sigma = s1 with probability p1, else s2.
struct TwoValueSigma
{
  double s1;
  double s2;
  double p1;
};

using SigmaLaw = std::variant<UniformSigma, TwoValueSigma>;

double sample_sigma(const SigmaLaw& law, Rng& rng);
double sigma_second_moment(const SigmaLaw& law);
//! Population standard deviation of sigma under the law.
double sigma_sd(const SigmaLaw& law);
std::string describe(const SigmaLaw& law);
void validate_sigma_law(const SigmaLaw& law);

} // namespace nest
