#include "nest/prior.hpp"
#include "nest/error.hpp"
#include "nest/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace nest {

namespace {

template <class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};

bool
is_probability(double p)
{
  return p >= 0.0 && p <= 1.0;
}

double
log_normal_pdf(double z, double sd)
{
  const double u = z / sd;
  return -0.5 * u * u - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

} // namespace

void
validate_prior(const PriorSpec& prior)
{
  const bool ok = std::visit(
    overloaded{
      [](const NormalPrior& p) { return std::isfinite(p.mean) && p.tau > 0.0; },
      [](const SparseMixPrior& p) {
        return is_probability(p.p0) && std::isfinite(p.mean) && p.tau > 0.0;
      },
      [](const TwoPointPrior& p) {
        return is_probability(p.p0) && std::isfinite(p.a) && std::isfinite(p.b);
      },
      [](const PointMassPrior& p) { return std::isfinite(p.at); } },
    prior);
  if (!ok)
    throw Error(ErrorCode::InvalidArgument, "invalid prior " + describe(prior));
}

std::vector<MixtureComponent>
mixture_components(const PriorSpec& prior)
{
  return std::visit(
    overloaded{
      [](const NormalPrior& p) {
        return std::vector<MixtureComponent>{ { 1.0, p.mean, p.tau } };
      },
      [](const SparseMixPrior& p) {
        return std::vector<MixtureComponent>{ { p.p0, 0.0, 0.0 },
                                              { 1.0 - p.p0, p.mean, p.tau } };
      },
      [](const TwoPointPrior& p) {
        return std::vector<MixtureComponent>{ { p.p0, p.a, 0.0 },
                                              { 1.0 - p.p0, p.b, 0.0 } };
      },
      [](const PointMassPrior& p) {
        return std::vector<MixtureComponent>{ { 1.0, p.at, 0.0 } };
      } },
    prior);
}

double
prior_mean(const PriorSpec& prior)
{
  double m = 0.0;
  for (const auto& c : mixture_components(prior))
    m += c.weight * c.mean;
  return m;
}

double
prior_variance(const PriorSpec& prior)
{
  // Closed forms: tau^2; p1 (tau^2 + m^2) - (p1 m)^2; p0 p1 (b - a)^2; 0.
  const double m = prior_mean(prior);
  double second = 0.0;
  for (const auto& c : mixture_components(prior))
    second += c.weight * (c.sd * c.sd + c.mean * c.mean);
  return std::max(0.0, second - m * m);
}

double
sample_prior(const PriorSpec& prior, Rng& rng)
{
  return std::visit(
    overloaded{
      [&](const NormalPrior& p) { return rng.normal(p.mean, p.tau); },
      [&](const SparseMixPrior& p) {
        return rng.bernoulli(p.p0) ? 0.0 : rng.normal(p.mean, p.tau);
      },
      [&](const TwoPointPrior& p) { return rng.bernoulli(p.p0) ? p.a : p.b; },
      [&](const PointMassPrior& p) { return p.at; } },
    prior);
}

std::string
describe(const PriorSpec& prior)
{
  std::ostringstream os;
  std::visit(overloaded{
               [&](const NormalPrior& p) {
                 os << "normal(" << p.mean << "," << p.tau << ")";
               },
               [&](const SparseMixPrior& p) {
                 os << "sparse(" << p.p0 << "," << p.mean << "," << p.tau << ")";
               },
               [&](const TwoPointPrior& p) {
                 os << "twopoint(" << p.p0 << "," << p.a << "," << p.b << ")";
               },
               [&](const PointMassPrior& p) { os << "pointmass(" << p.at << ")"; } },
             prior);
  return os.str();
}

double
marginal_pdf(const PriorSpec& prior, double x, double sigma)
{
  double f = 0.0;
  for (const auto& c : mixture_components(prior))
    f += c.weight * gaussian_kernel(x - c.mean, std::hypot(c.sd, sigma));
  return f;
}

double
marginal_pdf_d1(const PriorSpec& prior, double x, double sigma)
{
  double d = 0.0;
  for (const auto& c : mixture_components(prior)) {
    const double v = std::hypot(c.sd, sigma);
    d += c.weight * gaussian_kernel(x - c.mean, v) * (c.mean - x) / (v * v);
  }
  return d;
}

double
marginal_upper_tail(const PriorSpec& prior, double t, double sigma)
{
  double tail = 0.0;
  for (const auto& c : mixture_components(prior)) {
    const double v = std::hypot(c.sd, sigma);
    tail += c.weight * 0.5 * std::erfc((t - c.mean) / (v * std::numbers::sqrt2));
  }
  return tail;
}

double
posterior_mean(const PriorSpec& prior, double x, double sigma)
{
  const auto comps = mixture_components(prior);
  std::vector<double> logw(comps.size(), -INFINITY);
  double top = -INFINITY;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    if (comps[k].weight <= 0.0)
      continue;
    const double v = std::hypot(comps[k].sd, sigma);
    logw[k] = std::log(comps[k].weight) + log_normal_pdf(x - comps[k].mean, v);
    top = std::max(top, logw[k]);
  }

  const double s2 = sigma * sigma;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    if (comps[k].weight <= 0.0)
      continue;
    const double r = std::exp(logw[k] - top);
    const double t2 = comps[k].sd * comps[k].sd;
    num += r * (t2 * x + s2 * comps[k].mean) / (t2 + s2);
    den += r;
  }
  return num / den;
}

double
sample_sigma(const SigmaLaw& law, Rng& rng)
{
  return std::visit(
    overloaded{ [&](const UniformSigma& u) { return rng.uniform(u.lo, u.hi); },
                [&](const TwoValueSigma& v) { return rng.bernoulli(v.p1) ? v.s1 : v.s2; } },
    law);
}

double
sigma_second_moment(const SigmaLaw& law)
{
  return std::visit(
    overloaded{ [](const UniformSigma& u) {
                 return (u.lo * u.lo + u.lo * u.hi + u.hi * u.hi) / 3.0;
               },
                [](const TwoValueSigma& v) {
                  return v.p1 * v.s1 * v.s1 + (1.0 - v.p1) * v.s2 * v.s2;
                } },
    law);
}

double
sigma_sd(const SigmaLaw& law)
{
  return std::visit(
    overloaded{ [](const UniformSigma& u) { return (u.hi - u.lo) / std::sqrt(12.0); },
                [](const TwoValueSigma& v) {
                  return std::abs(v.s1 - v.s2) * std::sqrt(v.p1 * (1.0 - v.p1));
                } },
    law);
}

void
validate_sigma_law(const SigmaLaw& law)
{
  const bool ok = std::visit(
    overloaded{ [](const UniformSigma& u) { return u.lo > 0.0 && u.hi > u.lo && std::isfinite(u.hi); },
                [](const TwoValueSigma& v) {
                  return v.s1 > 0.0 && v.s2 > 0.0 && is_probability(v.p1);
                } },
    law);
  if (!ok)
    throw Error(ErrorCode::InvalidArgument, "invalid sigma law " + describe(law));
}

std::string
describe(const SigmaLaw& law)
{
  std::ostringstream os;
  std::visit(overloaded{ [&](const UniformSigma& u) {
                          os << "uniform(" << u.lo << "," << u.hi << ")";
                        },
                         [&](const TwoValueSigma& v) {
                           os << "twovalue(" << v.s1 << "," << v.s2 << "," << v.p1 << ")";
                         } },
             law);
  return os.str();
}

} // namespace nest
