#include "nest/expfam.hpp"

#include <cmath>
#include <string>

namespace nest::expfam {

namespace {

template <class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};

bool
is_integer(double v)
{
  return std::isfinite(v) && v == std::floor(v);
}

[[noreturn]] void
domain(const std::string& what)
{
  throw Error(ErrorCode::DomainError, what);
}

} // namespace

void
validate(const FamilyPoint& p)
{
  const double v = p.value;
  std::visit(overloaded{
               [&](const Binomial& b) {
                 if (b.n_trials < 1)
                   domain("binomial needs n_trials >= 1");
                 if (!is_integer(v) || v < 0 || v > b.n_trials)
                   domain("binomial count must be an integer in [0, n_trials]");
               },
               [&](const NegBinomial& nb) {
                 if (nb.r < 1)
                   domain("negative binomial needs r >= 1");
                 if (!is_integer(v) || v < 0)
                   domain("negative binomial count must be a nonnegative integer");
               },
               [&](const Gamma& g) {
                 if (!(g.alpha > 0.0) || !std::isfinite(g.alpha))
                   domain("gamma needs alpha > 0");
                 if (!(v > 0.0) || !std::isfinite(v))
                   domain("gamma observation must be positive");
               },
               [&](const Beta& b) {
                 if (!(b.beta > 0.0) || !std::isfinite(b.beta))
                   domain("beta needs beta > 0");
                 if (!(v < 0.0) || !std::isfinite(v))
                   domain("beta coordinate z = log x must be negative");
               } },
             p.family);
}

double
harmonic(long long m)
{
  double sum = 0.0;
  double comp = 0.0;
  for (long long k = 1; k <= m; ++k) {
    const double term = 1.0 / static_cast<double>(k);
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term))
      comp += (sum - t) + term;
    else
      comp += (term - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double
lh_prime(const FamilyPoint& p)
{
  validate(p);
  return std::visit(
    overloaded{
      [&](const Binomial& b) {
        const auto x = static_cast<long long>(p.value);
        return harmonic(x) + harmonic(b.n_trials - x) - 2.0 * kEulerGamma;
      },
      [&](const NegBinomial& nb) {
        if (nb.r == 1)
          return 0.0;
        const auto x = static_cast<long long>(p.value);
        // sum_{k=x+1}^{x+r-1} 1/k
        double sum = 0.0, comp = 0.0;
        for (long long k = x + 1; k <= x + nb.r - 1; ++k) {
          const double term = 1.0 / static_cast<double>(k);
          const double t = sum + term;
          comp += std::abs(sum) >= term ? (sum - t) + term : (term - t) + sum;
          sum = t;
        }
        return sum + comp;
      },
      [&](const Gamma& g) { return (1.0 - g.alpha) / p.value; },
      [&](const Beta& b) {
        const double x = std::exp(p.value);
        return (b.beta - 1.0) * x / (1.0 - x);
      } },
    p.family);
}

double
posterior_mean(const FamilyPoint& p, const ScoreEstimate& score)
{
  if (!std::isfinite(score.lf1))
    domain("marginal score must be finite");
  const double lh = lh_prime(p);
  return std::visit(
    overloaded{ [&](const Binomial&) { return lh + score.lf1; },
                [&](const NegBinomial&) { return score.lf1 + lh; },
                [&](const Gamma& g) { return (g.alpha - 1.0) / p.value - score.lf1; },
                [&](const Beta&) { return lh + score.lf1; } },
    p.family);
}

ScoreEstimate
discrete_lf1(std::span<const double> pmf, int x)
{
  const auto size = static_cast<int>(pmf.size());
  if (size < 2)
    throw Error(ErrorCode::DomainError, "pmf needs at least two support points");
  if (x < 0 || x >= size)
    throw Error(ErrorCode::DomainError, "x outside the pmf support");

  const int lo = x == 0 ? 0 : x - 1;
  const int hi = x == size - 1 ? size - 1 : x + 1;
  for (int k : { lo, x, hi })
    if (!(pmf[static_cast<std::size_t>(k)] > 0.0))
      throw Error(ErrorCode::ZeroMass,
                  "pmf has no mass at " + std::to_string(k),
                  static_cast<std::size_t>(k));
  const double diff = std::log(pmf[static_cast<std::size_t>(hi)]) -
                      std::log(pmf[static_cast<std::size_t>(lo)]);
  return ScoreEstimate{ diff / static_cast<double>(hi - lo) };
}

ScoreEstimate
weighted_kde_lf1(const KernelContext& ctx, double value, double theta)
{
  const DensityEval d = density_eval(ctx, value, theta);
  return ScoreEstimate{ d.f1 / d.f };
}

} // namespace nest::expfam
