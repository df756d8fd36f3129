#include "nest/sim.hpp"
#include "nest/parallel.hpp"
#include "nest/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace nest {

void
validate_scenario(const SimScenario& s)
{
  validate_prior(s.prior);
  validate_sigma_law(s.sigma_law);
  if (s.n < 1)
    throw Error(ErrorCode::InvalidArgument, "scenario needs n >= 1");
  if (s.reps < 1)
    throw Error(ErrorCode::InvalidArgument, "scenario needs reps >= 1");
}

double
solve_sigma_M(const PriorSpec& prior, double ratio, double lo)
{
  if (!(ratio > 0.0 && ratio < 1.0))
    throw Error(ErrorCode::InvalidArgument, "variance ratio must lie in (0, 1)");
  if (!(lo > 0.0))
    throw Error(ErrorCode::InvalidArgument, "sigma lower bound must be positive");
  const double var_mu = prior_variance(prior);
  const double target = var_mu * (1.0 - ratio) / ratio; // E sigma^2
  if (!(target > lo * lo))
    throw Error(ErrorCode::NoFeasibleRoot,
                "variance ratio " + std::to_string(ratio) +
                  " needs E sigma^2 <= lo^2; no sigma_M > lo exists");
  // sigma_M^2 + lo sigma_M + lo^2 - 3 target = 0, positive root.
  return 0.5 * (-lo + std::sqrt(12.0 * target - 3.0 * lo * lo));
}

SimScenario
calibrated_scenario(std::string id,
                    PriorSpec prior,
                    double ratio,
                    Index n,
                    int reps,
                    std::uint64_t seed,
                    double lo)
{
  SimScenario s;
  s.id = std::move(id);
  s.sigma_law = UniformSigma{ lo, solve_sigma_M(prior, ratio, lo) };
  s.prior = std::move(prior);
  s.n = n;
  s.reps = reps;
  s.seed = seed;
  validate_scenario(s);
  return s;
}

HeteroSample
draw_scenario(const SimScenario& s, int rep)
{
  validate_scenario(s);
  Rng rng(derive_seed(s.seed, static_cast<std::uint64_t>(rep)));
  Eigen::VectorXd x(s.n), sigma(s.n), mu(s.n);
  for (Index i = 0; i < s.n; ++i) {
    mu(i) = sample_prior(s.prior, rng);
    sigma(i) = sample_sigma(s.sigma_law, rng);
    x(i) = mu(i) + sigma(i) * rng.normal();
  }
  return validate_sample(std::move(x), std::move(sigma), std::move(mu));
}

const MseRow&
MseTable::row(const std::string& name) const
{
  for (const auto& r : rows)
    if (r.name == name)
      return r;
  throw Error(ErrorCode::InvalidArgument, "no MSE row named '" + name + "'");
}

MseTable
run_mse_study(const SimScenario& s,
              const std::vector<MethodRequest>& methods,
              const TuningConfig& config,
              const ProgressFn& progress)
{
  validate_scenario(s);
  const auto nm = methods.size();
  const auto reps = static_cast<std::size_t>(s.reps);
  std::vector<double> mse(nm * reps, 0.0);

  TuningConfig inner = config;
  inner.threads = 1;
  parallel_for(s.reps, resolve_threads(config.threads), [&](std::ptrdiff_t rep) {
    const HeteroSample sample = draw_scenario(s, static_cast<int>(rep));
    const auto& mu = *sample.mu_true();
    for (std::size_t m = 0; m < nm; ++m) {
      try {
        const FittedMethod fit = fit_method(methods[m], sample, inner,
                                            derive_seed(s.seed, static_cast<std::uint64_t>(rep), 1),
                                            s.prior);
        mse[m * reps + static_cast<std::size_t>(rep)] =
          (fit.mu_hat - mu).squaredNorm() / static_cast<double>(s.n);
      } catch (const Error& e) {
        throw Error(e.code(),
                    std::string(e.what()) + " [scenario " + s.id + ", rep " +
                      std::to_string(rep) + ", method " + methods[m].label() + "]");
      }
    }
    if (progress)
      progress(static_cast<int>(rep), s.reps);
  });

  MseTable table;
  table.scenario_id = s.id;
  table.n = s.n;
  table.reps = s.reps;
  for (std::size_t m = 0; m < nm; ++m) {
    MseRow row;
    row.name = methods[m].label();
    row.per_rep.assign(mse.begin() + static_cast<std::ptrdiff_t>(m * reps),
                       mse.begin() + static_cast<std::ptrdiff_t>((m + 1) * reps));
    const MeanSe summary = mean_se(row.per_rep);
    row.mse = summary.mean;
    row.se = summary.se;
    row.reps = s.reps;
    table.rows.push_back(std::move(row));
  }
  return table;
}

// Selection bias -----------------------------------------------------------

double
selection_bias_formula(double t, double sigma, const PriorSpec& prior)
{
  if (!(sigma > 0.0))
    throw Error(ErrorCode::NonPositiveSigma, "sigma must be positive");
  validate_prior(prior);
  const double tail = marginal_upper_tail(prior, t, sigma);
  if (!(tail > 0.0))
    throw Error(ErrorCode::ZeroTailMass, "P(X > t) is zero at t = " + std::to_string(t));
  return sigma * sigma * marginal_pdf(prior, t, sigma) / tail;
}

std::string
to_string(BiasSetting s)
{
  return s == BiasSetting::SingleCenter ? "single-center" : "two-center";
}

HeteroSample
draw_bias_sample(BiasSetting setting, Index n, std::uint64_t seed)
{
  Rng rng(seed);
  Eigen::VectorXd x(n), sigma(n), mu(n);
  for (Index i = 0; i < n; ++i) {
    const bool first = rng.bernoulli(0.7);
    sigma(i) = first ? 1.0 : 3.0;
    if (setting == BiasSetting::SingleCenter)
      mu(i) = rng.normal(1.0, 0.5);
    else
      mu(i) = rng.normal(first ? 0.0 : 5.0, 0.5);
    x(i) = mu(i) + sigma(i) * rng.normal();
  }
  return validate_sample(std::move(x), std::move(sigma), std::move(mu));
}

const BiasSeries&
BiasExperimentResult::get(const std::string& estimator) const
{
  for (const auto& s : series)
    if (s.estimator == estimator)
      return s;
  throw Error(ErrorCode::InvalidArgument, "no bias series named '" + estimator + "'");
}

BiasExperimentResult
run_bias_experiment(const BiasConfig& config, const TuningConfig& tuning, const ProgressFn& progress)
{
  if (config.reps < 1 || config.select_k < 1 || config.select_k > config.n)
    throw Error(ErrorCode::InvalidArgument, "invalid bias experiment configuration");

  const std::vector<MethodRequest> methods{ { MethodKind::Naive },
                                            { MethodKind::Tf },
                                            { MethodKind::Nest } };
  const auto k = static_cast<std::size_t>(config.select_k);
  const auto reps = static_cast<std::size_t>(config.reps);
  std::vector<double> diffs(methods.size() * reps * k);

  TuningConfig inner = tuning;
  inner.threads = 1;
  parallel_for(config.reps, resolve_threads(tuning.threads), [&](std::ptrdiff_t rep) {
    const auto r = static_cast<std::uint64_t>(rep);
    const HeteroSample sample = draw_bias_sample(config.setting, config.n,
                                                 derive_seed(config.seed, r));
    std::vector<Index> order(static_cast<std::size_t>(config.n));
    std::iota(order.begin(), order.end(), Index{ 0 });
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](Index a, Index b) {
                        const double xa = sample.x()(a), xb = sample.x()(b);
                        return xa < xb || (xa == xb && a < b);
                      });
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const FittedMethod fit = fit_method(methods[m], sample, inner, derive_seed(config.seed, r, 1));
      for (std::size_t q = 0; q < k; ++q) {
        const Index i = order[q];
        diffs[(m * reps + static_cast<std::size_t>(rep)) * k + q] =
          fit.mu_hat(i) - (*sample.mu_true())(i);
      }
    }
    if (progress)
      progress(static_cast<int>(rep), config.reps);
  });

  BiasExperimentResult out;
  out.selection = std::to_string(config.select_k) + " smallest X per rep, " +
                  std::to_string(config.reps) + " reps, n = " + std::to_string(config.n) +
                  ", " + to_string(config.setting);
  for (std::size_t m = 0; m < methods.size(); ++m) {
    BiasSeries s;
    s.estimator = methods[m].label();
    for (std::size_t rep = 0; rep < reps; ++rep)
      for (std::size_t q = 0; q < k; ++q) {
        s.rep.push_back(static_cast<int>(rep));
        s.diff.push_back(diffs[(m * reps + rep) * k + q]);
      }
    out.series.push_back(std::move(s));
  }
  return out;
}

double
tf_average_shrinkage(double x,
                     double mu0,
                     double tau,
                     double sigma1,
                     double sigma2,
                     double p,
                     double sigma_g)
{
  const double v1 = std::hypot(tau, sigma1);
  const double v2 = std::hypot(tau, sigma2);
  const double a = p * gaussian_kernel(x - mu0, v1);
  const double b = (1.0 - p) * gaussian_kernel(x - mu0, v2);
  const double w = a + b > 0.0 ? a / (a + b) : (v1 >= v2 ? 1.0 : 0.0);
  return (mu0 - x) * sigma_g * sigma_g * (w / (v1 * v1) + (1.0 - w) / (v2 * v2));
}

} // namespace nest
