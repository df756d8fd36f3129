#pragma once

#include "nest/pipeline.hpp"
#include "nest/prior.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace nest {

//! Fully determines one simulation cell.
struct SimScenario
{
  std::string id;
  PriorSpec prior;
  SigmaLaw sigma_law;
  Index n = 1000;
  int reps = 10;
  std::uint64_t seed = 0;
};

void validate_scenario(const SimScenario& s);

//! var(mu)/var(X) for a table label var(mu)/E var(X|mu) = kappa.
inline double
ratio_from_label(double kappa)
{
  return kappa / (1.0 + kappa);
}

//! Solves var(mu) = ratio (var(mu) + E sigma^2) for the upper end of
//! sigma ~ U[lo, sigma_M]. Throws NoFeasibleRoot when the implied E sigma^2
//! cannot be reached with sigma_M > lo.
double solve_sigma_M(const PriorSpec& prior, double ratio, double lo = 0.1);

//! Scenario with sigma ~ U[lo, solve_sigma_M(prior, ratio, lo)].
SimScenario calibrated_scenario(std::string id,
                                PriorSpec prior,
                                double ratio,
                                Index n,
                                int reps,
                                std::uint64_t seed,
                                double lo = 0.1);

//! Draws mu_i from the prior, sigma_i from the sigma law and
//! X_i ~ N(mu_i, sigma_i^2). Deterministic in (seed, rep).
HeteroSample draw_scenario(const SimScenario& s, int rep);

struct MseRow
{
  std::string name;
  double mse = 0.0;
  double se = 0.0;
  int reps = 0;
  //! Per-rep MSE, in rep order (for paired comparisons).
  std::vector<double> per_rep;
};

struct MseTable
{
  std::string scenario_id;
  Index n = 0;
  int reps = 0;
  std::vector<MseRow> rows;

  //! Throws InvalidArgument when no row has that name.
  const MseRow& row(const std::string& name) const;
};

//! Called after each finished rep with (rep, reps); may be empty.
using ProgressFn = std::function<void(int, int)>;

//! For every rep: draw, tune each kernel method by SURE on that rep, estimate,
//! and record mean_i (mu_hat_i - mu_i)^2. Rows report the across-rep mean and
//! its standard error. Reps run in parallel on config.threads workers.
MseTable run_mse_study(const SimScenario& s,
                       const std::vector<MethodRequest>& methods,
                       const TuningConfig& config,
                       const ProgressFn& progress = {});

// Selection bias -----------------------------------------------------------

//! sigma^2 f_sigma(t) / (1 - F_sigma(t)) from the closed-form marginal.
//! Throws ZeroTailMass when P(X > t) underflows.
double selection_bias_formula(double t, double sigma, const PriorSpec& prior);

enum class BiasSetting
{
  //! mu ~ N(1, 0.5^2); sigma = 1 w.p. 0.7, else 3.
  SingleCenter,
  //! Group 1 (w.p. 0.7): sigma = 1, mu ~ N(0, 0.5^2);
  //! group 2: sigma = 3, mu ~ N(5, 0.5^2).
  TwoCenter
};

std::string to_string(BiasSetting s);

struct BiasConfig
{
  BiasSetting setting = BiasSetting::SingleCenter;
  Index n = 5000;
  int reps = 200;
  int select_k = 20;
  std::uint64_t seed = 0;
};

HeteroSample draw_bias_sample(BiasSetting setting, Index n, std::uint64_t seed);

struct BiasSeries
{
  std::string estimator;
  std::vector<int> rep;
  //! mu_hat - mu for the selected observations.
  std::vector<double> diff;
};

struct BiasExperimentResult
{
  std::string selection;
  std::vector<BiasSeries> series;

  const BiasSeries& get(const std::string& estimator) const;
};

//! For every rep: draw, estimate with Naive, TF and NEST (SURE-tuned), and
//! record mu_hat - mu on the select_k smallest X.
BiasExperimentResult run_bias_experiment(const BiasConfig& config,
                                         const TuningConfig& tuning,
                                         const ProgressFn& progress = {});

//! Average shrinkage of the pooled Tweedie rule on two-group Gaussian data:
//!   (mu0 - x) sigma_g^2 { w / v1^2 + (1 - w) / v2^2 },
//! v_g^2 = tau^2 + sigma_g^2, w = p phi_{v1}(x - mu0) /
//! (p phi_{v1}(x - mu0) + (1 - p) phi_{v2}(x - mu0)); sigma_g is the
//! point's own noise level.
double tf_average_shrinkage(double x,
                            double mu0,
                            double tau,
                            double sigma1,
                            double sigma2,
                            double p,
                            double sigma_g);

} // namespace nest
