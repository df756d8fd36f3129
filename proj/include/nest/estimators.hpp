#pragma once

#include "nest/data.hpp"
#include "nest/kernel.hpp"
#include "nest/prior.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace nest {

namespace method {

struct Naive
{};

//! Posterior mean under a known prior.
struct Oracle
{
  PriorSpec prior;
};

//! Weighted two-dimensional kernel rule x + sigma^2 f'/f.
struct Nest
{
  Bandwidths bw;
  //! Leave observation i out of its own density estimate.
  bool jackknife = false;
};

//! Homoscedastic Tweedie rule with a pooled KDE of bandwidth h (x units).
struct Tf
{
  double h;
};

//! Tweedie rule on the standardized data x / sigma, bandwidth h in
//! standardized units, mapped back by sigma.
struct Scaled
{
  double h;
};

//! Tf applied within k sigma-quantile groups, one bandwidth per group.
struct KGroups
{
  int k;
  std::vector<double> h_per_group;
};

} // namespace method

using Method = std::variant<method::Naive,
                            method::Oracle,
                            method::Nest,
                            method::Tf,
                            method::Scaled,
                            method::KGroups>;

struct EstimatorSpec
{
  Method method;
  std::optional<double> truncation_bound;
  bool stabilize_sign = false;
};

std::string method_name(const Method& m);

//! Dispatches on the method, then applies truncation and sign
//! stabilization in that order when configured.
Eigen::VectorXd estimate(const EstimatorSpec& spec, const HeteroSample& sample);

//! x + sigma^2 f1 / f with (f, f1) from density_eval (floor applied).
double nest_point(const KernelContext& ctx, double x, double sigma);

double oracle_posterior_mean(const PriorSpec& prior, double x, double sigma);

//! x + sigma^2 f'(x) / f(x) for the pooled KDE of `kde`; the query's own
//! sigma multiplies the pooled score.
double tf_point(const PooledKde& kde, double x, double sigma);
double tf_point(const Eigen::VectorXd& train_x, double h, double x, double sigma);

//! Unit-variance Tweedie rule applied to x / sigma against the standardized
//! training points, rescaled by sigma.
double scaled_point(const PooledKde& standardized, double x, double sigma);
double scaled_point(const HeteroSample& train, double h, double x, double sigma);

//! Standardized training points x_j / sigma_j.
Eigen::VectorXd standardize(const HeteroSample& sample);

struct KGroupsFit
{
  //! Group of each observation, 0 = smallest sigma.
  std::vector<int> group_of;
  //! Members of each group, in original index order.
  std::vector<std::vector<Index>> members;
  //! Training x of each group (the pooled KDE input).
  std::vector<Eigen::VectorXd> train_x;
};

//! Contiguous sigma-quantile blocks of near-equal size; ties in sigma are
//! broken by original index. Throws BadGroupCount unless 1 <= k <= n.
KGroupsFit k_groups_fit(const HeteroSample& sample, int k);

//! Clips every estimate to [-bound, bound].
Eigen::VectorXd truncate_estimates(const Eigen::VectorXd& mu_hat, double bound);

//! Default truncation bound K log n.
double default_truncation_bound(Index n, double K = 2.0);

//! mu_hat_i if sign(x_i) == sign(mu_hat_i), else 0; sign(0) = 0.
Eigen::VectorXd stabilize_sign(const Eigen::VectorXd& x, const Eigen::VectorXd& mu_hat);

} // namespace nest
