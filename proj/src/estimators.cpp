#include "nest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace nest {

namespace {

template <class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};

int
sign_of(double v)
{
  return (v > 0.0) - (v < 0.0);
}

Eigen::VectorXd
estimate_nest(const method::Nest& m, const HeteroSample& sample)
{
  const KernelContext ctx(sample.without_truth(), m.bw);
  Eigen::VectorXd out(sample.size());
  for (Index i = 0; i < sample.size(); ++i) {
    const double x = sample.x()(i);
    const double s = sample.sigma()(i);
    if (m.jackknife) {
      const DensityEval d = density_eval_excluding(ctx, x, s, i);
      out(i) = x + s * s * d.f1 / d.f;
    } else {
      out(i) = nest_point(ctx, x, s);
    }
  }
  return out;
}

Eigen::VectorXd
estimate_k_groups(const method::KGroups& m, const HeteroSample& sample)
{
  const KGroupsFit fit = k_groups_fit(sample, m.k);
  if (m.h_per_group.size() != static_cast<std::size_t>(m.k))
    throw Error(ErrorCode::InvalidArgument,
                "k-groups needs one bandwidth per group (" + std::to_string(m.k) +
                  "), got " + std::to_string(m.h_per_group.size()));
  Eigen::VectorXd out(sample.size());
  for (std::size_t g = 0; g < fit.members.size(); ++g) {
    const PooledKde kde(fit.train_x[g], m.h_per_group[g]);
    for (Index i : fit.members[g])
      out(i) = tf_point(kde, sample.x()(i), sample.sigma()(i));
  }
  return out;
}

} // namespace

std::string
method_name(const Method& m)
{
  return std::visit(
    overloaded{ [](const method::Naive&) { return std::string("Naive"); },
                [](const method::Oracle&) { return std::string("Oracle"); },
                [](const method::Nest&) { return std::string("NEST"); },
                [](const method::Tf&) { return std::string("TF"); },
                [](const method::Scaled&) { return std::string("Scaled"); },
                [](const method::KGroups& g) {
                  return std::to_string(g.k) + "-Groups";
                } },
    m);
}

Eigen::VectorXd
estimate(const EstimatorSpec& spec, const HeteroSample& sample)
{
  Eigen::VectorXd mu_hat = std::visit(
    overloaded{
      [&](const method::Naive&) { return Eigen::VectorXd(sample.x()); },
      [&](const method::Oracle& m) {
        validate_prior(m.prior);
        Eigen::VectorXd out(sample.size());
        for (Index i = 0; i < sample.size(); ++i)
          out(i) = oracle_posterior_mean(m.prior, sample.x()(i), sample.sigma()(i));
        return out;
      },
      [&](const method::Nest& m) { return estimate_nest(m, sample); },
      [&](const method::Tf& m) {
        const PooledKde kde(sample.x(), m.h);
        Eigen::VectorXd out(sample.size());
        for (Index i = 0; i < sample.size(); ++i)
          out(i) = tf_point(kde, sample.x()(i), sample.sigma()(i));
        return out;
      },
      [&](const method::Scaled& m) {
        const PooledKde kde(standardize(sample), m.h);
        Eigen::VectorXd out(sample.size());
        for (Index i = 0; i < sample.size(); ++i)
          out(i) = scaled_point(kde, sample.x()(i), sample.sigma()(i));
        return out;
      },
      [&](const method::KGroups& m) { return estimate_k_groups(m, sample); } },
    spec.method);

  if (spec.truncation_bound)
    mu_hat = truncate_estimates(mu_hat, *spec.truncation_bound);
  if (spec.stabilize_sign)
    mu_hat = stabilize_sign(sample.x(), mu_hat);
  return mu_hat;
}

double
nest_point(const KernelContext& ctx, double x, double sigma)
{
  const DensityEval d = density_eval(ctx, x, sigma);
  return x + sigma * sigma * d.f1 / d.f;
}

double
oracle_posterior_mean(const PriorSpec& prior, double x, double sigma)
{
  return posterior_mean(prior, x, sigma);
}

double
tf_point(const PooledKde& kde, double x, double sigma)
{
  const DensityEval d = density_eval(kde, x);
  return x + sigma * sigma * d.f1 / d.f;
}

double
tf_point(const Eigen::VectorXd& train_x, double h, double x, double sigma)
{
  return tf_point(PooledKde(train_x, h), x, sigma);
}

Eigen::VectorXd
standardize(const HeteroSample& sample)
{
  return sample.x().cwiseQuotient(sample.sigma());
}

double
scaled_point(const PooledKde& standardized, double x, double sigma)
{
  const double z = x / sigma;
  const DensityEval d = density_eval(standardized, z);
  return sigma * (z + d.f1 / d.f);
}

double
scaled_point(const HeteroSample& train, double h, double x, double sigma)
{
  return scaled_point(PooledKde(standardize(train), h), x, sigma);
}

KGroupsFit
k_groups_fit(const HeteroSample& sample, int k)
{
  const Index n = sample.size();
  if (k < 1 || static_cast<Index>(k) > n)
    throw Error(ErrorCode::BadGroupCount,
                "group count " + std::to_string(k) + " invalid for n = " +
                  std::to_string(n));

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{ 0 });
  const auto& s = sample.sigma();
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return s(a) < s(b); });

  KGroupsFit fit;
  fit.group_of.assign(static_cast<std::size_t>(n), 0);
  fit.members.resize(static_cast<std::size_t>(k));
  // Group g takes sorted positions [g n / k, (g + 1) n / k).
  for (Index pos = 0; pos < n; ++pos) {
    const auto g = static_cast<int>((pos * k) / n);
    fit.group_of[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = g;
  }
  for (Index i = 0; i < n; ++i)
    fit.members[static_cast<std::size_t>(fit.group_of[static_cast<std::size_t>(i)])]
      .push_back(i);

  fit.train_x.reserve(static_cast<std::size_t>(k));
  for (const auto& idx : fit.members) {
    Eigen::VectorXd tx(static_cast<Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j)
      tx(static_cast<Index>(j)) = sample.x()(idx[j]);
    fit.train_x.push_back(std::move(tx));
  }
  return fit;
}

Eigen::VectorXd
truncate_estimates(const Eigen::VectorXd& mu_hat, double bound)
{
  if (!(bound > 0.0))
    throw Error(ErrorCode::InvalidArgument, "truncation bound must be positive");
  return mu_hat.cwiseMax(-bound).cwiseMin(bound);
}

double
default_truncation_bound(Index n, double K)
{
  return K * std::log(static_cast<double>(std::max<Index>(n, 2)));
}

Eigen::VectorXd
stabilize_sign(const Eigen::VectorXd& x, const Eigen::VectorXd& mu_hat)
{
  if (x.size() != mu_hat.size())
    throw Error(ErrorCode::LengthMismatch, "stabilize_sign needs equal lengths");
  Eigen::VectorXd out(mu_hat.size());
  for (Index i = 0; i < x.size(); ++i)
    out(i) = sign_of(x(i)) == sign_of(mu_hat(i)) ? mu_hat(i) : 0.0;
  return out;
}

} // namespace nest
