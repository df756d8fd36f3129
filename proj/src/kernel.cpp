#include "nest/kernel.hpp"
#include "nest/parallel.hpp"

#include <numbers>
#include <string>

namespace nest {

KernelContext::KernelContext(HeteroSample train, Bandwidths bw, double floor_eps)
  : train_(std::move(train))
  , bw_(bw)
  , floor_eps_(floor_eps)
{
  check_bandwidths(bw_);
  if (!(floor_eps_ > 0.0))
    throw Error(ErrorCode::InvalidArgument, "density floor must be positive");
}

void
kernel_terms(const Eigen::ArrayXd& d,
             const Eigen::ArrayXd& h,
             Eigen::Ref<Eigen::VectorXd> k,
             Eigen::Ref<Eigen::VectorXd> k1,
             Eigen::Ref<Eigen::VectorXd> k2)
{
  const double c = std::numbers::sqrt2 * std::sqrt(std::numbers::pi);
  const Eigen::ArrayXd u = d / h;
  const Eigen::ArrayXd e = 0.5 * u.square();
  // exp() stays outside select() so it vectorizes.
  const Eigen::ArrayXd ex = (-e).exp();
  k.array() = (e > kExpCutoff).select(0.0, ex / (c * h));
  k1.array() = -k.array() * u / h;
  k2.array() = k.array() * (u.square() - 1.0) / h.square();
}

Eigen::ArrayXd
raw_sigma_weights(double s, const Eigen::ArrayXd& s_j, double h)
{
  const Eigen::ArrayXd e = 0.5 * ((s - s_j) / h).square();
  const Eigen::ArrayXd ex = (-e).exp();
  return (e > kExpCutoff).select(0.0, ex);
}

namespace {

Eigen::VectorXd
weights_impl(const KernelContext& ctx, double sigma, Index exclude)
{
  if (!(sigma > 0.0))
    throw Error(ErrorCode::NonPositiveSigma, "query sigma must be positive");
  const double h = ctx.bandwidths().h_sigma;
  Eigen::VectorXd w = raw_sigma_weights(sigma, ctx.train().sigma().array(), h).matrix();
  if (exclude >= 0)
    w(exclude) = 0.0;
  double total = 0.0;
  for (Index j = 0; j < w.size(); ++j)
    total += w(j);
  if (!(total > 0.0))
    throw Error(ErrorCode::DegenerateWeights,
                "sigma weights underflow at sigma = " + std::to_string(sigma) +
                  " with h_sigma = " + std::to_string(h));
  return w / total;
}

DensityEval
density_impl(const KernelContext& ctx, double x, double sigma, Index exclude)
{
  const Eigen::VectorXd w = weights_impl(ctx, sigma, exclude);
  const auto m = ctx.size();
  Eigen::VectorXd k(m), k1(m), k2(m);
  kernel_terms(x - ctx.train().x().array(),
               ctx.bandwidths().h_x * ctx.train().sigma().array(),
               k,
               k1,
               k2);
  DensityEval out;
  for (Index j = 0; j < m; ++j) {
    out.f += w(j) * k(j);
    out.f1 += w(j) * k1(j);
    out.f2 += w(j) * k2(j);
  }
  apply_floor(out, ctx.floor_eps());
  return out;
}

} // namespace

Eigen::VectorXd
sigma_weights(const KernelContext& ctx, double sigma)
{
  return weights_impl(ctx, sigma, -1);
}

DensityEval
density_eval(const KernelContext& ctx, double x, double sigma)
{
  return density_impl(ctx, x, sigma, -1);
}

DensityEval
density_eval_excluding(const KernelContext& ctx, double x, double sigma, Index exclude)
{
  if (ctx.size() < 2)
    throw Error(ErrorCode::InvalidArgument,
                "leave-one-out density needs at least two training points");
  return density_impl(ctx, x, sigma, exclude);
}

std::vector<DensityEval>
density_eval_batch(const KernelContext& ctx,
                   std::span<const Query> queries,
                   int threads)
{
  std::vector<DensityEval> out(queries.size());
  parallel_for(static_cast<std::ptrdiff_t>(queries.size()), threads, [&](std::ptrdiff_t i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = density_eval(ctx, queries[k].x, queries[k].sigma);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " (query " + std::to_string(k) + ")", k);
    }
  });
  return out;
}

PooledKde::PooledKde(Eigen::VectorXd train, double h, double floor_eps)
  : train_(std::move(train))
  , h_(h)
  , floor_eps_(floor_eps)
{
  if (train_.size() == 0)
    throw Error(ErrorCode::InvalidArgument, "pooled KDE needs training points");
  if (!(h_ > 0.0) || !std::isfinite(h_))
    throw Error(ErrorCode::InvalidArgument, "pooled KDE bandwidth must be positive");
  if (!(floor_eps_ > 0.0))
    throw Error(ErrorCode::InvalidArgument, "density floor must be positive");
}

DensityEval
density_eval(const PooledKde& kde, double x)
{
  const auto m = kde.train().size();
  Eigen::VectorXd k(m), k1(m), k2(m);
  kernel_terms(x - kde.train().array(), Eigen::ArrayXd::Constant(m, kde.bandwidth()), k, k1, k2);
  DensityEval out;
  for (Index j = 0; j < m; ++j) {
    out.f += k(j);
    out.f1 += k1(j);
    out.f2 += k2(j);
  }
  const auto md = static_cast<double>(m);
  out.f /= md;
  out.f1 /= md;
  out.f2 /= md;
  apply_floor(out, kde.floor_eps());
  return out;
}

} // namespace nest
