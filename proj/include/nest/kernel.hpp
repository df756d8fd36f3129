#pragma once

#include "nest/data.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace nest {

//! Default lower bound applied to estimated densities, in density units.
inline constexpr double kDensityFloor = 1e-12;

//! Kernel terms with exponent beyond this are set to zero (exp(-700) is
//! about 1e-304, still a normal double).
inline constexpr double kExpCutoff = 700.0;

//! Gaussian kernel phi_h(z) = exp(-z^2 / (2 h^2)) / (sqrt(2 pi) h).
template <typename Scalar>
inline Scalar
gaussian_kernel(Scalar z, Scalar h)
{
  const Scalar u = z / h;
  return std::exp(Scalar(-0.5) * u * u) /
         (std::numbers::sqrt2_v<Scalar> * std::sqrt(std::numbers::pi_v<Scalar>) * h);
}

//! phi_h(d) and its first and second x-derivatives for every training
//! offset d(j) = x - x_j with bandwidth h(j). Terms whose exponent exceeds
//! kExpCutoff are exactly zero.
void kernel_terms(const Eigen::ArrayXd& d,
                  const Eigen::ArrayXd& h,
                  Eigen::Ref<Eigen::VectorXd> k,
                  Eigen::Ref<Eigen::VectorXd> k1,
                  Eigen::Ref<Eigen::VectorXd> k2);

//! Unnormalized sigma weights exp(-(s - s_j)^2 / (2 h^2)) for all j. The
//! 1/(sqrt(2 pi) h) factor cancels in the normalization and is omitted.
Eigen::ArrayXd raw_sigma_weights(double s, const Eigen::ArrayXd& s_j, double h);

//! Applies the density floor.
inline void
apply_floor(DensityEval& out, double floor_eps)
{
  if (!(out.f >= floor_eps)) {
    out.f = floor_eps;
    out.floored = true;
  }
}

//! Training pairs and bandwidths of the two-dimensional weighted kernel
//! estimator of f_sigma(x).
class KernelContext
{
public:
  KernelContext(HeteroSample train, Bandwidths bw, double floor_eps = kDensityFloor);

  const HeteroSample& train() const { return train_; }
  const Bandwidths& bandwidths() const { return bw_; }
  double floor_eps() const { return floor_eps_; }
  Index size() const { return train_.size(); }

private:
  HeteroSample train_;
  Bandwidths bw_;
  double floor_eps_;
};

//! w_j = phi_{h_sigma}(sigma - sigma_j) / sum_k phi_{h_sigma}(sigma - sigma_k).
//! Throws DegenerateWeights when the normalizer underflows to zero.
Eigen::VectorXd sigma_weights(const KernelContext& ctx, double sigma);

//! Weighted kernel estimate of f_sigma(x) and its x-derivatives, with
//! per-point bandwidth h_x * sigma_j. Sums run left to right in training
//! order.
DensityEval density_eval(const KernelContext& ctx, double x, double sigma);

//! density_eval with training point `exclude` removed from both the weights
//! and the kernel sum (leave-one-out).
DensityEval density_eval_excluding(const KernelContext& ctx,
                                   double x,
                                   double sigma,
                                   Index exclude);

struct Query
{
  double x;
  double sigma;
};

//! Elementwise density_eval. A failure is rethrown with the index of the
//! first failing query.
std::vector<DensityEval> density_eval_batch(const KernelContext& ctx,
                                            std::span<const Query> queries,
                                            int threads = 1);

//! Ordinary one-dimensional Gaussian kernel density estimate with a fixed
//! bandwidth; the pooled density used by the homoscedastic rules.
class PooledKde
{
public:
  PooledKde(Eigen::VectorXd train, double h, double floor_eps = kDensityFloor);

  const Eigen::VectorXd& train() const { return train_; }
  double bandwidth() const { return h_; }
  double floor_eps() const { return floor_eps_; }

private:
  Eigen::VectorXd train_;
  double h_;
  double floor_eps_;
};

DensityEval density_eval(const PooledKde& kde, double x);

} // namespace nest
