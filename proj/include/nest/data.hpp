#pragma once

#include "nest/error.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace nest {

using Index = Eigen::Index;

//! Paired observations (x_i, sigma_i), optionally with the true means used
//! in simulation. Immutable; construct through validate_sample().
class HeteroSample
{
public:
  Index size() const { return x_.size(); }
  const Eigen::VectorXd& x() const { return x_; }
  const Eigen::VectorXd& sigma() const { return sigma_; }
  const std::optional<Eigen::VectorXd>& mu_true() const { return mu_true_; }
  bool has_truth() const { return mu_true_.has_value(); }

  //! Rows `idx` in the given order.
  HeteroSample subset(std::span<const Index> idx) const;
  //! Copy without the true means.
  HeteroSample without_truth() const;

  friend HeteroSample validate_sample(Eigen::VectorXd x,
                                      Eigen::VectorXd sigma,
                                      std::optional<Eigen::VectorXd> mu_true);

private:
  HeteroSample() = default;

  Eigen::VectorXd x_;
  Eigen::VectorXd sigma_;
  std::optional<Eigen::VectorXd> mu_true_;
};

//! Checks lengths, finiteness and sigma > 0; the first offending row is
//! reported. No rows are dropped.
HeteroSample validate_sample(Eigen::VectorXd x,
                             Eigen::VectorXd sigma,
                             std::optional<Eigen::VectorXd> mu_true = std::nullopt);

//! Kernel bandwidths: h_x multiplies sigma_j, h_sigma is in sigma units.
struct Bandwidths
{
  double h_x;
  double h_sigma;
};

//! Throws InvalidArgument unless both bandwidths are positive and finite.
void check_bandwidths(const Bandwidths& bw);

//! Estimated density and its first two x-derivatives at one query point.
//! `f` has the density floor applied; `floored` records whether it engaged.
struct DensityEval
{
  double f = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
  bool floored = false;
};

struct FoldAssignment
{
  std::vector<int> fold_of;
  int K = 0;

  Index size() const { return static_cast<Index>(fold_of.size()); }
  //! Indices in fold k, ascending.
  std::vector<Index> members(int k) const;
  //! Indices outside fold k, ascending.
  std::vector<Index> complement(int k) const;
};

//! Uniform random permutation (Fisher-Yates on a seeded Rng) followed by
//! round-robin assignment, so fold sizes differ by at most one.
FoldAssignment kfold_split(Index n, int K, std::uint64_t seed);

} // namespace nest
