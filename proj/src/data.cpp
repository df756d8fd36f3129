#include "nest/data.hpp"
#include "nest/random.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace nest {

HeteroSample
validate_sample(Eigen::VectorXd x,
                Eigen::VectorXd sigma,
                std::optional<Eigen::VectorXd> mu_true)
{
  if (x.size() != sigma.size() || x.size() == 0)
    throw Error(ErrorCode::LengthMismatch,
                "x has " + std::to_string(x.size()) + " rows, sigma has " +
                  std::to_string(sigma.size()));
  if (mu_true && mu_true->size() != x.size())
    throw Error(ErrorCode::LengthMismatch,
                "mu_true has " + std::to_string(mu_true->size()) +
                  " rows, x has " + std::to_string(x.size()));

  for (Index i = 0; i < x.size(); ++i) {
    const auto row = static_cast<std::size_t>(i);
    if (!std::isfinite(x(i)) || !std::isfinite(sigma(i)) ||
        (mu_true && !std::isfinite((*mu_true)(i))))
      throw Error(ErrorCode::NonFiniteValue,
                  "non-finite value at row " + std::to_string(i), row);
    if (!(sigma(i) > 0.0))
      throw Error(ErrorCode::NonPositiveSigma,
                  "sigma must be positive at row " + std::to_string(i), row);
  }

  HeteroSample s;
  s.x_ = std::move(x);
  s.sigma_ = std::move(sigma);
  s.mu_true_ = std::move(mu_true);
  return s;
}

HeteroSample
HeteroSample::subset(std::span<const Index> idx) const
{
  HeteroSample s;
  s.x_.resize(static_cast<Index>(idx.size()));
  s.sigma_.resize(static_cast<Index>(idx.size()));
  if (mu_true_)
    s.mu_true_ = Eigen::VectorXd(static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto i = idx[k];
    const auto out = static_cast<Index>(k);
    s.x_(out) = x_(i);
    s.sigma_(out) = sigma_(i);
    if (mu_true_)
      (*s.mu_true_)(out) = (*mu_true_)(i);
  }
  return s;
}

HeteroSample
HeteroSample::without_truth() const
{
  HeteroSample s = *this;
  s.mu_true_.reset();
  return s;
}

void
check_bandwidths(const Bandwidths& bw)
{
  if (!(bw.h_x > 0.0) || !(bw.h_sigma > 0.0) || !std::isfinite(bw.h_x) ||
      !std::isfinite(bw.h_sigma))
    throw Error(ErrorCode::InvalidArgument,
                "bandwidths must be positive and finite");
}

std::vector<Index>
FoldAssignment::members(int k) const
{
  std::vector<Index> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == k)
      out.push_back(static_cast<Index>(i));
  return out;
}

std::vector<Index>
FoldAssignment::complement(int k) const
{
  std::vector<Index> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != k)
      out.push_back(static_cast<Index>(i));
  return out;
}

FoldAssignment
kfold_split(Index n, int K, std::uint64_t seed)
{
  if (K < 2 || static_cast<Index>(K) > n)
    throw Error(ErrorCode::BadFoldCount,
                "fold count " + std::to_string(K) + " invalid for n = " +
                  std::to_string(n));

  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{ 0 });
  Rng rng(seed);
  for (std::size_t i = perm.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(perm[i], perm[j]);
  }

  FoldAssignment folds;
  folds.K = K;
  folds.fold_of.assign(perm.size(), 0);
  for (std::size_t pos = 0; pos < perm.size(); ++pos)
    folds.fold_of[static_cast<std::size_t>(perm[pos])] =
      static_cast<int>(pos % static_cast<std::size_t>(K));
  return folds;
}

} // namespace nest
