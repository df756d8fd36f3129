#pragma once

#include "nest/data.hpp"
#include "nest/kernel.hpp"
#include "nest/prior.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace nest {

//! Cells where more than this fraction of points hit the density floor are
//! excluded from the argmin.
inline constexpr double kMaxFlooredFraction = 0.01;
inline constexpr double kTieTolerance = 1e-12;

//! Stein risk estimate for a rule x + score_var * f1 / f with noise variance
//! noise_var:
//!   noise_var + noise_var * score_var * (2 f f2 - f1^2) / f^2.
//! NEST and TF use score_var = sigma^2; the standardized rule uses 1.
inline double
sure_value(double noise_var, double score_var, const DensityEval& d)
{
  return noise_var + noise_var * score_var * ((2.0 * d.f * d.f2 - d.f1 * d.f1) / (d.f * d.f));
}

struct SureGrid
{
  std::vector<double> h_x_values;
  std::vector<double> h_sigma_values;
  int K = 10;
  std::uint64_t seed = 0;
};

//! Throws InvalidArgument unless both grids are nonempty, positive and
//! strictly ascending.
void validate_grid(const SureGrid& grid);

//! {start, start + step, ...} up to and including `stop` (within 1e-9).
std::vector<double> arithmetic_grid(double start, double stop, double step);

//! Scale for h_sigma: sd(sigma), or mean(sigma) when sigma is constant.
double sigma_scale(const HeteroSample& sample);

//! h_x in {0.1, ..., 1.0}; h_sigma in {0.1, ..., 1.0} * sigma_scale(sample).
SureGrid default_sure_grid(const HeteroSample& sample, int K = 10, std::uint64_t seed = 0);

struct SureReport
{
  std::vector<double> h_x_values;
  std::vector<double> h_sigma_values;
  //! Compound SURE S(h); rows index h_x, columns h_sigma. NaN marks a
  //! degenerate cell.
  Eigen::MatrixXd surface;
  //! Points whose density hit the floor, per cell.
  Eigen::MatrixXi floored;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> degenerate;
  Bandwidths argmin{};
  //! S_i at the argmin cell.
  Eigen::VectorXd per_point;
};

//! S_i for one point scored against `ctx`, which must not contain it.
double sure_point(const KernelContext& ctx, double x, double sigma);

//! sum_i S_i(h), each S_i scored against the complement of i's fold.
double sure_compound_cv(const HeteroSample& sample,
                        const Bandwidths& bw,
                        const FoldAssignment& folds);

//! Grid search for argmin_h S(h). One fold assignment (from grid.seed) is
//! shared by every cell. Ties go to the smallest h_sigma, then the smallest
//! h_x. Throws AllCellsDegenerate when no cell is usable.
SureReport tune(const HeteroSample& sample, const SureGrid& grid, int threads = 1);

//! Same search with an explicit fold assignment.
SureReport tune(const HeteroSample& sample,
                const SureGrid& grid,
                const FoldAssignment& folds,
                int threads = 1);

// Homoscedastic rules ----------------------------------------------------

enum class PooledRule
{
  //! Pooled KDE of x; score multiplied by sigma_i^2.
  Tf,
  //! Pooled KDE of x / sigma; output rescaled by sigma_i.
  Scaled
};

struct PooledSureReport
{
  std::vector<double> h_values;
  Eigen::VectorXd surface;
  Eigen::VectorXi floored;
  std::vector<bool> degenerate;
  double argmin = 0.0;
  Eigen::VectorXd per_point;
};

//! Reference compound SURE of a pooled rule at bandwidth h.
double sure_compound_cv_pooled(const HeteroSample& sample,
                               PooledRule rule,
                               double h,
                               const FoldAssignment& folds);

//! Grid search over pooled bandwidths; ties go to the smallest h.
PooledSureReport tune_pooled(const HeteroSample& sample,
                             PooledRule rule,
                             const std::vector<double>& h_values,
                             const FoldAssignment& folds,
                             int threads = 1);

// Unbiasedness check ------------------------------------------------------

struct UnbiasednessResult
{
  double mean_sure;
  double mc_risk;
  //! Standard error of the mean of the paired differences S - (delta - mu)^2.
  double se;
  //! Standard deviation of those differences.
  double sd;
};

//! Draws one training set of size n_train, then n_mc fresh (x, mu, sigma)
//! triples; compares the average S against the average squared error of
//! the NEST rule fitted on the training set. `bw.h_sigma` is in sigma units.
UnbiasednessResult sure_unbiasedness_check(const PriorSpec& prior,
                                           const SigmaLaw& sigma_law,
                                           const Bandwidths& bw,
                                           Index n_train,
                                           Index n_mc,
                                           std::uint64_t seed);

} // namespace nest
