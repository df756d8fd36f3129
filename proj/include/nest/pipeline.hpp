#pragma once

#include "nest/estimators.hpp"
#include "nest/sure.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nest {

enum class MethodKind
{
  Naive,
  Oracle,
  Nest,
  Tf,
  Scaled,
  KGroups
};

//! A method to fit with SURE-tuned bandwidths.
struct MethodRequest
{
  MethodKind kind = MethodKind::Naive;
  //! Group count for KGroups.
  int k = 0;
  bool truncate = false;
  bool stabilize_sign = false;

  std::string label() const;
};

//! Parses "naive", "oracle", "nest", "tf", "scaled", "2-groups", ... .
MethodRequest parse_method(const std::string& name);

struct TuningConfig
{
  //! NEST h_x values (multipliers on sigma_j).
  std::vector<double> h_x = arithmetic_grid(0.1, 1.0, 0.1);
  //! NEST h_sigma values as multiples of sigma_scale(sample).
  std::vector<double> h_sigma_multipliers = arithmetic_grid(0.1, 1.0, 0.1);
  //! TF and k-groups bandwidths as multiples of the (group) rms sigma, so
  //! TF(h_x * sigma) lines up with NEST(h_x) on homoscedastic data.
  std::vector<double> tf_multipliers = arithmetic_grid(0.1, 1.0, 0.1);
  //! Scaled bandwidths in standardized units.
  std::vector<double> scaled_h = arithmetic_grid(0.1, 1.0, 0.1);
  int K = 10;
  //! Truncation bound is truncation_K * log n.
  double truncation_K = 2.0;
  int threads = 1;
};

//! Root mean square of sigma.
double rms_sigma(const HeteroSample& sample);

struct FittedMethod
{
  std::string label;
  EstimatorSpec spec;
  Eigen::VectorXd mu_hat;
  //! Full surface, for NEST.
  std::optional<SureReport> nest_report;
  //! Minimal compound SURE of the chosen bandwidth(s), when tuned.
  std::optional<double> sure_min;
};

//! Tunes the request on `sample` (folds drawn from `seed`) and estimates.
//! Oracle needs `prior`.
FittedMethod fit_method(const MethodRequest& request,
                        const HeteroSample& sample,
                        const TuningConfig& config,
                        std::uint64_t seed,
                        const std::optional<PriorSpec>& prior = std::nullopt);

} // namespace nest
