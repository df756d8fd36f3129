#pragma once

#include <Eigen/Core>
#include <span>

namespace nest {

struct MeanSe
{
  double mean = 0.0;
  //! Standard error of the mean (0 for a single value).
  double se = 0.0;
  double sd = 0.0;
  Eigen::Index n = 0;
};

MeanSe mean_se(std::span<const double> v);

//! Summary of the paired differences a_i - b_i.
MeanSe paired_difference(std::span<const double> a, std::span<const double> b);

//! Two-component Gaussian mixture fit by EM, compared with a single
//! Gaussian by BIC. Declared bimodal when BIC prefers two components, the
//! smaller weight is at least 5% and Ashman's D exceeds 2.
struct ModalityFit
{
  double weight = 1.0;
  double mean1 = 0.0, sd1 = 0.0;
  double mean2 = 0.0, sd2 = 0.0;
  double bic1 = 0.0;
  double bic2 = 0.0;
  double ashman_d = 0.0;
  bool bimodal = false;
};

ModalityFit fit_modality(std::span<const double> v, int max_iter = 1000);

} // namespace nest
