#include "nest/stats.hpp"
#include "nest/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace nest {

MeanSe
mean_se(std::span<const double> v)
{
  MeanSe out;
  out.n = static_cast<Eigen::Index>(v.size());
  if (v.empty())
    return out;
  double sum = 0.0;
  for (double x : v)
    sum += x;
  out.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v)
      ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    out.se = out.sd / std::sqrt(static_cast<double>(v.size()));
  }
  return out;
}

MeanSe
paired_difference(std::span<const double> a, std::span<const double> b)
{
  if (a.size() != b.size())
    throw Error(ErrorCode::LengthMismatch, "paired comparison needs equal lengths");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    d[i] = a[i] - b[i];
  return mean_se(d);
}

namespace {

double
log_pdf(double x, double m, double s)
{
  const double u = (x - m) / s;
  return -0.5 * u * u - std::log(s) - 0.5 * std::log(2.0 * std::numbers::pi);
}

} // namespace

ModalityFit
fit_modality(std::span<const double> v, int max_iter)
{
  const std::size_t n = v.size();
  if (n < 4)
    throw Error(ErrorCode::InvalidArgument, "modality fit needs at least four values");
  const MeanSe one = mean_se(v);
  const double sd_all = std::max(one.sd, 1e-12);
  // ML variance for the single-Gaussian likelihood.
  const double sd_ml = sd_all * std::sqrt(static_cast<double>(n - 1) / static_cast<double>(n));
  double ll1 = 0.0;
  for (double x : v)
    ll1 += log_pdf(x, one.mean, sd_ml);

  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t half = n / 2;
  auto part_stats = [&](std::size_t lo, std::size_t hi) {
    std::span<const double> s(sorted.data() + lo, hi - lo);
    MeanSe m = mean_se(s);
    m.sd = std::max(m.sd, 1e-3 * sd_all);
    return m;
  };
  const MeanSe lo = part_stats(0, half);
  const MeanSe hi = part_stats(half, n);

  double w = 0.5, m1 = lo.mean, s1 = lo.sd, m2 = hi.mean, s2 = hi.sd;
  const double floor_sd = 1e-3 * sd_all;
  std::vector<double> r(n);
  double ll2 = -INFINITY;
  for (int it = 0; it < max_iter; ++it) {
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = std::log(w) + log_pdf(v[i], m1, s1);
      const double b = std::log1p(-w) + log_pdf(v[i], m2, s2);
      const double top = std::max(a, b);
      const double lse = top + std::log(std::exp(a - top) + std::exp(b - top));
      r[i] = std::exp(a - lse);
      ll += lse;
    }
    double sr = 0.0, sx1 = 0.0, sx2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sr += r[i];
      sx1 += r[i] * v[i];
      sx2 += (1.0 - r[i]) * v[i];
    }
    const double n1 = std::clamp(sr, 1e-9, static_cast<double>(n) - 1e-9);
    const double n2 = static_cast<double>(n) - n1;
    m1 = sx1 / n1;
    m2 = sx2 / n2;
    double q1 = 0.0, q2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      q1 += r[i] * (v[i] - m1) * (v[i] - m1);
      q2 += (1.0 - r[i]) * (v[i] - m2) * (v[i] - m2);
    }
    s1 = std::max(std::sqrt(q1 / n1), floor_sd);
    s2 = std::max(std::sqrt(q2 / n2), floor_sd);
    w = n1 / static_cast<double>(n);
    if (std::abs(ll - ll2) < 1e-10 * std::abs(ll))
      break;
    ll2 = ll;
  }
  // Final log-likelihood at the converged parameters.
  ll2 = 0.0;
  for (double x : v) {
    const double a = std::log(w) + log_pdf(x, m1, s1);
    const double b = std::log1p(-w) + log_pdf(x, m2, s2);
    const double top = std::max(a, b);
    ll2 += top + std::log(std::exp(a - top) + std::exp(b - top));
  }

  ModalityFit fit;
  fit.weight = w;
  fit.mean1 = m1;
  fit.sd1 = s1;
  fit.mean2 = m2;
  fit.sd2 = s2;
  const double logn = std::log(static_cast<double>(n));
  fit.bic1 = -2.0 * ll1 + 2.0 * logn;
  fit.bic2 = -2.0 * ll2 + 5.0 * logn;
  fit.ashman_d = std::sqrt(2.0) * std::abs(m1 - m2) / std::sqrt(s1 * s1 + s2 * s2);
  fit.bimodal = fit.bic2 < fit.bic1 && std::min(w, 1.0 - w) >= 0.05 && fit.ashman_d > 2.0;
  return fit;
}

} // namespace nest
