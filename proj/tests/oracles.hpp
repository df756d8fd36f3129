#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical code.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline double
phi(double z, double h)
{
  return std::exp(-0.5 * (z / h) * (z / h)) / (std::sqrt(2.0 * std::numbers::pi) * h);
}

struct Density
{
  double f, f1, f2;
};

// Two-dimensional weighted kernel density, term by term with std::exp and
// the normalizing constant kept in the sigma weights.
inline Density
weighted_kde(const Eigen::VectorXd& tx,
             const Eigen::VectorXd& ts,
             double hx,
             double hs,
             double x,
             double sigma)
{
  std::vector<double> w(static_cast<std::size_t>(tx.size()));
  double total = 0.0;
  for (Eigen::Index j = 0; j < tx.size(); ++j) {
    w[static_cast<std::size_t>(j)] = phi(sigma - ts(j), hs);
    total += w[static_cast<std::size_t>(j)];
  }
  Density d{ 0.0, 0.0, 0.0 };
  for (Eigen::Index j = 0; j < tx.size(); ++j) {
    const double h = hx * ts(j);
    const double k = phi(x - tx(j), h);
    const double wj = w[static_cast<std::size_t>(j)] / total;
    d.f += wj * k;
    d.f1 += wj * k * (tx(j) - x) / (h * h);
    d.f2 += wj * k / (h * h) * ((x - tx(j)) * (x - tx(j)) / (h * h) - 1.0);
  }
  return d;
}

inline Density
pooled_kde(const Eigen::VectorXd& tx, double h, double x)
{
  Density d{ 0.0, 0.0, 0.0 };
  for (Eigen::Index j = 0; j < tx.size(); ++j) {
    const double k = phi(x - tx(j), h);
    const double u = (x - tx(j)) / h;
    d.f += k;
    d.f1 += -k * u / h;
    d.f2 += k * (u * u - 1.0) / (h * h);
  }
  const auto m = static_cast<double>(tx.size());
  return { d.f / m, d.f1 / m, d.f2 / m };
}

// Adaptive Gauss-Kronrod on [a, b].
inline double
integrate(const std::function<double(double)>& g, double a, double b)
{
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, a, b, 15, 1e-13);
}

inline double
central_difference(const std::function<double(double)>& g, double x, double delta)
{
  return (g(x + delta) - g(x - delta)) / (2.0 * delta);
}

// Plain std::mt19937_64-backed generator for property inputs; separate from
// the library's Rng.
class Gen
{
public:
  explicit Gen(unsigned long long seed)
    : engine_(seed)
  {
  }
  double uniform(double lo, double hi)
  {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal(double m = 0.0, double s = 1.0)
  {
    return std::normal_distribution<double>(m, s)(engine_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  Eigen::VectorXd normals(Eigen::Index n, double m = 0.0, double s = 1.0)
  {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
      v(i) = normal(m, s);
    return v;
  }
  Eigen::VectorXd uniforms(Eigen::Index n, double lo, double hi)
  {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
      v(i) = uniform(lo, hi);
    return v;
  }

private:
  std::mt19937_64 engine_;
};

inline bool
close_rel(double a, double b, double rel, double abs_floor = 0.0)
{
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_floor;
}

} // namespace oracle
