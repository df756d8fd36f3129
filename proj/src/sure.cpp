#include "nest/sure.hpp"
#include "nest/parallel.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace nest {

namespace {

// Totals within a relative 1e-12 count as ties so the earlier cell wins.
bool
improves(double total, double best)
{
  return total < best - kTieTolerance * std::abs(best);
}


constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void
check_grid_values(const std::vector<double>& v, const char* name)
{
  if (v.empty())
    throw Error(ErrorCode::InvalidArgument, std::string(name) + " grid is empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i]))
      throw Error(ErrorCode::InvalidArgument,
                  std::string(name) + " grid values must be positive");
    if (i > 0 && !(v[i] > v[i - 1]))
      throw Error(ErrorCode::InvalidArgument,
                  std::string(name) + " grid must be strictly ascending");
  }
}

void
check_folds(const HeteroSample& sample, const FoldAssignment& folds)
{
  if (folds.size() != sample.size())
    throw Error(ErrorCode::LengthMismatch,
                "fold assignment covers " + std::to_string(folds.size()) +
                  " rows, sample has " + std::to_string(sample.size()));
  if (folds.K < 2)
    throw Error(ErrorCode::BadFoldCount, "need at least two folds");
}

struct Gathered
{
  Eigen::VectorXd x;
  Eigen::VectorXd s;
};

Gathered
gather(const Eigen::VectorXd& x, const Eigen::VectorXd& s, const std::vector<Index>& idx)
{
  Gathered g{ Eigen::VectorXd(static_cast<Index>(idx.size())),
              Eigen::VectorXd(static_cast<Index>(idx.size())) };
  for (std::size_t j = 0; j < idx.size(); ++j) {
    g.x(static_cast<Index>(j)) = x(idx[j]);
    g.s(static_cast<Index>(j)) = s(idx[j]);
  }
  return g;
}

// Scores one held-out point at every (h_x, h_sigma) cell: the kernel
// columns for all h_x and the weight columns for all h_sigma are combined in
// a single product acc = W^T K.
struct NestCellScorer
{
  const std::vector<double>& hx;
  const std::vector<double>& hs;
  const Gathered& train;

  struct Scratch
  {
    Eigen::MatrixXd k, w, acc;
  };

  void operator()(double x,
                  double sigma,
                  double* sure_out,
                  unsigned char* floored_out,
                  unsigned char* degenerate_out,
                  Scratch& buf) const
  {
    const auto na = static_cast<Index>(hx.size());
    const auto nb = static_cast<Index>(hs.size());
    const Index m = train.x.size();
    buf.k.resize(m, 3 * na);
    buf.w.resize(m, nb);

    const Eigen::ArrayXd d = x - train.x.array();
    for (Index a = 0; a < na; ++a)
      kernel_terms(d,
                   hx[static_cast<std::size_t>(a)] * train.s.array(),
                   buf.k.col(a),
                   buf.k.col(na + a),
                   buf.k.col(2 * na + a));
    for (Index b = 0; b < nb; ++b) {
      buf.w.col(b) = raw_sigma_weights(sigma, train.s.array(), hs[static_cast<std::size_t>(b)]).matrix();
      const double total = buf.w.col(b).sum();
      if (!(total > 0.0)) {
        degenerate_out[b] = 1;
        buf.w.col(b).setZero();
      } else {
        buf.w.col(b) /= total;
      }
    }
    buf.acc.noalias() = buf.w.transpose() * buf.k;

    const double s2 = sigma * sigma;
    for (Index b = 0; b < nb; ++b) {
      if (degenerate_out[b])
        continue;
      for (Index a = 0; a < na; ++a) {
        DensityEval e{ buf.acc(b, a), buf.acc(b, na + a), buf.acc(b, 2 * na + a), false };
        apply_floor(e, kDensityFloor);
        sure_out[a + na * b] = sure_value(s2, s2, e);
        floored_out[a + na * b] = e.floored ? 1 : 0;
      }
    }
  }
};

} // namespace

void
validate_grid(const SureGrid& grid)
{
  check_grid_values(grid.h_x_values, "h_x");
  check_grid_values(grid.h_sigma_values, "h_sigma");
  if (grid.K < 2)
    throw Error(ErrorCode::BadFoldCount, "need at least two folds");
}

std::vector<double>
arithmetic_grid(double start, double stop, double step)
{
  if (!(step > 0.0) || !(stop >= start))
    throw Error(ErrorCode::InvalidArgument, "invalid grid range");
  std::vector<double> out;
  for (int k = 0;; ++k) {
    // Snap to 12 decimals so 0.1-steps print exactly.
    const double v = std::round((start + step * k) * 1e12) / 1e12;
    if (v > stop + 1e-9)
      break;
    out.push_back(v);
  }
  return out;
}

double
sigma_scale(const HeteroSample& sample)
{
  const auto& s = sample.sigma();
  const double mean = s.mean();
  const double sd = s.size() > 1
                      ? std::sqrt((s.array() - mean).square().sum() /
                                  static_cast<double>(s.size() - 1))
                      : 0.0;
  return sd > 1e-12 * mean ? sd : mean;
}

SureGrid
default_sure_grid(const HeteroSample& sample, int K, std::uint64_t seed)
{
  SureGrid grid;
  grid.h_x_values = arithmetic_grid(0.1, 1.0, 0.1);
  const double scale = sigma_scale(sample);
  for (double c : arithmetic_grid(0.1, 1.0, 0.1))
    grid.h_sigma_values.push_back(c * scale);
  grid.K = K;
  grid.seed = seed;
  return grid;
}

double
sure_point(const KernelContext& ctx, double x, double sigma)
{
  const DensityEval d = density_eval(ctx, x, sigma);
  return sure_value(sigma * sigma, sigma * sigma, d);
}

double
sure_compound_cv(const HeteroSample& sample, const Bandwidths& bw, const FoldAssignment& folds)
{
  check_folds(sample, folds);
  Eigen::VectorXd per(sample.size());
  for (int k = 0; k < folds.K; ++k) {
    const auto train_idx = folds.complement(k);
    const KernelContext ctx(sample.without_truth().subset(train_idx), bw);
    for (Index i : folds.members(k))
      per(i) = sure_point(ctx, sample.x()(i), sample.sigma()(i));
  }
  double total = 0.0;
  for (Index i = 0; i < per.size(); ++i)
    total += per(i);
  return total;
}

SureReport
tune(const HeteroSample& sample, const SureGrid& grid, int threads)
{
  validate_grid(grid);
  const int K = static_cast<int>(std::min<Index>(grid.K, sample.size()));
  return tune(sample, grid, kfold_split(sample.size(), K, grid.seed), threads);
}

SureReport
tune(const HeteroSample& sample, const SureGrid& grid, const FoldAssignment& folds, int threads)
{
  validate_grid(grid);
  check_folds(sample, folds);

  const auto n = static_cast<std::size_t>(sample.size());
  const auto na = grid.h_x_values.size();
  const auto nb = grid.h_sigma_values.size();
  const auto cells = na * nb;

  std::vector<double> per(n * cells, kNaN);
  std::vector<unsigned char> floored(n * cells, 0);
  std::vector<unsigned char> degenerate(n * nb, 0);

  for (int k = 0; k < folds.K; ++k) {
    const auto members = folds.members(k);
    if (members.empty())
      continue;
    const Gathered train = gather(sample.x(), sample.sigma(), folds.complement(k));
    if (train.x.size() == 0)
      throw Error(ErrorCode::BadFoldCount, "fold complement is empty");
    const NestCellScorer scorer{ grid.h_x_values, grid.h_sigma_values, train };

    parallel_for(static_cast<std::ptrdiff_t>(members.size()), threads, [&](std::ptrdiff_t q) {
      thread_local NestCellScorer::Scratch buf;
      const auto i = static_cast<std::size_t>(members[static_cast<std::size_t>(q)]);
      scorer(sample.x()(static_cast<Index>(i)),
             sample.sigma()(static_cast<Index>(i)),
             per.data() + i * cells,
             floored.data() + i * cells,
             degenerate.data() + i * nb,
             buf);
    });
  }

  SureReport report;
  report.h_x_values = grid.h_x_values;
  report.h_sigma_values = grid.h_sigma_values;
  report.surface.setConstant(static_cast<Index>(na), static_cast<Index>(nb), kNaN);
  report.floored.setZero(static_cast<Index>(na), static_cast<Index>(nb));
  report.degenerate.setConstant(static_cast<Index>(na), static_cast<Index>(nb), false);

  const double max_floored = kMaxFlooredFraction * static_cast<double>(n);
  bool found = false;
  double best = 0.0;
  std::size_t best_cell = 0;
  for (std::size_t b = 0; b < nb; ++b) {
    bool column_degenerate = false;
    for (std::size_t i = 0; i < n; ++i)
      column_degenerate = column_degenerate || degenerate[i * nb + b] != 0;
    for (std::size_t a = 0; a < na; ++a) {
      const std::size_t c = a + na * b;
      const auto ra = static_cast<Index>(a);
      const auto cb = static_cast<Index>(b);
      int nfloor = 0;
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        nfloor += floored[i * cells + c];
        total += per[i * cells + c];
      }
      report.floored(ra, cb) = nfloor;
      const bool bad = column_degenerate || static_cast<double>(nfloor) > max_floored ||
                       !std::isfinite(total);
      report.degenerate(ra, cb) = bad;
      if (column_degenerate)
        continue;
      report.surface(ra, cb) = total;
      if (!bad && (!found || improves(total, best))) {
        found = true;
        best = total;
        best_cell = c;
      }
    }
  }
  if (!found)
    throw Error(ErrorCode::AllCellsDegenerate, "every SURE grid cell is degenerate");

  const std::size_t a = best_cell % na;
  const std::size_t b = best_cell / na;
  report.argmin = Bandwidths{ grid.h_x_values[a], grid.h_sigma_values[b] };
  report.per_point.resize(static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    report.per_point(static_cast<Index>(i)) = per[i * cells + best_cell];
  return report;
}

// Homoscedastic rules ----------------------------------------------------

namespace {

Eigen::VectorXd
pooled_coordinates(const HeteroSample& sample, PooledRule rule)
{
  return rule == PooledRule::Tf ? Eigen::VectorXd(sample.x())
                                : Eigen::VectorXd(sample.x().cwiseQuotient(sample.sigma()));
}

double
pooled_score_var(PooledRule rule, double sigma)
{
  return rule == PooledRule::Tf ? sigma * sigma : 1.0;
}

} // namespace

double
sure_compound_cv_pooled(const HeteroSample& sample,
                        PooledRule rule,
                        double h,
                        const FoldAssignment& folds)
{
  check_folds(sample, folds);
  const Eigen::VectorXd z = pooled_coordinates(sample, rule);
  Eigen::VectorXd per(sample.size());
  for (int k = 0; k < folds.K; ++k) {
    const auto train_idx = folds.complement(k);
    Eigen::VectorXd tz(static_cast<Index>(train_idx.size()));
    for (std::size_t j = 0; j < train_idx.size(); ++j)
      tz(static_cast<Index>(j)) = z(train_idx[j]);
    const PooledKde kde(std::move(tz), h);
    for (Index i : folds.members(k)) {
      const double s = sample.sigma()(i);
      per(i) = sure_value(s * s, pooled_score_var(rule, s), density_eval(kde, z(i)));
    }
  }
  double total = 0.0;
  for (Index i = 0; i < per.size(); ++i)
    total += per(i);
  return total;
}

PooledSureReport
tune_pooled(const HeteroSample& sample,
            PooledRule rule,
            const std::vector<double>& h_values,
            const FoldAssignment& folds,
            int threads)
{
  check_grid_values(h_values, "pooled bandwidth");
  check_folds(sample, folds);

  const auto n = static_cast<std::size_t>(sample.size());
  const auto na = h_values.size();
  const Eigen::VectorXd z = pooled_coordinates(sample, rule);
  std::vector<double> per(n * na, kNaN);
  std::vector<unsigned char> floored(n * na, 0);

  for (int k = 0; k < folds.K; ++k) {
    const auto members = folds.members(k);
    const auto train_idx = folds.complement(k);
    if (members.empty())
      continue;
    if (train_idx.empty())
      throw Error(ErrorCode::BadFoldCount, "fold complement is empty");
    Eigen::VectorXd tz(static_cast<Index>(train_idx.size()));
    for (std::size_t j = 0; j < train_idx.size(); ++j)
      tz(static_cast<Index>(j)) = z(train_idx[j]);
    const auto m = static_cast<double>(tz.size());

    parallel_for(static_cast<std::ptrdiff_t>(members.size()), threads, [&](std::ptrdiff_t q) {
      thread_local Eigen::MatrixXd k;
      const auto mi = tz.size();
      const auto nai = static_cast<Index>(na);
      k.resize(mi, 3 * nai);
      const auto i = static_cast<std::size_t>(members[static_cast<std::size_t>(q)]);
      const Eigen::ArrayXd d = z(static_cast<Index>(i)) - tz.array();
      for (Index a = 0; a < nai; ++a)
        kernel_terms(d,
                     Eigen::ArrayXd::Constant(mi, h_values[static_cast<std::size_t>(a)]),
                     k.col(a),
                     k.col(nai + a),
                     k.col(2 * nai + a));
      const Eigen::RowVectorXd acc = k.colwise().sum();
      const double s = sample.sigma()(static_cast<Index>(i));
      for (std::size_t a = 0; a < na; ++a) {
        const auto ai = static_cast<Index>(a);
        DensityEval d{ acc(ai) / m, acc(nai + ai) / m, acc(2 * nai + ai) / m, false };
        apply_floor(d, kDensityFloor);
        per[i * na + a] = sure_value(s * s, pooled_score_var(rule, s), d);
        floored[i * na + a] = d.floored ? 1 : 0;
      }
    });
  }

  PooledSureReport report;
  report.h_values = h_values;
  report.surface.setConstant(static_cast<Index>(na), kNaN);
  report.floored.setZero(static_cast<Index>(na));
  report.degenerate.assign(na, false);
  const double max_floored = kMaxFlooredFraction * static_cast<double>(n);
  bool found = false;
  double best = 0.0;
  std::size_t best_a = 0;
  for (std::size_t a = 0; a < na; ++a) {
    int nfloor = 0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nfloor += floored[i * na + a];
      total += per[i * na + a];
    }
    report.floored(static_cast<Index>(a)) = nfloor;
    report.surface(static_cast<Index>(a)) = total;
    const bool bad = static_cast<double>(nfloor) > max_floored || !std::isfinite(total);
    report.degenerate[a] = bad;
    if (!bad && (!found || improves(total, best))) {
      found = true;
      best = total;
      best_a = a;
    }
  }
  if (!found)
    throw Error(ErrorCode::AllCellsDegenerate, "every pooled SURE grid cell is degenerate");
  report.argmin = h_values[best_a];
  report.per_point.resize(static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    report.per_point(static_cast<Index>(i)) = per[i * na + best_a];
  return report;
}

// Unbiasedness check ------------------------------------------------------

UnbiasednessResult
sure_unbiasedness_check(const PriorSpec& prior,
                        const SigmaLaw& sigma_law,
                        const Bandwidths& bw,
                        Index n_train,
                        Index n_mc,
                        std::uint64_t seed)
{
  if (n_mc <= 0)
    throw Error(ErrorCode::EmptyMonteCarlo, "Monte Carlo size must be positive");
  if (n_train <= 0)
    throw Error(ErrorCode::InvalidArgument, "training size must be positive");
  validate_prior(prior);
  validate_sigma_law(sigma_law);

  Rng train_rng(derive_seed(seed, 1));
  Eigen::VectorXd tx(n_train), ts(n_train);
  for (Index j = 0; j < n_train; ++j) {
    ts(j) = sample_sigma(sigma_law, train_rng);
    tx(j) = sample_prior(prior, train_rng) + ts(j) * train_rng.normal();
  }
  const KernelContext ctx(validate_sample(tx, ts), bw);

  Rng rng(derive_seed(seed, 2));
  double sum_s = 0.0, sum_l = 0.0;
  double mean_d = 0.0, m2_d = 0.0;
  for (Index t = 0; t < n_mc; ++t) {
    const double s = sample_sigma(sigma_law, rng);
    const double mu = sample_prior(prior, rng);
    const double x = mu + s * rng.normal();
    const DensityEval d = density_eval(ctx, x, s);
    const double sure = sure_value(s * s, s * s, d);
    const double delta = x + s * s * d.f1 / d.f;
    const double loss = (delta - mu) * (delta - mu);
    sum_s += sure;
    sum_l += loss;
    const double diff = sure - loss;
    const double step = diff - mean_d;
    mean_d += step / static_cast<double>(t + 1);
    m2_d += step * (diff - mean_d);
  }
  const auto count = static_cast<double>(n_mc);
  const double var = n_mc > 1 ? m2_d / (count - 1.0) : 0.0;
  return UnbiasednessResult{ sum_s / count, sum_l / count, std::sqrt(var / count), std::sqrt(var) };
}

} // namespace nest
