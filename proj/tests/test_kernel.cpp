#include "nest/kernel.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace nest;

namespace {

Eigen::VectorXd
vec(std::initializer_list<double> v)
{
  Eigen::VectorXd out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v)
    out(i++) = x;
  return out;
}

HeteroSample
random_sample(oracle::Gen& g, Index n)
{
  Eigen::VectorXd x(n), s(n);
  for (Index i = 0; i < n; ++i) {
    s(i) = g.uniform(0.2, 2.0);
    x(i) = g.normal(1.0, 1.5) + s(i) * g.normal();
  }
  return validate_sample(x, s);
}

} // namespace

TEST_SUITE("kernel_engine")
{
  TEST_CASE("sigma weights: homoscedastic, single point, two-point hand value")
  {
    const KernelContext homo(validate_sample(vec({ 0, 1, 2, 3 }), vec({ 2, 2, 2, 2 })), { 0.5, 0.3 });
    const auto w = sigma_weights(homo, 0.7);
    for (Index j = 0; j < 4; ++j)
      CHECK(w(j) == doctest::Approx(0.25).epsilon(1e-15));

    const KernelContext one(validate_sample(vec({ 3 }), vec({ 1 })), { 1.0, 0.1 });
    CHECK(sigma_weights(one, 1.2)(0) == 1.0);
    CHECK_THROWS_AS(sigma_weights(one, 5.0), Error);

    const KernelContext two(validate_sample(vec({ -1, 1 }), vec({ 1, 2 })), { 0.5, 0.3 });
    const auto w2 = sigma_weights(two, 1.0);
    const double r = std::exp(-1.0 / (2.0 * 0.09));
    CHECK(w2(0) == doctest::Approx(1.0 / (1.0 + r)).epsilon(1e-14));
    CHECK(w2(1) == doctest::Approx(r / (1.0 + r)).epsilon(1e-14));
    CHECK(w2(0) == doctest::Approx(0.99615).epsilon(1e-5));
    CHECK(w2(1) == doctest::Approx(0.00385).epsilon(1e-3));
  }

  TEST_CASE("sigma weights underflow raises DegenerateWeights")
  {
    const KernelContext ctx(validate_sample(vec({ 0 }), vec({ 1 })), { 0.5, 0.01 });
    try {
      sigma_weights(ctx, 100.0);
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DegenerateWeights);
    }
    CHECK_THROWS_AS(density_eval(ctx, 0.0, 100.0), Error);
    CHECK_THROWS_AS(sigma_weights(ctx, 0.0), Error);
  }

  TEST_CASE("single kernel at its center")
  {
    const KernelContext ctx(validate_sample(vec({ 0 }), vec({ 1 })), { 1.0, 0.5 });
    const auto d = density_eval(ctx, 0.0, 1.0);
    const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    CHECK(d.f == doctest::Approx(c).epsilon(1e-15));
    CHECK(d.f1 == 0.0);
    CHECK(d.f2 == doctest::Approx(-c).epsilon(1e-15));
    CHECK_FALSE(d.floored);
    CHECK(d.f == doctest::Approx(0.398942).epsilon(1e-6));
  }

  TEST_CASE("duplicate training points do not change the estimate")
  {
    const KernelContext a(validate_sample(vec({ 0, 0 }), vec({ 1, 1 })), { 0.7, 0.3 });
    const KernelContext b(validate_sample(vec({ 0 }), vec({ 1 })), { 0.7, 0.3 });
    for (double x : { -1.0, 0.0, 0.4, 2.0 }) {
      const auto da = density_eval(a, x, 1.3);
      const auto db = density_eval(b, x, 1.3);
      CHECK(da.f == doctest::Approx(db.f).epsilon(1e-15));
      CHECK(da.f1 == doctest::Approx(db.f1).epsilon(1e-15));
      CHECK(da.f2 == doctest::Approx(db.f2).epsilon(1e-15));
    }
  }

  TEST_CASE("two-term hand summation")
  {
    const auto tx = vec({ -1, 1 });
    const auto ts = vec({ 1, 2 });
    const KernelContext ctx(validate_sample(tx, ts), { 0.5, 0.3 });
    const auto d = density_eval(ctx, 0.0, 1.0);
    const double r = std::exp(-1.0 / 0.18);
    const double w0 = 1.0 / (1.0 + r), w1 = r / (1.0 + r);
    const double k0 = oracle::phi(1.0, 0.5), k1 = oracle::phi(-1.0, 1.0);
    CHECK(d.f == doctest::Approx(w0 * k0 + w1 * k1).epsilon(1e-14));
    CHECK(d.f1 == doctest::Approx(w0 * k0 * (-1.0) / 0.25 + w1 * k1 * 1.0 / 1.0).epsilon(1e-14));
    CHECK(d.f2 == doctest::Approx(w0 * k0 / 0.25 * (4.0 - 1.0) + w1 * k1 * (1.0 - 1.0)).epsilon(1e-14));
  }

  TEST_CASE("random contexts agree with the direct-sum oracle")
  {
    oracle::Gen g(17);
    for (int rep = 0; rep < 20; ++rep) {
      const auto sample = random_sample(g, g.integer(1, 60));
      const Bandwidths bw{ g.uniform(0.1, 1.0), g.uniform(0.2, 1.0) };
      const KernelContext ctx(sample, bw);
      for (int q = 0; q < 10; ++q) {
        const double x = g.normal(1.0, 2.0), s = g.uniform(0.3, 1.8);
        const auto d = density_eval(ctx, x, s);
        const auto o = oracle::weighted_kde(sample.x(), sample.sigma(), bw.h_x, bw.h_sigma, x, s);
        if (d.floored)
          continue;
        CHECK(oracle::close_rel(d.f, o.f, 1e-12, 1e-300));
        CHECK(oracle::close_rel(d.f1, o.f1, 1e-12, 1e-14 * std::abs(o.f)));
        CHECK(oracle::close_rel(d.f2, o.f2, 1e-12, 1e-14 * std::abs(o.f)));
      }
    }
  }

  TEST_CASE("floor engages far from the data")
  {
    const KernelContext ctx(validate_sample(vec({ 0 }), vec({ 1 })), { 0.5, 0.5 });
    const auto d = density_eval(ctx, 40.0, 1.0);
    CHECK(d.floored);
    CHECK(d.f == kDensityFloor);
    const KernelContext loose(validate_sample(vec({ 0 }), vec({ 1 })), { 0.5, 0.5 }, 1e-300);
    CHECK(density_eval(loose, 10.0, 1.0).floored == false);
    CHECK(density_eval(ctx, 10.0, 1.0).floored);
    CHECK_THROWS_AS(KernelContext(validate_sample(vec({ 0 }), vec({ 1 })), { 0.5, 0.5 }, 0.0),
                    Error);
  }

  TEST_CASE("leave-one-out equals the estimate without that point")
  {
    oracle::Gen g(4);
    const auto sample = random_sample(g, 25);
    const KernelContext ctx(sample, { 0.4, 0.5 });
    for (Index i : { Index{ 0 }, Index{ 7 }, Index{ 24 } }) {
      std::vector<Index> keep;
      for (Index j = 0; j < sample.size(); ++j)
        if (j != i)
          keep.push_back(j);
      const KernelContext without(sample.subset(keep), { 0.4, 0.5 });
      const double x = sample.x()(i), s = sample.sigma()(i);
      const auto a = density_eval_excluding(ctx, x, s, i);
      const auto b = density_eval(without, x, s);
      CHECK(a.f == doctest::Approx(b.f).epsilon(1e-13));
      CHECK(a.f1 == doctest::Approx(b.f1).epsilon(1e-12));
      CHECK(a.f2 == doctest::Approx(b.f2).epsilon(1e-12));
    }
    const KernelContext single(validate_sample(vec({ 0 }), vec({ 1 })), { 0.5, 0.5 });
    CHECK_THROWS_AS(density_eval_excluding(single, 0.0, 1.0, 0), Error);
  }

  TEST_CASE("batch evaluation")
  {
    oracle::Gen g(8);
    const auto sample = random_sample(g, 40);
    const KernelContext ctx(sample, { 0.3, 0.4 });
    CHECK(density_eval_batch(ctx, std::span<const Query>{}).empty());

    std::vector<Query> qs;
    for (int i = 0; i < 100; ++i)
      qs.push_back({ g.normal(1.0, 2.0), g.uniform(0.3, 1.8) });
    const std::vector<Query> first(qs.begin(), qs.begin() + 1);
    const auto one = density_eval_batch(ctx, first);
    REQUIRE(one.size() == 1);
    CHECK(one[0].f == density_eval(ctx, qs[0].x, qs[0].sigma).f);

    for (int threads : { 1, 3 }) {
      const auto out = density_eval_batch(ctx, qs, threads);
      for (std::size_t i = 0; i < qs.size(); ++i) {
        const auto d = density_eval(ctx, qs[i].x, qs[i].sigma);
        CHECK(out[i].f == d.f);
        CHECK(out[i].f1 == d.f1);
        CHECK(out[i].f2 == d.f2);
        CHECK(out[i].floored == d.floored);
      }
    }

    const KernelContext narrow(sample, { 0.3, 0.01 });
    std::vector<Query> bad{ { 0.0, 1.0 }, { 0.0, 1.0 }, { 0.0, 500.0 } };
    try {
      density_eval_batch(narrow, bad);
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DegenerateWeights);
      REQUIRE(e.index());
      CHECK(*e.index() == 2);
    }
  }

  TEST_CASE("property: density integrates to one")
  {
    oracle::Gen g(21);
    for (int rep = 0; rep < 8; ++rep) {
      const auto sample = random_sample(g, g.integer(1, 30));
      const Bandwidths bw{ g.uniform(0.1, 1.0), g.uniform(0.2, 1.0) };
      const KernelContext ctx(sample, bw);
      const double s = g.uniform(0.3, 1.8);
      const double hmax = bw.h_x * sample.sigma().maxCoeff();
      const double lo = sample.x().minCoeff() - 10.0 * hmax;
      const double hi = sample.x().maxCoeff() + 10.0 * hmax;
      // Split at the training points so the quadrature sees every bump.
      std::vector<double> cuts(sample.x().data(), sample.x().data() + sample.size());
      cuts.push_back(lo);
      cuts.push_back(hi);
      std::sort(cuts.begin(), cuts.end());
      double total = 0.0;
      for (std::size_t c = 0; c + 1 < cuts.size(); ++c)
        total += oracle::integrate([&](double x) { return density_eval(ctx, x, s).f; }, cuts[c],
                                   cuts[c + 1]);
      CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    }
  }

  TEST_CASE("property: derivatives match finite differences")
  {
    oracle::Gen g(33);
    for (int rep = 0; rep < 10; ++rep) {
      const auto sample = random_sample(g, g.integer(2, 40));
      const Bandwidths bw{ g.uniform(0.2, 1.0), g.uniform(0.2, 1.0) };
      const KernelContext ctx(sample, bw, 1e-300);
      const double s = g.uniform(0.3, 1.8);
      const double delta = 1e-5 * bw.h_x * sample.sigma().minCoeff();
      for (int q = 0; q < 5; ++q) {
        const double x = sample.x()(g.integer(0, static_cast<int>(sample.size()) - 1)) +
                         g.normal(0.0, 0.3);
        const auto d = density_eval(ctx, x, s);
        const double fd1 =
          oracle::central_difference([&](double t) { return density_eval(ctx, t, s).f; }, x, delta);
        const double fd2 =
          oracle::central_difference([&](double t) { return density_eval(ctx, t, s).f1; }, x, delta);
        // Relative to the derivative's own scale, with an absolute floor tied
        // to f for points where the derivative crosses zero.
        CHECK(oracle::close_rel(d.f1, fd1, 1e-4, 1e-6 * d.f / (bw.h_x * sample.sigma().minCoeff())));
        CHECK(oracle::close_rel(
          d.f2, fd2, 1e-4, 1e-6 * d.f / std::pow(bw.h_x * sample.sigma().minCoeff(), 2)));
      }
    }
  }

  TEST_CASE("property: translation equivariance and permutation invariance")
  {
    oracle::Gen g(5);
    for (int rep = 0; rep < 10; ++rep) {
      const auto sample = random_sample(g, 30);
      const Bandwidths bw{ g.uniform(0.2, 1.0), g.uniform(0.2, 1.0) };
      const KernelContext ctx(sample, bw);
      const double c = g.uniform(-50.0, 50.0);
      const KernelContext shifted(
        validate_sample(sample.x().array() + c, sample.sigma()), bw);
      std::vector<Index> perm(30);
      std::iota(perm.begin(), perm.end(), Index{ 0 });
      std::reverse(perm.begin(), perm.end());
      std::swap(perm[3], perm[17]);
      const KernelContext permuted(sample.subset(perm), bw);
      for (int q = 0; q < 5; ++q) {
        const double x = g.normal(1.0, 1.5), s = g.uniform(0.3, 1.8);
        const auto d = density_eval(ctx, x, s);
        const auto ds = density_eval(shifted, x + c, s);
        const auto dp = density_eval(permuted, x, s);
        const double tol = 1e-9;
        CHECK(oracle::close_rel(d.f, ds.f, tol, 1e-15));
        CHECK(oracle::close_rel(d.f1, ds.f1, tol, 1e-12 * d.f));
        CHECK(oracle::close_rel(d.f2, ds.f2, tol, 1e-12 * d.f));
        CHECK(oracle::close_rel(d.f, dp.f, 1e-13, 1e-300));
        CHECK(oracle::close_rel(d.f1, dp.f1, 1e-12, 1e-14 * d.f));
        CHECK(oracle::close_rel(d.f2, dp.f2, 1e-12, 1e-14 * d.f));
      }
    }
  }

  TEST_CASE("property: homoscedastic reduction to the ordinary KDE")
  {
    oracle::Gen g(12);
    for (int rep = 0; rep < 10; ++rep) {
      const Index n = g.integer(1, 50);
      const double sigma = g.uniform(0.2, 3.0);
      const auto tx = g.normals(n, 0.0, 2.0);
      const Bandwidths bw{ g.uniform(0.1, 1.0), g.uniform(0.05, 2.0) };
      const KernelContext ctx(validate_sample(tx, Eigen::VectorXd::Constant(n, sigma)), bw);
      const PooledKde kde(tx, bw.h_x * sigma);
      for (int q = 0; q < 5; ++q) {
        const double x = g.normal(0.0, 2.0);
        const auto a = density_eval(ctx, x, g.uniform(0.1, 4.0));
        const auto b = density_eval(kde, x);
        const auto o = oracle::pooled_kde(tx, bw.h_x * sigma, x);
        CHECK(std::abs(a.f - b.f) <= 1e-12 * std::max(1.0, b.f));
        CHECK(std::abs(a.f1 - b.f1) <= 1e-12 * std::max(1.0, std::abs(b.f1)));
        CHECK(std::abs(a.f2 - b.f2) <= 1e-12 * std::max(1.0, std::abs(b.f2)));
        if (!b.floored)
          CHECK(oracle::close_rel(b.f, o.f, 1e-12, 1e-300));
      }
    }
  }
}
