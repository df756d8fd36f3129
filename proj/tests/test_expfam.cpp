#include "nest/expfam.hpp"
#include "oracles.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <doctest.h>

using namespace nest;
using namespace nest::expfam;
using boost::math::digamma;

namespace {

double
lh(Family f, double v)
{
  return lh_prime({ f, v });
}

double
pm(Family f, double v, double lf1)
{
  return posterior_mean({ f, v }, { lf1 });
}

// log of the Beta-Binomial pmf, continued to real x through lgamma.
double
log_beta_binomial(int n, double x, double a, double b)
{
  return std::lgamma(n + 1.0) - std::lgamma(x + 1.0) - std::lgamma(n - x + 1.0) +
         std::log(boost::math::beta(a + x, b + n - x)) - std::log(boost::math::beta(a, b));
}

} // namespace

TEST_SUITE("expfam")
{
  TEST_CASE("lh_prime examples")
  {
    for (double x : { 0.0, 3.0, 17.0 })
      CHECK(lh(NegBinomial{ 1 }, x) == 0.0);
    for (double x : { 0.1, 1.0, 9.0 })
      CHECK(lh(Gamma{ 1.0 }, x) == 0.0);
    CHECK(lh(Binomial{ 2 }, 1.0) == doctest::Approx(2.0 - 2.0 * kEulerGamma).epsilon(1e-15));
    CHECK(lh(Binomial{ 2 }, 1.0) == doctest::Approx(0.8455687).epsilon(1e-6));
    CHECK(lh(Binomial{ 5 }, 0.0) == doctest::Approx(137.0 / 60.0 - 2.0 * kEulerGamma).epsilon(1e-14));
    CHECK(lh(NegBinomial{ 3 }, 2.0) == doctest::Approx(1.0 / 3 + 1.0 / 4).epsilon(1e-15));
    CHECK(lh(Gamma{ 3.0 }, 0.5) == doctest::Approx(-4.0).epsilon(1e-15));
    const double z = std::log(0.25);
    CHECK(lh(Beta{ 3.0 }, z) == doctest::Approx(2.0 * 0.25 / 0.75).epsilon(1e-14));
  }

  TEST_CASE("posterior_mean examples")
  {
    CHECK(pm(Gamma{ 2.0 }, 1.0, -0.5) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(pm(Gamma{ 1.0 }, 2.3, -0.7) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(pm(Binomial{ 2 }, 1.0, 0.1) == doctest::Approx(0.8455687 + 0.1).epsilon(1e-6));
    CHECK(pm(NegBinomial{ 2 }, 1.0, -0.2) == doctest::Approx(0.5 - 0.2).epsilon(1e-15));
    const double z = std::log(0.5);
    CHECK(pm(Beta{ 2.0 }, z, 0.3) == doctest::Approx(1.3).epsilon(1e-15));
  }

  TEST_CASE("domain errors")
  {
    const auto code = [](FamilyPoint p) {
      try {
        validate(p);
      } catch (const Error& e) {
        return e.code();
      }
      return ErrorCode::IoError;
    };
    CHECK(code({ Binomial{ 3 }, 4.0 }) == ErrorCode::DomainError);
    CHECK(code({ Binomial{ 3 }, 1.5 }) == ErrorCode::DomainError);
    CHECK(code({ Binomial{ 0 }, 0.0 }) == ErrorCode::DomainError);
    CHECK(code({ NegBinomial{ 2 }, -1.0 }) == ErrorCode::DomainError);
    CHECK(code({ NegBinomial{ 0 }, 1.0 }) == ErrorCode::DomainError);
    CHECK(code({ Gamma{ 1.0 }, 0.0 }) == ErrorCode::DomainError);
    CHECK(code({ Gamma{ -1.0 }, 1.0 }) == ErrorCode::DomainError);
    CHECK(code({ Beta{ 2.0 }, 0.0 }) == ErrorCode::DomainError);
    CHECK(code({ Beta{ 0.0 }, -1.0 }) == ErrorCode::DomainError);
    CHECK_THROWS_AS(posterior_mean({ Gamma{ 1.0 }, 1.0 }, { std::nan("") }), Error);
  }

  TEST_CASE("property: Binomial symmetry and NegBinomial recurrence")
  {
    for (int n = 1; n <= 60; ++n)
      for (int x = 0; x <= n; ++x)
        CHECK(lh(Binomial{ n }, x) == lh(Binomial{ n }, n - x));
    for (int x = 0; x <= 40; ++x)
      for (int r = 1; r <= 30; ++r)
        CHECK(lh(NegBinomial{ r + 1 }, x) - lh(NegBinomial{ r }, x) ==
              doctest::Approx(1.0 / (x + r)).epsilon(1e-12));
  }

  TEST_CASE("property: Gamma point-mass prior recovery")
  {
    oracle::Gen g(1);
    for (int i = 0; i < 500; ++i) {
      const double beta0 = g.uniform(0.01, 50.0), x = std::exp(g.uniform(-5.0, 5.0));
      CHECK(std::abs(pm(Gamma{ 1.0 }, x, -beta0) - beta0) <= 1e-12 * beta0);
      const double lf1 = 1.0 / x - beta0;
      CHECK(std::abs(pm(Gamma{ 2.0 }, x, lf1) - beta0) <= 1e-12 * std::max(beta0, 1.0 / x));
    }
  }

  TEST_CASE("harmonic sums agree with digamma")
  {
    for (long long m : { 0LL, 1LL, 2LL, 10LL, 1000LL, 123457LL, 1000000LL }) {
      const double ref = m == 0 ? 0.0 : digamma(static_cast<double>(m) + 1.0) + kEulerGamma;
      CHECK(std::abs(harmonic(m) - ref) <= 1e-12);
    }
    CHECK(harmonic(-3) == 0.0);
  }

  TEST_CASE("Gamma family against a conjugate Gamma prior by quadrature")
  {
    // beta ~ Gamma(shape a, rate b); x | beta ~ Gamma(alpha, rate beta).
    const double a = 2.5, b = 1.5;
    for (double alpha : { 0.7, 2.0, 4.0 })
      for (double x : { 0.3, 1.0, 3.0 }) {
        const auto lik = [&](double be) {
          return std::pow(be, alpha) * std::pow(x, alpha - 1) * std::exp(-be * x) /
                 std::tgamma(alpha) * std::pow(b, a) * std::pow(be, a - 1) * std::exp(-b * be) /
                 std::tgamma(a);
        };
        const double f = oracle::integrate(lik, 0.0, 80.0);
        const double num = oracle::integrate([&](double be) { return be * lik(be); }, 0.0, 80.0);
        const double lf1 = (alpha - 1.0) / x - (alpha + a) / (b + x);
        CHECK(pm(Gamma{ alpha }, x, lf1) == doctest::Approx(num / f).epsilon(1e-9));
      }
  }

  TEST_CASE("Beta family against a Gamma prior on alpha by quadrature")
  {
    // X ~ Beta(alpha, 2), z = log X, alpha ~ Gamma(3, 1).
    const double beta = 2.0;
    const auto prior = [](double al) { return al * al * std::exp(-al) / 2.0; };
    for (double x : { 0.2, 0.5, 0.9 }) {
      const double z = std::log(x);
      const auto dens = [&](double al) {
        return al * (al + 1.0) * std::exp(z * al) * (1.0 - x) * prior(al);
      };
      const double f = oracle::integrate(dens, 0.0, 200.0);
      const double f1 = oracle::integrate(
        [&](double al) {
          return al * (al + 1.0) * std::exp(z * al) * (al * (1.0 - x) - x) * prior(al);
        },
        0.0, 200.0);
      const double num = oracle::integrate([&](double al) { return al * dens(al); }, 0.0, 200.0);
      CHECK(pm(Beta{ beta }, z, f1 / f) == doctest::Approx(num / f).epsilon(1e-9));
    }
  }

  TEST_CASE("Binomial with a Beta prior: printed terms versus quadrature")
  {
    // With the exact log-marginal slope, the posterior mean of the log-odds
    // is psi(a + x) - psi(b + n - x). lh_prime carries H_x + H_{n-x} - 2 gamma,
    // which exceeds the slope term H_x - H_{n-x} by 2 (H_{n-x} - gamma); the
    // check pins that offset exactly.
    const double a = 2.0, b = 3.0;
    for (int n : { 4, 10 })
      for (int x = 0; x <= n; ++x) {
        const double lf1 = digamma(n - x + 1.0) - digamma(x + 1.0) + digamma(a + x) -
                           digamma(b + n - x);
        const auto post = [&](double p) {
          return std::pow(p, a + x - 1) * std::pow(1 - p, b + n - x - 1);
        };
        const double z = oracle::integrate(post, 0.0, 1.0);
        const double quad =
          oracle::integrate([&](double p) { return std::log(p / (1 - p)) * post(p); }, 0.0, 1.0) /
          z;
        CHECK(digamma(a + x) - digamma(b + n - x) == doctest::Approx(quad).epsilon(1e-9));
        const double offset = 2.0 * (harmonic(n - x) - kEulerGamma);
        CHECK(pm(Binomial{ n }, x, lf1) - offset == doctest::Approx(quad).epsilon(1e-9));
        CHECK(lf1 == doctest::Approx(oracle::central_difference(
                                       [&](double t) { return log_beta_binomial(n, t, a, b); },
                                       x + 0.0, 1e-6))
                       .epsilon(1e-6));
      }
  }

  TEST_CASE("discrete_lf1")
  {
    const std::vector<double> uniform(6, 1.0 / 6);
    for (int x = 0; x < 6; ++x)
      CHECK(discrete_lf1(uniform, x).lf1 == doctest::Approx(0.0));
    std::vector<double> geo;
    const double q = 0.6;
    for (int k = 0; k < 12; ++k)
      geo.push_back((1 - q) * std::pow(q, k));
    for (int x = 0; x < 12; ++x)
      CHECK(discrete_lf1(geo, x).lf1 == doctest::Approx(std::log(q)).epsilon(1e-12));
    const std::vector<double> holes{ 0.5, 0.0, 0.5 };
    try {
      discrete_lf1(holes, 0);
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ZeroMass);
    }
    CHECK_THROWS_AS(discrete_lf1(holes, 5), Error);
  }

  TEST_CASE("weighted KDE score provider")
  {
    Eigen::VectorXd x(3), t(3);
    x << 1.0, 2.0, 3.5;
    t << 1.0, 1.5, 2.0;
    const KernelContext ctx(validate_sample(x, t), { 0.5, 0.4 });
    const auto d = density_eval(ctx, 2.2, 1.2);
    CHECK(weighted_kde_lf1(ctx, 2.2, 1.2).lf1 == doctest::Approx(d.f1 / d.f).epsilon(1e-15));
  }
}
