#include "nest/data.hpp"
#include "nest/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

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

template <class F>
ErrorCode
code_of(F&& f)
{
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected nest::Error");
  return ErrorCode::IoError;
}

} // namespace

TEST_SUITE("data_model")
{
  TEST_CASE("validate_sample accepts a single row")
  {
    const HeteroSample s = validate_sample(vec({ 0.0 }), vec({ 1.0 }));
    CHECK(s.size() == 1);
    CHECK_FALSE(s.has_truth());
  }

  TEST_CASE("validate_sample reports the offending row")
  {
    try {
      validate_sample(vec({ 0.0 }), vec({ 0.0 }));
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonPositiveSigma);
      REQUIRE(e.index());
      CHECK(*e.index() == 0);
    }
    try {
      validate_sample(vec({ 0.0, 1.0, std::numeric_limits<double>::quiet_NaN() }),
                      vec({ 1.0, 1.0, 1.0 }));
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonFiniteValue);
      CHECK(*e.index() == 2);
    }
    CHECK(code_of([] { validate_sample(vec({ 1.0 }), vec({ -2.0 })); }) ==
          ErrorCode::NonPositiveSigma);
    CHECK(code_of([] {
            validate_sample(vec({ 1.0 }), vec({ std::numeric_limits<double>::infinity() }));
          }) == ErrorCode::NonFiniteValue);
  }

  TEST_CASE("validate_sample rejects length mismatches")
  {
    CHECK(code_of([] { validate_sample(vec({ 1.0, 2.0 }), vec({ 1.0 })); }) ==
          ErrorCode::LengthMismatch);
    CHECK(code_of([] { validate_sample(vec({ 1.0 }), vec({ 1.0 }), vec({ 1.0, 2.0 })); }) ==
          ErrorCode::LengthMismatch);
  }

  TEST_CASE("validate_sample is pure")
  {
    const auto a = validate_sample(vec({ 1.0, -2.0 }), vec({ 0.5, 3.0 }), vec({ 0.0, 1.0 }));
    const auto b = validate_sample(vec({ 1.0, -2.0 }), vec({ 0.5, 3.0 }), vec({ 0.0, 1.0 }));
    CHECK(a.x() == b.x());
    CHECK(a.sigma() == b.sigma());
    CHECK(*a.mu_true() == *b.mu_true());
  }

  TEST_CASE("subset and without_truth")
  {
    const auto s = validate_sample(vec({ 1, 2, 3 }), vec({ 1, 2, 3 }), vec({ 4, 5, 6 }));
    const std::vector<Index> idx{ 2, 0 };
    const auto sub = s.subset(idx);
    CHECK(sub.x() == vec({ 3, 1 }));
    CHECK(sub.sigma() == vec({ 3, 1 }));
    CHECK(*sub.mu_true() == vec({ 6, 4 }));
    CHECK_FALSE(s.without_truth().has_truth());
  }

  TEST_CASE("check_bandwidths")
  {
    CHECK_NOTHROW(check_bandwidths({ 0.5, 0.1 }));
    CHECK(code_of([] { check_bandwidths({ 0.0, 0.1 }); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { check_bandwidths({ 0.5, -1.0 }); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("kfold_split examples")
  {
    const auto f5 = kfold_split(10, 5, 123);
    for (int k = 0; k < 5; ++k)
      CHECK(f5.members(k).size() == 2);

    std::vector<std::size_t> sizes;
    const auto f3 = kfold_split(10, 3, 99);
    for (int k = 0; k < 3; ++k)
      sizes.push_back(f3.members(k).size());
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<std::size_t>{ 3, 3, 4 });

    CHECK(kfold_split(10, 5, 7).fold_of == kfold_split(10, 5, 7).fold_of);
    CHECK(kfold_split(100, 5, 7).fold_of != kfold_split(100, 5, 8).fold_of);
  }

  TEST_CASE("kfold_split rejects bad fold counts")
  {
    CHECK(code_of([] { kfold_split(10, 1, 0); }) == ErrorCode::BadFoldCount);
    CHECK(code_of([] { kfold_split(3, 4, 0); }) == ErrorCode::BadFoldCount);
  }

  TEST_CASE("property: folds partition the index set with balanced sizes")
  {
    for (Index n = 2; n <= 60; n += 3) {
      for (int K = 2; K <= std::min<Index>(n, 12); ++K) {
        const auto f = kfold_split(n, K, static_cast<std::uint64_t>(n * 31 + K));
        REQUIRE(f.size() == n);
        std::set<Index> seen;
        std::size_t lo = static_cast<std::size_t>(n), hi = 0;
        for (int k = 0; k < K; ++k) {
          const auto m = f.members(k);
          lo = std::min(lo, m.size());
          hi = std::max(hi, m.size());
          for (Index i : m)
            CHECK(seen.insert(i).second);
          const auto c = f.complement(k);
          CHECK(static_cast<Index>(m.size() + c.size()) == n);
          CHECK(std::is_sorted(m.begin(), m.end()));
        }
        CHECK(static_cast<Index>(seen.size()) == n);
        CHECK(hi - lo <= 1);
      }
    }
  }
}

TEST_SUITE("random")
{
  TEST_CASE("engine output is the standard mt19937_64 sequence")
  {
    // The 10000th output of a default-seeded mt19937_64 is fixed by the
    // C++ standard.
    std::mt19937_64 ref;
    ref.discard(9999);
    CHECK(ref() == 9981545732273789042ULL);
  }

  TEST_CASE("streams are deterministic and distinct")
  {
    Rng a(derive_seed(42, 1)), b(derive_seed(42, 1)), c(derive_seed(42, 2));
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
      const auto va = a.next();
      CHECK(va == b.next());
      differs = differs || va != c.next();
    }
    CHECK(differs);
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
    CHECK(derive_seed(1, 2) == derive_seed(1, 2, 0));
  }

  TEST_CASE("uniform and below stay in range")
  {
    Rng r(5);
    for (int i = 0; i < 10000; ++i) {
      const double u = r.uniform();
      CHECK((u >= 0.0 && u < 1.0));
      CHECK(r.below(7) < 7u);
    }
  }

  TEST_CASE("normal moments")
  {
    Rng r(11);
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double z = r.normal();
      s += z;
      s2 += z * z;
    }
    const double mean = s / n;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(n));
    CHECK(std::abs(s2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
  }

  TEST_CASE("below is unbiased for a non-power-of-two range")
  {
    Rng r(3);
    std::vector<int> counts(3, 0);
    const int n = 90000;
    for (int i = 0; i < n; ++i)
      ++counts[r.below(3)];
    for (int c : counts)
      CHECK(std::abs(c - n / 3) < 4.0 * std::sqrt(n * (1.0 / 3) * (2.0 / 3)));
  }
}
