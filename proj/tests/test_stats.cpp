#include <doctest.h>

#include <cmath>
#include <vector>

#include "earoxi/errors.hpp"
#include "earoxi/stats.hpp"
#include "oracles.hpp"

using namespace earoxi;

TEST_SUITE("stats") {

TEST_CASE("rms difference basics") {
  stats::PairedSamples p;
  p.a = {1, 0, 1, 0};
  p.b = {0, 1, 0, 1};
  CHECK(stats::rms_difference(p) == doctest::Approx(1.0).epsilon(1e-12));
  p.b = p.a;
  CHECK(stats::rms_difference(p) == 0.0);
}

TEST_CASE("mean difference basics") {
  stats::PairedSamples p;
  p.a = {1, 0};
  p.b = {0, 1};
  CHECK(stats::mean_difference(p) == doctest::Approx(0.0));
  p.a = {0.2, 0.3, 0.2};
  p.b = {0.0, 0.0, 0.0};
  CHECK(stats::mean_difference(p) == doctest::Approx(0.7 / 3.0).epsilon(1e-12));
}

TEST_CASE("rmsd and mean difference match brute force on 14-subject vectors") {
  oracle::Rng rng(2024);
  for (int rep = 0; rep < 50; ++rep) {
    stats::PairedSamples p;
    p.a = rng.uniform_vec(14, 90.0, 100.0);
    p.b = rng.uniform_vec(14, 90.0, 100.0);
    CHECK(stats::rms_difference(p) ==
          doctest::Approx(oracle::rmsd_direct(p.a, p.b)).epsilon(1e-12));
    CHECK(stats::mean_difference(p) ==
          doctest::Approx(oracle::mean_diff_direct(p.a, p.b)).epsilon(1e-12));
  }
}

TEST_CASE("rmsd dominates the absolute mean difference") {
  oracle::Rng rng(7);
  for (int rep = 0; rep < 1000; ++rep) {
    stats::PairedSamples p;
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform(0.0, 12.0));
    p.a = rng.uniform_vec(n, -10.0, 10.0);
    p.b = rng.uniform_vec(n, -10.0, 10.0);
    CHECK(stats::rms_difference(p) >= std::fabs(stats::mean_difference(p)) - 1e-12);
    // symmetry up to sign
    stats::PairedSamples q;
    q.a = p.b;
    q.b = p.a;
    CHECK(stats::rms_difference(q) == doctest::Approx(stats::rms_difference(p)).epsilon(1e-12));
    CHECK(stats::mean_difference(q) ==
          doctest::Approx(-stats::mean_difference(p)).epsilon(1e-12));
  }
}

TEST_CASE("paired samples validation") {
  stats::PairedSamples p;
  p.a = {1};
  p.b = {1};
  CHECK_THROWS_AS(stats::rms_difference(p), Error);
  p.a = {1, 2};
  p.b = {1, 2, 3};
  CHECK_THROWS_AS(stats::mean_difference(p), Error);
}

TEST_CASE("t distribution CDF matches quadrature to 1e-9") {
  for (double df : {1.0, 2.0, 3.0, 6.0, 6.93, 12.0, 13.0, 30.0, 100.0}) {
    for (double t : {-8.0, -3.0, -1.5, -0.5, 0.0, 0.3, 1.0, 2.7, 5.0, 10.0}) {
      const double have = stats::student_t_cdf(t, df);
      const double want = oracle::t_cdf_quadrature(t, df);
      CHECK(std::fabs(have - want) < 1e-9);
    }
  }
}

TEST_CASE("two-sided p values stay in [0, 1]") {
  oracle::Rng rng(99);
  for (int rep = 0; rep < 500; ++rep) {
    const double t = rng.uniform(-50.0, 50.0);
    const double df = rng.uniform(1.0, 200.0);
    const double p = stats::student_t_two_sided_p(t, df);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("paired t test on identical vectors degrades to p = 1") {
  const std::vector<double> x = {3.0, 4.0, 5.0, 6.0};
  const auto res = stats::t_test(x, x, stats::TTestMode::Paired);
  CHECK(res.t == 0.0);
  CHECK(res.p == 1.0);
}

TEST_CASE("constant non-zero paired differences are a zero-variance error") {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  const std::vector<double> y = {2, 3, 4, 5, 6};
  try {
    stats::t_test(x, y, stats::TTestMode::Paired);
    FAIL("expected ZeroVariance");
  } catch (const Error& e) {
    CHECK(e.code() == errc::zero_variance);
  }
}

TEST_CASE("paired and Welch t tests match an independent computation") {
  // fixed 7-element vectors; reference values computed in-test by the
  // direct formulas, p through the quadrature CDF
  const std::vector<double> x = {12.1, 9.8, 15.3, 11.0, 13.7, 10.2, 14.9};
  const std::vector<double> y = {8.4, 10.6, 9.1, 7.7, 12.0, 8.8, 9.5};

  const auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double u : v) s += u;
    return s / static_cast<double>(v.size());
  };
  const auto var = [&](const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0;
    for (double u : v) s += (u - m) * (u - m);
    return s / static_cast<double>(v.size() - 1);
  };

  SUBCASE("welch") {
    const double nx = 7, ny = 7;
    const double sex = var(x) / nx, sey = var(y) / ny;
    const double t_ref = (mean(x) - mean(y)) / std::sqrt(sex + sey);
    const double df_ref =
        (sex + sey) * (sex + sey) / (sex * sex / (nx - 1) + sey * sey / (ny - 1));
    const double p_ref = 2.0 * (1.0 - oracle::t_cdf_quadrature(std::fabs(t_ref), df_ref));

    const auto res = stats::t_test(x, y, stats::TTestMode::Welch);
    CHECK(res.t == doctest::Approx(t_ref).epsilon(1e-12));
    CHECK(res.df == doctest::Approx(df_ref).epsilon(1e-12));
    CHECK(std::fabs(res.p - p_ref) < 1e-9);
  }

  SUBCASE("paired") {
    std::vector<double> d(7);
    for (std::size_t i = 0; i < 7; ++i) d[i] = x[i] - y[i];
    const double t_ref = mean(d) / std::sqrt(var(d) / 7.0);
    const double p_ref = 2.0 * (1.0 - oracle::t_cdf_quadrature(std::fabs(t_ref), 6.0));

    const auto res = stats::t_test(x, y, stats::TTestMode::Paired);
    CHECK(res.t == doctest::Approx(t_ref).epsilon(1e-12));
    CHECK(res.df == 6.0);
    CHECK(std::fabs(res.p - p_ref) < 1e-9);
  }
}

TEST_CASE("pearson correlation endpoints") {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  std::vector<double> y2x(5), ynegx(5);
  for (std::size_t i = 0; i < 5; ++i) {
    y2x[i] = 2.0 * x[i];
    ynegx[i] = -x[i];
  }
  CHECK(stats::pearson_r(x, y2x).r == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(stats::pearson_r(x, ynegx).r == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("pearson matches the direct covariance formula on 14-element vectors") {
  oracle::Rng rng(5150);
  for (int rep = 0; rep < 50; ++rep) {
    const auto x = rng.uniform_vec(14, 19.0, 38.0);
    const auto y = rng.uniform_vec(14, 2.0, 25.0);
    CHECK(stats::pearson_r(x, y).r ==
          doctest::Approx(oracle::pearson_direct(x, y)).epsilon(1e-12));
  }
}

TEST_CASE("pearson is invariant under positive affine transforms") {
  oracle::Rng rng(31);
  const auto x = rng.uniform_vec(10, 0.0, 1.0);
  const auto y = rng.uniform_vec(10, 0.0, 1.0);
  const double base = stats::pearson_r(x, y).r;
  std::vector<double> xs(10), ys(10);
  for (std::size_t i = 0; i < 10; ++i) {
    xs[i] = 3.7 * x[i] + 11.0;
    ys[i] = 0.25 * y[i] - 4.0;
  }
  CHECK(stats::pearson_r(xs, ys).r == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("pearson guards") {
  const std::vector<double> constant = {2, 2, 2, 2};
  const std::vector<double> x = {1, 2, 3, 4};
  try {
    stats::pearson_r(x, constant);
    FAIL("expected ZeroVariance");
  } catch (const Error& e) {
    CHECK(e.code() == errc::zero_variance);
  }
  const std::vector<double> two = {1, 2};
  CHECK_THROWS_AS(stats::pearson_r(two, two), Error);
}

}  // TEST_SUITE
