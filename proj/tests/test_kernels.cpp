#include <doctest.h>

#include <cmath>
#include <vector>

#include "earoxi/kernels.hpp"
#include "oracles.hpp"

using namespace earoxi;

namespace {

std::vector<std::uint8_t> all_valid(std::size_t n) {
  return std::vector<std::uint8_t>(n, 1);
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("parallel kernels match the serial reference bitwise") {
  oracle::Rng rng(11);
  const std::size_t n = 4321;
  const auto t = oracle::time_grid(100.0, n);
  const auto x = rng.uniform_vec(n, -5.0, 5.0);
  const auto y = rng.uniform_vec(n, 0.5, 5.0);
  const auto z = rng.uniform_vec(n, -3.0, 3.0);
  const auto w = rng.uniform_vec(n, 1.0, 9.0);

  std::vector<double> a(n), b(n);

  kernels::serial::affine(x, -17.0, 104.0, a);
  kernels::affine(x, -17.0, 104.0, b);
  CHECK(a == b);

  kernels::serial::clamp(x, -1.0, 1.0, a);
  kernels::clamp(x, -1.0, 1.0, b);
  CHECK(a == b);

  kernels::serial::ratio_of_ratios(x, y, z, w, a);
  kernels::ratio_of_ratios(x, y, z, w, b);
  CHECK(a == b);

  kernels::serial::abs_sum(x, z, a);
  kernels::abs_sum(x, z, b);
  CHECK(a == b);

  const std::vector<double> knots_x = {0.0, 1.0, 2.5, 7.0, 40.0};
  const std::vector<double> knots_y = {1.0, -2.0, 4.0, 0.5, 3.0};
  kernels::serial::interp_linear(knots_x, knots_y, t, a);
  kernels::interp_linear(knots_x, knots_y, t, b);
  CHECK(a == b);

  const auto valid = all_valid(n);
  kernels::serial::windowed_mean(t, x, valid, 1.5, a);
  kernels::windowed_mean(t, x, valid, 1.5, b);
  CHECK(a == b);

  std::vector<double> beats;
  for (double bt = 0.3; bt < 42.0; bt += 0.85) beats.push_back(bt);
  kernels::serial::pulse_train(t, beats, 0.35, a);
  kernels::pulse_train(t, beats, 0.35, b);
  CHECK(a == b);

  kernels::serial::gaussian_noise(42, 7, 1000, a);
  kernels::gaussian_noise(42, 7, 1000, b);
  CHECK(a == b);
}

TEST_CASE("interp_linear holds end values and hits midpoints") {
  const std::vector<double> xs = {1.0, 2.0, 4.0};
  const std::vector<double> ys = {10.0, 20.0, 10.0};
  const std::vector<double> q = {0.0, 1.0, 1.5, 3.0, 4.0, 9.0};
  std::vector<double> out(q.size());
  kernels::interp_linear(xs, ys, q, out);
  CHECK(out[0] == 10.0);
  CHECK(out[1] == 10.0);
  CHECK(out[2] == doctest::Approx(15.0));
  CHECK(out[3] == doctest::Approx(15.0));
  CHECK(out[4] == 10.0);
  CHECK(out[5] == 10.0);
}

TEST_CASE("windowed_mean on a constant signal is the constant") {
  const std::size_t n = 500;
  const auto t = oracle::time_grid(100.0, n);
  const std::vector<double> x(n, 3.25);
  std::vector<double> out(n);
  kernels::windowed_mean(t, x, all_valid(n), 1.5, out);
  for (double v : out) CHECK(v == doctest::Approx(3.25).epsilon(1e-12));
}

TEST_CASE("windowed_mean skips masked samples and falls back when empty") {
  const std::vector<double> t = {0.0, 0.5, 1.0, 10.0};
  const std::vector<double> x = {1.0, 100.0, 3.0, 7.0};
  const std::vector<std::uint8_t> valid = {1, 0, 1, 0};
  std::vector<double> out(4);
  kernels::windowed_mean(t, x, valid, 0.6, out);
  CHECK(out[0] == doctest::Approx(1.0));         // masked neighbor skipped
  CHECK(out[1] == doctest::Approx(2.0));         // mean of {1, 3}
  CHECK(out[3] == doctest::Approx(7.0));         // nothing valid in window
}

TEST_CASE("pulse_train bumps are unit height and zero between beats") {
  const double fs = 1000.0;
  const auto t = oracle::time_grid(fs, 3000);
  const std::vector<double> beats = {0.5, 1.5, 2.5};
  std::vector<double> p(t.size());
  kernels::pulse_train(t, beats, 0.4, p);
  double maxv = 0.0;
  for (double v : p) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    maxv = std::max(maxv, v);
  }
  CHECK(maxv == doctest::Approx(1.0).epsilon(1e-4));
  // outside [beat, beat + 0.4 s) the train is exactly zero
  CHECK(p[0] == 0.0);
  CHECK(p[static_cast<std::size_t>(1.45 * fs)] == 0.0);
}

TEST_CASE("gaussian noise is a pure function of (seed, stream, index)") {
  std::vector<double> whole(256);
  kernels::gaussian_noise(9, 1, 0, whole);

  std::vector<double> head(100), tail(156);
  kernels::gaussian_noise(9, 1, 0, head);
  kernels::gaussian_noise(9, 1, 100, tail);
  for (std::size_t i = 0; i < head.size(); ++i) CHECK(whole[i] == head[i]);
  for (std::size_t i = 0; i < tail.size(); ++i) CHECK(whole[100 + i] == tail[i]);

  std::vector<double> other(256);
  kernels::gaussian_noise(9, 2, 0, other);
  CHECK(whole != other);
}

TEST_CASE("gaussian noise moments") {
  std::vector<double> x(200000);
  kernels::gaussian_noise(1234, 0, 0, x);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size() - 1);
  CHECK(std::fabs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

}  // TEST_SUITE
