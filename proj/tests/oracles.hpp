#pragma once

// Test-only reference implementations. Everything here is written as the
// straightest possible route to the answer (direct formulas, quadrature,
// brute-force scans) and stays independent of the library code it checks.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace oracle {

inline std::vector<double> sine(double fs, double duration_s, double freq_hz,
                                double amplitude = 1.0, double phase = 0.0,
                                double offset = 0.0) {
  const std::size_t n = static_cast<std::size_t>(duration_s * fs);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    x[i] = offset + amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * t + phase);
  }
  return x;
}

inline std::vector<double> time_grid(double fs, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i) / fs;
  return t;
}

// RMS-based amplitude estimate of a sinusoid over an interior window.
inline double sine_amplitude(std::span<const double> x, std::size_t skip) {
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = skip; i + skip < x.size(); ++i) {
    acc += x[i] * x[i];
    ++count;
  }
  return std::sqrt(2.0 * acc / static_cast<double>(count));
}

// Integer lag (b relative to a) maximizing the cross-correlation.
inline std::ptrdiff_t xcorr_argmax_lag(std::span<const double> a, std::span<const double> b,
                                       std::ptrdiff_t max_lag) {
  std::ptrdiff_t best_lag = 0;
  double best = -std::numeric_limits<double>::infinity();
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(std::min(a.size(), b.size()));
  for (std::ptrdiff_t lag = -max_lag; lag <= max_lag; ++lag) {
    double acc = 0.0;
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(0, -lag); i < n && i + lag < n; ++i)
      acc += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i + lag)];
    if (acc > best) {
      best = acc;
      best_lag = lag;
    }
  }
  return best_lag;
}

// Analog Butterworth magnitudes (single pass). Bilinear warping is
// negligible at the frequencies the tests probe (f << fs/2).
inline double butter_lowpass_mag(double f, double cutoff, int order) {
  return 1.0 / std::sqrt(1.0 + std::pow(f / cutoff, 2.0 * order));
}

inline double butter_bandpass_mag(double f, double low, double high, int order) {
  const int n_proto = order / 2;
  const double x = (f * f - low * high) / (f * (high - low));
  return 1.0 / std::sqrt(1.0 + std::pow(x * x, static_cast<double>(n_proto)));
}

// Direct-formula statistics on raw loops.
inline double rmsd_direct(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc / static_cast<double>(a.size()));
}

inline double mean_diff_direct(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] - b[i];
  return acc / static_cast<double>(a.size());
}

inline double pearson_direct(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Adaptive Simpson quadrature.
inline double simpson_adapt(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * eps)
    return left + right + (left + right - whole) / 15.0;
  return simpson_adapt(f, a, m, fa, flm, fm, eps / 2.0, depth - 1) +
         simpson_adapt(f, m, b, fm, frm, fb, eps / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double eps = 1e-12) {
  const double m = 0.5 * (a + b);
  return simpson_adapt(f, a, b, f(a), f(m), f(b), eps, 60);
}

// Student-t CDF by direct numerical integration of the density.
inline double t_cdf_quadrature(double t, double df) {
  const double log_norm = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) -
                          0.5 * std::log(df * std::numbers::pi);
  const auto density = [&](double x) {
    return std::exp(log_norm - (df + 1.0) / 2.0 * std::log1p(x * x / df));
  };
  const double at = std::fabs(t);
  const double tail = integrate(density, 0.0, at, 1e-13);
  return t >= 0 ? 0.5 + tail : 0.5 - tail;
}

// Tiny deterministic generator for test inputs (xorshift64*).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9E3779B97F4A7C15ull) {}

  std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1Dull;
  }

  double uniform(double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
  }

  double normal(double mu = 0.0, double sigma = 1.0) {
    const double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return mu + sigma * std::sqrt(-2.0 * std::log(u1)) *
                    std::cos(2.0 * std::numbers::pi * u2);
  }

  std::vector<double> uniform_vec(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (double& x : v) x = uniform(lo, hi);
    return v;
  }

 private:
  std::uint64_t state_;
};

}  // namespace oracle
