#include "earoxi/stats.hpp"

#include <algorithm>
#include <cmath>

#include "earoxi/errors.hpp"

namespace earoxi::stats {

namespace {

double mean_of(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x, double mean) {
  double s = 0;
  for (double v : x) s += (v - mean) * (v - mean);
  return s / static_cast<double>(x.size() - 1);
}

// Continued fraction for the incomplete beta (Lentz' method).
double betacf(double a, double b, double x) {
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  constexpr int kMaxIter = 500;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  raise(errc::invalid_config, "incomplete beta continued fraction failed to converge");
}

}  // namespace

void PairedSamples::validate() const {
  if (a.size() != b.size()) raise(errc::length_mismatch, "paired samples differ in length");
  if (a.size() < 2) raise(errc::too_few_samples, "paired statistics need >= 2 subjects");
  if (!labels.empty() && labels.size() != a.size())
    raise(errc::length_mismatch, "labels must match the sample count");
  for (double v : a)
    if (!std::isfinite(v)) raise(errc::too_few_samples, "missing value in series a");
  for (double v : b)
    if (!std::isfinite(v)) raise(errc::too_few_samples, "missing value in series b");
}

double rms_difference(const PairedSamples& p) {
  p.validate();
  double acc = 0;
  for (std::size_t i = 0; i < p.a.size(); ++i) {
    const double d = p.a[i] - p.b[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(p.a.size()));
}

double mean_difference(const PairedSamples& p) {
  p.validate();
  double acc = 0;
  for (std::size_t i = 0; i < p.a.size(); ++i) acc += p.a[i] - p.b[i];
  return acc / static_cast<double>(p.a.size());
}

double ibeta_reg(double a, double b, double x) {
  if (x < 0.0 || x > 1.0) raise(errc::invalid_config, "ibeta argument outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = df / (df + t * t);
  const double tail = 0.5 * ibeta_reg(df / 2.0, 0.5, x);
  return t >= 0 ? 1.0 - tail : tail;
}

double student_t_two_sided_p(double t, double df) {
  if (std::isinf(t)) return 0.0;
  return ibeta_reg(df / 2.0, 0.5, df / (df + t * t));
}

TTestResult t_test(std::span<const double> x, std::span<const double> y, TTestMode mode) {
  if (x.size() < 2 || y.size() < 2)
    raise(errc::too_few_samples, "t test needs >= 2 samples per group");

  if (mode == TTestMode::Paired) {
    if (x.size() != y.size())
      raise(errc::length_mismatch, "paired t test needs equal-length groups");
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
    const double n = static_cast<double>(d.size());
    const double md = mean_of(d);
    const double var = sample_variance(d, md);
    if (var == 0.0) {
      if (md == 0.0) return {0.0, 1.0, n - 1.0};
      raise(errc::zero_variance, "paired differences are constant and non-zero");
    }
    const double t = md / std::sqrt(var / n);
    return {t, student_t_two_sided_p(t, n - 1.0), n - 1.0};
  }

  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  const double mx = mean_of(x);
  const double my = mean_of(y);
  const double vx = sample_variance(x, mx);
  const double vy = sample_variance(y, my);
  if (vx == 0.0 && vy == 0.0) {
    if (mx == my) return {0.0, 1.0, nx + ny - 2.0};
    raise(errc::zero_variance, "both groups are constant with different means");
  }
  const double sex = vx / nx;
  const double sey = vy / ny;
  const double t = (mx - my) / std::sqrt(sex + sey);
  const double df = (sex + sey) * (sex + sey) /
                    (sex * sex / (nx - 1.0) + sey * sey / (ny - 1.0));
  return {t, student_t_two_sided_p(t, df), df};
}

PearsonResult pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) raise(errc::length_mismatch, "correlation needs aligned samples");
  if (x.size() < 3) raise(errc::too_few_samples, "correlation needs >= 3 samples");
  const double n = static_cast<double>(x.size());
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0;
  double sxx = 0;
  double syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0)
    raise(errc::zero_variance, "correlation undefined for a constant series");
  const double r = sxy / std::sqrt(sxx * syy);
  const double one_minus_r2 = std::max(0.0, 1.0 - r * r);
  if (one_minus_r2 < 1e-15) return {r, 0.0};
  const double t = r * std::sqrt((n - 2.0) / one_minus_r2);
  return {r, student_t_two_sided_p(t, n - 2.0)};
}

}  // namespace earoxi::stats
