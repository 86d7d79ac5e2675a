#include "earoxi/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>

namespace earoxi::kernels {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// splitmix64 output at an arbitrary sequence position.
inline std::uint64_t splitmix_at(std::uint64_t state0, std::uint64_t n) {
  return mix64(state0 + (n + 1) * kGolden);
}

inline double unit_open(std::uint64_t h) {
  // (0, 1]: never 0, so log() below is safe.
  return static_cast<double>((h >> 11) + 1) * 0x1.0p-53;
}

inline double normal_at(std::uint64_t state0, std::uint64_t n) {
  const double u1 = unit_open(splitmix_at(state0, 2 * n));
  const double u2 = unit_open(splitmix_at(state0, 2 * n + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline double interp_at(std::span<const double> xs, std::span<const double> ys, double q) {
  if (q <= xs.front()) return ys.front();
  if (q >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), q);
  const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  const std::size_t lo = hi - 1;
  const double w = (q - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + w * (ys[hi] - ys[lo]);
}

inline double windowed_mean_at(std::span<const double> t, std::span<const double> x,
                               std::span<const std::uint8_t> valid, double half_width,
                               std::size_t i) {
  const auto lo = std::lower_bound(t.begin(), t.end(), t[i] - half_width);
  const auto hi = std::upper_bound(t.begin(), t.end(), t[i] + half_width);
  double sum = 0;
  std::size_t count = 0;
  for (auto it = lo; it != hi; ++it) {
    const std::size_t j = static_cast<std::size_t>(it - t.begin());
    if (!valid.empty() && !valid[j]) continue;
    sum += x[j];
    ++count;
  }
  return count ? sum / static_cast<double>(count) : x[i];
}

inline double pulse_at(std::span<const double> beat_times, double duty, double tq) {
  if (tq < beat_times.front()) return 0.0;
  const auto it = std::upper_bound(beat_times.begin(), beat_times.end(), tq);
  const std::size_t k = static_cast<std::size_t>(it - beat_times.begin()) - 1;
  const double period = (k + 1 < beat_times.size()) ? beat_times[k + 1] - beat_times[k]
                                                    : beat_times[k] - beat_times[k - 1];
  const double width = duty * period;
  const double tau = tq - beat_times[k];
  if (tau >= width) return 0.0;
  return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * tau / width));
}

}  // namespace

namespace serial {

void affine(std::span<const double> x, double scale, double offset, std::span<double> out) {
  assert(x.size() == out.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = scale * x[i] + offset;
}

void clamp(std::span<const double> x, double lo, double hi, std::span<double> out) {
  assert(x.size() == out.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::min(std::max(x[i], lo), hi);
}

void ratio_of_ratios(std::span<const double> ac_a, std::span<const double> dc_a,
                     std::span<const double> ac_b, std::span<const double> dc_b,
                     std::span<double> out) {
  assert(ac_a.size() == out.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (ac_a[i] / dc_a[i]) / (ac_b[i] / dc_b[i]);
}

void abs_sum(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  assert(a.size() == out.size() && b.size() == out.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::fabs(a[i]) + std::fabs(b[i]);
}

void interp_linear(std::span<const double> xs, std::span<const double> ys,
                   std::span<const double> q, std::span<double> out) {
  assert(xs.size() == ys.size() && !xs.empty() && q.size() == out.size());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = interp_at(xs, ys, q[i]);
}

void windowed_mean(std::span<const double> t, std::span<const double> x,
                   std::span<const std::uint8_t> valid, double half_width,
                   std::span<double> out) {
  assert(t.size() == x.size() && out.size() == x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = windowed_mean_at(t, x, valid, half_width, i);
}

void pulse_train(std::span<const double> t, std::span<const double> beat_times, double duty,
                 std::span<double> out) {
  assert(beat_times.size() >= 2 && t.size() == out.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = pulse_at(beat_times, duty, t[i]);
}

void gaussian_noise(std::uint64_t seed, std::uint64_t stream, std::uint64_t offset,
                    std::span<double> out) {
  const std::uint64_t state0 = mix64(seed ^ mix64(stream + kGolden));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = normal_at(state0, offset + i);
}

}  // namespace serial

void affine(std::span<const double> x, double scale, double offset, std::span<double> out) {
  assert(x.size() == out.size());
  const std::int64_t n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = scale * x[i] + offset;
}

void clamp(std::span<const double> x, double lo, double hi, std::span<double> out) {
  assert(x.size() == out.size());
  const std::int64_t n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = std::min(std::max(x[i], lo), hi);
}

void ratio_of_ratios(std::span<const double> ac_a, std::span<const double> dc_a,
                     std::span<const double> ac_b, std::span<const double> dc_b,
                     std::span<double> out) {
  assert(ac_a.size() == out.size());
  const std::int64_t n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    out[i] = (ac_a[i] / dc_a[i]) / (ac_b[i] / dc_b[i]);
}

void abs_sum(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  assert(a.size() == out.size() && b.size() == out.size());
  const std::int64_t n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = std::fabs(a[i]) + std::fabs(b[i]);
}

void interp_linear(std::span<const double> xs, std::span<const double> ys,
                   std::span<const double> q, std::span<double> out) {
  assert(xs.size() == ys.size() && !xs.empty() && q.size() == out.size());
  const std::int64_t n = static_cast<std::int64_t>(q.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = interp_at(xs, ys, q[i]);
}

void windowed_mean(std::span<const double> t, std::span<const double> x,
                   std::span<const std::uint8_t> valid, double half_width,
                   std::span<double> out) {
  assert(t.size() == x.size() && out.size() == x.size());
  const std::int64_t n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    out[i] = windowed_mean_at(t, x, valid, half_width, static_cast<std::size_t>(i));
}

void pulse_train(std::span<const double> t, std::span<const double> beat_times, double duty,
                 std::span<double> out) {
  assert(beat_times.size() >= 2 && t.size() == out.size());
  const std::int64_t n = static_cast<std::int64_t>(t.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = pulse_at(beat_times, duty, t[i]);
}

void gaussian_noise(std::uint64_t seed, std::uint64_t stream, std::uint64_t offset,
                    std::span<double> out) {
  const std::uint64_t state0 = mix64(seed ^ mix64(stream + kGolden));
  const std::int64_t n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    out[i] = normal_at(state0, offset + static_cast<std::uint64_t>(i));
}

}  // namespace earoxi::kernels
