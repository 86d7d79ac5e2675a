#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

// Flat per-sample kernels shared by the pipeline and the signal generator.
// Every kernel exists twice: a serial reference implementation under
// kernels::serial, and an OpenMP version under kernels:: used in
// production. Both compute each output element with identical arithmetic,
// so results are bitwise equal regardless of thread count; the unit tests
// assert that and the bench target compares their throughput.

namespace earoxi::kernels {

namespace serial {

// out[i] = scale * x[i] + offset
void affine(std::span<const double> x, double scale, double offset, std::span<double> out);

// out[i] = min(max(x[i], lo), hi)
void clamp(std::span<const double> x, double lo, double hi, std::span<double> out);

// out[i] = (ac_a[i]/dc_a[i]) / (ac_b[i]/dc_b[i]); caller validates dc > 0.
void ratio_of_ratios(std::span<const double> ac_a, std::span<const double> dc_a,
                     std::span<const double> ac_b, std::span<const double> dc_b,
                     std::span<double> out);

// out[i] = |a[i]| + |b[i]|
void abs_sum(std::span<const double> a, std::span<const double> b, std::span<double> out);

// Piecewise-linear interpolation of (xs, ys) evaluated at q; xs strictly
// increasing. Queries outside [xs.front, xs.back] hold the end value.
void interp_linear(std::span<const double> xs, std::span<const double> ys,
                   std::span<const double> q, std::span<double> out);

// Centered time-window mean: out[i] = mean of x[j] over valid j with
// |t[j]-t[i]| <= half_width. Samples with valid[j]==0 are skipped; if the
// window holds no valid sample, out[i] = x[i].
void windowed_mean(std::span<const double> t, std::span<const double> x,
                   std::span<const std::uint8_t> valid, double half_width,
                   std::span<double> out);

// Raised-cosine pulse train: one bump of width duty*(local beat period)
// starting at each beat, amplitude 0..1, zero between bumps. beat_times
// strictly increasing, at least 2 entries.
void pulse_train(std::span<const double> t, std::span<const double> beat_times, double duty,
                 std::span<double> out);

// Counter-based standard normal noise: out[i] depends only on
// (seed, stream, offset + i), so generation order and thread count do not
// matter.
void gaussian_noise(std::uint64_t seed, std::uint64_t stream, std::uint64_t offset,
                    std::span<double> out);

}  // namespace serial

void affine(std::span<const double> x, double scale, double offset, std::span<double> out);
void clamp(std::span<const double> x, double lo, double hi, std::span<double> out);
void ratio_of_ratios(std::span<const double> ac_a, std::span<const double> dc_a,
                     std::span<const double> ac_b, std::span<const double> dc_b,
                     std::span<double> out);
void abs_sum(std::span<const double> a, std::span<const double> b, std::span<double> out);
void interp_linear(std::span<const double> xs, std::span<const double> ys,
                   std::span<const double> q, std::span<double> out);
void windowed_mean(std::span<const double> t, std::span<const double> x,
                   std::span<const std::uint8_t> valid, double half_width,
                   std::span<double> out);
void pulse_train(std::span<const double> t, std::span<const double> beat_times, double duty,
                 std::span<double> out);
void gaussian_noise(std::uint64_t seed, std::uint64_t stream, std::uint64_t offset,
                    std::span<double> out);

}  // namespace earoxi::kernels
