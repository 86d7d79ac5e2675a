// Serial reference vs OpenMP kernels on recording-sized buffers.
// 43500 samples is one 435 s protocol run at 100 Hz.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "earoxi/kernels.hpp"

using namespace earoxi;

namespace {

struct Buffers {
  std::vector<double> t, a, b, c, d, out;
  std::vector<std::uint8_t> valid;
  std::vector<double> knots_x, knots_y, beats;

  explicit Buffers(std::size_t n)
      : t(n), a(n), b(n), c(n), d(n), out(n), valid(n, 1) {
    for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i) / 100.0;
    kernels::serial::gaussian_noise(1, 1, 0, a);
    kernels::serial::gaussian_noise(1, 2, 0, b);
    kernels::serial::gaussian_noise(1, 3, 0, c);
    kernels::serial::gaussian_noise(1, 4, 0, d);
    for (double& v : b) v = 4.0 + v * 0.1;  // positive denominators
    for (double& v : d) v = 4.0 + v * 0.1;
    const double dur = t.back();
    for (double bt = 0.0; bt < dur; bt += 0.857) {
      knots_x.push_back(bt);
      knots_y.push_back(1.0 + 0.1 * static_cast<double>(knots_x.size() % 7));
      beats.push_back(bt);
    }
  }
};

}  // namespace

#define KERNEL_PAIR(name, call_serial, call_parallel)               \
  static void bm_##name##_serial(benchmark::State& state) {         \
    Buffers buf(static_cast<std::size_t>(state.range(0)));          \
    for (auto _ : state) {                                          \
      call_serial;                                                  \
      benchmark::ClobberMemory();                                   \
    }                                                               \
  }                                                                 \
  BENCHMARK(bm_##name##_serial)->Arg(43500)->Arg(1 << 20);          \
  static void bm_##name##_omp(benchmark::State& state) {            \
    Buffers buf(static_cast<std::size_t>(state.range(0)));          \
    for (auto _ : state) {                                          \
      call_parallel;                                                \
      benchmark::ClobberMemory();                                   \
    }                                                               \
  }                                                                 \
  BENCHMARK(bm_##name##_omp)->Arg(43500)->Arg(1 << 20)

KERNEL_PAIR(affine, kernels::serial::affine(buf.a, -17.0, 104.0, buf.out),
            kernels::affine(buf.a, -17.0, 104.0, buf.out));

KERNEL_PAIR(clamp, kernels::serial::clamp(buf.a, 0.0, 100.0, buf.out),
            kernels::clamp(buf.a, 0.0, 100.0, buf.out));

KERNEL_PAIR(ratio_of_ratios,
            kernels::serial::ratio_of_ratios(buf.a, buf.b, buf.c, buf.d, buf.out),
            kernels::ratio_of_ratios(buf.a, buf.b, buf.c, buf.d, buf.out));

KERNEL_PAIR(abs_sum, kernels::serial::abs_sum(buf.a, buf.c, buf.out),
            kernels::abs_sum(buf.a, buf.c, buf.out));

KERNEL_PAIR(interp_linear,
            kernels::serial::interp_linear(buf.knots_x, buf.knots_y, buf.t, buf.out),
            kernels::interp_linear(buf.knots_x, buf.knots_y, buf.t, buf.out));

KERNEL_PAIR(windowed_mean,
            kernels::serial::windowed_mean(buf.t, buf.a, buf.valid, 1.5, buf.out),
            kernels::windowed_mean(buf.t, buf.a, buf.valid, 1.5, buf.out));

KERNEL_PAIR(pulse_train, kernels::serial::pulse_train(buf.t, buf.beats, 0.35, buf.out),
            kernels::pulse_train(buf.t, buf.beats, 0.35, buf.out));

KERNEL_PAIR(gaussian_noise, kernels::serial::gaussian_noise(7, 1, 0, buf.out),
            kernels::gaussian_noise(7, 1, 0, buf.out));

BENCHMARK_MAIN();
