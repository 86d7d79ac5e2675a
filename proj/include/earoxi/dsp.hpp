#pragma once

#include <complex>
#include <span>
#include <vector>

namespace earoxi::dsp {

enum class FilterKind { BandPass, LowPass };

// Butterworth only; order is the total pole count (a BandPass of order 4
// uses a second-order analog prototype).
struct FilterSpec {
  FilterKind kind = FilterKind::BandPass;
  double low_hz = 1.0;    // lower cutoff; the only cutoff for LowPass
  double high_hz = 30.0;  // upper cutoff, BandPass only
  int order = 4;

  static FilterSpec band_pass(double low_hz, double high_hz, int order = 4);
  static FilterSpec low_pass(double cutoff_hz, int order = 2);
  void validate(double fs) const;
};

struct Biquad {
  double b0, b1, b2;  // numerator
  double a1, a2;      // denominator, a0 normalized to 1
};

// Cascade of second-order sections designed from a FilterSpec. Coefficients
// are exposed read-only so tests can check them against the analog response.
class SosFilter {
 public:
  static SosFilter design(const FilterSpec& spec, double fs);

  const std::vector<Biquad>& sections() const { return sections_; }
  double fs() const { return fs_; }

  // Single forward-pass frequency response at f_hz.
  std::complex<double> response(double f_hz) const;

  // One causal pass, state initialized to the steady-state response for a
  // constant input equal to the first sample.
  void apply_forward(std::span<double> x) const;

 private:
  std::vector<Biquad> sections_;
  double fs_ = 0;
};

enum class PadMode { Reflect, MeanExtend };

// Forward-backward filtering: zero phase, squared magnitude. pad samples
// are prepended/appended per mode before filtering and trimmed after.
std::vector<double> filtfilt(const SosFilter& filter, std::span<const double> x,
                             std::size_t pad, PadMode mode);

// Zero-phase filter of a uniformly sampled signal, reflection padding of
// 3/low_hz seconds. Throws SignalTooShort when the signal cannot cover the
// padding.
std::vector<double> filter_zero_phase(std::span<const double> x, double fs,
                                      const FilterSpec& spec);

// Slow baseline of a raw channel: zero-phase low-pass (default 0.01 Hz,
// order 2) with 100 s mean-extension padding. Requires >= 60 s of signal.
std::vector<double> dc_baseline(std::span<const double> x, double fs,
                                double cutoff_hz = 0.01, int order = 2);

// Linear resample onto a uniform grid starting at t.front() with spacing
// 1/fs. grid receives the grid timestamps.
std::vector<double> resample_uniform(std::span<const double> t, std::span<const double> x,
                                     double fs, std::vector<double>& grid);

// Irregular-timestamp front ends: resample onto the uniform grid, filter
// there, then map back onto the original time base.
std::vector<double> filter_on_grid(std::span<const double> t, std::span<const double> x,
                                   double fs, const FilterSpec& spec);
std::vector<double> dc_baseline_on_grid(std::span<const double> t, std::span<const double> x,
                                        double fs, double cutoff_hz = 0.01, int order = 2);

struct HrRange {
  double bpm_min = 40;
  double bpm_max = 200;
};

// Beat extrema of a band-passed signal. Peaks and troughs alternate when
// merged by time; times are strictly increasing within each list.
struct PeakTrain {
  std::vector<double> peak_times;
  std::vector<double> peak_values;
  std::vector<double> trough_times;
  std::vector<double> trough_values;
};

// Adaptive two-pass extremum detection. Pass one collects every local
// maximum with its prominence and estimates the beat amplitude as the
// median prominence of the strongest duration*bpm_min/60 candidates; pass
// two keeps candidates with prominence >= 0.3 * estimate and enforces a
// 60/bpm_max s minimum separation (strongest first). Troughs are detected
// on the negated signal by the same rule.
PeakTrain detect_peaks_troughs(std::span<const double> ac, std::span<const double> t,
                               HrRange hr = {});

struct EnvelopePair {
  std::vector<double> upper;  // peak values interpolated over the time base
  std::vector<double> lower;  // trough values likewise
  double first_beat_t = 0;    // both envelopes interpolating from here
  double last_beat_t = 0;     // ... to here; outside is held constant
};

// Piecewise-linear interpolation of peak/trough values over t; the nearest
// value is held constant outside the first/last beat.
EnvelopePair interpolate_envelopes(const PeakTrain& pt, std::span<const double> t);

// amplitude[i] = |upper[i]| + |lower[i]|
std::vector<double> ac_amplitude(const EnvelopePair& env);

}  // namespace earoxi::dsp
