#pragma once

#include <span>
#include <vector>

#include "earoxi/config.hpp"
#include "earoxi/dsp.hpp"
#include "earoxi/types.hpp"

namespace earoxi::oximetry {

enum class Quality : std::uint8_t {
  OK,
  LowAmplitude,  // infrared AC/DC ratio below epsilon; bridged values keep this flag
  Extrapolated,  // outside the first/last beat, or an unbridgeable gap
};

const char* quality_name(Quality q);

struct SpO2Series {
  std::vector<double> t;
  std::vector<double> spo2_raw;  // smoothed, unclamped
  std::vector<double> spo2;      // clamp(spo2_raw, 0, 100)
  std::vector<double> r;         // per-sample ratio of ratios (NaN where unbridgeable)
  std::vector<Quality> quality;

  std::size_t size() const { return t.size(); }
};

// r[i] = (ac_red[i]/dc_red[i]) / (ac_ir[i]/dc_ir[i]). Samples whose
// infrared AC/DC ratio falls below epsilon are flagged LowAmplitude and get
// r = NaN (excluded). quality may be null when the caller only needs r.
std::vector<double> ratio_of_ratios(std::span<const double> ac_red,
                                    std::span<const double> dc_red,
                                    std::span<const double> ac_ir,
                                    std::span<const double> dc_ir,
                                    std::vector<Quality>* quality = nullptr,
                                    double epsilon = 1e-6);

// Exact affine map, no smoothing.
std::vector<double> spo2_from_r(std::span<const double> r, const CalibrationCurve& cal);

// Fills NaN runs of r shorter than max_gap_s by interpolating between the
// finite neighbors; runs that cannot be bridged become Extrapolated.
void bridge_low_amplitude(SpO2Series& series, double max_gap_s);

// Everything compute_spo2_series derives; intermediates are kept for the
// amplitude analyses and for test inspection.
struct PipelineResult {
  SpO2Series series;
  std::vector<double> amp_red;  // interpolated AC amplitude per channel
  std::vector<double> amp_ir;
  std::vector<double> dc_red;
  std::vector<double> dc_ir;
  dsp::PeakTrain peaks_red;
  dsp::PeakTrain peaks_ir;
  std::vector<std::string> warnings;
};

// Full chain: band-pass -> beats -> envelopes -> AC amplitude per channel,
// DC baseline per channel, ratio of ratios, calibration, then a centered
// moving average of width cfg.smooth_s before clamping. Throws
// UnusableRecording when validation fails and propagates dsp errors.
PipelineResult compute_spo2_series(const PpgRecording& rec, const PipelineConfig& cfg);

struct RestingMetrics {
  double window_start_s = 0;
  double window_end_s = 0;
  double mean_spo2 = 0;
  double mean_ac_amplitude_ir = 0;
  bool healthy = false;  // 94 <= mean_spo2 <= 100
};

// Arithmetic means over the window, restricted to quality-OK samples.
RestingMetrics resting_metrics(const SpO2Series& series, std::span<const double> amplitude_ir,
                               double window_start_s, double window_end_s);

// Each value divided by the maximum; result in (0, 1] with one value at 1.
std::vector<double> normalize_amplitudes(std::span<const double> values);

}  // namespace earoxi::oximetry
