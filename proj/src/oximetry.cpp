#include "earoxi/oximetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "earoxi/errors.hpp"
#include "earoxi/kernels.hpp"

namespace earoxi::oximetry {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

const char* quality_name(Quality q) {
  switch (q) {
    case Quality::OK: return "OK";
    case Quality::LowAmplitude: return "LowAmplitude";
    case Quality::Extrapolated: return "Extrapolated";
  }
  return "OK";
}

std::vector<double> ratio_of_ratios(std::span<const double> ac_red,
                                    std::span<const double> dc_red,
                                    std::span<const double> ac_ir,
                                    std::span<const double> dc_ir,
                                    std::vector<Quality>* quality, double epsilon) {
  const std::size_t n = ac_red.size();
  if (dc_red.size() != n || ac_ir.size() != n || dc_ir.size() != n)
    raise(errc::length_mismatch, "ratio inputs must share one length");
  for (std::size_t i = 0; i < n; ++i)
    if (dc_red[i] <= 0 || dc_ir[i] <= 0)
      raise(errc::non_positive_dc, "dc <= 0 at index " + std::to_string(i));

  std::vector<double> r(n);
  kernels::ratio_of_ratios(ac_red, dc_red, ac_ir, dc_ir, r);
  if (quality) quality->assign(n, Quality::OK);
  for (std::size_t i = 0; i < n; ++i) {
    if (ac_ir[i] / dc_ir[i] < epsilon) {
      r[i] = kNaN;
      if (quality) (*quality)[i] = Quality::LowAmplitude;
    }
  }
  return r;
}

std::vector<double> spo2_from_r(std::span<const double> r, const CalibrationCurve& cal) {
  cal.validate();
  std::vector<double> out(r.size());
  kernels::affine(r, -cal.slope, cal.intercept, out);
  return out;
}

void bridge_low_amplitude(SpO2Series& s, double max_gap_s) {
  for (std::size_t i = 0; i < s.size();) {
    if (!std::isnan(s.r[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < s.size() && std::isnan(s.r[j + 1])) ++j;
    const bool has_left = i > 0;
    const bool has_right = j + 1 < s.size();
    const double gap_s = (has_right ? s.t[j + 1] : s.t[j]) - (has_left ? s.t[i - 1] : s.t[i]);
    if (has_left && has_right && gap_s < max_gap_s) {
      const double t0 = s.t[i - 1];
      const double t1 = s.t[j + 1];
      const double r0 = s.r[i - 1];
      const double r1 = s.r[j + 1];
      for (std::size_t k = i; k <= j; ++k)
        s.r[k] = r0 + (r1 - r0) * (s.t[k] - t0) / (t1 - t0);
    } else {
      for (std::size_t k = i; k <= j; ++k) s.quality[k] = Quality::Extrapolated;
    }
    i = j + 1;
  }
}

PipelineResult compute_spo2_series(const PpgRecording& rec, const PipelineConfig& cfg) {
  cfg.validate();
  const ingest::ValidationReport validation = ingest::validate_recording(rec, cfg.limits);
  if (!validation.usable()) {
    std::string why;
    for (const auto& v : validation.violations)
      if (v.fatal) why += std::string(why.empty() ? "" : "; ") +
                          ingest::violation_name(v.kind) + ": " + v.detail;
    raise(errc::unusable_recording, why);
  }

  PipelineResult res;
  for (const auto& v : validation.violations)
    res.warnings.push_back(std::string(ingest::violation_name(v.kind)) + ": " + v.detail);

  const std::span<const double> t(rec.t);
  const double fs = rec.fs;
  const dsp::FilterSpec bp = cfg.bandpass_spec();

  const std::vector<double> ac_red = dsp::filter_on_grid(t, rec.red, fs, bp);
  const std::vector<double> ac_ir = dsp::filter_on_grid(t, rec.ir, fs, bp);
  res.dc_red = dsp::dc_baseline_on_grid(t, rec.red, fs, cfg.dc_cutoff_hz, cfg.dc_order);
  res.dc_ir = dsp::dc_baseline_on_grid(t, rec.ir, fs, cfg.dc_cutoff_hz, cfg.dc_order);

  res.peaks_red = dsp::detect_peaks_troughs(ac_red, t, cfg.hr);
  res.peaks_ir = dsp::detect_peaks_troughs(ac_ir, t, cfg.hr);
  const dsp::EnvelopePair env_red = dsp::interpolate_envelopes(res.peaks_red, t);
  const dsp::EnvelopePair env_ir = dsp::interpolate_envelopes(res.peaks_ir, t);
  res.amp_red = dsp::ac_amplitude(env_red);
  res.amp_ir = dsp::ac_amplitude(env_ir);

  SpO2Series& s = res.series;
  s.t.assign(rec.t.begin(), rec.t.end());
  s.r = ratio_of_ratios(res.amp_red, res.dc_red, res.amp_ir, res.dc_ir, &s.quality,
                        cfg.low_amplitude_epsilon);

  // Outside the span where both channels have measured beats the envelopes
  // are held constant; mark those samples.
  const double first_beat = std::max(env_red.first_beat_t, env_ir.first_beat_t);
  const double last_beat = std::min(env_red.last_beat_t, env_ir.last_beat_t);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.t[i] < first_beat || s.t[i] > last_beat) s.quality[i] = Quality::Extrapolated;

  bridge_low_amplitude(s, cfg.bridge_max_s);

  const std::vector<double> spo2_inst = spo2_from_r(s.r, cfg.calibration);

  // Samples that still carry a finite value take part in the smoothing,
  // whatever their flag; NaN gaps never do.
  std::vector<std::uint8_t> mask(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    mask[i] = std::isfinite(spo2_inst[i]) ? 1 : 0;
  s.spo2_raw.resize(s.size());
  kernels::windowed_mean(s.t, spo2_inst, mask, cfg.smooth_s / 2.0, s.spo2_raw);

  s.spo2.resize(s.size());
  kernels::clamp(s.spo2_raw, 0.0, 100.0, s.spo2);
  return res;
}

RestingMetrics resting_metrics(const SpO2Series& series, std::span<const double> amplitude_ir,
                               double window_start_s, double window_end_s) {
  if (amplitude_ir.size() != series.size())
    raise(errc::length_mismatch, "amplitude signal must align with the series");
  if (series.size() == 0) raise(errc::window_out_of_range, "empty series");
  if (window_end_s - window_start_s < 30.0)
    raise(errc::window_out_of_range, "resting window must span at least 30 s");
  if (window_start_s < series.t.front() - 1e-9 || window_end_s > series.t.back() + 1e-9)
    raise(errc::window_out_of_range,
          "window [" + std::to_string(window_start_s) + ", " + std::to_string(window_end_s) +
              "] s outside series [" + std::to_string(series.t.front()) + ", " +
              std::to_string(series.t.back()) + "] s");

  double spo2_sum = 0;
  double amp_sum = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.t[i] < window_start_s || series.t[i] > window_end_s) continue;
    if (series.quality[i] != Quality::OK) continue;
    spo2_sum += series.spo2[i];
    amp_sum += amplitude_ir[i];
    ++count;
  }
  if (count == 0)
    raise(errc::window_out_of_range, "no quality-OK samples inside the resting window");

  RestingMetrics m;
  m.window_start_s = window_start_s;
  m.window_end_s = window_end_s;
  m.mean_spo2 = spo2_sum / static_cast<double>(count);
  m.mean_ac_amplitude_ir = amp_sum / static_cast<double>(count);
  m.healthy = m.mean_spo2 >= 94.0 && m.mean_spo2 <= 100.0;
  return m;
}

std::vector<double> normalize_amplitudes(std::span<const double> values) {
  if (values.empty()) raise(errc::empty_list, "no amplitudes to normalize");
  double max = -std::numeric_limits<double>::infinity();
  for (double v : values) {
    if (v <= 0)
      raise(errc::non_positive_amplitude, "amplitude " + std::to_string(v) + " must be > 0");
    max = std::max(max, v);
  }
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] / max;
  return out;
}

}  // namespace earoxi::oximetry
