#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "earoxi/dsp.hpp"
#include "earoxi/ingest.hpp"

namespace earoxi {

// SpO2 = intercept - slope * R, the linear pulse-oximetry calibration.
struct CalibrationCurve {
  double intercept = 104.0;  // percent
  double slope = 17.0;       // percent per unit R

  void validate() const;
  double spo2_from_r(double r) const { return intercept - slope * r; }
  // Inverse map; spo2 must not exceed the intercept.
  double r_from_spo2(double spo2) const;
};

// Every knob of the analysis pipeline. The JSON form of this struct is the
// config file format, and reports echo it in full so a run can be
// reproduced from its own output.
struct PipelineConfig {
  // AC extraction band and DC baseline
  double bandpass_low_hz = 1.0;
  double bandpass_high_hz = 30.0;
  int bandpass_order = 4;
  double dc_cutoff_hz = 0.01;
  int dc_order = 2;

  dsp::HrRange hr;

  // SpO2 assembly
  CalibrationCurve calibration;
  double smooth_s = 3.0;              // centered moving-average width
  double low_amplitude_epsilon = 1e-6;
  double bridge_max_s = 2.0;          // max low-amplitude gap bridged by interpolation

  // desaturation trough search
  double trough_search_s = 45.0;
  double trough_depth_gate = 1.0;     // percentage points below pre-hold baseline
  double trough_baseline_s = 30.0;    // pre-hold baseline window
  double trough_local_window_s = 1.0; // neighborhood a local minimum must dominate

  // protocol segmentation
  double min_press_s = 1.0;
  double merge_gap_s = 0.2;
  double hold_min_s = 10.0;
  double hold_max_s = 60.0;
  double resting_window_s = 60.0;

  // ingest
  ingest::ColumnMap columns;
  std::optional<double> declared_fs;
  ingest::ValidationLimits limits;

  dsp::FilterSpec bandpass_spec() const {
    return dsp::FilterSpec::band_pass(bandpass_low_hz, bandpass_high_hz, bandpass_order);
  }

  ingest::ParseOptions parse_options() const { return {columns, declared_fs}; }

  void validate() const;

  nlohmann::json to_json() const;
  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig load(const std::filesystem::path& file);
};

}  // namespace earoxi
