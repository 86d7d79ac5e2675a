#include "earoxi/config.hpp"

#include <fstream>

#include "earoxi/errors.hpp"
#include "earoxi/json_util.hpp"

namespace earoxi {

namespace {

using nlohmann::json;

}  // namespace

void CalibrationCurve::validate() const {
  if (slope <= 0) raise(errc::invalid_config, "calibration slope must be positive");
  if (intercept <= 50 || intercept > 120)
    raise(errc::invalid_config, "calibration intercept must lie in (50, 120]");
}

double CalibrationCurve::r_from_spo2(double spo2) const {
  if (spo2 > intercept)
    raise(errc::out_of_calibration_range,
          "spo2 " + std::to_string(spo2) + " exceeds calibration intercept " +
              std::to_string(intercept));
  return (intercept - spo2) / slope;
}

void PipelineConfig::validate() const {
  calibration.validate();
  if (smooth_s < 0) raise(errc::invalid_config, "smooth_s must be non-negative");
  if (hr.bpm_min <= 0 || hr.bpm_max <= hr.bpm_min)
    raise(errc::invalid_config, "hr range must satisfy 0 < bpm_min < bpm_max");
  if (low_amplitude_epsilon < 0) raise(errc::invalid_config, "epsilon must be non-negative");
  if (trough_search_s <= 0 || trough_baseline_s <= 0)
    raise(errc::invalid_config, "trough windows must be positive");
  if (hold_min_s <= 0 || hold_max_s <= hold_min_s)
    raise(errc::invalid_config, "hold sanity band must satisfy 0 < min < max");
  // cutoff sanity is re-checked against fs when filters are designed
  if (bandpass_low_hz <= 0 || bandpass_high_hz <= bandpass_low_hz)
    raise(errc::invalid_config, "band-pass cutoffs must satisfy 0 < low < high");
  if (dc_cutoff_hz <= 0) raise(errc::invalid_config, "dc cutoff must be positive");
}

nlohmann::json PipelineConfig::to_json() const {
  json j;
  j["bandpass"] = {{"low_hz", bandpass_low_hz}, {"high_hz", bandpass_high_hz}, {"order", bandpass_order}};
  j["dc"] = {{"cutoff_hz", dc_cutoff_hz}, {"order", dc_order}};
  j["hr_bpm"] = {hr.bpm_min, hr.bpm_max};
  j["calibration"] = {{"intercept", calibration.intercept}, {"slope", calibration.slope}};
  j["smooth_s"] = smooth_s;
  j["low_amplitude_epsilon"] = low_amplitude_epsilon;
  j["bridge_max_s"] = bridge_max_s;
  j["trough"] = {{"search_s", trough_search_s},
                 {"depth_gate", trough_depth_gate},
                 {"baseline_s", trough_baseline_s},
                 {"local_window_s", trough_local_window_s}};
  j["debounce"] = {{"min_press_s", min_press_s}, {"merge_gap_s", merge_gap_s}};
  j["hold_band_s"] = {hold_min_s, hold_max_s};
  j["resting_window_s"] = resting_window_s;
  j["columns"] = {{"t", columns.t},
                  {"red", columns.red},
                  {"ir", columns.ir},
                  {"green", columns.green},
                  {"button", columns.button}};
  if (declared_fs)
    j["declared_fs_hz"] = *declared_fs;
  else
    j["declared_fs_hz"] = nullptr;
  j["limits"] = {{"max_dropout_s", limits.max_dropout_s},
                 {"fatal_dropout_s", limits.fatal_dropout_s},
                 {"min_duration_s", limits.min_duration_s},
                 {"adc_max", limits.adc_max},
                 {"fs_tolerance", limits.fs_tolerance}};
  return j;
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
  PipelineConfig cfg;
  try {
    check_keys(j, {"bandpass", "dc", "hr_bpm", "calibration", "smooth_s",
                   "low_amplitude_epsilon", "bridge_max_s", "trough", "debounce",
                   "hold_band_s", "resting_window_s", "columns", "declared_fs_hz", "limits"},
               "config");
    if (j.contains("bandpass")) {
      const json& b = j.at("bandpass");
      check_keys(b, {"low_hz", "high_hz", "order"}, "bandpass");
      get_if(b, "low_hz", cfg.bandpass_low_hz);
      get_if(b, "high_hz", cfg.bandpass_high_hz);
      get_if(b, "order", cfg.bandpass_order);
    }
    if (j.contains("dc")) {
      const json& d = j.at("dc");
      check_keys(d, {"cutoff_hz", "order"}, "dc");
      get_if(d, "cutoff_hz", cfg.dc_cutoff_hz);
      get_if(d, "order", cfg.dc_order);
    }
    if (j.contains("hr_bpm")) {
      const auto v = j.at("hr_bpm").get<std::vector<double>>();
      if (v.size() != 2) raise(errc::invalid_config, "hr_bpm must be [min, max]");
      cfg.hr.bpm_min = v[0];
      cfg.hr.bpm_max = v[1];
    }
    if (j.contains("calibration")) {
      const json& c = j.at("calibration");
      check_keys(c, {"intercept", "slope"}, "calibration");
      get_if(c, "intercept", cfg.calibration.intercept);
      get_if(c, "slope", cfg.calibration.slope);
    }
    get_if(j, "smooth_s", cfg.smooth_s);
    get_if(j, "low_amplitude_epsilon", cfg.low_amplitude_epsilon);
    get_if(j, "bridge_max_s", cfg.bridge_max_s);
    if (j.contains("trough")) {
      const json& t = j.at("trough");
      check_keys(t, {"search_s", "depth_gate", "baseline_s", "local_window_s"}, "trough");
      get_if(t, "search_s", cfg.trough_search_s);
      get_if(t, "depth_gate", cfg.trough_depth_gate);
      get_if(t, "baseline_s", cfg.trough_baseline_s);
      get_if(t, "local_window_s", cfg.trough_local_window_s);
    }
    if (j.contains("debounce")) {
      const json& d = j.at("debounce");
      check_keys(d, {"min_press_s", "merge_gap_s"}, "debounce");
      get_if(d, "min_press_s", cfg.min_press_s);
      get_if(d, "merge_gap_s", cfg.merge_gap_s);
    }
    if (j.contains("hold_band_s")) {
      const auto v = j.at("hold_band_s").get<std::vector<double>>();
      if (v.size() != 2) raise(errc::invalid_config, "hold_band_s must be [min, max]");
      cfg.hold_min_s = v[0];
      cfg.hold_max_s = v[1];
    }
    get_if(j, "resting_window_s", cfg.resting_window_s);
    if (j.contains("columns")) {
      const json& c = j.at("columns");
      check_keys(c, {"t", "red", "ir", "green", "button"}, "columns");
      get_if(c, "t", cfg.columns.t);
      get_if(c, "red", cfg.columns.red);
      get_if(c, "ir", cfg.columns.ir);
      get_if(c, "green", cfg.columns.green);
      get_if(c, "button", cfg.columns.button);
    }
    if (j.contains("declared_fs_hz") && !j.at("declared_fs_hz").is_null())
      cfg.declared_fs = j.at("declared_fs_hz").get<double>();
    if (j.contains("limits")) {
      const json& l = j.at("limits");
      check_keys(l, {"max_dropout_s", "fatal_dropout_s", "min_duration_s", "adc_max",
                     "fs_tolerance"},
                 "limits");
      get_if(l, "max_dropout_s", cfg.limits.max_dropout_s);
      get_if(l, "fatal_dropout_s", cfg.limits.fatal_dropout_s);
      get_if(l, "min_duration_s", cfg.limits.min_duration_s);
      get_if(l, "adc_max", cfg.limits.adc_max);
      get_if(l, "fs_tolerance", cfg.limits.fs_tolerance);
    }
  } catch (const json::exception& e) {
    raise(errc::invalid_config, e.what());
  }
  cfg.validate();
  return cfg;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) raise(errc::io_failure, "cannot open config " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    raise(errc::invalid_config, file.string() + ": " + e.what());
  }
  return from_json(j);
}

}  // namespace earoxi
