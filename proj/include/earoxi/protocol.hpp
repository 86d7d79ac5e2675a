#pragma once

#include <span>
#include <string>
#include <vector>

#include "earoxi/config.hpp"
#include "earoxi/oximetry.hpp"
#include "earoxi/types.hpp"

namespace earoxi::protocol {

struct BreathHoldSegment {
  int index = 0;         // 1-based, in time order
  double press_t = 0;    // exhale start
  double release_t = 0;  // hold end: the minimum-oxygen marker
};

// Markers whose duration falls inside the sanity band become segments.
// Deviations from the expected count of three are warnings, never errors.
std::vector<BreathHoldSegment> segment_breath_holds(std::span<const EventMarker> markers,
                                                    std::vector<std::string>* warnings = nullptr,
                                                    double hold_min_s = 10.0,
                                                    double hold_max_s = 60.0);

struct TroughSearch {
  double search_s = 45.0;        // window after release
  double depth_gate = 1.0;       // points below the pre-hold baseline
  double baseline_s = 30.0;      // pre-hold baseline window
  double local_window_s = 1.0;   // neighborhood a minimum must dominate

  static TroughSearch from_config(const PipelineConfig& cfg) {
    return {cfg.trough_search_s, cfg.trough_depth_gate, cfg.trough_baseline_s,
            cfg.trough_local_window_s};
  }
};

// First local minimum of the smoothed (unclamped) SpO2 within
// [release_t, release_t + search_s] that sits at least depth_gate points
// below the mean over [press_t - baseline_s, press_t]. A local minimum is
// a sample strictly below every neighbor within +-local_window_s; ties
// break earliest. Returns the sample time; throws NoTroughFound when no
// minimum qualifies.
double find_desaturation_trough(const oximetry::SpO2Series& series, double press_t,
                                double release_t, const TroughSearch& opts = {});

// trough_t - release_t, in seconds.
double absolute_delay(double trough_t, double release_t);

struct DelayMeasurement {
  int segment = 0;
  double trough_t = 0;
  double delay_s = 0;
};

struct DelayReport {
  std::vector<DelayMeasurement> ear;
  std::vector<DelayMeasurement> finger;
  std::vector<double> relative_s;  // finger - ear, per segment
  double mean_ear_s = 0;
  double mean_finger_s = 0;
  double mean_relative_s = 0;  // identically mean_finger_s - mean_ear_s
  double range_ear_s = 0;      // max - min over the per-site measurements
  double range_finger_s = 0;
};

// Requires matching segment indices on both sites.
DelayReport subject_delay_report(std::span<const DelayMeasurement> ear,
                                 std::span<const DelayMeasurement> finger);

}  // namespace earoxi::protocol
