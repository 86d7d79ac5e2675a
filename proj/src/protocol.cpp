#include "earoxi/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "earoxi/errors.hpp"

namespace earoxi::protocol {

std::vector<BreathHoldSegment> segment_breath_holds(std::span<const EventMarker> markers,
                                                    std::vector<std::string>* warnings,
                                                    double hold_min_s, double hold_max_s) {
  std::vector<BreathHoldSegment> segments;
  for (const EventMarker& m : markers) {
    const double dur = m.duration_s();
    if (dur < hold_min_s || dur > hold_max_s) {
      if (warnings)
        warnings->push_back("marker at " + std::to_string(m.press_t) + " s lasts " +
                            std::to_string(dur) + " s, outside the hold band; ignored");
      continue;
    }
    segments.push_back({static_cast<int>(segments.size()) + 1, m.press_t, m.release_t});
  }
  if (segments.size() != 3 && warnings)
    warnings->push_back("Expected3Got" + std::to_string(segments.size()) +
                        ": protocol normally yields three breath holds");
  return segments;
}

double find_desaturation_trough(const oximetry::SpO2Series& series, double press_t,
                                double release_t, const TroughSearch& opts) {
  const std::size_t n = series.size();
  if (n == 0) raise(errc::window_out_of_range, "empty series");
  const auto& t = series.t;
  const auto& v = series.spo2_raw;

  if (release_t < t.front() || release_t > t.back())
    raise(errc::window_out_of_range,
          "release at " + std::to_string(release_t) + " s outside the series");

  // Pre-hold baseline over usable samples.
  const double b0 = std::max(t.front(), press_t - opts.baseline_s);
  double base_sum = 0;
  std::size_t base_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (t[i] < b0 || t[i] > press_t) continue;
    if (series.quality[i] != oximetry::Quality::OK) continue;
    base_sum += v[i];
    ++base_count;
  }
  if (base_count == 0)
    raise(errc::window_out_of_range, "no usable samples in the pre-hold baseline window");
  const double baseline = base_sum / static_cast<double>(base_count);
  const double gate = baseline - opts.depth_gate;

  const auto lo =
      std::lower_bound(t.begin(), t.end(), release_t) - t.begin();
  const auto hi =
      std::upper_bound(t.begin(), t.end(), release_t + opts.search_s) - t.begin();

  for (std::ptrdiff_t i = lo; i < hi; ++i) {
    const std::size_t ui = static_cast<std::size_t>(i);
    if (!std::isfinite(v[ui]) || v[ui] > gate) continue;
    // strictly the lowest sample within +-local_window_s (full series view);
    // an equal earlier sample in the neighborhood wins the tie
    const auto wlo = std::lower_bound(t.begin(), t.end(), t[ui] - opts.local_window_s) - t.begin();
    const auto whi = std::upper_bound(t.begin(), t.end(), t[ui] + opts.local_window_s) - t.begin();
    bool is_min = true;
    for (std::ptrdiff_t j = wlo; j < whi && is_min; ++j) {
      if (j == i) continue;
      const std::size_t uj = static_cast<std::size_t>(j);
      if (!std::isfinite(v[uj])) continue;
      if (v[uj] < v[ui] || (v[uj] == v[ui] && j < i)) is_min = false;
    }
    if (is_min) return t[ui];
  }
  raise(errc::no_trough_found,
        "no local minimum at least " + std::to_string(opts.depth_gate) +
            " points below the baseline of " + std::to_string(baseline) + " within " +
            std::to_string(opts.search_s) + " s of release");
}

double absolute_delay(double trough_t, double release_t) {
  if (trough_t < release_t)
    raise(errc::negative_delay, "trough at " + std::to_string(trough_t) +
                                    " s precedes release at " + std::to_string(release_t) + " s");
  return trough_t - release_t;
}

DelayReport subject_delay_report(std::span<const DelayMeasurement> ear,
                                 std::span<const DelayMeasurement> finger) {
  if (ear.size() != finger.size() || ear.empty())
    raise(errc::segment_mismatch, "sites must provide the same non-empty segment set");
  for (std::size_t i = 0; i < ear.size(); ++i)
    if (ear[i].segment != finger[i].segment)
      raise(errc::segment_mismatch,
            "segment index mismatch at position " + std::to_string(i));

  DelayReport rep;
  rep.ear.assign(ear.begin(), ear.end());
  rep.finger.assign(finger.begin(), finger.end());

  const auto stats_of = [](std::span<const DelayMeasurement> m, double& mean, double& range) {
    double sum = 0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const DelayMeasurement& d : m) {
      sum += d.delay_s;
      lo = std::min(lo, d.delay_s);
      hi = std::max(hi, d.delay_s);
    }
    mean = sum / static_cast<double>(m.size());
    range = hi - lo;
  };
  stats_of(ear, rep.mean_ear_s, rep.range_ear_s);
  stats_of(finger, rep.mean_finger_s, rep.range_finger_s);
  for (std::size_t i = 0; i < ear.size(); ++i)
    rep.relative_s.push_back(finger[i].delay_s - ear[i].delay_s);
  rep.mean_relative_s = rep.mean_finger_s - rep.mean_ear_s;
  return rep;
}

}  // namespace earoxi::protocol
