#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace earoxi {

enum class Site { EarCanal, Finger, Other };

std::string site_name(Site site, const std::string& label = "");
Site site_from_name(const std::string& name);

struct SubjectMeta {
  enum class Sex { M, F, Unknown };

  std::string id;
  Sex sex = Sex::Unknown;
  std::optional<double> age;  // years

  void validate() const;
};

std::string sex_name(SubjectMeta::Sex sex);
SubjectMeta::Sex sex_from_name(const std::string& name);

// One row of a recording, as seen by callers that want row access. Storage
// is column-oriented in PpgRecording; this is a copy, not a view.
struct PpgSample {
  double t = 0;  // seconds from recording start
  double red = 0;
  double ir = 0;
  std::optional<double> green;
  bool button = false;
};

// A dual-wavelength PPG recording from a single site. Timestamps are kept
// as recorded (no resampling); all downstream windows are time-based.
struct PpgRecording {
  Site site = Site::Other;
  std::string site_label;
  SubjectMeta subject;

  std::vector<double> t;      // strictly increasing, seconds
  std::vector<double> red;    // raw photodiode counts
  std::vector<double> ir;
  std::vector<double> green;  // empty when the channel is absent
  std::vector<std::uint8_t> button;

  double fs = 0;  // Hz, inferred from timestamps or declared

  std::size_t size() const { return t.size(); }
  bool has_green() const { return !green.empty(); }
  double duration_s() const { return t.empty() ? 0.0 : t.back() - t.front(); }
  PpgSample sample(std::size_t i) const;
};

// Sampling rate estimate robust to isolated gaps: reciprocal of the median
// inter-sample interval. Returns 0 for fewer than two samples.
double infer_fs(std::span<const double> t);

// One button press: exhale start through breath-hold end.
struct EventMarker {
  double press_t = 0;
  double release_t = 0;

  double duration_s() const { return release_t - press_t; }
};

}  // namespace earoxi
