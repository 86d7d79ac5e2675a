#include "earoxi/types.hpp"

#include <algorithm>

#include "earoxi/errors.hpp"

namespace earoxi {

const char* errc_name(errc code) {
  switch (code) {
    case errc::missing_column: return "MissingColumn";
    case errc::non_monotone_time: return "NonMonotoneTime";
    case errc::non_numeric_cell: return "NonNumericCell";
    case errc::signal_too_short: return "SignalTooShort";
    case errc::no_beats_found: return "NoBeatsFound";
    case errc::too_few_beats: return "TooFewBeats";
    case errc::length_mismatch: return "LengthMismatch";
    case errc::non_positive_dc: return "NonPositiveDC";
    case errc::window_out_of_range: return "WindowOutOfRange";
    case errc::empty_list: return "EmptyList";
    case errc::non_positive_amplitude: return "NonPositiveAmplitude";
    case errc::too_few_samples: return "TooFewSamples";
    case errc::zero_variance: return "ZeroVariance";
    case errc::no_trough_found: return "NoTroughFound";
    case errc::negative_delay: return "NegativeDelay";
    case errc::segment_mismatch: return "SegmentMismatch";
    case errc::out_of_calibration_range: return "OutOfCalibrationRange";
    case errc::invalid_spec: return "InvalidSpec";
    case errc::invalid_config: return "InvalidConfig";
    case errc::duplicate_subject: return "DuplicateSubject";
    case errc::empty_cohort: return "EmptyCohort";
    case errc::no_subjects_found: return "NoSubjectsFound";
    case errc::unusable_recording: return "UnusableRecording";
    case errc::io_failure: return "IoFailure";
  }
  return "Error";
}

std::string site_name(Site site, const std::string& label) {
  switch (site) {
    case Site::EarCanal: return "ear";
    case Site::Finger: return "finger";
    case Site::Other: return label.empty() ? "other" : label;
  }
  return "other";
}

Site site_from_name(const std::string& name) {
  if (name == "ear" || name == "ear_canal") return Site::EarCanal;
  if (name == "finger") return Site::Finger;
  return Site::Other;
}

std::string sex_name(SubjectMeta::Sex sex) {
  switch (sex) {
    case SubjectMeta::Sex::M: return "M";
    case SubjectMeta::Sex::F: return "F";
    case SubjectMeta::Sex::Unknown: return "unknown";
  }
  return "unknown";
}

SubjectMeta::Sex sex_from_name(const std::string& name) {
  if (name == "M" || name == "m" || name == "male") return SubjectMeta::Sex::M;
  if (name == "F" || name == "f" || name == "female") return SubjectMeta::Sex::F;
  return SubjectMeta::Sex::Unknown;
}

void SubjectMeta::validate() const {
  if (id.empty()) raise(errc::invalid_spec, "subject id must not be empty");
  if (age && (*age < 0 || *age > 150))
    raise(errc::invalid_spec, "subject " + id + ": age out of [0, 150]");
}

PpgSample PpgRecording::sample(std::size_t i) const {
  PpgSample s;
  s.t = t[i];
  s.red = red[i];
  s.ir = ir[i];
  if (has_green()) s.green = green[i];
  s.button = button[i] != 0;
  return s;
}

double infer_fs(std::span<const double> t) {
  if (t.size() < 2) return 0.0;
  std::vector<double> dt(t.size() - 1);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) dt[i] = t[i + 1] - t[i];
  const std::size_t mid = dt.size() / 2;
  std::nth_element(dt.begin(), dt.begin() + mid, dt.end());
  double median = dt[mid];
  if (dt.size() % 2 == 0) {
    const double lower = *std::max_element(dt.begin(), dt.begin() + mid);
    median = 0.5 * (median + lower);
  }
  return median > 0 ? 1.0 / median : 0.0;
}

}  // namespace earoxi
