#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "earoxi/types.hpp"

namespace earoxi::ingest {

// Logical-to-header mapping for recording CSVs. Defaults match the
// canonical schema: t_s,red,ir[,green],button.
struct ColumnMap {
  std::string t = "t_s";
  std::string red = "red";
  std::string ir = "ir";
  std::string green = "green";
  std::string button = "button";
};

struct ParseOptions {
  ColumnMap columns;
  std::optional<double> declared_fs;  // overrides timestamp-based inference
};

// Parses CSV text into a recording. t, red, ir and button columns are
// required; green is attached when its header is present. Errors name the
// offending row and column.
PpgRecording parse_recording(std::string_view csv, const ParseOptions& opts, Site site,
                             const SubjectMeta& subject);

PpgRecording load_recording(const std::filesystem::path& file, const ParseOptions& opts,
                            Site site, const SubjectMeta& subject);

// Canonical CSV emission. Timestamps carry six decimals (1 us); counts are
// written with shortest round-trip precision so parse(serialize(rec))
// reproduces them bit-exactly.
std::string serialize_recording(const PpgRecording& rec);

// Maximal pressed runs of the button channel: gaps shorter than
// merge_gap_s are merged first, then runs shorter than min_press_s are
// discarded. An empty result is not an error.
std::vector<EventMarker> extract_button_intervals(const PpgRecording& rec,
                                                  double min_press_s = 1.0,
                                                  double merge_gap_s = 0.2);

struct ValidationLimits {
  double max_dropout_s = 0.5;   // report gaps above this
  double fatal_dropout_s = 5.0; // gaps above this make the recording unusable
  double min_duration_s = 10.0;
  double adc_max = 262143.0;    // 18-bit front end
  double fs_tolerance = 0.01;   // stored fs vs median-interval estimate
};

struct Violation {
  enum class Kind { EmptyRecording, ShortRecording, Dropout, Saturation, FlatChannel, FsMismatch };
  Kind kind;
  bool fatal;
  std::string detail;
};

const char* violation_name(Violation::Kind kind);

struct ValidationReport {
  std::vector<Violation> violations;

  bool usable() const {
    for (const auto& v : violations)
      if (v.fatal) return false;
    return true;
  }
};

// Report-only quality screen; never throws.
ValidationReport validate_recording(const PpgRecording& rec, const ValidationLimits& lim = {});

}  // namespace earoxi::ingest
