#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "earoxi/config.hpp"
#include "earoxi/oximetry.hpp"
#include "earoxi/protocol.hpp"
#include "earoxi/types.hpp"

namespace earoxi::report {

inline constexpr const char* kToolName = "earoxi";
inline constexpr const char* kToolVersion = "0.1.0";

struct SiteResult {
  Site site = Site::Other;
  double fs = 0;
  std::size_t samples = 0;
  std::optional<oximetry::RestingMetrics> resting;
  std::vector<protocol::DelayMeasurement> delays;
  std::vector<std::string> warnings;
};

struct SubjectResult {
  SubjectMeta subject;
  SiteResult ear;
  SiteResult finger;
  std::optional<protocol::DelayReport> delay;
  std::vector<std::string> warnings;
};

// Runs the full per-subject analysis: validation, SpO2 pipeline, breath-hold
// segmentation, per-hold delays and the resting window before the first
// press. Degraded inputs produce warnings; a fatal validation failure
// throws UnusableRecording.
SubjectResult analyze_subject(const PpgRecording& ear_rec, const PpgRecording& finger_rec,
                              const PipelineConfig& cfg);

// The machine-readable subject report. The embedded config echo is complete
// enough to reproduce the run bit-exactly.
nlohmann::json subject_to_json(const SubjectResult& result, const PipelineConfig& cfg);

struct CohortTables {
  nlohmann::json report;            // cohort_report.json
  std::string resting_csv;          // resting_spo2_per_subject.csv
  std::string delay_csv;            // delay_per_subject.csv
  std::string boxplot_csv;          // delay_boxplot.csv
  std::string amplitude_csv;        // amplitude_normalized.csv
};

// Cohort aggregation over per-subject results: resting comparison (RMS and
// mean difference, ear minus finger), the Female/Male/Total delay table,
// sex-group t tests on the relative delay, age correlation and normalized
// amplitudes, plus plot-ready CSV tables.
CohortTables cohort_tables(const std::vector<SubjectResult>& subjects,
                           const PipelineConfig& cfg,
                           const std::vector<std::string>& warnings);

}  // namespace earoxi::report
