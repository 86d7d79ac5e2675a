#include "earoxi/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "earoxi/errors.hpp"
#include "earoxi/ingest.hpp"
#include "earoxi/stats.hpp"

namespace earoxi::report {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct SiteAnalysis {
  SiteResult result;
  oximetry::PipelineResult pipeline;
  std::vector<protocol::BreathHoldSegment> segments;
};

SiteAnalysis analyze_site(const PpgRecording& rec, const PipelineConfig& cfg) {
  SiteAnalysis a;
  a.result.site = rec.site;
  a.result.fs = rec.fs;
  a.result.samples = rec.size();

  a.pipeline = oximetry::compute_spo2_series(rec, cfg);
  a.result.warnings = a.pipeline.warnings;

  const auto markers = ingest::extract_button_intervals(rec, cfg.min_press_s, cfg.merge_gap_s);
  a.segments = protocol::segment_breath_holds(markers, &a.result.warnings, cfg.hold_min_s,
                                              cfg.hold_max_s);

  // Resting window: the stretch before the first exhale, or the start of
  // the recording when no press exists.
  const auto& series = a.pipeline.series;
  double win_end;
  if (!a.segments.empty()) {
    win_end = a.segments.front().press_t;
  } else {
    win_end = std::min(series.t.back(), series.t.front() + cfg.resting_window_s + 5.0);
    a.result.warnings.push_back(
        "no breath-hold press found; resting window taken from the recording start");
  }
  const double win_start = std::max(series.t.front(), win_end - cfg.resting_window_s);
  if (win_end - win_start >= 30.0) {
    try {
      a.result.resting =
          oximetry::resting_metrics(series, a.pipeline.amp_ir, win_start, win_end);
    } catch (const Error& e) {
      a.result.warnings.push_back(std::string("resting metrics unavailable: ") + e.what());
    }
  } else {
    a.result.warnings.push_back("resting window shorter than 30 s; metrics skipped");
  }

  for (const auto& seg : a.segments) {
    try {
      const double trough = protocol::find_desaturation_trough(
          series, seg.press_t, seg.release_t, protocol::TroughSearch::from_config(cfg));
      a.result.delays.push_back(
          {seg.index, trough, protocol::absolute_delay(trough, seg.release_t)});
    } catch (const Error& e) {
      a.result.warnings.push_back("segment " + std::to_string(seg.index) + ": " + e.what());
    }
  }
  return a;
}

json site_to_json(const SiteResult& s) {
  json j;
  j["site"] = site_name(s.site);
  j["fs_hz"] = s.fs;
  j["samples"] = s.samples;
  if (s.resting) {
    j["resting"] = {{"window_s", {s.resting->window_start_s, s.resting->window_end_s}},
                    {"mean_spo2_percent", s.resting->mean_spo2},
                    {"mean_ac_amplitude_ir_counts", s.resting->mean_ac_amplitude_ir},
                    {"healthy", s.resting->healthy}};
  } else {
    j["resting"] = nullptr;
  }
  json delays = json::array();
  for (const auto& d : s.delays)
    delays.push_back(
        {{"segment", d.segment}, {"trough_t_s", d.trough_t}, {"delay_s", d.delay_s}});
  j["delays"] = delays;
  j["warnings"] = s.warnings;
  return j;
}

json delay_report_to_json(const protocol::DelayReport& d) {
  json j;
  j["mean_ear_s"] = d.mean_ear_s;
  j["mean_finger_s"] = d.mean_finger_s;
  j["mean_relative_s"] = d.mean_relative_s;
  j["range_ear_s"] = d.range_ear_s;
  j["range_finger_s"] = d.range_finger_s;
  j["relative_per_segment_s"] = d.relative_s;
  return j;
}

json subject_meta_json(const SubjectMeta& m) {
  json j;
  j["id"] = m.id;
  j["sex"] = sex_name(m.sex);
  if (m.age)
    j["age"] = *m.age;
  else
    j["age"] = nullptr;
  return j;
}

// Published reference constants for ear-vs-finger pulse oximetry; carried
// in reports for side-by-side reading only, never used by the analysis.
json reference_values() {
  json j;
  j["note"] =
      "published ear-canal vs index-finger reference values; annotation only, "
      "not used by any computation";
  j["resting_rmsd_percent"] = 1.47;
  j["resting_mean_difference_percent"] = 0.23;
  j["mean_relative_delay_s"] = 12.4;
  j["relative_delay_range_s"] = {4.18, 24.2};
  j["absolute_delay_range_s"] = {{"ear", {0.97, 7.31}}, {"finger", {8.52, 28.14}}};
  j["delay_table_s"] = {{"female", {{"relative", 9.70}, {"finger", 14.00}, {"ear", 4.33}}},
                        {"male", {{"relative", 15.13}, {"finger", 19.49}, {"ear", 4.36}}},
                        {"total", {{"relative", 12.40}, {"finger", 16.75}, {"ear", 4.35}}}};
  j["finger_to_ear_amplitude_ratio"] = 2.35;
  j["healthy_range_percent"] = {94.0, 100.0};
  return j;
}

// type-7 quantile (linear interpolation) on a sorted copy
double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double idx = p * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(idx));
  const double w = idx - static_cast<double>(lo);
  return v[lo] + w * (v[hi] - v[lo]);
}

}  // namespace

SubjectResult analyze_subject(const PpgRecording& ear_rec, const PpgRecording& finger_rec,
                              const PipelineConfig& cfg) {
  cfg.validate();
  SubjectResult out;
  out.subject = ear_rec.subject;

  SiteAnalysis ear = analyze_site(ear_rec, cfg);
  SiteAnalysis finger = analyze_site(finger_rec, cfg);

  // The button is shared hardware; the two recordings should agree on it.
  const std::size_t nseg = std::min(ear.segments.size(), finger.segments.size());
  for (std::size_t i = 0; i < nseg; ++i) {
    const double drift =
        std::fabs(ear.segments[i].release_t - finger.segments[i].release_t);
    if (drift > 0.5)
      out.warnings.push_back("segment " + std::to_string(i + 1) +
                             ": release times differ by " + fmt(drift) +
                             " s between sites");
  }

  // Keep only segments measured on both sites so the report stays paired.
  std::vector<protocol::DelayMeasurement> ear_m, finger_m;
  for (const auto& em : ear.result.delays)
    for (const auto& fm : finger.result.delays)
      if (em.segment == fm.segment) {
        ear_m.push_back(em);
        finger_m.push_back(fm);
      }
  if (!ear_m.empty()) {
    out.delay = protocol::subject_delay_report(ear_m, finger_m);
    if (ear_m.size() != ear.result.delays.size() ||
        finger_m.size() != finger.result.delays.size())
      out.warnings.push_back("delay report restricted to segments measured on both sites");
  } else {
    out.warnings.push_back("no breath-hold delay could be measured on both sites");
  }

  out.ear = std::move(ear.result);
  out.finger = std::move(finger.result);
  return out;
}

nlohmann::json subject_to_json(const SubjectResult& result, const PipelineConfig& cfg) {
  json j;
  j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  j["subject"] = subject_meta_json(result.subject);
  j["config"] = cfg.to_json();
  j["sites"] = {{"ear", site_to_json(result.ear)}, {"finger", site_to_json(result.finger)}};
  if (result.delay)
    j["delay"] = delay_report_to_json(*result.delay);
  else
    j["delay"] = nullptr;
  j["warnings"] = result.warnings;
  j["notes"] = {"spo2 smoothed with a centered " + fmt(cfg.smooth_s) +
                " s moving average before clamping and analysis"};
  return j;
}

CohortTables cohort_tables(const std::vector<SubjectResult>& subjects,
                           const PipelineConfig& cfg,
                           const std::vector<std::string>& warnings) {
  CohortTables out;
  json& j = out.report;
  j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  j["config"] = cfg.to_json();
  std::vector<std::string> notes = {"spo2 smoothed with a centered " + fmt(cfg.smooth_s) +
                                    " s moving average before clamping and analysis"};
  std::vector<std::string> warn = warnings;

  // per-subject digests
  json digests = json::array();
  for (const SubjectResult& s : subjects) {
    json d;
    d["subject"] = subject_meta_json(s.subject);
    d["resting"] = {{"ear", s.ear.resting ? json(s.ear.resting->mean_spo2) : json(nullptr)},
                    {"finger",
                     s.finger.resting ? json(s.finger.resting->mean_spo2) : json(nullptr)}};
    d["delay"] = s.delay ? delay_report_to_json(*s.delay) : json(nullptr);
    d["amplitude_ir"] = {
        {"ear", s.ear.resting ? json(s.ear.resting->mean_ac_amplitude_ir) : json(nullptr)},
        {"finger",
         s.finger.resting ? json(s.finger.resting->mean_ac_amplitude_ir) : json(nullptr)}};
    d["warnings"] = s.warnings;
    digests.push_back(d);
  }
  j["subjects"] = digests;

  // resting comparison: ear minus finger, paired by subject
  stats::PairedSamples resting;
  for (const SubjectResult& s : subjects) {
    if (!s.ear.resting || !s.finger.resting) continue;
    resting.labels.push_back(s.subject.id);
    resting.a.push_back(s.ear.resting->mean_spo2);
    resting.b.push_back(s.finger.resting->mean_spo2);
  }
  if (resting.a.size() >= 2) {
    j["resting_comparison"] = {{"n", resting.a.size()},
                               {"rmsd_percent", stats::rms_difference(resting)},
                               {"mean_difference_percent", stats::mean_difference(resting)},
                               {"sign_convention", "ear minus finger"}};
  } else {
    j["resting_comparison"] = nullptr;
    warn.push_back("fewer than two subjects with resting metrics on both sites");
  }

  // delay table: Female / Male / Total rows
  struct Row {
    std::vector<double> rel, fin, ear;
  };
  Row female, male, total;
  std::vector<double> ages, age_rel;
  for (const SubjectResult& s : subjects) {
    if (!s.delay) continue;
    Row* row = nullptr;
    if (s.subject.sex == SubjectMeta::Sex::F) row = &female;
    if (s.subject.sex == SubjectMeta::Sex::M) row = &male;
    if (row) {
      row->rel.push_back(s.delay->mean_relative_s);
      row->fin.push_back(s.delay->mean_finger_s);
      row->ear.push_back(s.delay->mean_ear_s);
    }
    total.rel.push_back(s.delay->mean_relative_s);
    total.fin.push_back(s.delay->mean_finger_s);
    total.ear.push_back(s.delay->mean_ear_s);
    if (s.subject.age) {
      ages.push_back(*s.subject.age);
      age_rel.push_back(s.delay->mean_relative_s);
    }
  }
  const auto mean_of = [](const std::vector<double>& v) {
    double acc = 0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
  };
  const auto row_json = [&](const Row& r) -> json {
    if (r.rel.empty()) return nullptr;
    const double fin = mean_of(r.fin);
    const double ear = mean_of(r.ear);
    return {{"n", r.rel.size()},
            {"relative_s", fin - ear},
            {"finger_s", fin},
            {"ear_s", ear}};
  };
  j["delay_summary"] = {{"female", row_json(female)},
                        {"male", row_json(male)},
                        {"total", row_json(total)}};

  // sex comparison on the relative delay; the groups are independent, so
  // Welch leads and the paired variant is reported only when sizes match
  json sex_cmp;
  if (female.rel.size() >= 2 && male.rel.size() >= 2) {
    try {
      const auto welch = stats::t_test(male.rel, female.rel, stats::TTestMode::Welch);
      sex_cmp["welch"] = {{"t", welch.t}, {"p", welch.p}, {"df", welch.df}};
    } catch (const Error& e) {
      sex_cmp["welch"] = {{"error", e.what()}};
    }
    if (female.rel.size() == male.rel.size()) {
      try {
        const auto paired = stats::t_test(male.rel, female.rel, stats::TTestMode::Paired);
        sex_cmp["paired"] = {{"t", paired.t}, {"p", paired.p}, {"df", paired.df}};
        sex_cmp["paired_caveat"] =
            "sex groups are independent samples; the paired variant assumes an "
            "artificial subject pairing and is reported for reference only";
      } catch (const Error& e) {
        sex_cmp["paired"] = {{"error", e.what()}};
      }
    }
    sex_cmp["groups"] = {{"male_mean_relative_s", mean_of(male.rel)},
                         {"female_mean_relative_s", mean_of(female.rel)}};
  } else {
    sex_cmp["error"] = "TooFewSamples: need at least two subjects per sex group";
  }
  j["sex_comparison"] = sex_cmp;

  // age correlation against the relative delay
  if (ages.size() >= 3) {
    try {
      const auto pr = stats::pearson_r(ages, age_rel);
      j["age_correlation"] = {{"n", ages.size()}, {"pearson_r", pr.r}, {"p", pr.p}};
    } catch (const Error& e) {
      j["age_correlation"] = {{"error", e.what()}};
    }
  } else {
    j["age_correlation"] = {{"error", "TooFewSamples: need three subjects with known age"}};
  }

  // normalized amplitudes across all site means
  std::vector<double> amp_values;
  std::vector<std::pair<std::string, std::size_t>> amp_slots;  // id -> index of ear value
  for (const SubjectResult& s : subjects) {
    if (!s.ear.resting || !s.finger.resting) continue;
    amp_slots.emplace_back(s.subject.id, amp_values.size());
    amp_values.push_back(s.ear.resting->mean_ac_amplitude_ir);
    amp_values.push_back(s.finger.resting->mean_ac_amplitude_ir);
  }
  json amp_json = json::array();
  std::vector<double> amp_norm;
  if (!amp_values.empty()) {
    amp_norm = oximetry::normalize_amplitudes(amp_values);
    for (const auto& [id, idx] : amp_slots)
      amp_json.push_back(
          {{"subject", id}, {"ear", amp_norm[idx]}, {"finger", amp_norm[idx + 1]}});
  }
  j["amplitudes_normalized"] = amp_json;

  j["reference_values"] = reference_values();
  j["notes"] = notes;
  j["warnings"] = warn;

  // plot tables
  std::string& rest_csv = out.resting_csv;
  rest_csv = "subject,sex,age,ear_mean_spo2,finger_mean_spo2,ear_healthy,finger_healthy\n";
  for (const SubjectResult& s : subjects) {
    if (!s.ear.resting || !s.finger.resting) continue;
    rest_csv += s.subject.id + "," + sex_name(s.subject.sex) + ",";
    rest_csv += s.subject.age ? fmt(*s.subject.age) : "";
    rest_csv += "," + fmt(s.ear.resting->mean_spo2) + "," + fmt(s.finger.resting->mean_spo2);
    rest_csv += std::string(",") + (s.ear.resting->healthy ? "1" : "0") + "," +
                (s.finger.resting->healthy ? "1" : "0") + "\n";
  }

  std::string& delay_csv = out.delay_csv;
  delay_csv = "subject,sex,ear_mean_s,ear_range_s,finger_mean_s,finger_range_s,relative_mean_s\n";
  for (const SubjectResult& s : subjects) {
    if (!s.delay) continue;
    delay_csv += s.subject.id + "," + sex_name(s.subject.sex) + "," +
                 fmt(s.delay->mean_ear_s) + "," + fmt(s.delay->range_ear_s) + "," +
                 fmt(s.delay->mean_finger_s) + "," + fmt(s.delay->range_finger_s) + "," +
                 fmt(s.delay->mean_relative_s) + "\n";
  }

  std::string& box_csv = out.boxplot_csv;
  box_csv = "site,min_s,q1_s,median_s,q3_s,max_s\n";
  const auto box_row = [&](const char* name, const std::vector<double>& v) {
    if (v.empty()) return;
    box_csv += std::string(name) + "," + fmt(*std::min_element(v.begin(), v.end())) + "," +
               fmt(quantile(v, 0.25)) + "," + fmt(quantile(v, 0.5)) + "," +
               fmt(quantile(v, 0.75)) + "," + fmt(*std::max_element(v.begin(), v.end())) +
               "\n";
  };
  box_row("ear", total.ear);
  box_row("finger", total.fin);

  std::string& amp_csv = out.amplitude_csv;
  amp_csv = "subject,ear_normalized,finger_normalized\n";
  for (const auto& [id, idx] : amp_slots)
    amp_csv += id + "," + fmt(amp_norm[idx]) + "," + fmt(amp_norm[idx + 1]) + "\n";

  return out;
}

}  // namespace earoxi::report
