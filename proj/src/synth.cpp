#include "earoxi/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "earoxi/errors.hpp"
#include "earoxi/ingest.hpp"
#include "earoxi/io.hpp"
#include "earoxi/json_util.hpp"
#include "earoxi/kernels.hpp"

namespace earoxi::synth {

namespace {

using nlohmann::json;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

const char* phase_name(PhaseKind k) {
  switch (k) {
    case PhaseKind::Normal: return "normal";
    case PhaseKind::Exhale: return "exhale";
    case PhaseKind::Hold: return "hold";
  }
  return "normal";
}

PhaseKind phase_from_name(const std::string& name) {
  if (name == "exhale") return PhaseKind::Exhale;
  if (name == "hold") return PhaseKind::Hold;
  if (name == "normal") return PhaseKind::Normal;
  raise(errc::invalid_spec, "unknown protocol phase '" + name + "'");
}

// Contiguous exhale+hold stretches are the button-pressed intervals.
std::vector<EventMarker> pressed_intervals(const std::vector<ProtocolPhase>& protocol) {
  std::vector<EventMarker> out;
  double t = 0;
  bool in_press = false;
  for (const ProtocolPhase& ph : protocol) {
    const bool pressed = ph.kind != PhaseKind::Normal;
    if (pressed && !in_press) out.push_back({t, t});
    if (pressed) out.back().release_t = t + ph.duration_s;
    in_press = pressed;
    t += ph.duration_s;
  }
  return out;
}

// Physiological SpO2 trajectory: explicit breakpoints, or linear descent
// over each pressed interval with exponential return to baseline.
class Trajectory {
 public:
  Trajectory(const SynthSpec& spec, const std::vector<EventMarker>& presses) {
    if (!spec.spo2_profile.empty()) {
      for (const SpO2Breakpoint& b : spec.spo2_profile) {
        bx_.push_back(b.t);
        by_.push_back(b.spo2);
      }
      return;
    }
    baseline_ = spec.baseline_spo2;
    tau_ = spec.recovery_tau_s;
    double v = baseline_;
    for (const EventMarker& m : presses) {
      Hold h;
      h.press = m.press_t;
      h.release = m.release_t;
      h.v_start = holds_.empty() ? baseline_ : value_in_recovery(holds_.back(), m.press_t);
      h.v_min = h.v_start - spec.hold_drop;
      holds_.push_back(h);
      v = h.v_min;
    }
    (void)v;
  }

  double operator()(double t) const {
    if (!bx_.empty()) {
      double out = 0;
      kernels::serial::interp_linear(bx_, by_, std::span<const double>(&t, 1),
                                     std::span<double>(&out, 1));
      return out;
    }
    if (holds_.empty() || t < holds_.front().press) return baseline_;
    const Hold* h = &holds_.front();
    for (const Hold& hh : holds_)
      if (hh.press <= t) h = &hh;
    if (t <= h->release)
      return h->v_start + (h->v_min - h->v_start) * (t - h->press) / (h->release - h->press);
    return value_in_recovery(*h, t);
  }

  double min_value(double duration) const {
    if (!bx_.empty()) return *std::min_element(by_.begin(), by_.end());
    double m = baseline_;
    for (const Hold& h : holds_) m = std::min(m, h.v_min);
    (void)duration;
    return m;
  }

  double max_value() const {
    if (!bx_.empty()) return *std::max_element(by_.begin(), by_.end());
    return baseline_;
  }

  // Breakpoint sampling for the truth file: exact at protocol events,
  // 1 s steps across recoveries.
  std::vector<SpO2Breakpoint> breakpoints(double duration) const {
    std::vector<SpO2Breakpoint> out;
    if (!bx_.empty()) {
      for (std::size_t i = 0; i < bx_.size(); ++i) out.push_back({bx_[i], by_[i]});
      return out;
    }
    out.push_back({0.0, baseline_});
    for (std::size_t k = 0; k < holds_.size(); ++k) {
      const Hold& h = holds_[k];
      out.push_back({h.press, h.v_start});
      out.push_back({h.release, h.v_min});
      const double until = (k + 1 < holds_.size()) ? holds_[k + 1].press : duration;
      for (double t = h.release + 1.0; t < until; t += 1.0) {
        const double v = value_in_recovery(h, t);
        out.push_back({t, v});
        if (baseline_ - v < 0.01) break;
      }
    }
    out.push_back({duration, (*this)(duration)});
    return out;
  }

 private:
  struct Hold {
    double press, release, v_start, v_min;
  };

  double value_in_recovery(const Hold& h, double t) const {
    return baseline_ - (baseline_ - h.v_min) * std::exp(-(t - h.release) / tau_);
  }

  std::vector<double> bx_, by_;
  std::vector<Hold> holds_;
  double baseline_ = 0;
  double tau_ = 1;
};

std::vector<double> compute_beat_times(const SynthSpec& spec) {
  std::vector<double> beats;
  if (spec.hr_var_bpm == 0.0) {
    const double period = 60.0 / spec.hr_bpm;
    for (double t = 0; t <= spec.duration_s; t += period) beats.push_back(t);
    return beats;
  }
  const auto phase = [&](double t) {
    return (spec.hr_bpm * t +
            spec.hr_var_bpm / (kTwoPi * spec.hr_var_hz) *
                (1.0 - std::cos(kTwoPi * spec.hr_var_hz * t))) /
           60.0;
  };
  const auto rate = [&](double t) {
    return (spec.hr_bpm + spec.hr_var_bpm * std::sin(kTwoPi * spec.hr_var_hz * t)) / 60.0;
  };
  beats.push_back(0.0);
  double t = 0.0;
  for (std::size_t k = 1;; ++k) {
    t += 60.0 / spec.hr_bpm;  // initial guess
    for (int it = 0; it < 30; ++it) {
      const double err = phase(t) - static_cast<double>(k);
      if (std::fabs(err) < 1e-12) break;
      t -= err / rate(t);
    }
    if (t > spec.duration_s) break;
    beats.push_back(t);
  }
  return beats;
}

json breakpoints_to_json(const std::vector<SpO2Breakpoint>& bps) {
  json out = json::array();
  for (const SpO2Breakpoint& b : bps) out.push_back({b.t, b.spo2});
  return out;
}

std::uint64_t derive_seed(std::uint64_t master, const std::string& subject_id,
                          const char* site) {
  return io::fnv1a64(io::hex64(master) + ":" + subject_id + ":" + site);
}

}  // namespace

std::vector<ProtocolPhase> default_protocol() {
  return {
      {PhaseKind::Normal, 120.0}, {PhaseKind::Exhale, 5.0}, {PhaseKind::Hold, 20.0},
      {PhaseKind::Normal, 60.0},  {PhaseKind::Exhale, 5.0}, {PhaseKind::Hold, 20.0},
      {PhaseKind::Normal, 60.0},  {PhaseKind::Exhale, 5.0}, {PhaseKind::Hold, 20.0},
      {PhaseKind::Normal, 120.0},
  };
}

double protocol_duration(const std::vector<ProtocolPhase>& protocol) {
  double sum = 0;
  for (const ProtocolPhase& p : protocol) sum += p.duration_s;
  return sum;
}

void SynthSpec::validate() const {
  calibration.validate();
  if (fs <= 0) raise(errc::invalid_spec, "fs must be positive");
  if (duration_s <= 0) raise(errc::invalid_spec, "duration must be positive");
  const double proto_s = protocol_duration(protocol);
  if (duration_s + 1e-9 < proto_s)
    raise(errc::invalid_spec, "duration " + std::to_string(duration_s) +
                                  " s shorter than the protocol (" + std::to_string(proto_s) +
                                  " s)");
  if (hr_bpm < 20 || hr_bpm > 250) raise(errc::invalid_spec, "hr_bpm out of [20, 250]");
  if (hr_var_bpm < 0 || hr_var_bpm > 0.5 * hr_bpm)
    raise(errc::invalid_spec, "hr variability must lie in [0, hr/2]");
  if (pulse_duty <= 0 || pulse_duty >= 1) raise(errc::invalid_spec, "pulse duty out of (0, 1)");
  if (dc_red <= 0 || dc_ir <= 0) raise(errc::invalid_spec, "dc counts must be positive");
  if (perfusion_ir <= 0 || perfusion_ir > 0.2)
    raise(errc::invalid_spec, "perfusion_ir out of (0, 0.2]");
  if (perfusion_red <= 0 || perfusion_red > 0.2)
    raise(errc::invalid_spec, "perfusion_red out of (0, 0.2]");
  if (noise_sigma < 0) raise(errc::invalid_spec, "noise sigma must be non-negative");
  if (site_delay_s < 0) raise(errc::invalid_spec, "site delay must be non-negative");
  if (recovery_tau_s <= 0) raise(errc::invalid_spec, "recovery tau must be positive");
  if (hold_drop < 0) raise(errc::invalid_spec, "hold drop must be non-negative");

  double lo = baseline_spo2 - hold_drop;
  double hi = baseline_spo2;
  if (!spo2_profile.empty()) {
    lo = hi = spo2_profile.front().spo2;
    double prev_t = -std::numeric_limits<double>::infinity();
    for (const SpO2Breakpoint& b : spo2_profile) {
      if (b.t <= prev_t) raise(errc::invalid_spec, "spo2 profile times must increase");
      prev_t = b.t;
      lo = std::min(lo, b.spo2);
      hi = std::max(hi, b.spo2);
    }
  }
  if (lo < 60.0 || hi > 100.0)
    raise(errc::invalid_spec, "spo2 trajectory must stay within [60, 100]");
  // the red pulsatile fraction follows the trajectory; keep it physical
  const double r_max = spo2_to_r(lo, calibration);
  if (perfusion_ir * r_max > 0.2)
    raise(errc::invalid_spec, "perfusion_ir * max ratio exceeds 0.2");
  if (hi >= calibration.intercept)
    raise(errc::invalid_spec, "spo2 trajectory reaches the calibration intercept");
}

double spo2_to_r(double spo2, const CalibrationCurve& cal) {
  return cal.r_from_spo2(spo2);
}

std::pair<PpgRecording, GroundTruth> generate_recording(const SynthSpec& spec, Site site,
                                                        const SubjectMeta& subject) {
  spec.validate();

  const std::size_t n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.fs));
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i) / spec.fs;

  const std::vector<EventMarker> presses = pressed_intervals(spec.protocol);
  const Trajectory traj(spec, presses);
  const std::vector<double> beats = compute_beat_times(spec);

  std::vector<double> pulse(n);
  kernels::pulse_train(t, beats, spec.pulse_duty, pulse);

  GroundTruth truth;
  truth.beat_times = beats;
  truth.profile = traj.breakpoints(spec.duration_s);
  for (const EventMarker& m : presses) {
    truth.press_times.push_back(m.press_t);
    truth.release_times.push_back(m.release_t);
    truth.true_trough_times.push_back(m.release_t + spec.site_delay_s);
    truth.true_delays.push_back(spec.site_delay_s);
  }

  truth.true_spo2.resize(n);
  std::vector<double> ratio(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double tp = std::max(0.0, t[i] - spec.site_delay_s);
    truth.true_spo2[i] = traj(tp);
    ratio[i] = (spec.calibration.intercept - truth.true_spo2[i]) / spec.calibration.slope;
  }

  std::vector<double> noise_red(n);
  std::vector<double> noise_ir(n);
  kernels::gaussian_noise(spec.seed, 1, 0, noise_red);
  kernels::gaussian_noise(spec.seed, 2, 0, noise_ir);

  PpgRecording rec;
  rec.site = site;
  rec.subject = subject;
  rec.t = t;
  rec.fs = spec.fs;
  rec.red.resize(n);
  rec.ir.resize(n);
  rec.button.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double wander = spec.baseline_wander
                              ? spec.wander_fraction * std::sin(kTwoPi * spec.wander_hz * t[i])
                              : 0.0;
    const double red = spec.dc_red * (1.0 + spec.perfusion_ir * ratio[i] * pulse[i] + wander) +
                       spec.noise_sigma * noise_red[i];
    const double ir = spec.dc_ir * (1.0 + spec.perfusion_ir * pulse[i] + wander) +
                      spec.noise_sigma * noise_ir[i];
    rec.red[i] = std::max(0.0, red);
    rec.ir[i] = std::max(0.0, ir);
    bool pressed = false;
    for (const EventMarker& m : presses)
      if (t[i] >= m.press_t && t[i] < m.release_t) pressed = true;
    rec.button[i] = pressed ? 1 : 0;
  }
  return {std::move(rec), std::move(truth)};
}

SynthSpec spec_from_json(const json& j, SynthSpec base) {
  SynthSpec s = std::move(base);
  try {
    check_keys(j,
               {"fs", "duration_s", "hr_bpm", "hr_var_bpm", "hr_var_hz", "pulse_duty",
                "dc_red", "dc_ir", "perfusion_red", "perfusion_ir", "noise_sigma",
                "baseline_wander", "wander_hz", "wander_fraction", "spo2_profile",
                "baseline_spo2", "hold_drop", "recovery_tau_s", "site_delay_s", "protocol",
                "calibration", "seed"},
               "synth spec");
    get_if(j, "fs", s.fs);
    get_if(j, "duration_s", s.duration_s);
    get_if(j, "hr_bpm", s.hr_bpm);
    get_if(j, "hr_var_bpm", s.hr_var_bpm);
    get_if(j, "hr_var_hz", s.hr_var_hz);
    get_if(j, "pulse_duty", s.pulse_duty);
    get_if(j, "dc_red", s.dc_red);
    get_if(j, "dc_ir", s.dc_ir);
    get_if(j, "perfusion_red", s.perfusion_red);
    get_if(j, "perfusion_ir", s.perfusion_ir);
    get_if(j, "noise_sigma", s.noise_sigma);
    get_if(j, "baseline_wander", s.baseline_wander);
    get_if(j, "wander_hz", s.wander_hz);
    get_if(j, "wander_fraction", s.wander_fraction);
    if (j.contains("spo2_profile")) {
      s.spo2_profile.clear();
      for (const auto& row : j.at("spo2_profile")) {
        if (!row.is_array() || row.size() != 2)
          raise(errc::invalid_spec, "spo2_profile entries must be [t, spo2]");
        s.spo2_profile.push_back({row[0].get<double>(), row[1].get<double>()});
      }
    }
    get_if(j, "baseline_spo2", s.baseline_spo2);
    get_if(j, "hold_drop", s.hold_drop);
    get_if(j, "recovery_tau_s", s.recovery_tau_s);
    get_if(j, "site_delay_s", s.site_delay_s);
    if (j.contains("protocol")) {
      s.protocol.clear();
      for (const auto& row : j.at("protocol")) {
        check_keys(row, {"kind", "duration_s"}, "protocol phase");
        s.protocol.push_back(
            {phase_from_name(row.at("kind").get<std::string>()), row.at("duration_s").get<double>()});
      }
    }
    if (j.contains("calibration")) {
      const json& c = j.at("calibration");
      check_keys(c, {"intercept", "slope"}, "calibration");
      get_if(c, "intercept", s.calibration.intercept);
      get_if(c, "slope", s.calibration.slope);
    }
    get_if(j, "seed", s.seed);
  } catch (const json::exception& e) {
    raise(errc::invalid_spec, e.what());
  }
  return s;
}

json spec_to_json(const SynthSpec& s) {
  json j;
  j["fs"] = s.fs;
  j["duration_s"] = s.duration_s;
  j["hr_bpm"] = s.hr_bpm;
  j["hr_var_bpm"] = s.hr_var_bpm;
  j["hr_var_hz"] = s.hr_var_hz;
  j["pulse_duty"] = s.pulse_duty;
  j["dc_red"] = s.dc_red;
  j["dc_ir"] = s.dc_ir;
  j["perfusion_red"] = s.perfusion_red;
  j["perfusion_ir"] = s.perfusion_ir;
  j["noise_sigma"] = s.noise_sigma;
  j["baseline_wander"] = s.baseline_wander;
  j["wander_hz"] = s.wander_hz;
  j["wander_fraction"] = s.wander_fraction;
  j["spo2_profile"] = breakpoints_to_json(s.spo2_profile);
  j["baseline_spo2"] = s.baseline_spo2;
  j["hold_drop"] = s.hold_drop;
  j["recovery_tau_s"] = s.recovery_tau_s;
  j["site_delay_s"] = s.site_delay_s;
  json proto = json::array();
  for (const ProtocolPhase& p : s.protocol)
    proto.push_back({{"kind", phase_name(p.kind)}, {"duration_s", p.duration_s}});
  j["protocol"] = proto;
  j["calibration"] = {{"intercept", s.calibration.intercept}, {"slope", s.calibration.slope}};
  j["seed"] = s.seed;
  return j;
}

CohortSpec cohort_from_json(const json& j) {
  CohortSpec cohort;
  try {
    check_keys(j, {"seed", "defaults", "finger_perfusion_ratio", "subjects"}, "cohort spec");
    get_if(j, "seed", cohort.seed);
    SynthSpec base;
    if (j.contains("defaults")) base = spec_from_json(j.at("defaults"));
    double finger_ratio = 2.35;
    get_if(j, "finger_perfusion_ratio", finger_ratio);
    if (!j.contains("subjects")) raise(errc::empty_cohort, "spec lists no subjects");
    for (const auto& sj : j.at("subjects")) {
      check_keys(sj, {"id", "sex", "age", "ear", "finger"}, "subject");
      CohortSubject cs;
      if (!sj.contains("id")) raise(errc::invalid_spec, "subject without id");
      cs.subject.id = sj.at("id").get<std::string>();
      if (sj.contains("sex")) cs.subject.sex = sex_from_name(sj.at("sex").get<std::string>());
      if (sj.contains("age") && !sj.at("age").is_null())
        cs.subject.age = sj.at("age").get<double>();
      cs.subject.validate();

      const json ear_j = sj.contains("ear") ? sj.at("ear") : json::object();
      const json finger_j = sj.contains("finger") ? sj.at("finger") : json::object();
      cs.ear = spec_from_json(ear_j, base);
      cs.finger = spec_from_json(finger_j, base);
      if (!finger_j.contains("perfusion_ir"))
        cs.finger.perfusion_ir = cs.ear.perfusion_ir * finger_ratio;
      if (!finger_j.contains("perfusion_red"))
        cs.finger.perfusion_red = std::min(0.2, cs.ear.perfusion_red * finger_ratio);
      if (!ear_j.contains("seed")) cs.ear.seed = derive_seed(cohort.seed, cs.subject.id, "ear");
      if (!finger_j.contains("seed"))
        cs.finger.seed = derive_seed(cohort.seed, cs.subject.id, "finger");
      cohort.subjects.push_back(std::move(cs));
    }
  } catch (const json::exception& e) {
    raise(errc::invalid_spec, e.what());
  }
  return cohort;
}

json cohort_to_json(const CohortSpec& cohort) {
  json j;
  j["seed"] = cohort.seed;
  json subjects = json::array();
  for (const CohortSubject& cs : cohort.subjects) {
    json sj;
    sj["id"] = cs.subject.id;
    sj["sex"] = sex_name(cs.subject.sex);
    if (cs.subject.age) sj["age"] = *cs.subject.age;
    sj["ear"] = spec_to_json(cs.ear);
    sj["finger"] = spec_to_json(cs.finger);
    subjects.push_back(sj);
  }
  j["subjects"] = subjects;
  return j;
}

void emit_cohort(const CohortSpec& cohort, const std::filesystem::path& out_dir) {
  if (cohort.subjects.empty()) raise(errc::empty_cohort, "no subjects in cohort spec");
  std::set<std::string> ids;
  for (const CohortSubject& cs : cohort.subjects) {
    cs.subject.validate();
    cs.ear.validate();
    cs.finger.validate();
    if (!ids.insert(cs.subject.id).second)
      raise(errc::duplicate_subject, "subject id '" + cs.subject.id + "' appears twice");
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) raise(errc::io_failure, "cannot create " + out_dir.string());

  struct Emitted {
    std::string ear_csv, finger_csv, meta, truth;
  };
  std::vector<Emitted> files(cohort.subjects.size());

  const std::int64_t n_subj = static_cast<std::int64_t>(cohort.subjects.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n_subj; ++i) {
    const CohortSubject& cs = cohort.subjects[static_cast<std::size_t>(i)];
    auto [ear_rec, ear_truth] = generate_recording(cs.ear, Site::EarCanal, cs.subject);
    auto [finger_rec, finger_truth] = generate_recording(cs.finger, Site::Finger, cs.subject);

    Emitted& e = files[static_cast<std::size_t>(i)];
    e.ear_csv = ingest::serialize_recording(ear_rec);
    e.finger_csv = ingest::serialize_recording(finger_rec);

    json meta;
    meta["id"] = cs.subject.id;
    meta["sex"] = sex_name(cs.subject.sex);
    if (cs.subject.age)
      meta["age"] = *cs.subject.age;
    else
      meta["age"] = nullptr;
    e.meta = meta.dump(2) + "\n";

    json truth;
    truth["press_times_s"] = ear_truth.press_times;
    truth["release_times_s"] = ear_truth.release_times;
    truth["ear"] = {{"site_delay_s", cs.ear.site_delay_s},
                    {"true_trough_times_s", ear_truth.true_trough_times},
                    {"true_delays_s", ear_truth.true_delays},
                    {"seed", cs.ear.seed}};
    truth["finger"] = {{"site_delay_s", cs.finger.site_delay_s},
                       {"true_trough_times_s", finger_truth.true_trough_times},
                       {"true_delays_s", finger_truth.true_delays},
                       {"seed", cs.finger.seed}};
    truth["relative_delay_s"] = cs.finger.site_delay_s - cs.ear.site_delay_s;
    truth["spo2_profile"] = breakpoints_to_json(ear_truth.profile);
    truth["spo2_model"] =
        cs.ear.spo2_profile.empty()
            ? "synthetic placeholder: linear drop of " + std::to_string(cs.ear.hold_drop) +
                  " points over each hold, exponential recovery tau=" +
                  std::to_string(cs.ear.recovery_tau_s) + " s; not measured kinetics"
            : "explicit breakpoint profile";
    e.truth = truth.dump(2) + "\n";
  }

  json manifest;
  manifest["seed"] = cohort.seed;
  manifest["spec_hash"] = io::hex64(io::fnv1a64(cohort_to_json(cohort).dump()));
  json subject_ids = json::array();
  for (const CohortSubject& cs : cohort.subjects) subject_ids.push_back(cs.subject.id);
  manifest["subjects"] = subject_ids;
  manifest["schema"] = "ear/finger CSV pairs with per-subject meta and truth JSON";

  for (std::size_t i = 0; i < cohort.subjects.size(); ++i) {
    const std::string& id = cohort.subjects[i].subject.id;
    io::write_file_atomic(out_dir / (id + "_ear.csv"), files[i].ear_csv);
    io::write_file_atomic(out_dir / (id + "_finger.csv"), files[i].finger_csv);
    io::write_file_atomic(out_dir / (id + "_meta.json"), files[i].meta);
    io::write_file_atomic(out_dir / (id + "_truth.json"), files[i].truth);
  }
  io::write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace earoxi::synth
