#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include <json.hpp>

#include "earoxi/config.hpp"
#include "earoxi/types.hpp"

namespace earoxi::synth {

enum class PhaseKind { Normal, Exhale, Hold };

struct ProtocolPhase {
  PhaseKind kind;
  double duration_s;
};

// 120 s normal, three repeats of 5 s exhale + 20 s hold separated by 60 s
// normal, closing with 120 s normal: 435 s total.
std::vector<ProtocolPhase> default_protocol();
double protocol_duration(const std::vector<ProtocolPhase>& protocol);

struct SpO2Breakpoint {
  double t;
  double spo2;
};

// Generator parameters for one site. The red channel's pulsatile fraction
// is not free: it follows perfusion_ir scaled by the ratio the programmed
// SpO2 trajectory implies, so the recording decodes back to that
// trajectory. perfusion_red is kept as the nominal red fraction for schema
// compatibility and validated, nothing more.
struct SynthSpec {
  double fs = 100.0;
  double duration_s = 435.0;

  double hr_bpm = 70.0;
  double hr_var_bpm = 0.0;  // amplitude of slow sinusoidal HR variability
  double hr_var_hz = 0.1;
  double pulse_duty = 0.35;  // systolic bump width as a fraction of the beat

  double dc_red = 80000.0;  // baseline counts
  double dc_ir = 100000.0;
  double perfusion_red = 0.02;  // nominal AC/DC fraction, see above
  double perfusion_ir = 0.02;
  double noise_sigma = 0.0;  // additive white Gaussian, counts

  bool baseline_wander = false;  // optional 0.05 Hz wander for DC stress tests
  double wander_hz = 0.05;
  double wander_fraction = 0.01;

  // SpO2 trajectory: explicit breakpoints win; otherwise the protocol
  // drives a model of linear drop over each hold plus exponential recovery.
  std::vector<SpO2Breakpoint> spo2_profile;
  double baseline_spo2 = 97.5;
  double hold_drop = 4.0;       // percentage points per hold
  double recovery_tau_s = 10.0;

  double site_delay_s = 0.0;  // trajectory shift relative to the release times

  std::vector<ProtocolPhase> protocol = default_protocol();
  CalibrationCurve calibration;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GroundTruth {
  std::vector<double> true_spo2;  // per sample, site-delayed
  std::vector<double> press_times;
  std::vector<double> release_times;
  std::vector<double> true_trough_times;  // release + site delay, per hold
  std::vector<double> true_delays;        // trough - release, per hold
  std::vector<double> beat_times;
  std::vector<SpO2Breakpoint> profile;  // physiological (undelayed) trajectory
};

// Inverse calibration: r = (intercept - spo2) / slope.
double spo2_to_r(double spo2, const CalibrationCurve& cal);

std::pair<PpgRecording, GroundTruth> generate_recording(const SynthSpec& spec, Site site,
                                                        const SubjectMeta& subject);

struct CohortSubject {
  SubjectMeta subject;
  SynthSpec ear;
  SynthSpec finger;
};

struct CohortSpec {
  std::uint64_t seed = 0;
  std::vector<CohortSubject> subjects;
};

// Spec files: {"seed", "defaults": {SynthSpec...}, "finger_perfusion_ratio",
// "subjects": [{"id", "sex", "age", "ear": {...}, "finger": {...}}]}.
// Site blocks override the defaults; unless a subject overrides it, the
// finger perfusion is finger_perfusion_ratio (default 2.35) times the ear's.
SynthSpec spec_from_json(const nlohmann::json& j, SynthSpec base = {});
nlohmann::json spec_to_json(const SynthSpec& spec);
CohortSpec cohort_from_json(const nlohmann::json& j);
nlohmann::json cohort_to_json(const CohortSpec& cohort);

// Writes <id>_ear.csv, <id>_finger.csv, <id>_meta.json and <id>_truth.json
// per subject plus manifest.json carrying the seed and a spec hash.
void emit_cohort(const CohortSpec& cohort, const std::filesystem::path& out_dir);

}  // namespace earoxi::synth
