#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "earoxi/errors.hpp"
#include "earoxi/ingest.hpp"
#include "earoxi/synth.hpp"

using namespace earoxi;

namespace {

const SubjectMeta kSubject{"syn01", SubjectMeta::Sex::M, 30.0};

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("earoxi_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("inverse calibration") {
  const CalibrationCurve cal;
  CHECK(synth::spo2_to_r(87.0, cal) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(synth::spo2_to_r(104.0, cal) == doctest::Approx(0.0));
  CHECK(synth::spo2_to_r(96.0, cal) == doctest::Approx(8.0 / 17.0).epsilon(1e-12));
  CHECK_THROWS_AS(synth::spo2_to_r(104.5, cal), Error);

  for (double s = 60.0; s <= 100.0; s += 0.37) {
    const double back = cal.spo2_from_r(synth::spo2_to_r(s, cal));
    CHECK(std::fabs(back - s) < 1e-12);
  }
}

TEST_CASE("default protocol spans 435 s and yields three 25 s presses") {
  const auto protocol = synth::default_protocol();
  CHECK(synth::protocol_duration(protocol) == doctest::Approx(435.0));

  synth::SynthSpec spec;
  spec.seed = 5;
  const auto [rec, truth] = synth::generate_recording(spec, Site::EarCanal, kSubject);
  CHECK(rec.size() == 43500);
  CHECK(rec.fs == 100.0);

  REQUIRE(truth.press_times.size() == 3);
  CHECK(truth.press_times[0] == doctest::Approx(120.0));
  CHECK(truth.press_times[1] == doctest::Approx(205.0));
  CHECK(truth.press_times[2] == doctest::Approx(290.0));
  CHECK(truth.release_times[0] == doctest::Approx(145.0));
  CHECK(truth.release_times[1] == doctest::Approx(230.0));
  CHECK(truth.release_times[2] == doctest::Approx(315.0));

  // the recorded button channel decodes back to the same three intervals
  const auto markers = ingest::extract_button_intervals(rec);
  REQUIRE(markers.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(markers[k].press_t == doctest::Approx(truth.press_times[k]).epsilon(1e-6));
    CHECK(markers[k].release_t ==
          doctest::Approx(truth.release_times[k] - 0.01).epsilon(1e-6));
    CHECK(markers[k].duration_s() == doctest::Approx(25.0).epsilon(0.01));
  }
}

TEST_CASE("fixed seed reproduces the CSV byte for byte") {
  synth::SynthSpec spec;
  spec.noise_sigma = 12.0;
  spec.seed = 99;
  const auto a = synth::generate_recording(spec, Site::Finger, kSubject);
  const auto b = synth::generate_recording(spec, Site::Finger, kSubject);
  CHECK(ingest::serialize_recording(a.first) == ingest::serialize_recording(b.first));

  spec.seed = 100;
  const auto c = synth::generate_recording(spec, Site::Finger, kSubject);
  CHECK(ingest::serialize_recording(a.first) != ingest::serialize_recording(c.first));
}

TEST_CASE("noiseless channels satisfy the ratio construction identity") {
  synth::SynthSpec spec;
  spec.noise_sigma = 0.0;
  const auto [rec, truth] = synth::generate_recording(spec, Site::EarCanal, kSubject);

  std::size_t checked = 0;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const double pulse_term = rec.ir[i] / spec.dc_ir - 1.0;  // perfusion_ir * pulse
    if (pulse_term < 0.1 * spec.perfusion_ir) continue;      // skip inter-beat zeros
    const double ac_over_dc_ir = pulse_term;
    const double ac_over_dc_red = rec.red[i] / spec.dc_red - 1.0;
    const double r = ac_over_dc_red / ac_over_dc_ir;
    const double want = synth::spo2_to_r(truth.true_spo2[i], spec.calibration);
    CHECK(std::fabs(r - want) < 1e-9);
    ++checked;
  }
  CHECK(checked > 10000);
}

TEST_CASE("site delay shifts troughs exactly") {
  synth::SynthSpec spec;
  spec.site_delay_s = 12.4;
  const auto [rec, truth] = synth::generate_recording(spec, Site::Finger, kSubject);
  REQUIRE(truth.true_trough_times.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(truth.true_trough_times[k] == truth.release_times[k] + 12.4);
    CHECK(truth.true_delays[k] == 12.4);
  }

  // the per-sample truth reaches its per-hold minimum at release + delay
  for (std::size_t k = 0; k < 3; ++k) {
    const double tmin = truth.true_trough_times[k];
    const std::size_t i = static_cast<std::size_t>(std::llround(tmin * spec.fs));
    for (int off : {-200, -100, 100, 200})
      CHECK(truth.true_spo2[i] <=
            truth.true_spo2[i + static_cast<std::size_t>(off)] + 1e-12);
  }
}

TEST_CASE("durations shorter than the protocol are invalid") {
  synth::SynthSpec spec;
  spec.duration_s = 300.0;
  try {
    spec.validate();
    FAIL("expected InvalidSpec");
  } catch (const Error& e) {
    CHECK(e.code() == errc::invalid_spec);
  }
}

TEST_CASE("perfusion and trajectory bounds are validated") {
  synth::SynthSpec spec;
  spec.perfusion_ir = 0.3;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec = {};
  spec.spo2_profile = {{0.0, 50.0}, {435.0, 50.0}};
  CHECK_THROWS_AS(spec.validate(), Error);
  spec = {};
  spec.spo2_profile = {{10.0, 97.0}, {5.0, 97.0}};
  CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("spec json round trip") {
  synth::SynthSpec spec;
  spec.hr_bpm = 64.0;
  spec.noise_sigma = 7.5;
  spec.site_delay_s = 4.2;
  spec.spo2_profile = {{0.0, 97.0}, {100.0, 92.0}};
  spec.seed = 31415;
  const auto j = synth::spec_to_json(spec);
  const auto back = synth::spec_from_json(j);
  CHECK(back.hr_bpm == spec.hr_bpm);
  CHECK(back.noise_sigma == spec.noise_sigma);
  CHECK(back.site_delay_s == spec.site_delay_s);
  CHECK(back.seed == spec.seed);
  REQUIRE(back.spo2_profile.size() == 2);
  CHECK(back.spo2_profile[1].spo2 == 92.0);
  CHECK(back.protocol.size() == spec.protocol.size());

  CHECK_THROWS_AS(synth::spec_from_json({{"not_a_key", 1}}), Error);
}

TEST_CASE("cohort json applies defaults and the finger perfusion ratio") {
  const nlohmann::json j = {
      {"seed", 7},
      {"defaults", {{"noise_sigma", 5.0}, {"perfusion_ir", 0.02}}},
      {"subjects",
       {{{"id", "a"}, {"sex", "F"}, {"age", 24}, {"ear", {{"site_delay_s", 4.0}}},
         {"finger", {{"site_delay_s", 16.0}}}},
        {{"id", "b"}, {"sex", "M"}, {"ear", nlohmann::json::object()},
         {"finger", {{"perfusion_ir", 0.05}}}}}}};
  const auto cohort = synth::cohort_from_json(j);
  REQUIRE(cohort.subjects.size() == 2);
  CHECK(cohort.subjects[0].finger.perfusion_ir ==
        doctest::Approx(0.02 * 2.35).epsilon(1e-12));
  CHECK(cohort.subjects[1].finger.perfusion_ir == 0.05);
  CHECK(cohort.subjects[0].ear.noise_sigma == 5.0);
  CHECK(cohort.subjects[0].ear.seed != cohort.subjects[0].finger.seed);
  CHECK(cohort.subjects[0].ear.seed != cohort.subjects[1].ear.seed);
}

TEST_CASE("emit_cohort writes the per-subject file set") {
  const auto dir = fresh_dir("emit");
  synth::CohortSpec cohort;
  cohort.seed = 11;
  synth::CohortSubject cs;
  cs.subject = kSubject;
  cs.ear.site_delay_s = 4.0;
  cs.finger.site_delay_s = 16.0;
  cs.ear.seed = 1;
  cs.finger.seed = 2;
  cohort.subjects.push_back(cs);
  synth::emit_cohort(cohort, dir);

  for (const char* name : {"syn01_ear.csv", "syn01_finger.csv", "syn01_meta.json",
                           "syn01_truth.json", "manifest.json"})
    CHECK(std::filesystem::exists(dir / name));

  // duplicate ids rejected
  cohort.subjects.push_back(cs);
  CHECK_THROWS_AS(synth::emit_cohort(cohort, fresh_dir("dup")), Error);

  // empty cohorts rejected
  synth::CohortSpec empty;
  CHECK_THROWS_AS(synth::emit_cohort(empty, fresh_dir("empty")), Error);
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
