#include <doctest.h>

#include <cmath>
#include <vector>

#include "earoxi/errors.hpp"
#include "earoxi/ingest.hpp"
#include "earoxi/oximetry.hpp"
#include "earoxi/protocol.hpp"
#include "earoxi/synth.hpp"
#include "oracles.hpp"

using namespace earoxi;

namespace {

const SubjectMeta kSubject{"pr01", SubjectMeta::Sex::M, 33.0};

oximetry::SpO2Series series_from_shape(double fs, double duration_s,
                                       const std::function<double(double)>& shape) {
  oximetry::SpO2Series s;
  const std::size_t n = static_cast<std::size_t>(duration_s * fs);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    s.t.push_back(t);
    s.spo2_raw.push_back(shape(t));
    s.spo2.push_back(std::min(100.0, std::max(0.0, shape(t))));
    s.r.push_back(0.5);
    s.quality.push_back(oximetry::Quality::OK);
  }
  return s;
}

// Asymmetric dip: linear descent to the minimum, exponential recovery.
std::function<double(double)> dip_shape(double baseline, double depth, double t_min,
                                        double descent_s, double tau) {
  return [=](double t) {
    if (t < t_min - descent_s) return baseline;
    if (t <= t_min) return baseline - depth * (t - (t_min - descent_s)) / descent_s;
    return baseline - depth * std::exp(-(t - t_min) / tau);
  };
}

// Full two-site round trip through synth -> pipeline -> delay report.
protocol::DelayReport measure_subject(double ear_delay_s, double finger_delay_s,
                                      const PipelineConfig& cfg, double noise_fraction,
                                      std::uint64_t seed) {
  synth::SynthSpec ear;
  ear.site_delay_s = ear_delay_s;
  ear.seed = seed;
  ear.noise_sigma = noise_fraction * ear.dc_ir * ear.perfusion_ir;
  synth::SynthSpec finger = ear;
  finger.site_delay_s = finger_delay_s;
  finger.seed = seed + 1;
  finger.perfusion_ir = ear.perfusion_ir * 2.35;

  const auto site_measurements = [&](const synth::SynthSpec& spec, Site site) {
    const auto [rec, truth] = synth::generate_recording(spec, site, kSubject);
    const auto res = oximetry::compute_spo2_series(rec, cfg);
    const auto markers =
        ingest::extract_button_intervals(rec, cfg.min_press_s, cfg.merge_gap_s);
    const auto segments =
        protocol::segment_breath_holds(markers, nullptr, cfg.hold_min_s, cfg.hold_max_s);
    REQUIRE(segments.size() == 3);
    std::vector<protocol::DelayMeasurement> out;
    for (const auto& seg : segments) {
      const double trough = protocol::find_desaturation_trough(
          res.series, seg.press_t, seg.release_t, protocol::TroughSearch::from_config(cfg));
      out.push_back({seg.index, trough, protocol::absolute_delay(trough, seg.release_t)});
    }
    return out;
  };

  const auto ear_m = site_measurements(ear, Site::EarCanal);
  const auto finger_m = site_measurements(finger, Site::Finger);
  return protocol::subject_delay_report(ear_m, finger_m);
}

}  // namespace

TEST_SUITE("protocol") {

TEST_CASE("nominal schedule yields three indexed segments") {
  const std::vector<EventMarker> markers = {{120, 145}, {205, 230}, {290, 315}};
  std::vector<std::string> warnings;
  const auto segs = protocol::segment_breath_holds(markers, &warnings);
  REQUIRE(segs.size() == 3);
  CHECK(segs[0].index == 1);
  CHECK(segs[2].index == 3);
  CHECK(segs[2].release_t == 315);
  CHECK(warnings.empty());
}

TEST_CASE("spurious residue is rejected by the sanity band") {
  const std::vector<EventMarker> markers = {{100, 100.5}, {120, 145}, {205, 230}, {290, 315}};
  std::vector<std::string> warnings;
  const auto segs = protocol::segment_breath_holds(markers, &warnings);
  CHECK(segs.size() == 3);
  CHECK(warnings.size() == 1);  // only the rejected-marker note
}

TEST_CASE("two markers produce a warning, not an error") {
  const std::vector<EventMarker> markers = {{120, 145}, {205, 230}};
  std::vector<std::string> warnings;
  const auto segs = protocol::segment_breath_holds(markers, &warnings);
  CHECK(segs.size() == 2);
  REQUIRE(!warnings.empty());
  CHECK(warnings.back().find("Expected3Got2") != std::string::npos);
}

TEST_CASE("trough of a constructed dip lands on the true minimum") {
  // descent from t = 75.8 to the minimum at t = 100, release at 95.8
  const auto s = series_from_shape(10.0, 200.0, dip_shape(97.0, 4.0, 100.0, 24.2, 10.0));
  const double trough = protocol::find_desaturation_trough(s, 75.8, 95.8, {});
  CHECK(std::fabs(trough - 100.0) <= 0.5);
}

TEST_CASE("constant series has no trough") {
  const auto s = series_from_shape(10.0, 200.0, [](double) { return 97.0; });
  CHECK_THROWS_AS(protocol::find_desaturation_trough(s, 75.0, 95.0, {}), Error);
}

TEST_CASE("the depth gate skips a shallow first minimum") {
  // two local minima after release: 0.5 points at t = 105, 2.0 points at t = 115
  const auto shape = [](double t) {
    const double bump1 = 0.5 * std::exp(-0.5 * (t - 105.0) * (t - 105.0) / (1.5 * 1.5));
    const double bump2 = 2.0 * std::exp(-0.5 * (t - 115.0) * (t - 115.0) / (1.5 * 1.5));
    return 97.0 - bump1 - bump2;
  };
  const auto s = series_from_shape(10.0, 200.0, shape);
  const double trough = protocol::find_desaturation_trough(s, 100.0, 101.0, {});
  // brute-force verification: earliest sample below the gate that is the
  // strict minimum of its neighborhood
  double expect = -1;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.t[i] < 101.0 || s.t[i] > 146.0 || s.spo2_raw[i] > 96.0) continue;
    bool is_min = true;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (j == i || std::fabs(s.t[j] - s.t[i]) > 1.0) continue;
      if (s.spo2_raw[j] < s.spo2_raw[i] || (s.spo2_raw[j] == s.spo2_raw[i] && j < i))
        is_min = false;
    }
    if (is_min) {
      expect = s.t[i];
      break;
    }
  }
  REQUIRE(expect > 0);
  CHECK(trough == expect);
  CHECK(std::fabs(trough - 115.0) < 0.5);
}

TEST_CASE("trough search is invariant to level shifts and equivariant to time shifts") {
  const auto shape = dip_shape(97.0, 4.0, 100.0, 25.0, 10.0);
  const auto s = series_from_shape(10.0, 200.0, shape);
  const double base = protocol::find_desaturation_trough(s, 75.0, 95.0, {});

  auto shifted = s;
  for (double& v : shifted.spo2_raw) v += 2.5;
  CHECK(protocol::find_desaturation_trough(shifted, 75.0, 95.0, {}) == base);

  auto delayed = s;
  for (double& tv : delayed.t) tv += 7.25;
  CHECK(protocol::find_desaturation_trough(delayed, 75.0 + 7.25, 95.0 + 7.25, {}) ==
        doctest::Approx(base + 7.25).epsilon(1e-9));
}

TEST_CASE("monotone dip-and-recover returns the window's global minimum") {
  oracle::Rng rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    const double tmin = rng.uniform(100.0, 110.0);
    const double depth = rng.uniform(2.0, 6.0);
    const auto s = series_from_shape(10.0, 200.0, dip_shape(97.0, depth, tmin, 25.0, 12.0));
    const double trough =
        protocol::find_desaturation_trough(s, tmin - 25.0, tmin - 4.0, {});
    double global_min_t = 0;
    double global_min = 1e9;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.t[i] < tmin - 4.0 || s.t[i] > tmin - 4.0 + 45.0) continue;
      if (s.spo2_raw[i] < global_min) {
        global_min = s.spo2_raw[i];
        global_min_t = s.t[i];
      }
    }
    CHECK(trough == doctest::Approx(global_min_t).epsilon(1e-9));
  }
}

TEST_CASE("absolute delay arithmetic") {
  CHECK(protocol::absolute_delay(50.0, 45.8) == doctest::Approx(4.2).epsilon(1e-12));
  CHECK(protocol::absolute_delay(45.8, 45.8) == 0.0);
  CHECK_THROWS_AS(protocol::absolute_delay(45.0, 45.8), Error);
}

TEST_CASE("delay report arithmetic") {
  using M = protocol::DelayMeasurement;
  const std::vector<M> ear = {{1, 0, 4}, {2, 0, 4}, {3, 0, 4}};
  const std::vector<M> finger = {{1, 0, 16}, {2, 0, 16}, {3, 0, 16}};
  const auto rep = protocol::subject_delay_report(ear, finger);
  CHECK(rep.mean_relative_s == doctest::Approx(12.0));
  CHECK(rep.range_ear_s == 0.0);
  CHECK(rep.range_finger_s == 0.0);

  const std::vector<M> ear2 = {{1, 0, 3}, {2, 0, 4}, {3, 0, 5}};
  const std::vector<M> finger2 = {{1, 0, 10}, {2, 0, 16}, {3, 0, 22}};
  const auto rep2 = protocol::subject_delay_report(ear2, finger2);
  CHECK(rep2.mean_ear_s == doctest::Approx(4.0));
  CHECK(rep2.mean_finger_s == doctest::Approx(16.0));
  CHECK(rep2.mean_relative_s == doctest::Approx(12.0));
  CHECK(rep2.range_finger_s == doctest::Approx(12.0));

  const std::vector<M> mismatched = {{2, 0, 3}, {1, 0, 4}, {3, 0, 5}};
  CHECK_THROWS_AS(protocol::subject_delay_report(ear, mismatched), Error);
}

TEST_CASE("mean relative delay is exactly the difference of means") {
  oracle::Rng rng(55);
  using M = protocol::DelayMeasurement;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<M> ear, finger;
    for (int k = 1; k <= 3; ++k) {
      ear.push_back({k, 0, rng.uniform(0.5, 8.0)});
      finger.push_back({k, 0, rng.uniform(8.0, 30.0)});
    }
    const auto r = protocol::subject_delay_report(ear, finger);
    CHECK(r.mean_relative_s == r.mean_finger_s - r.mean_ear_s);  // bitwise identity
  }
}

TEST_CASE("programmed relative delays are recovered within half a second") {
  // bracketing constants: smallest, mean and largest published mean
  // relative delays for this protocol family
  const PipelineConfig cfg;
  std::uint64_t seed = 1000;
  for (double rel : {4.2, 12.4, 24.2}) {
    const auto rep = measure_subject(4.0, 4.0 + rel, cfg, 0.003, seed += 10);
    CHECK(std::fabs(rep.mean_relative_s - rel) <= 0.5);
    CHECK(rep.mean_relative_s == rep.mean_finger_s - rep.mean_ear_s);
  }
}

TEST_CASE("programmed absolute delay is recovered with a narrow smoother") {
  PipelineConfig cfg;
  cfg.smooth_s = 1.0;
  const auto rep = measure_subject(4.0, 16.0, cfg, 0.0, 42);
  CHECK(std::fabs(rep.mean_ear_s - 4.0) <= 0.5);
  CHECK(std::fabs(rep.mean_finger_s - 16.0) <= 0.5);
}

}  // TEST_SUITE
