#include "earoxi/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "earoxi/errors.hpp"
#include "earoxi/ingest.hpp"
#include "earoxi/io.hpp"
#include "earoxi/json_util.hpp"
#include "earoxi/report.hpp"
#include "earoxi/synth.hpp"

namespace earoxi::cli {

namespace {

using nlohmann::json;

PipelineConfig resolve_config(const std::optional<std::filesystem::path>& flag) {
  if (flag) return PipelineConfig::load(*flag);
  if (const char* env = std::getenv("EAROXI_CONFIG"); env && *env)
    return PipelineConfig::load(env);
  return {};
}

SubjectMeta meta_from_json_text(const std::string& text, const std::string& where) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    raise(errc::invalid_config, where + ": " + e.what());
  }
  check_keys(j, {"id", "sex", "age"}, where);
  SubjectMeta meta;
  get_if(j, "id", meta.id);
  if (j.contains("sex") && !j.at("sex").is_null())
    meta.sex = sex_from_name(j.at("sex").get<std::string>());
  if (j.contains("age") && !j.at("age").is_null()) meta.age = j.at("age").get<double>();
  meta.validate();
  return meta;
}

std::string stem_without_suffix(const std::filesystem::path& p, const std::string& suffix) {
  std::string stem = p.stem().string();
  if (stem.size() > suffix.size() && stem.ends_with(suffix))
    stem.resize(stem.size() - suffix.size());
  return stem;
}

template <typename F>
int guarded(F&& body) {
  try {
    body();
    return 0;
  } catch (const Error& e) {
    std::cerr << report::kToolName << ": " << e.what() << "\n";
    return e.code() == errc::io_failure ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << report::kToolName << ": " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int cmd_analyze(const AnalyzeArgs& args) {
  return guarded([&] {
    const PipelineConfig cfg = resolve_config(args.config);
    SubjectMeta meta;
    if (args.meta) {
      meta = meta_from_json_text(io::read_file(*args.meta), args.meta->string());
    } else {
      meta.id = stem_without_suffix(args.ear_csv, "_ear");
    }
    const PpgRecording ear =
        ingest::load_recording(args.ear_csv, cfg.parse_options(), Site::EarCanal, meta);
    const PpgRecording finger =
        ingest::load_recording(args.finger_csv, cfg.parse_options(), Site::Finger, meta);
    const report::SubjectResult result = report::analyze_subject(ear, finger, cfg);
    io::write_file_atomic(args.out, report::subject_to_json(result, cfg).dump(2) + "\n");
  });
}

int cmd_cohort(const CohortArgs& args) {
  return guarded([&] {
    const PipelineConfig cfg = resolve_config(args.config);

    if (!std::filesystem::is_directory(args.in_dir))
      raise(errc::io_failure, args.in_dir.string() + " is not a directory");

    std::vector<std::string> ids;
    for (const auto& entry : std::filesystem::directory_iterator(args.in_dir)) {
      if (!entry.is_regular_file()) continue;
      const std::string name = entry.path().filename().string();
      if (!name.ends_with("_ear.csv")) continue;
      const std::string id = name.substr(0, name.size() - std::string("_ear.csv").size());
      if (std::filesystem::exists(args.in_dir / (id + "_finger.csv"))) ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    if (ids.empty())
      raise(errc::no_subjects_found,
            "no <id>_ear.csv / <id>_finger.csv pairs under " + args.in_dir.string());

    std::vector<std::optional<report::SubjectResult>> results(ids.size());
    std::vector<std::string> skip_warnings(ids.size());

    const std::int64_t n = static_cast<std::int64_t>(ids.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      const std::string& id = ids[static_cast<std::size_t>(i)];
      try {
        SubjectMeta meta;
        meta.id = id;
        const auto meta_path = args.in_dir / (id + "_meta.json");
        if (std::filesystem::exists(meta_path))
          meta = meta_from_json_text(io::read_file(meta_path), meta_path.string());
        const PpgRecording ear = ingest::load_recording(
            args.in_dir / (id + "_ear.csv"), cfg.parse_options(), Site::EarCanal, meta);
        const PpgRecording finger = ingest::load_recording(
            args.in_dir / (id + "_finger.csv"), cfg.parse_options(), Site::Finger, meta);
        results[static_cast<std::size_t>(i)] = report::analyze_subject(ear, finger, cfg);
      } catch (const std::exception& e) {
        skip_warnings[static_cast<std::size_t>(i)] =
            "subject " + id + " skipped: " + e.what();
      }
    }

    std::vector<report::SubjectResult> usable;
    std::vector<std::string> warnings;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (results[i])
        usable.push_back(std::move(*results[i]));
      else
        warnings.push_back(skip_warnings[i]);
    }

    const report::CohortTables tables = report::cohort_tables(usable, cfg, warnings);

    std::error_code ec;
    std::filesystem::create_directories(args.out_dir, ec);
    if (ec) raise(errc::io_failure, "cannot create " + args.out_dir.string());
    io::write_file_atomic(args.out_dir / "cohort_report.json",
                          tables.report.dump(2) + "\n");
    io::write_file_atomic(args.out_dir / "resting_spo2_per_subject.csv", tables.resting_csv);
    io::write_file_atomic(args.out_dir / "delay_per_subject.csv", tables.delay_csv);
    io::write_file_atomic(args.out_dir / "delay_boxplot.csv", tables.boxplot_csv);
    io::write_file_atomic(args.out_dir / "amplitude_normalized.csv", tables.amplitude_csv);
  });
}

int cmd_synth(const SynthArgs& args) {
  return guarded([&] {
    json j;
    try {
      j = json::parse(io::read_file(args.spec));
    } catch (const json::exception& e) {
      raise(errc::invalid_spec, args.spec.string() + ": " + e.what());
    }
    if (args.seed) j["seed"] = *args.seed;
    const synth::CohortSpec cohort = synth::cohort_from_json(j);
    synth::emit_cohort(cohort, args.out_dir);
  });
}

int run(int argc, char** argv) {
  CLI::App app{"ear-canal vs finger pulse-oximetry analysis toolkit", report::kToolName};
  app.set_version_flag("--version",
                       std::string(report::kToolName) + " " + report::kToolVersion);
  bool print_schema = false;
  app.add_flag("--schema", print_schema, "print the CSV and JSON schemas and exit");
  app.require_subcommand(0, 1);

  AnalyzeArgs analyze;
  auto* analyze_cmd =
      app.add_subcommand("analyze", "analyze one subject's ear/finger recording pair");
  analyze_cmd->add_option("--ear", analyze.ear_csv, "ear-canal recording CSV")->required();
  analyze_cmd->add_option("--finger", analyze.finger_csv, "finger recording CSV")->required();
  std::string analyze_config, analyze_meta;
  analyze_cmd->add_option("--config", analyze_config, "pipeline config JSON");
  analyze_cmd->add_option("--meta", analyze_meta, "subject meta JSON");
  analyze_cmd->add_option("--out", analyze.out, "subject report JSON path")->required();

  CohortArgs cohort;
  auto* cohort_cmd = app.add_subcommand("cohort", "aggregate a directory of subject pairs");
  cohort_cmd->add_option("--in", cohort.in_dir, "directory of <id>_ear/_finger.csv pairs")
      ->required();
  std::string cohort_config;
  cohort_cmd->add_option("--config", cohort_config, "pipeline config JSON");
  cohort_cmd->add_option("--out", cohort.out_dir, "output directory")->required();

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic cohort");
  synth_cmd->add_option("--spec", synth_args.spec, "cohort spec JSON")->required();
  synth_cmd->add_option("--out", synth_args.out_dir, "output directory")->required();
  std::uint64_t seed_flag = 0;
  auto* seed_opt = synth_cmd->add_option("--seed", seed_flag, "override the spec seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (print_schema) {
    std::cout << schema_text();
    return 0;
  }
  if (analyze_cmd->parsed()) {
    if (!analyze_config.empty()) analyze.config = analyze_config;
    if (!analyze_meta.empty()) analyze.meta = analyze_meta;
    return cmd_analyze(analyze);
  }
  if (cohort_cmd->parsed()) {
    if (!cohort_config.empty()) cohort.config = cohort_config;
    return cmd_cohort(cohort);
  }
  if (synth_cmd->parsed()) {
    if (*seed_opt) synth_args.seed = seed_flag;
    return cmd_synth(synth_args);
  }
  std::cout << app.help();
  return 0;
}

std::string schema_text() {
  return R"(recording CSV (canonical column names, remappable via config "columns"):
  t_s,red,ir[,green],button
  t_s     seconds from recording start, strictly increasing, 6 decimals
  red     raw red photodiode counts, >= 0
  ir      raw infrared counts, >= 0
  green   optional raw green counts, >= 0
  button  0/1, held during exhale + breath hold

pipeline config JSON (all keys optional; defaults shown by a report's
"config" echo): bandpass{low_hz,high_hz,order}, dc{cutoff_hz,order},
hr_bpm[min,max], calibration{intercept,slope}, smooth_s,
low_amplitude_epsilon, bridge_max_s, trough{search_s,depth_gate,baseline_s,
local_window_s}, debounce{min_press_s,merge_gap_s}, hold_band_s[min,max],
resting_window_s, columns{t,red,ir,green,button}, declared_fs_hz,
limits{max_dropout_s,fatal_dropout_s,min_duration_s,adc_max,fs_tolerance}

synth spec JSON: {"seed": u64, "finger_perfusion_ratio": 2.35,
  "defaults": {synth fields}, "subjects": [{"id","sex","age",
  "ear": {overrides}, "finger": {overrides}}]}
synth fields: fs, duration_s, hr_bpm, hr_var_bpm, hr_var_hz, pulse_duty,
  dc_red, dc_ir, perfusion_red, perfusion_ir, noise_sigma, baseline_wander,
  wander_hz, wander_fraction, spo2_profile[[t,spo2]...], baseline_spo2,
  hold_drop, recovery_tau_s, site_delay_s, protocol[{kind,duration_s}...],
  calibration{intercept,slope}, seed

subject report JSON: tool, subject, config (full echo), sites.ear/.finger
  {fs_hz, samples, resting, delays[], warnings}, delay {mean_ear_s,
  mean_finger_s, mean_relative_s, range_ear_s, range_finger_s,
  relative_per_segment_s}, warnings, notes
cohort outputs: cohort_report.json plus resting_spo2_per_subject.csv,
  delay_per_subject.csv, delay_boxplot.csv, amplitude_normalized.csv
)";
}

}  // namespace earoxi::cli
