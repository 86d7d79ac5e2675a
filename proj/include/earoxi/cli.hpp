#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace earoxi::cli {

struct AnalyzeArgs {
  std::filesystem::path ear_csv;
  std::filesystem::path finger_csv;
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> meta;
  std::filesystem::path out;
};

struct CohortArgs {
  std::filesystem::path in_dir;
  std::optional<std::filesystem::path> config;
  std::filesystem::path out_dir;
};

struct SynthArgs {
  std::filesystem::path spec;
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;
};

// Exit codes: 0 success, 1 I/O failure, 2 validation/contract failure.
int cmd_analyze(const AnalyzeArgs& args);
int cmd_cohort(const CohortArgs& args);
int cmd_synth(const SynthArgs& args);

// Text printed by --schema: the CSV layout and the JSON file formats.
std::string schema_text();

// Full argv interface used by the binary.
int run(int argc, char** argv);

}  // namespace earoxi::cli
