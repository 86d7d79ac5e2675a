#pragma once

#include <stdexcept>
#include <string>

namespace earoxi {

// Error categories used across the toolkit. The CLI maps these onto exit
// codes: io_failure -> 1, everything else (validation/contract) -> 2.
enum class errc {
  missing_column,
  non_monotone_time,
  non_numeric_cell,
  signal_too_short,
  no_beats_found,
  too_few_beats,
  length_mismatch,
  non_positive_dc,
  window_out_of_range,
  empty_list,
  non_positive_amplitude,
  too_few_samples,
  zero_variance,
  no_trough_found,
  negative_delay,
  segment_mismatch,
  out_of_calibration_range,
  invalid_spec,
  invalid_config,
  duplicate_subject,
  empty_cohort,
  no_subjects_found,
  unusable_recording,
  io_failure,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace earoxi
