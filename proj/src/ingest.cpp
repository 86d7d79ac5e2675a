#include "earoxi/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "earoxi/errors.hpp"

namespace earoxi::ingest {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

double parse_cell(std::string_view cell, std::size_t line_no, const std::string& column) {
  double value = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value))
    raise(errc::non_numeric_cell,
          "line " + std::to_string(line_no) + ", column '" + column + "': cannot parse '" +
              std::string(cell) + "'");
  return value;
}

void append_count(std::vector<double>& dst, double value, std::size_t line_no,
                  const std::string& column) {
  if (value < 0)
    raise(errc::non_numeric_cell, "line " + std::to_string(line_no) + ", column '" + column +
                                      "': negative count " + std::to_string(value));
  dst.push_back(value);
}

void write_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

void write_fixed6(std::string& out, double v) {
  char buf[48];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 6);
  out.append(buf, res.ptr);
}

}  // namespace

PpgRecording parse_recording(std::string_view csv, const ParseOptions& opts, Site site,
                             const SubjectMeta& subject) {
  PpgRecording rec;
  rec.site = site;
  rec.subject = subject;

  std::size_t pos = 0;
  std::size_t line_no = 0;
  const auto next_line = [&]() -> std::optional<std::string_view> {
    if (pos >= csv.size()) return std::nullopt;
    const std::size_t nl = csv.find('\n', pos);
    std::string_view line = (nl == std::string_view::npos) ? csv.substr(pos)
                                                           : csv.substr(pos, nl - pos);
    pos = (nl == std::string_view::npos) ? csv.size() : nl + 1;
    ++line_no;
    return line;
  };

  const auto header = next_line();
  if (!header) raise(errc::missing_column, "empty input, no header row");
  const auto names = split_line(*header);
  const auto column_index = [&](const std::string& name) -> std::ptrdiff_t {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return static_cast<std::ptrdiff_t>(i);
    return -1;
  };
  const ColumnMap& cm = opts.columns;
  const std::ptrdiff_t it = column_index(cm.t);
  const std::ptrdiff_t ired = column_index(cm.red);
  const std::ptrdiff_t iir = column_index(cm.ir);
  const std::ptrdiff_t ibutton = column_index(cm.button);
  const std::ptrdiff_t igreen = column_index(cm.green);
  if (it < 0) raise(errc::missing_column, "'" + cm.t + "' not found in header");
  if (ired < 0) raise(errc::missing_column, "'" + cm.red + "' not found in header");
  if (iir < 0) raise(errc::missing_column, "'" + cm.ir + "' not found in header");
  if (ibutton < 0) raise(errc::missing_column, "'" + cm.button + "' not found in header");
  const std::size_t need = static_cast<std::size_t>(
      std::max({it, ired, iir, ibutton, igreen < 0 ? std::ptrdiff_t{0} : igreen}));

  while (const auto line = next_line()) {
    if (trim(*line).empty()) continue;
    const auto cells = split_line(*line);
    if (cells.size() <= need)
      raise(errc::non_numeric_cell,
            "line " + std::to_string(line_no) + ": expected " + std::to_string(need + 1) +
                " columns, got " + std::to_string(cells.size()));
    const double t = parse_cell(cells[static_cast<std::size_t>(it)], line_no, cm.t);
    if (t < 0)
      raise(errc::non_monotone_time,
            "line " + std::to_string(line_no) + ": negative timestamp " + std::to_string(t));
    if (!rec.t.empty() && t <= rec.t.back())
      raise(errc::non_monotone_time, "line " + std::to_string(line_no) + ": t " +
                                         std::to_string(t) + " not after previous " +
                                         std::to_string(rec.t.back()));
    rec.t.push_back(t);
    append_count(rec.red, parse_cell(cells[static_cast<std::size_t>(ired)], line_no, cm.red),
                 line_no, cm.red);
    append_count(rec.ir, parse_cell(cells[static_cast<std::size_t>(iir)], line_no, cm.ir),
                 line_no, cm.ir);
    if (igreen >= 0)
      append_count(rec.green,
                   parse_cell(cells[static_cast<std::size_t>(igreen)], line_no, cm.green),
                   line_no, cm.green);
    const double b = parse_cell(cells[static_cast<std::size_t>(ibutton)], line_no, cm.button);
    rec.button.push_back(b != 0.0 ? 1 : 0);
  }

  rec.fs = opts.declared_fs.value_or(infer_fs(rec.t));
  return rec;
}

PpgRecording load_recording(const std::filesystem::path& file, const ParseOptions& opts,
                            Site site, const SubjectMeta& subject) {
  std::ifstream in(file, std::ios::binary);
  if (!in) raise(errc::io_failure, "cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_recording(ss.str(), opts, site, subject);
}

std::string serialize_recording(const PpgRecording& rec) {
  std::string out;
  out.reserve(rec.size() * 48 + 32);
  out += rec.has_green() ? "t_s,red,ir,green,button\n" : "t_s,red,ir,button\n";
  for (std::size_t i = 0; i < rec.size(); ++i) {
    write_fixed6(out, rec.t[i]);
    out += ',';
    write_double(out, rec.red[i]);
    out += ',';
    write_double(out, rec.ir[i]);
    out += ',';
    if (rec.has_green()) {
      write_double(out, rec.green[i]);
      out += ',';
    }
    out += rec.button[i] ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::vector<EventMarker> extract_button_intervals(const PpgRecording& rec, double min_press_s,
                                                  double merge_gap_s) {
  std::vector<EventMarker> runs;
  for (std::size_t i = 0; i < rec.size();) {
    if (!rec.button[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < rec.size() && rec.button[j + 1]) ++j;
    runs.push_back({rec.t[i], rec.t[j]});
    i = j + 1;
  }

  std::vector<EventMarker> merged;
  for (const EventMarker& run : runs) {
    if (!merged.empty() && run.press_t - merged.back().release_t < merge_gap_s)
      merged.back().release_t = run.release_t;
    else
      merged.push_back(run);
  }

  std::vector<EventMarker> out;
  for (const EventMarker& m : merged)
    if (m.duration_s() >= min_press_s && m.duration_s() > 0) out.push_back(m);
  return out;
}

const char* violation_name(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::EmptyRecording: return "EmptyRecording";
    case Violation::Kind::ShortRecording: return "ShortRecording";
    case Violation::Kind::Dropout: return "Dropout";
    case Violation::Kind::Saturation: return "Saturation";
    case Violation::Kind::FlatChannel: return "FlatChannel";
    case Violation::Kind::FsMismatch: return "FsMismatch";
  }
  return "Violation";
}

ValidationReport validate_recording(const PpgRecording& rec, const ValidationLimits& lim) {
  ValidationReport report;
  const auto add = [&](Violation::Kind kind, bool fatal, std::string detail) {
    report.violations.push_back({kind, fatal, std::move(detail)});
  };

  if (rec.size() < 2) {
    add(Violation::Kind::EmptyRecording, true,
        "recording holds " + std::to_string(rec.size()) + " samples");
    return report;
  }
  if (rec.duration_s() < lim.min_duration_s)
    add(Violation::Kind::ShortRecording, true,
        "duration " + std::to_string(rec.duration_s()) + " s below " +
            std::to_string(lim.min_duration_s) + " s");

  for (std::size_t i = 0; i + 1 < rec.size(); ++i) {
    const double gap = rec.t[i + 1] - rec.t[i];
    if (gap > lim.max_dropout_s)
      add(Violation::Kind::Dropout, gap > lim.fatal_dropout_s,
          std::to_string(gap) + " s gap at t=" + std::to_string(rec.t[i]) + " s");
  }

  const auto check_channel = [&](const std::vector<double>& ch, const char* name) {
    if (ch.empty()) return;
    std::size_t saturated = 0;
    double lo = ch.front();
    double hi = ch.front();
    for (double v : ch) {
      if (v >= lim.adc_max) ++saturated;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (saturated > 0)
      add(Violation::Kind::Saturation, false,
          std::string(name) + ": " + std::to_string(saturated) + " samples at ADC max");
    if (hi == lo)
      add(Violation::Kind::FlatChannel, false,
          std::string(name) + ": zero variance (constant " + std::to_string(lo) + ")");
  };
  check_channel(rec.red, "red");
  check_channel(rec.ir, "ir");
  if (rec.has_green()) check_channel(rec.green, "green");

  const double inferred = infer_fs(rec.t);
  if (inferred > 0 && rec.fs > 0 &&
      std::fabs(rec.fs - inferred) > lim.fs_tolerance * inferred)
    add(Violation::Kind::FsMismatch, false,
        "stored fs " + std::to_string(rec.fs) + " Hz vs median-interval estimate " +
            std::to_string(inferred) + " Hz");

  return report;
}

}  // namespace earoxi::ingest
