#include "earoxi/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "earoxi/errors.hpp"
#include "earoxi/kernels.hpp"

namespace earoxi::dsp {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

}  // namespace

FilterSpec FilterSpec::band_pass(double low_hz, double high_hz, int order) {
  return FilterSpec{FilterKind::BandPass, low_hz, high_hz, order};
}

FilterSpec FilterSpec::low_pass(double cutoff_hz, int order) {
  return FilterSpec{FilterKind::LowPass, cutoff_hz, 0.0, order};
}

void FilterSpec::validate(double fs) const {
  if (fs <= 0) raise(errc::invalid_config, "sampling rate must be positive");
  if (order < 2 || order % 2 != 0)
    raise(errc::invalid_config, "filter order must be even and >= 2");
  if (low_hz <= 0 || low_hz >= fs / 2)
    raise(errc::invalid_config, "low cutoff must lie in (0, fs/2)");
  if (kind == FilterKind::BandPass && (high_hz <= low_hz || high_hz >= fs / 2))
    raise(errc::invalid_config, "band-pass cutoffs must satisfy 0 < low < high < fs/2");
}

SosFilter SosFilter::design(const FilterSpec& spec, double fs) {
  spec.validate(fs);
  const int n_proto = (spec.kind == FilterKind::BandPass) ? spec.order / 2 : spec.order;

  // Analog low-pass prototype: poles on the unit circle, left half plane.
  std::vector<cplx> proto;
  for (int k = 0; k < n_proto; ++k) {
    const double theta = kPi * (2.0 * k + n_proto + 1.0) / (2.0 * n_proto);
    proto.emplace_back(std::cos(theta), std::sin(theta));
  }

  const double bilinear_k = 2.0 * fs;
  const auto prewarp = [&](double f_hz) { return bilinear_k * std::tan(kPi * f_hz / fs); };

  std::vector<cplx> apoles;
  std::vector<cplx> azeros;
  double again = 1.0;
  if (spec.kind == FilterKind::LowPass) {
    const double wc = prewarp(spec.low_hz);
    for (const cplx& p : proto) apoles.push_back(p * wc);
    again = std::pow(wc, n_proto);
  } else {
    const double wl = prewarp(spec.low_hz);
    const double wh = prewarp(spec.high_hz);
    const double bw = wh - wl;
    const double w0sq = wl * wh;
    for (const cplx& p : proto) {
      const cplx half = p * (bw * 0.5);
      const cplx disc = std::sqrt(half * half - w0sq);
      apoles.push_back(half + disc);
      apoles.push_back(half - disc);
    }
    azeros.assign(static_cast<std::size_t>(n_proto), cplx(0.0, 0.0));
    again = std::pow(bw, n_proto);
  }

  // Bilinear transform; zeros at analog infinity map to z = -1.
  std::vector<cplx> zpoles;
  std::vector<cplx> zzeros;
  cplx pole_prod(1.0, 0.0);
  cplx zero_prod(1.0, 0.0);
  for (const cplx& p : apoles) {
    zpoles.push_back((bilinear_k + p) / (bilinear_k - p));
    pole_prod *= (bilinear_k - p);
  }
  for (const cplx& z : azeros) {
    zzeros.push_back((bilinear_k + z) / (bilinear_k - z));
    zero_prod *= (bilinear_k - z);
  }
  while (zzeros.size() < zpoles.size()) zzeros.emplace_back(-1.0, 0.0);
  const double gain = (again * zero_prod / pole_prod).real();

  // Pair conjugate poles into sections. Pole count is even by contract.
  std::vector<cplx> pool = zpoles;
  std::vector<std::pair<cplx, cplx>> pole_pairs;
  while (!pool.empty()) {
    const cplx p = pool.back();
    pool.pop_back();
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const double d = std::abs(pool[i] - std::conj(p));
      if (d < best_dist) {
        best_dist = d;
        best = i;
      }
    }
    pole_pairs.emplace_back(p, pool[best]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
  }

  SosFilter out;
  out.fs_ = fs;
  const std::size_t nsec = pole_pairs.size();
  const double section_gain = std::pow(gain, 1.0 / static_cast<double>(nsec));
  for (std::size_t s = 0; s < nsec; ++s) {
    const auto& [p1, p2] = pole_pairs[s];
    Biquad bq{};
    bq.a1 = -(p1 + p2).real();
    bq.a2 = (p1 * p2).real();
    if (spec.kind == FilterKind::LowPass) {
      // zeros {-1, -1}
      bq.b0 = 1.0;
      bq.b1 = 2.0;
      bq.b2 = 1.0;
    } else {
      // zeros {+1, -1}
      bq.b0 = 1.0;
      bq.b1 = 0.0;
      bq.b2 = -1.0;
    }
    bq.b0 *= section_gain;
    bq.b1 *= section_gain;
    bq.b2 *= section_gain;
    out.sections_.push_back(bq);
  }
  return out;
}

std::complex<double> SosFilter::response(double f_hz) const {
  const cplx zinv = std::exp(cplx(0.0, -2.0 * kPi * f_hz / fs_));
  cplx h(1.0, 0.0);
  for (const Biquad& s : sections_) {
    h *= (s.b0 + s.b1 * zinv + s.b2 * zinv * zinv) /
         (1.0 + s.a1 * zinv + s.a2 * zinv * zinv);
  }
  return h;
}

void SosFilter::apply_forward(std::span<double> x) const {
  if (x.empty()) return;
  for (const Biquad& s : sections_) {
    // Transposed direct form II, state seeded with the constant-input fixed
    // point for x[0] so a constant signal passes through exactly.
    const double denom = 1.0 + s.a1 + s.a2;
    const double dc_gain = (s.b0 + s.b1 + s.b2) / denom;
    const double u = x[0];
    const double v = dc_gain * u;
    double s1 = v - s.b0 * u;
    double s2 = s.b2 * u - s.a2 * v;
    for (double& xn : x) {
      const double in = xn;
      const double y = s.b0 * in + s1;
      s1 = s.b1 * in - s.a1 * y + s2;
      s2 = s.b2 * in - s.a2 * y;
      xn = y;
    }
  }
}

std::vector<double> filtfilt(const SosFilter& filter, std::span<const double> x,
                             std::size_t pad, PadMode mode) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  if (mode == PadMode::Reflect && pad >= n)
    raise(errc::signal_too_short,
          "signal of " + std::to_string(n) + " samples cannot cover a reflection pad of " +
              std::to_string(pad));

  std::vector<double> buf(n + 2 * pad);
  std::copy(x.begin(), x.end(), buf.begin() + static_cast<std::ptrdiff_t>(pad));
  if (mode == PadMode::Reflect) {
    // Odd reflection about the end samples keeps level and slope continuous.
    for (std::size_t i = 0; i < pad; ++i) {
      buf[i] = 2.0 * x[0] - x[pad - i];
      buf[n + pad + i] = 2.0 * x[n - 1] - x[n - 2 - i];
    }
  } else {
    const std::size_t span = std::min(n, pad);
    const double left = mean_of(x.first(span));
    const double right = mean_of(x.last(span));
    std::fill(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(pad), left);
    std::fill(buf.end() - static_cast<std::ptrdiff_t>(pad), buf.end(), right);
  }

  filter.apply_forward(buf);
  std::reverse(buf.begin(), buf.end());
  filter.apply_forward(buf);
  std::reverse(buf.begin(), buf.end());

  return {buf.begin() + static_cast<std::ptrdiff_t>(pad),
          buf.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

std::vector<double> filter_zero_phase(std::span<const double> x, double fs,
                                      const FilterSpec& spec) {
  const SosFilter filter = SosFilter::design(spec, fs);
  const auto pad = static_cast<std::size_t>(std::ceil(3.0 / spec.low_hz * fs));
  return filtfilt(filter, x, pad, PadMode::Reflect);
}

std::vector<double> dc_baseline(std::span<const double> x, double fs, double cutoff_hz,
                                int order) {
  if (static_cast<double>(x.size()) < 60.0 * fs)
    raise(errc::signal_too_short, "dc baseline needs >= 60 s of signal");
  const SosFilter filter = SosFilter::design(FilterSpec::low_pass(cutoff_hz, order), fs);
  const auto pad = static_cast<std::size_t>(std::ceil(100.0 * fs));
  return filtfilt(filter, x, pad, PadMode::MeanExtend);
}

std::vector<double> resample_uniform(std::span<const double> t, std::span<const double> x,
                                     double fs, std::vector<double>& grid) {
  const double t0 = t.front();
  const double span_s = t.back() - t0;
  const std::size_t m = static_cast<std::size_t>(std::floor(span_s * fs)) + 1;
  grid.resize(m);
  for (std::size_t k = 0; k < m; ++k) grid[k] = t0 + static_cast<double>(k) / fs;
  std::vector<double> out(m);
  kernels::interp_linear(t, x, grid, out);
  return out;
}

std::vector<double> filter_on_grid(std::span<const double> t, std::span<const double> x,
                                   double fs, const FilterSpec& spec) {
  std::vector<double> grid;
  std::vector<double> xu = resample_uniform(t, x, fs, grid);
  const std::vector<double> yu = filter_zero_phase(xu, fs, spec);
  std::vector<double> out(t.size());
  kernels::interp_linear(grid, yu, t, out);
  return out;
}

std::vector<double> dc_baseline_on_grid(std::span<const double> t, std::span<const double> x,
                                        double fs, double cutoff_hz, int order) {
  std::vector<double> grid;
  std::vector<double> xu = resample_uniform(t, x, fs, grid);
  const std::vector<double> yu = dc_baseline(xu, fs, cutoff_hz, order);
  std::vector<double> out(t.size());
  kernels::interp_linear(grid, yu, t, out);
  return out;
}

namespace {

struct Candidate {
  std::size_t idx;
  double value;
  double prominence;
};

// Plateau-aware local maxima (interior only, plateau midpoint).
std::vector<std::size_t> local_maxima(std::span<const double> x) {
  std::vector<std::size_t> out;
  if (x.size() < 3) return out;
  std::size_t i = 1;
  const std::size_t i_max = x.size() - 1;
  while (i < i_max) {
    if (x[i - 1] < x[i]) {
      std::size_t ahead = i + 1;
      while (ahead < i_max && x[ahead] == x[i]) ++ahead;
      if (x[ahead] < x[i]) {
        out.push_back((i + ahead - 1) / 2);
        i = ahead;
        continue;
      }
    }
    ++i;
  }
  return out;
}

// Height above the higher of the two bases (minima between the peak and the
// nearest higher sample, or the signal edge).
double prominence_of(std::span<const double> x, std::size_t idx) {
  double left_min = x[idx];
  for (std::size_t j = idx; j-- > 0;) {
    if (x[j] > x[idx]) break;
    left_min = std::min(left_min, x[j]);
  }
  double right_min = x[idx];
  for (std::size_t j = idx + 1; j < x.size(); ++j) {
    if (x[j] > x[idx]) break;
    right_min = std::min(right_min, x[j]);
  }
  return x[idx] - std::max(left_min, right_min);
}

std::vector<Candidate> detect_one_side(std::span<const double> x, std::span<const double> t,
                                       const HrRange& hr) {
  std::vector<Candidate> cands;
  for (std::size_t idx : local_maxima(x)) {
    const double prom = prominence_of(x, idx);
    if (prom > 0) cands.push_back({idx, x[idx], prom});
  }
  if (cands.empty()) return cands;

  // Beat amplitude estimate: median prominence of the strongest candidates,
  // capped at the minimum plausible beat count for the record length.
  const double duration = t.back() - t.front();
  std::vector<double> proms;
  proms.reserve(cands.size());
  for (const Candidate& c : cands) proms.push_back(c.prominence);
  const std::size_t top_k = std::min<std::size_t>(
      proms.size(),
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(duration * hr.bpm_min / 60.0))));
  std::partial_sort(proms.begin(), proms.begin() + static_cast<std::ptrdiff_t>(top_k),
                    proms.end(), std::greater<>());
  std::vector<double> top(proms.begin(), proms.begin() + static_cast<std::ptrdiff_t>(top_k));
  std::nth_element(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(top_k / 2), top.end());
  const double beat_amplitude = top[top_k / 2];
  const double threshold = 0.3 * beat_amplitude;

  std::vector<Candidate> strong;
  for (const Candidate& c : cands)
    if (c.prominence >= threshold) strong.push_back(c);

  // Minimum separation, strongest first (ties: earliest).
  const double min_sep = 60.0 / hr.bpm_max;
  std::sort(strong.begin(), strong.end(), [](const Candidate& a, const Candidate& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.idx < b.idx;
  });
  std::vector<double> kept_times;
  std::vector<Candidate> kept;
  for (const Candidate& c : strong) {
    const double tc = t[c.idx];
    const auto it = std::lower_bound(kept_times.begin(), kept_times.end(), tc);
    const bool clash = (it != kept_times.end() && *it - tc < min_sep) ||
                       (it != kept_times.begin() && tc - *(it - 1) < min_sep);
    if (clash) continue;
    kept_times.insert(it, tc);
    kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(),
            [](const Candidate& a, const Candidate& b) { return a.idx < b.idx; });
  return kept;
}

}  // namespace

PeakTrain detect_peaks_troughs(std::span<const double> ac, std::span<const double> t,
                               HrRange hr) {
  if (ac.size() != t.size()) raise(errc::length_mismatch, "signal/timestamp length mismatch");
  if (ac.size() < 3) raise(errc::no_beats_found, "signal too short for beat detection");

  std::vector<double> neg(ac.size());
  for (std::size_t i = 0; i < ac.size(); ++i) neg[i] = -ac[i];

  const std::vector<Candidate> peaks = detect_one_side(ac, t, hr);
  const std::vector<Candidate> troughs = detect_one_side(neg, t, hr);

  // Merge by time and enforce alternation: keep the most extreme of any
  // same-type run so the train is strictly peak/trough interleaved.
  struct Ext {
    std::size_t idx;
    bool is_peak;
  };
  std::vector<Ext> merged;
  merged.reserve(peaks.size() + troughs.size());
  std::size_t ip = 0;
  std::size_t iq = 0;
  while (ip < peaks.size() || iq < troughs.size()) {
    const bool take_peak =
        iq == troughs.size() || (ip < peaks.size() && peaks[ip].idx <= troughs[iq].idx);
    if (take_peak)
      merged.push_back({peaks[ip++].idx, true});
    else
      merged.push_back({troughs[iq++].idx, false});
  }
  std::vector<Ext> alternating;
  for (const Ext& e : merged) {
    if (!alternating.empty() && alternating.back().is_peak == e.is_peak) {
      const double prev = ac[alternating.back().idx];
      const double cur = ac[e.idx];
      const bool replace = e.is_peak ? (cur > prev) : (cur < prev);
      if (replace) alternating.back() = e;
      continue;
    }
    alternating.push_back(e);
  }

  PeakTrain out;
  for (const Ext& e : alternating) {
    if (e.is_peak) {
      out.peak_times.push_back(t[e.idx]);
      out.peak_values.push_back(ac[e.idx]);
    } else {
      out.trough_times.push_back(t[e.idx]);
      out.trough_values.push_back(ac[e.idx]);
    }
  }
  if (out.peak_times.size() < 3 || out.trough_times.size() < 3)
    raise(errc::no_beats_found, "fewer than 3 beats detected");
  return out;
}

EnvelopePair interpolate_envelopes(const PeakTrain& pt, std::span<const double> t) {
  if (pt.peak_times.size() < 3 || pt.trough_times.size() < 3)
    raise(errc::too_few_beats, "envelope interpolation needs >= 3 peaks and troughs");
  EnvelopePair env;
  env.upper.resize(t.size());
  env.lower.resize(t.size());
  kernels::interp_linear(pt.peak_times, pt.peak_values, t, env.upper);
  kernels::interp_linear(pt.trough_times, pt.trough_values, t, env.lower);
  env.first_beat_t = std::max(pt.peak_times.front(), pt.trough_times.front());
  env.last_beat_t = std::min(pt.peak_times.back(), pt.trough_times.back());
  return env;
}

std::vector<double> ac_amplitude(const EnvelopePair& env) {
  std::vector<double> out(env.upper.size());
  kernels::abs_sum(env.upper, env.lower, out);
  return out;
}

}  // namespace earoxi::dsp
