#pragma once

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oscnet/sim.hpp"

namespace oscnet {

enum class WindowKind { rectangular, hann };

inline const char* to_string(WindowKind w) {
  return w == WindowKind::hann ? "hann" : "rect";
}

/// One-sided power spectrum: power[k] = |X_k|^2 of the windowed, mean-removed,
/// zero-padded channel, on the grid 0..f_s/2.
struct Spectrum {
  std::vector<double> freqs;
  std::vector<double> power;
  double window_length = 0;  // seconds of real data in the window
  WindowKind window_kind = WindowKind::rectangular;
};

struct PeakReport {
  double f_peak = 0;  // Hz
  double fwhm = 0;    // Hz
};

/// Synchronization verdict: frequency spread across oscillators plus the
/// stability of the pairwise phase differences.
struct LockReport {
  bool locked = false;
  std::vector<double> mean_period;      // per oscillator, seconds
  double max_rel_period_spread = 0;     // max over pairs of |T_i - T_j| / grand mean
  double phase_std_deg = 0;             // max over pairs of circular std of per-cycle phase diffs
};

/// Trough-based relative phases: delta_phi = (delta_t / T) * 360 degrees.
struct PhaseReport {
  int reference = 0;
  double period_t = 0;             // mean inter-trough interval of the reference
  std::vector<double> phases_deg;  // in [0, 360), reference pinned to 0
  std::vector<double> delta_t;     // signed seconds in (-T/2, T/2]
};

namespace detail {

constexpr double kPi = std::numbers::pi_v<double>;

inline double wrap_deg(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w < 0) w += 360.0;
  return w;
}

/// Circular mean and circular standard deviation (degrees).
inline std::pair<double, double> circular_mean_std(const std::vector<double>& deg) {
  if (deg.empty()) throw std::invalid_argument("circular statistics of an empty set");
  double cs = 0, sn = 0;
  for (double a : deg) {
    double r = a * kPi / 180.0;
    cs += std::cos(r);
    sn += std::sin(r);
  }
  cs /= static_cast<double>(deg.size());
  sn /= static_cast<double>(deg.size());
  double r = std::hypot(cs, sn);
  double mean = std::atan2(sn, cs) * 180.0 / kPi;
  double sd = std::sqrt(-2.0 * std::log(std::max(r, 1e-12))) * 180.0 / kPi;
  return {mean, sd};
}

/// Signed offset from x to the nearest element of the sorted list.
inline double nearest_offset(const std::vector<double>& sorted, double x) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
  double best = std::numeric_limits<double>::infinity();
  if (it != sorted.end()) best = *it - x;
  if (it != sorted.begin()) {
    double lo = *(it - 1) - x;
    if (std::abs(lo) < std::abs(best)) best = lo;
  }
  return best;
}

inline std::vector<double> troughs_in_window(const Trace& trace, int osc, double t_start) {
  auto all = extract_troughs(trace, osc);
  std::vector<double> out;
  for (double t : all)
    if (t >= t_start) out.push_back(t);
  return out;
}

}  // namespace detail

/// Periodogram of one channel. The signal is mean-removed, windowed, zero
/// padded to at least zero_pad_factor times its length (rounded up to a power
/// of two), and transformed; power is the squared DFT magnitude on 0..f_s/2.
inline Spectrum periodogram(const Trace& trace, int oscillator, WindowKind window_kind,
                            int zero_pad_factor = 1) {
  if (oscillator < 0 || oscillator >= trace.n())
    throw std::invalid_argument("periodogram: oscillator index out of range");
  if (zero_pad_factor < 1) throw std::invalid_argument("periodogram: zero_pad_factor must be >= 1");
  const auto& x = trace.v[static_cast<std::size_t>(oscillator)];
  auto m = x.size();
  if (m < 16) throw std::invalid_argument("periodogram: need at least 16 samples");
  if (trace.times.size() != m) throw std::invalid_argument("periodogram: malformed trace");
  double dt = trace.times[1] - trace.times[0];
  if (!(dt > 0)) throw std::invalid_argument("periodogram: non-increasing sample times");
  for (std::size_t k = 1; k < m; ++k) {
    double d = trace.times[k] - trace.times[k - 1];
    if (std::abs(d - dt) > 1e-6 * dt)
      throw std::invalid_argument("periodogram: non-uniform sampling");
  }

  double mean = 0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(m);

  std::size_t target = m * static_cast<std::size_t>(zero_pad_factor);
  std::size_t nfft = 1;
  while (nfft < target) nfft <<= 1;

  std::vector<double> padded(nfft, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    double w = 1.0;
    if (window_kind == WindowKind::hann)
      w = 0.5 * (1.0 - std::cos(2.0 * detail::kPi * static_cast<double>(k) /
                                static_cast<double>(m - 1)));
    padded[k] = (x[k] - mean) * w;
  }

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> out;
  fft.fwd(out, padded);

  Spectrum spec;
  spec.window_kind = window_kind;
  spec.window_length = static_cast<double>(m) * dt;
  double fs = 1.0 / dt;
  std::size_t half = nfft / 2;
  spec.freqs.reserve(half + 1);
  spec.power.reserve(half + 1);
  for (std::size_t k = 0; k <= half; ++k) {
    spec.freqs.push_back(static_cast<double>(k) * fs / static_cast<double>(nfft));
    spec.power.push_back(std::norm(out[k]));
  }
  return spec;
}

/// Peak frequency (argmax above DC) and FWHM with linear interpolation of the
/// half-power crossings on both flanks.
inline PeakReport peak_fwhm(const Spectrum& spec) {
  auto k_count = spec.power.size();
  if (k_count < 3 || spec.freqs.size() != k_count)
    throw std::invalid_argument("peak_fwhm: malformed spectrum");
  std::size_t k_peak = 1;
  for (std::size_t k = 1; k < k_count; ++k)
    if (spec.power[k] > spec.power[k_peak]) k_peak = k;
  if (spec.power[k_peak] <= spec.power[0])
    throw std::invalid_argument("peak_fwhm: no interior maximum above DC");
  if (k_peak + 1 == k_count)
    throw std::invalid_argument("peak_fwhm: peak at grid boundary");

  double half = 0.5 * spec.power[k_peak];
  auto interp = [&](std::size_t lo, std::size_t hi) {
    // crossing between grid points lo (below half) and hi (above half)
    double p0 = spec.power[lo], p1 = spec.power[hi];
    double f0 = spec.freqs[lo], f1 = spec.freqs[hi];
    return f0 + (half - p0) / (p1 - p0) * (f1 - f0);
  };

  double f_left = -1;
  for (std::size_t k = k_peak; k-- > 0;) {
    if (spec.power[k] <= half) {
      f_left = interp(k, k + 1);
      break;
    }
  }
  if (f_left < 0) throw std::invalid_argument("peak_fwhm: peak at grid boundary");

  double f_right = -1;
  for (std::size_t k = k_peak + 1; k < k_count; ++k) {
    if (spec.power[k] <= half) {
      f_right = interp(k, k - 1);
      break;
    }
  }
  if (f_right < 0) throw std::invalid_argument("peak_fwhm: peak at grid boundary");

  PeakReport rep;
  rep.f_peak = spec.freqs[k_peak];
  rep.fwhm = f_right - f_left;
  return rep;
}

/// Lock verdict over the trailing window_fraction of the trace. Locked means
/// the per-oscillator mean periods agree within eps_f (relative) and every
/// pairwise per-cycle phase difference has circular std below eps_phi_deg.
inline LockReport lock_report(const Trace& trace, double window_fraction = 0.5,
                              double eps_f = 1e-3, double eps_phi_deg = 10.0) {
  if (!(window_fraction > 0 && window_fraction <= 1))
    throw std::invalid_argument("lock_report: window_fraction must be in (0,1]");
  if (!(eps_f > 0) || !(eps_phi_deg > 0))
    throw std::invalid_argument("lock_report: thresholds must be positive");
  int n = trace.n();
  if (n < 1) throw std::invalid_argument("lock_report: empty trace");
  double t_start = trace.t_end * (1.0 - window_fraction);

  std::vector<std::vector<double>> troughs(static_cast<std::size_t>(n));
  LockReport rep;
  rep.mean_period.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto tr = detail::troughs_in_window(trace, i, t_start);
    if (tr.size() < 8)
      throw std::runtime_error("lock_report: oscillator " + std::to_string(i + 1) + " has only " +
                               std::to_string(tr.size()) + " troughs in the window (need >= 8)");
    rep.mean_period[static_cast<std::size_t>(i)] =
        (tr.back() - tr.front()) / static_cast<double>(tr.size() - 1);
    troughs[static_cast<std::size_t>(i)] = std::move(tr);
  }

  double grand = 0;
  for (double t : rep.mean_period) grand += t;
  grand /= static_cast<double>(n);
  auto [mn, mx] = std::minmax_element(rep.mean_period.begin(), rep.mean_period.end());
  rep.max_rel_period_spread = (*mx - *mn) / grand;

  rep.phase_std_deg = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<double> angles;
      angles.reserve(troughs[static_cast<std::size_t>(i)].size());
      for (double a : troughs[static_cast<std::size_t>(i)]) {
        double off = detail::nearest_offset(troughs[static_cast<std::size_t>(j)], a);
        angles.push_back(off / grand * 360.0);
      }
      auto [mean, sd] = detail::circular_mean_std(angles);
      (void)mean;
      rep.phase_std_deg = std::max(rep.phase_std_deg, sd);
    }
  }

  rep.locked = rep.max_rel_period_spread < eps_f && rep.phase_std_deg < eps_phi_deg;
  return rep;
}

/// Relative phases against a reference oscillator, using the paper's
/// convention: for each reference trough, the signed offset to the nearest
/// trough of oscillator i, averaged circularly and scaled by 360/T.
inline PhaseReport phase_report(const Trace& trace, int reference, double window_fraction = 0.5) {
  int n = trace.n();
  if (reference < 0 || reference >= n)
    throw std::invalid_argument("phase_report: reference index out of range");
  if (!(window_fraction > 0 && window_fraction <= 1))
    throw std::invalid_argument("phase_report: window_fraction must be in (0,1]");
  double t_start = trace.t_end * (1.0 - window_fraction);

  std::vector<std::vector<double>> troughs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    troughs[static_cast<std::size_t>(i)] = detail::troughs_in_window(trace, i, t_start);
    if (troughs[static_cast<std::size_t>(i)].size() < 8)
      throw std::runtime_error("phase_report: oscillator " + std::to_string(i + 1) + " has only " +
                               std::to_string(troughs[static_cast<std::size_t>(i)].size()) +
                               " troughs in the window (need >= 8)");
  }

  const auto& ref = troughs[static_cast<std::size_t>(reference)];
  PhaseReport rep;
  rep.reference = reference;
  rep.period_t = (ref.back() - ref.front()) / static_cast<double>(ref.size() - 1);
  rep.phases_deg.resize(static_cast<std::size_t>(n));
  rep.delta_t.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<double> angles;
    angles.reserve(ref.size());
    for (double a : ref) {
      double off = detail::nearest_offset(troughs[static_cast<std::size_t>(i)], a);
      angles.push_back(off / rep.period_t * 360.0);
    }
    auto [mean, sd] = detail::circular_mean_std(angles);
    (void)sd;
    double phi = detail::wrap_deg(mean);
    rep.phases_deg[static_cast<std::size_t>(i)] = phi;
    double signed_phi = phi > 180.0 ? phi - 360.0 : phi;
    rep.delta_t[static_cast<std::size_t>(i)] = signed_phi / 360.0 * rep.period_t;
  }
  return rep;
}

/// Restriction of a trace to samples (and events) at t >= t_start.
/// Sample times keep their absolute values, so spacing stays uniform.
inline Trace trace_window(const Trace& trace, double t_start) {
  Trace out;
  out.noise_used = trace.noise_used;
  out.seed = trace.seed;
  out.dt_out = trace.dt_out;
  out.t_end = trace.t_end;
  out.max_jump_residual = trace.max_jump_residual;
  std::size_t first = trace.times.size();
  for (std::size_t k = 0; k < trace.times.size(); ++k)
    if (trace.times[k] >= t_start) {
      first = k;
      break;
    }
  out.times.assign(trace.times.begin() + static_cast<std::ptrdiff_t>(first), trace.times.end());
  out.v.resize(trace.v.size());
  out.s.resize(trace.s.size());
  for (std::size_t i = 0; i < trace.v.size(); ++i) {
    out.v[i].assign(trace.v[i].begin() + static_cast<std::ptrdiff_t>(first), trace.v[i].end());
    out.s[i].assign(trace.s[i].begin() + static_cast<std::ptrdiff_t>(first), trace.s[i].end());
  }
  for (const auto& e : trace.events)
    if (e.t >= t_start) out.events.push_back(e);
  return out;
}

/// Spectrum CSV: `freq_hz,power`.
inline std::string spectrum_to_csv(const Spectrum& spec) {
  std::ostringstream out;
  out << "freq_hz,power\n";
  char buf[32];
  for (std::size_t k = 0; k < spec.freqs.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", spec.freqs[k]);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", spec.power[k]);
    out << buf << '\n';
  }
  return out.str();
}

}  // namespace oscnet
