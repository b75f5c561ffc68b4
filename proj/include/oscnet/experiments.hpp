#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "oscnet/analysis.hpp"
#include "oscnet/graph.hpp"
#include "oscnet/model.hpp"
#include "oscnet/noise.hpp"
#include "oscnet/seeds.hpp"
#include "oscnet/sim.hpp"

namespace oscnet {

/// Hardware reference point for the amplitude trend: a 270 mV rms locking
/// threshold at the 3.0 V operating amplitude. Context only; simulated
/// thresholds are not calibrated to it.
constexpr double kReferenceAmplitudeVolts = 3.0;
constexpr double kReferenceThresholdVolts = 0.270;

/// One probe of a threshold search: x is the probed value (volts or farads).
struct ProbePoint {
  double x = 0;
  double lock_probability = 0;
};

struct ThresholdResult {
  std::optional<double> v_t_noise;  // empty: no threshold up to v_hi
  bool below_range = false;         // predicate already true at v_lo
  std::vector<ProbePoint> probes;   // in probe order
  std::vector<std::uint64_t> seeds;
  double quorum = 0;
  int sim_failures = 0;  // runs that aborted (counted as unlocked)
};

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
};

struct AmplitudePoint {
  double amplitude = 0;  // volts
  std::optional<double> threshold;
  bool censored = false;  // no threshold in range; excluded from the fit
  ThresholdResult detail;
};

struct AmplitudeSweep {
  std::vector<AmplitudePoint> points;
  std::optional<LinearFit> fit;
  bool degenerate_variance = false;  // all fitted amplitudes equal; fit rejected
};

struct PopulationPoint {
  int size = 0;
  std::optional<double> threshold;
  bool censored = false;
  ThresholdResult detail;
};

struct PopulationSweep {
  std::vector<PopulationPoint> points;
  bool non_increasing = false;  // true iff every threshold exists and never increases
};

struct CouplingResult {
  std::optional<double> c_star;  // farads; empty: no locking at c_hi
  bool below_range = false;      // predicate already true at c_lo
  std::vector<ProbePoint> probes;
  double quorum = 0;
};

struct PhasePoint {
  double rms = 0;                 // volts
  double mean_delta_phi_deg = 0;  // circular mean over locked runs, in (-180, 180]
  double circ_std_deg = 0;        // circular std over locked runs
  double lock_fraction = 0;
  bool sub_threshold = false;  // fewer than half the runs locked; phase stats unreliable
};

/// Fraction of seeds whose run ends locked. noise.seed is ignored; each run
/// derives its noise stream from the run seed so probes at different levels
/// share randomness (common random numbers).
inline double lock_probability(const NetworkSpec& net, const NoiseSpec& noise,
                               const SimConfig& cfg, const std::vector<std::uint64_t>& seeds,
                               int* sim_failures = nullptr) {
  if (seeds.empty()) throw std::invalid_argument("lock_probability: need at least one seed");
  int locked = 0, failures = 0;
  for (std::uint64_t s : seeds) {
    NoiseSpec ns = noise;
    ns.seed = derive_seed(s, kStreamNoise);
    try {
      if (lock_report(simulate(net, ns, cfg, s)).locked) ++locked;
    } catch (const std::exception&) {
      ++failures;  // aborted runs count as unlocked but are reported
    }
  }
  if (sim_failures) *sim_failures = failures;
  return static_cast<double>(locked) / static_cast<double>(seeds.size());
}

/// Bisection for the smallest rms (within resolution) where
/// lock_probability >= quorum, with the same seed set at every probe.
inline ThresholdResult find_noise_threshold(const NetworkSpec& net, const NoiseSpec& noise,
                                            const SimConfig& cfg, double v_lo, double v_hi,
                                            double resolution,
                                            const std::vector<std::uint64_t>& seeds,
                                            double quorum) {
  if (!(v_lo >= 0 && v_lo < v_hi)) throw std::invalid_argument("find_noise_threshold: need 0 <= v_lo < v_hi");
  if (!(resolution > 0)) throw std::invalid_argument("find_noise_threshold: resolution must be > 0");
  if (!(quorum > 0 && quorum <= 1)) throw std::invalid_argument("find_noise_threshold: quorum must be in (0,1]");

  ThresholdResult res;
  res.seeds = seeds;
  res.quorum = quorum;
  auto probe = [&](double v) {
    NoiseSpec ns = noise;
    ns.rms_voltage = v;
    int fails = 0;
    double p = lock_probability(net, ns, cfg, seeds, &fails);
    res.sim_failures += fails;
    res.probes.push_back({v, p});
    return p >= quorum;
  };

  if (probe(v_lo)) {
    res.below_range = true;
    res.v_t_noise = v_lo;
    return res;
  }
  if (!probe(v_hi)) return res;  // none found

  double lo = v_lo, hi = v_hi;
  while (hi - lo > resolution) {
    double mid = v_lo + std::round(((lo + hi) / 2 - v_lo) / resolution) * resolution;
    if (!(mid > lo && mid < hi)) break;
    if (probe(mid))
      hi = mid;
    else
      lo = mid;
  }
  res.v_t_noise = hi;
  return res;
}

namespace detail {

inline std::optional<LinearFit> least_squares(const std::vector<double>& xs,
                                              const std::vector<double>& ys,
                                              bool* degenerate) {
  *degenerate = false;
  if (xs.size() < 2) return std::nullopt;
  double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0) {
    *degenerate = true;
    return std::nullopt;
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy == 0 ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

}  // namespace detail

/// Fixed settings shared by every point of a threshold sweep. The noise rms
/// field is ignored (it is the quantity being searched).
struct ThresholdSweepSettings {
  OscillatorParams base;            // v_a replaced per point by sweep_amplitude
  std::vector<double> detune;       // per-oscillator fractional r_f offsets
  double c_noise = 100e-12;         // farads, noise injection cap per oscillator
  NoiseSpec noise;                  // hold_interval matters; rms/seed ignored
  double t_end = 20e-3;             // seconds per run (2x the reference protocol window)
  double v_lo = 0, v_hi = 1.0;      // search range, volts
  double resolution = 5e-3;         // volts
  std::vector<std::uint64_t> seeds;
  double quorum = 0.8;
};

/// Threshold vs. oscillator amplitude, with a least-squares line through the
/// uncensored points.
inline AmplitudeSweep sweep_amplitude(const std::vector<double>& amplitudes,
                                      const ThresholdSweepSettings& st) {
  if (amplitudes.size() < 3)
    throw std::invalid_argument("sweep_amplitude: need at least 3 amplitudes");
  if (st.detune.empty()) throw std::invalid_argument("sweep_amplitude: detune pattern is empty");

  AmplitudeSweep sweep;
  Graph g = Graph::from_edges(static_cast<int>(st.detune.size()), {});
  for (double a : amplitudes) {
    OscillatorParams p = st.base;
    p.v_a = a;
    NetworkSpec net = build_network(g, p, 0, st.c_noise, st.detune);
    SimConfig cfg = SimConfig::for_network(net, st.t_end);
    AmplitudePoint pt;
    pt.amplitude = a;
    pt.detail = find_noise_threshold(net, st.noise, cfg, st.v_lo, st.v_hi, st.resolution,
                                     st.seeds, st.quorum);
    pt.threshold = pt.detail.v_t_noise;
    pt.censored = !pt.detail.v_t_noise.has_value();
    sweep.points.push_back(std::move(pt));
  }

  std::vector<double> xs, ys;
  for (const auto& pt : sweep.points)
    if (!pt.censored) {
      xs.push_back(pt.amplitude);
      ys.push_back(*pt.threshold);
    }
  sweep.fit = detail::least_squares(xs, ys, &sweep.degenerate_variance);
  return sweep;
}

/// Threshold vs. population size: uncoupled oscillators, detunes spread
/// linearly over +-detune_spread, common noise.
inline PopulationSweep sweep_population(const std::vector<int>& sizes, double detune_spread,
                                        const ThresholdSweepSettings& st) {
  if (sizes.empty()) throw std::invalid_argument("sweep_population: need at least one size");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 2)
      throw std::invalid_argument("sweep_population: sizes must be >= 2 (lock is pairwise)");
    if (i > 0 && sizes[i] < sizes[i - 1])
      throw std::invalid_argument("sweep_population: sizes must be non-decreasing");
  }
  if (!(detune_spread >= 0)) throw std::invalid_argument("sweep_population: spread must be >= 0");

  PopulationSweep sweep;
  for (int n : sizes) {
    std::vector<double> det(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      det[static_cast<std::size_t>(i)] =
          -detune_spread + 2.0 * detune_spread * i / (n - 1);
    Graph g = Graph::from_edges(n, {});
    NetworkSpec net = build_network(g, st.base, 0, st.c_noise, det);
    SimConfig cfg = SimConfig::for_network(net, st.t_end);
    PopulationPoint pt;
    pt.size = n;
    pt.detail = find_noise_threshold(net, st.noise, cfg, st.v_lo, st.v_hi, st.resolution,
                                     st.seeds, st.quorum);
    pt.threshold = pt.detail.v_t_noise;
    pt.censored = !pt.detail.v_t_noise.has_value();
    sweep.points.push_back(std::move(pt));
  }

  sweep.non_increasing = true;
  for (std::size_t i = 0; i < sweep.points.size(); ++i) {
    if (sweep.points[i].censored) {
      sweep.non_increasing = false;  // undefined entries cannot demonstrate the trend
      break;
    }
    if (i > 0 && *sweep.points[i].threshold > *sweep.points[i - 1].threshold) {
      sweep.non_increasing = false;
      break;
    }
  }
  return sweep;
}

/// Wiring spec for the critical-coupling search; the probed C_c replaces every
/// edge's coupler.
struct CouplingSearchSettings {
  OscillatorParams base;
  std::vector<double> detune;  // one per node
  double c_noise = 100e-12;
  NoiseSpec noise;  // rms is the (fixed) noise level of this search
  double t_end = 20e-3;
  std::vector<std::uint64_t> seeds;
  double quorum = 0.8;
};

/// Geometric bisection for the smallest C_c with lock_probability >= quorum.
inline CouplingResult find_critical_coupling(const Graph& g, const CouplingSearchSettings& st,
                                             double c_lo, double c_hi,
                                             double resolution_ratio) {
  if (g.edges.empty())
    throw std::invalid_argument("find_critical_coupling: graph has no edges to couple");
  if (!(c_lo > 0 && c_lo < c_hi))
    throw std::invalid_argument("find_critical_coupling: need 0 < c_lo < c_hi");
  if (!(resolution_ratio > 1))
    throw std::invalid_argument("find_critical_coupling: resolution_ratio must be > 1");
  if (static_cast<int>(st.detune.size()) != g.n)
    throw std::invalid_argument("find_critical_coupling: detune length must equal node count");

  CouplingResult res;
  res.quorum = st.quorum;
  auto probe = [&](double c) {
    NetworkSpec net = build_network(g, st.base, c, st.c_noise, st.detune);
    SimConfig cfg = SimConfig::for_network(net, st.t_end);
    double p = lock_probability(net, st.noise, cfg, st.seeds);
    res.probes.push_back({c, p});
    return p >= st.quorum;
  };

  if (probe(c_lo)) {
    res.below_range = true;
    res.c_star = c_lo;
    return res;
  }
  if (!probe(c_hi)) return res;  // no locking at c_hi

  double lo = c_lo, hi = c_hi;
  while (hi / lo > resolution_ratio) {
    double mid = std::sqrt(lo * hi);
    if (probe(mid))
      hi = mid;
    else
      lo = mid;
  }
  res.c_star = hi;
  return res;
}

namespace detail {

inline void csv_sweep_row(std::ostringstream& out, double x, const std::optional<double>& value,
                          bool censored) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out << buf << ',';
  if (value) {
    std::snprintf(buf, sizeof buf, "%.17g", *value);
    out << buf;
  }
  out << ',' << (censored ? "censored" : "ok") << '\n';
}

}  // namespace detail

/// Flat plotting form, one row per sweep point: `x,value,flag`. Censored
/// points keep their row with an empty value so gaps stay visible.
inline std::string sweep_to_csv(const AmplitudeSweep& sweep) {
  std::ostringstream out;
  out << "x,value,flag\n";
  for (const auto& pt : sweep.points) detail::csv_sweep_row(out, pt.amplitude, pt.threshold, pt.censored);
  return out.str();
}

inline std::string sweep_to_csv(const PopulationSweep& sweep) {
  std::ostringstream out;
  out << "x,value,flag\n";
  for (const auto& pt : sweep.points) detail::csv_sweep_row(out, pt.size, pt.threshold, pt.censored);
  return out.str();
}

/// Relative phase of a locked 2-oscillator network vs. noise level.
/// Points where fewer than half the runs lock are flagged sub_threshold.
inline std::vector<PhasePoint> phase_vs_noise(const NetworkSpec& net, const NoiseSpec& noise,
                                              const SimConfig& cfg,
                                              const std::vector<double>& rms_values,
                                              const std::vector<std::uint64_t>& seeds) {
  if (net.size() != 2)
    throw std::invalid_argument("phase_vs_noise: needs exactly 2 oscillators");
  if (rms_values.empty()) throw std::invalid_argument("phase_vs_noise: no rms values");
  if (seeds.empty()) throw std::invalid_argument("phase_vs_noise: need at least one seed");

  std::vector<PhasePoint> curve;
  for (double rms : rms_values) {
    if (!(std::isfinite(rms) && rms >= 0))
      throw std::invalid_argument("phase_vs_noise: rms must be >= 0");
    PhasePoint pt;
    pt.rms = rms;
    double cx = 0, sy = 0;
    int locked = 0;
    for (std::uint64_t s : seeds) {
      NoiseSpec ns = noise;
      ns.rms_voltage = rms;
      ns.seed = derive_seed(s, kStreamNoise);
      try {
        Trace tr = simulate(net, ns, cfg, s);
        if (!lock_report(tr).locked) continue;
        double phi = phase_report(tr, 0).phases_deg[1] * detail::kPi / 180.0;
        cx += std::cos(phi);
        sy += std::sin(phi);
        ++locked;
      } catch (const std::exception&) {
        // aborted or trough-starved runs count as unlocked
      }
    }
    pt.lock_fraction = static_cast<double>(locked) / static_cast<double>(seeds.size());
    pt.sub_threshold = pt.lock_fraction < 0.5;
    if (locked > 0) {
      double r = std::sqrt(cx * cx + sy * sy) / locked;
      pt.mean_delta_phi_deg = std::atan2(sy, cx) * 180.0 / detail::kPi;
      pt.circ_std_deg =
          r >= 1.0 ? 0.0 : std::sqrt(-2.0 * std::log(std::max(r, 1e-300))) * 180.0 / detail::kPi;
    }
    curve.push_back(pt);
  }
  return curve;
}

}  // namespace oscnet
