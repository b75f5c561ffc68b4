#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "oscnet/analysis.hpp"
#include "oscnet/model.hpp"
#include "oscnet/seeds.hpp"
#include "oscnet/sim.hpp"

using namespace oscnet;

namespace {

constexpr double kPi = std::numbers::pi_v<double>;

Trace sampled_trace(const std::vector<double>& samples, double dt) {
  Trace tr;
  tr.v.push_back(samples);
  tr.s.emplace_back(samples.size(), 1);
  tr.times.resize(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) tr.times[k] = static_cast<double>(k) * dt;
  tr.dt_out = dt;
  tr.t_end = tr.times.back();
  return tr;
}

// Trace carrying only switch events; lock/phase analysis never reads samples.
Trace event_trace(const std::vector<std::vector<double>>& troughs, double t_end) {
  Trace tr;
  int n = static_cast<int>(troughs.size());
  tr.v.resize(static_cast<std::size_t>(n));
  tr.s.resize(static_cast<std::size_t>(n));
  tr.times = {0.0, t_end};
  for (auto& ch : tr.v) ch = {0.0, 0.0};
  for (auto& ch : tr.s) ch = {1, 1};
  tr.dt_out = t_end;
  tr.t_end = t_end;
  for (int i = 0; i < n; ++i)
    for (double t : troughs[static_cast<std::size_t>(i)])
      tr.events.push_back({i, t, SwitchDirection::rise});
  std::sort(tr.events.begin(), tr.events.end(),
            [](const SwitchEvent& a, const SwitchEvent& b) { return a.t < b.t; });
  return tr;
}

std::vector<double> regular_troughs(double first, double period, int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(first + k * period);
  return out;
}

NetworkSpec noisy_pair(double detune_hi) {
  auto g = Graph::from_edges(2, {});
  return build_network(g, {}, 0, 100e-12, {0.0, detune_hi});
}

NoiseSpec hold30(double rms) {
  NoiseSpec ns;
  ns.rms_voltage = rms;
  ns.hold_interval = 30e-6;
  return ns;
}

double loaded_period() { return 2.0 * 1e6 * 300e-12 * std::log(3.0); }

}  // namespace

TEST_CASE("periodogram finds a pure tone", "[analysis][oracle]") {
  double fs = 291e3, f0 = 4e3;
  std::size_t m = 4096;
  std::vector<double> x(m);
  for (std::size_t k = 0; k < m; ++k) x[k] = std::sin(2 * kPi * f0 * k / fs);
  auto tr = sampled_trace(x, 1.0 / fs);
  for (int pad : {1, 4}) {
    auto spec = periodogram(tr, 0, WindowKind::hann, pad);
    auto peak = peak_fwhm(spec);
    double bin = spec.freqs[1] - spec.freqs[0];
    CHECK(std::abs(peak.f_peak - f0) <= bin);
  }
}

TEST_CASE("periodogram satisfies Parseval", "[analysis][oracle]") {
  double fs = 64e3;
  std::size_t m = 1024;
  std::vector<double> x(m);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& v : x) v = u(rng);
  auto tr = sampled_trace(x, 1.0 / fs);
  auto spec = periodogram(tr, 0, WindowKind::hann, 1);

  // Rebuild the windowed, mean-removed signal energy the transform saw.
  double mean = 0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(m);
  double energy = 0;
  for (std::size_t k = 0; k < m; ++k) {
    double w = 0.5 * (1.0 - std::cos(2 * kPi * static_cast<double>(k) /
                                     static_cast<double>(m - 1)));
    double s = (x[k] - mean) * w;
    energy += s * s;
  }
  std::size_t nfft = (spec.freqs.size() - 1) * 2;
  double sum = 0;
  for (std::size_t k = 0; k < spec.power.size(); ++k) {
    double mult = (k == 0 || k + 1 == spec.power.size()) ? 1.0 : 2.0;
    sum += mult * spec.power[k];
  }
  CHECK(std::abs(sum - static_cast<double>(nfft) * energy) <
        1e-6 * static_cast<double>(nfft) * energy);
}

TEST_CASE("square wave harmonic ratio matches the sampled Fourier oracle", "[analysis][oracle]") {
  // 64 samples per cycle, 32 cycles: f0 and 3 f0 land on exact bins.
  std::size_t per = 64, cycles = 32, m = per * cycles;
  double fs = 64e3, f0 = fs / static_cast<double>(per);
  std::vector<double> x(m);
  for (std::size_t k = 0; k < m; ++k) x[k] = (k % per) < per / 2 ? 1.0 : -1.0;
  auto spec = periodogram(sampled_trace(x, 1.0 / fs), 0, WindowKind::rectangular, 1);

  auto at = [&](double f) {
    std::size_t best = 1;
    for (std::size_t k = 1; k < spec.freqs.size(); ++k)
      if (std::abs(spec.freqs[k] - f) < std::abs(spec.freqs[best] - f)) best = k;
    return spec.power[best];
  };
  double ratio = at(f0) / at(3 * f0);
  // Sampled square wave: |X_n| ~ 1/sin(pi n / per), so the 1st:3rd power
  // ratio is sin^2(3 pi/64)/sin^2(pi/64), slightly under the continuous 9.
  double oracle = std::pow(std::sin(3 * kPi / 64) / std::sin(kPi / 64), 2);
  CHECK(ratio == Catch::Approx(oracle).epsilon(1e-6));
  CHECK(ratio == Catch::Approx(9.0).margin(0.25));
}

TEST_CASE("Hann tone FWHM matches the main lobe width", "[analysis][oracle]") {
  double fs = 291e3;
  std::size_t m = 4096;
  double t_w = static_cast<double>(m) / fs;
  double f0 = 56.0 * fs / static_cast<double>(m);  // bin-centered, ~4 kHz
  std::vector<double> x(m);
  for (std::size_t k = 0; k < m; ++k) x[k] = std::sin(2 * kPi * f0 * k / fs);
  auto spec = periodogram(sampled_trace(x, 1.0 / fs), 0, WindowKind::hann, 8);
  auto peak = peak_fwhm(spec);
  CHECK(peak.fwhm == Catch::Approx(1.44 / t_w).epsilon(0.05));
}

TEST_CASE("peak report is invariant under power scaling", "[analysis]") {
  double fs = 64e3;
  std::size_t m = 1024;
  std::vector<double> x(m);
  for (std::size_t k = 0; k < m; ++k) x[k] = std::sin(2 * kPi * 3000.0 * k / fs);
  auto spec = periodogram(sampled_trace(x, 1.0 / fs), 0, WindowKind::hann, 4);
  auto base = peak_fwhm(spec);
  for (auto& p : spec.power) p *= 7.25;
  auto scaled = peak_fwhm(spec);
  CHECK(scaled.f_peak == base.f_peak);
  CHECK(scaled.fwhm == base.fwhm);
}

TEST_CASE("peak at the grid boundary is rejected", "[analysis][error]") {
  Spectrum spec;
  spec.freqs = {0, 1, 2, 3};
  spec.power = {0, 0.1, 0.2, 1.0};
  CHECK_THROWS_AS(peak_fwhm(spec), std::exception);
  Spectrum ok;
  ok.freqs = {0, 1, 2, 3, 4};
  ok.power = {0.1, 0.5, 1.0, 0.5, 0.1};
  CHECK_NOTHROW(peak_fwhm(ok));
}

TEST_CASE("periodogram input validation", "[analysis][error]") {
  std::vector<double> tiny(8, 0.0);
  auto tr = sampled_trace(tiny, 1e-3);
  CHECK_THROWS_AS(periodogram(tr, 0, WindowKind::hann, 1), std::exception);
  std::vector<double> ok(64, 0.0);
  auto tr2 = sampled_trace(ok, 1e-3);
  CHECK_THROWS_AS(periodogram(tr2, 1, WindowKind::hann, 1), std::exception);
  CHECK_THROWS_AS(periodogram(tr2, 0, WindowKind::hann, 0), std::exception);
}

TEST_CASE("single oscillator is vacuously locked", "[analysis]") {
  auto tr = event_trace({regular_troughs(1e-3, 1e-3, 20)}, 21e-3);
  auto rep = lock_report(tr);
  CHECK(rep.locked);
  CHECK(rep.max_rel_period_spread == 0.0);
  CHECK(rep.phase_std_deg == 0.0);
}

TEST_CASE("detuned free pair is never locked", "[analysis][oracle]") {
  auto g = Graph::from_edges(2, {});
  auto net = build_network(g, {}, 0, 0, {0.0, 0.02});
  auto cfg = SimConfig::for_network(net, 10e-3);
  auto rep = lock_report(simulate(net, {}, cfg, 1));
  CHECK_FALSE(rep.locked);
  CHECK(rep.max_rel_period_spread == Catch::Approx(0.02).epsilon(0.05));
}

TEST_CASE("lock criterion rejects 2% detune at every window", "[analysis][property]") {
  // The default thresholds exist so free-running detuned pairs never pass.
  auto g = Graph::from_edges(2, {});
  auto net = build_network(g, {}, 0, 0, {0.0, 0.02});
  auto cfg = SimConfig::for_network(net, 12e-3);
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    auto rep = lock_report(simulate(net, {}, cfg, seed));
    CHECK_FALSE(rep.locked);
  }
}

TEST_CASE("noise at twice the measured threshold locks most seeds", "[analysis][calibrated]") {
  // Threshold for the {0, +0.2%} pair at quorum 0.8 measures 0.475 V
  // (20 seeds, 5 mV bisection); at twice that, 16 of 20 seeds lock.
  auto net = noisy_pair(0.002);
  auto cfg = SimConfig::for_network(net, 20 * loaded_period());
  int locked = 0;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    NoiseSpec ns = hold30(0.95);
    ns.seed = derive_seed(s, kStreamNoise);
    if (lock_report(simulate(net, ns, cfg, s)).locked) ++locked;
  }
  CHECK(locked >= 15);
}

TEST_CASE("lock verdict is invariant under relabeling", "[analysis][property]") {
  auto a = regular_troughs(0.5e-3, 1.00e-3, 18);
  auto b = regular_troughs(0.9e-3, 1.00e-3, 18);
  auto fwd = lock_report(event_trace({a, b}, 19e-3));
  auto rev = lock_report(event_trace({b, a}, 19e-3));
  CHECK(fwd.locked == rev.locked);
  CHECK(fwd.max_rel_period_spread == Catch::Approx(rev.max_rel_period_spread));
  CHECK(fwd.phase_std_deg == Catch::Approx(rev.phase_std_deg));
  CHECK(fwd.mean_period[0] == Catch::Approx(rev.mean_period[1]));
}

TEST_CASE("lock report rejects trough-starved channels", "[analysis][error]") {
  auto tr = event_trace({regular_troughs(1e-3, 1e-3, 5)}, 6e-3);
  CHECK_THROWS_AS(lock_report(tr), std::exception);
}

TEST_CASE("phase of an oscillator against itself is zero", "[analysis]") {
  auto a = regular_troughs(0.4e-3, 1e-3, 20);
  auto rep = phase_report(event_trace({a, a}, 21e-3), 0);
  CHECK(rep.phases_deg[0] == 0.0);
  CHECK(rep.phases_deg[1] == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("half-period shift reads 180 degrees", "[analysis][oracle]") {
  double t0 = 1e-3;
  auto a = regular_troughs(1e-3, t0, 20);
  auto b = regular_troughs(1e-3 + t0 / 2, t0, 20);
  auto rep = phase_report(event_trace({a, b}, 22e-3), 0);
  CHECK(rep.phases_deg[1] == Catch::Approx(180.0).margin(1.0));
  CHECK(rep.period_t == Catch::Approx(t0).epsilon(1e-9));
}

TEST_CASE("phases are stable against the window start", "[analysis][property]") {
  auto net = noisy_pair(0.002);
  auto cfg = SimConfig::for_network(net, 30 * loaded_period());
  Trace tr;
  bool found = false;
  for (std::uint64_t s = 1; s <= 20 && !found; ++s) {
    NoiseSpec ns = hold30(0.95);
    ns.seed = derive_seed(s, kStreamNoise);
    tr = simulate(net, ns, cfg, s);
    found = lock_report(tr).locked;
  }
  REQUIRE(found);
  auto p1 = phase_report(tr, 0, 0.5);
  auto p2 = phase_report(tr, 0, 0.4);  // drops the leading troughs of the window
  double d = std::abs(p1.phases_deg[1] - p2.phases_deg[1]);
  d = std::min(d, 360.0 - d);
  CHECK(d < 1.0);
}

TEST_CASE("noise-locked pair sits in phase", "[analysis][calibrated]") {
  // Common-noise locking is tick-slaving: both rises are captured by the same
  // held excursion, so the locked state is in-phase. (The breadboard reference
  // reports near-anti-phase for its hardware pair; that geometry is not
  // reproducible from a shared-source capacitive injection model.)
  auto net = noisy_pair(0.002);
  auto cfg = SimConfig::for_network(net, 20 * loaded_period());
  int checked = 0;
  for (std::uint64_t s : {2, 4, 8, 10}) {
    NoiseSpec ns = hold30(0.95);
    ns.seed = derive_seed(s, kStreamNoise);
    auto tr = simulate(net, ns, cfg, s);
    if (!lock_report(tr).locked) continue;
    auto rep = phase_report(tr, 0);
    double d = std::min(rep.phases_deg[1], 360.0 - rep.phases_deg[1]);
    CHECK(d < 15.0);
    ++checked;
  }
  CHECK(checked >= 2);
}

TEST_CASE("locked pair peaks at one shared frequency", "[analysis][calibrated]") {
  auto net = noisy_pair(0.002);
  auto cfg = SimConfig::for_network(net, 40 * loaded_period());
  Trace tr;
  bool found = false;
  for (std::uint64_t s = 1; s <= 20 && !found; ++s) {
    NoiseSpec ns = hold30(0.95);
    ns.seed = derive_seed(s, kStreamNoise);
    tr = simulate(net, ns, cfg, s);
    found = lock_report(tr).locked;
  }
  REQUIRE(found);
  auto half = trace_window(tr, tr.t_end / 2);
  auto s0 = periodogram(half, 0, WindowKind::hann, 4);
  auto s1 = periodogram(half, 1, WindowKind::hann, 4);
  double bin = s0.freqs[1] - s0.freqs[0];
  CHECK(std::abs(peak_fwhm(s0).f_peak - peak_fwhm(s1).f_peak) <= bin);
}

TEST_CASE("spectrum CSV round-trips the grid", "[analysis][io]") {
  double fs = 64e3;
  std::size_t m = 256;
  std::vector<double> x(m);
  for (std::size_t k = 0; k < m; ++k) x[k] = std::sin(2 * kPi * 2000.0 * k / fs);
  auto spec = periodogram(sampled_trace(x, 1.0 / fs), 0, WindowKind::hann, 1);
  auto csv = spectrum_to_csv(spec);
  CHECK(csv.rfind("freq_hz,power\n", 0) == 0);
  std::size_t rows = 0;
  for (char c : csv) rows += (c == '\n');
  CHECK(rows == spec.freqs.size() + 1);
}
