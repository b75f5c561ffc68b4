#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace oscnet {

/// Zero-order-hold white-noise source: independent Gaussian samples held for
/// hold_interval each, injected through the c_noise capacitors.
struct NoiseSpec {
  double rms_voltage = 0;       // volts, >= 0 (standard deviation of samples)
  double hold_interval = 1e-6;  // seconds, > 0
  std::uint64_t seed = 0;

  void validate() const {
    if (!(std::isfinite(rms_voltage) && rms_voltage >= 0))
      throw std::invalid_argument("NoiseSpec: rms_voltage must be >= 0");
    if (!(std::isfinite(hold_interval) && hold_interval > 0))
      throw std::invalid_argument("NoiseSpec: hold_interval must be > 0");
  }
};

/// Piecewise-constant signal: samples[k] is active on
/// [k*hold_interval, (k+1)*hold_interval).
struct NoiseSignal {
  double hold_interval = 1e-6;
  std::vector<double> samples;
};

/// Draws ceil(duration/hold_interval) Gaussian samples. Identical inputs give
/// bit-identical outputs; rms 0 short-circuits to exact zeros.
inline NoiseSignal generate_noise(const NoiseSpec& spec, double duration) {
  spec.validate();
  if (!(std::isfinite(duration) && duration > 0))
    throw std::invalid_argument("generate_noise: duration must be > 0");
  NoiseSignal sig;
  sig.hold_interval = spec.hold_interval;
  // ceil with a relative epsilon so exact multiples of hold_interval do not
  // round up to a spurious extra sample.
  double q = duration / spec.hold_interval;
  auto count = static_cast<std::size_t>(std::ceil(q * (1.0 - 1e-12)));
  if (count == 0) count = 1;
  sig.samples.assign(count, 0.0);
  if (spec.rms_voltage > 0) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, spec.rms_voltage);
    for (auto& x : sig.samples) x = gauss(rng);
  }
  return sig;
}

}  // namespace oscnet
