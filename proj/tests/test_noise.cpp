#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "oscnet/noise.hpp"

using namespace oscnet;

TEST_CASE("generate_noise sample count is ceil(duration/hold)", "[noise]") {
  NoiseSpec spec;
  spec.rms_voltage = 0.1;
  spec.hold_interval = 1e-6;
  spec.seed = 1;
  CHECK(generate_noise(spec, 10e-6).samples.size() == 10);
  CHECK(generate_noise(spec, 10.5e-6).samples.size() == 11);
  CHECK(generate_noise(spec, 0.3e-6).samples.size() == 1);
}

TEST_CASE("generate_noise is deterministic", "[noise]") {
  NoiseSpec spec;
  spec.rms_voltage = 0.27;
  spec.seed = 123;
  auto a = generate_noise(spec, 1e-3);
  auto b = generate_noise(spec, 1e-3);
  REQUIRE(a.samples == b.samples);

  spec.seed = 124;
  auto c = generate_noise(spec, 1e-3);
  REQUIRE(a.samples != c.samples);
}

TEST_CASE("zero rms gives exact zeros", "[noise]") {
  NoiseSpec spec;
  spec.rms_voltage = 0;
  spec.seed = 5;
  auto sig = generate_noise(spec, 1e-4);
  for (double x : sig.samples) REQUIRE(x == 0.0);
}

TEST_CASE("empirical moments match the spec", "[noise][statistics]") {
  NoiseSpec spec;
  spec.rms_voltage = 0.27;
  spec.seed = 2024;
  auto sig = generate_noise(spec, 1.0);  // 1e6 samples
  auto n = static_cast<double>(sig.samples.size());
  REQUIRE(n == 1e6);
  double mean = std::accumulate(sig.samples.begin(), sig.samples.end(), 0.0) / n;
  double sq = 0;
  for (double x : sig.samples) sq += x * x;
  double rms = std::sqrt(sq / n);
  CHECK(std::abs(rms / spec.rms_voltage - 1.0) < 0.01);
  CHECK(std::abs(mean) < 3.0 * spec.rms_voltage / std::sqrt(n));
}

TEST_CASE("different seeds are uncorrelated", "[noise][statistics]") {
  NoiseSpec a;
  a.rms_voltage = 1.0;
  a.seed = 10;
  NoiseSpec b = a;
  b.seed = 11;
  auto sa = generate_noise(a, 0.1);  // 1e5 samples
  auto sb = generate_noise(b, 0.1);
  double dot = 0, na = 0, nb = 0;
  for (std::size_t k = 0; k < sa.samples.size(); ++k) {
    dot += sa.samples[k] * sb.samples[k];
    na += sa.samples[k] * sa.samples[k];
    nb += sb.samples[k] * sb.samples[k];
  }
  double rho = dot / std::sqrt(na * nb);
  CHECK(std::abs(rho) < 0.01);
}

TEST_CASE("generate_noise validates inputs", "[noise]") {
  NoiseSpec spec;
  CHECK_THROWS_AS(generate_noise(spec, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(generate_noise(spec, -1.0), std::invalid_argument);
  spec.rms_voltage = -0.1;
  CHECK_THROWS_AS(generate_noise(spec, 1e-3), std::invalid_argument);
  spec = {};
  spec.hold_interval = 0;
  CHECK_THROWS_AS(generate_noise(spec, 1e-3), std::invalid_argument);
}
