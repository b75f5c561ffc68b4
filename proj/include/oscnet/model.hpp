#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "oscnet/graph.hpp"

namespace oscnet {

/// Circuit constants of one Schmitt-trigger relaxation oscillator.
/// The comparator drives +-v_a through the feedback resistor r_f into the
/// load capacitor c_l; switching thresholds sit at +-beta*v_a.
struct OscillatorParams {
  double r_f = 1e6;      // feedback resistance, ohms
  double c_l = 100e-12;  // load capacitance, farads
  double beta = 0.5;     // hysteresis ratio, in (0,1)
  double v_a = 2.0;      // output amplitude, volts

  void validate() const {
    if (!(std::isfinite(r_f) && r_f > 0)) throw std::invalid_argument("OscillatorParams: r_f must be > 0");
    if (!(std::isfinite(c_l) && c_l > 0)) throw std::invalid_argument("OscillatorParams: c_l must be > 0");
    if (!(std::isfinite(beta) && beta > 0 && beta < 1))
      throw std::invalid_argument("OscillatorParams: beta must be in (0,1)");
    if (!(std::isfinite(v_a) && v_a > 0)) throw std::invalid_argument("OscillatorParams: v_a must be > 0");
  }
};

/// Free-running period: each half cycle charges the capacitor between
/// -beta*v_a and +beta*v_a toward +-v_a with time constant r_f*c_l.
inline double natural_period(const OscillatorParams& p) {
  p.validate();
  return 2.0 * p.r_f * p.c_l * std::log((1.0 + p.beta) / (1.0 - p.beta));
}

/// One coupling capacitor between capacitor nodes a and b (0-based, a < b).
struct CouplingEdge {
  int a = 0;
  int b = 0;
  double c_c = 0;  // farads, > 0
};

/// Full description of an oscillator network: per-oscillator constants,
/// coupling capacitors, and the noise-injection wiring.
struct NetworkSpec {
  std::vector<OscillatorParams> oscillators;
  std::vector<CouplingEdge> edges;
  std::vector<double> c_noise;  // farads, >= 0, one per oscillator
  bool noise_common = true;     // one shared source vs. independent sources

  int size() const { return static_cast<int>(oscillators.size()); }

  void validate() const {
    int n = size();
    if (n < 1) throw std::invalid_argument("NetworkSpec: need at least one oscillator");
    for (const auto& p : oscillators) p.validate();
    if (static_cast<int>(c_noise.size()) != n)
      throw std::invalid_argument("NetworkSpec: c_noise length must equal oscillator count");
    for (double c : c_noise)
      if (!(std::isfinite(c) && c >= 0)) throw std::invalid_argument("NetworkSpec: c_noise must be >= 0");
    std::vector<std::pair<int, int>> seen;
    for (const auto& e : edges) {
      if (e.a < 0 || e.b < 0 || e.a >= n || e.b >= n)
        throw std::invalid_argument("NetworkSpec: edge endpoint out of range");
      if (e.a == e.b) throw std::invalid_argument("NetworkSpec: self-loop edge");
      if (e.a >= e.b) throw std::invalid_argument("NetworkSpec: edges must be canonical (a < b)");
      if (!(std::isfinite(e.c_c) && e.c_c > 0))
        throw std::invalid_argument("NetworkSpec: coupling capacitance must be > 0");
      seen.emplace_back(e.a, e.b);
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
      throw std::invalid_argument("NetworkSpec: duplicate edge");
  }
};

/// Builds a NetworkSpec from a graph: every graph edge carries c_c, every
/// oscillator carries c_noise, and oscillator i gets r_f scaled by
/// (1 + detune[i]).
inline NetworkSpec build_network(const Graph& g, const OscillatorParams& defaults, double c_c,
                                 double c_noise, const std::vector<double>& detune,
                                 bool noise_common = true) {
  defaults.validate();
  if (static_cast<int>(detune.size()) != g.n)
    throw std::invalid_argument("build_network: detune length must equal node count");
  if (!g.edges.empty() && !(std::isfinite(c_c) && c_c > 0))
    throw std::invalid_argument("build_network: c_c must be > 0 when the graph has edges");
  if (!(std::isfinite(c_noise) && c_noise >= 0))
    throw std::invalid_argument("build_network: c_noise must be >= 0");
  NetworkSpec net;
  net.noise_common = noise_common;
  net.oscillators.reserve(static_cast<std::size_t>(g.n));
  for (int i = 0; i < g.n; ++i) {
    double f = 1.0 + detune[static_cast<std::size_t>(i)];
    if (!(std::isfinite(f) && f > 0))
      throw std::invalid_argument("build_network: detune[" + std::to_string(i) +
                                  "] gives non-positive r_f");
    OscillatorParams p = defaults;
    p.r_f = defaults.r_f * f;
    net.oscillators.push_back(p);
  }
  net.edges.reserve(g.edges.size());
  for (auto [a, b] : g.edges) net.edges.push_back({a, b, c_c});
  net.c_noise.assign(static_cast<std::size_t>(g.n), c_noise);
  net.validate();
  return net;
}

/// Nodal capacitance matrix M: M[i][i] = c_l + c_noise + sum of incident c_c,
/// M[i][j] = -c_c for edges. Symmetric and strictly diagonally dominant
/// (c_l > 0), hence positive definite.
inline Eigen::MatrixXd capacitance_matrix(const NetworkSpec& net) {
  net.validate();
  int n = net.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    m(i, i) = net.oscillators[static_cast<std::size_t>(i)].c_l + net.c_noise[static_cast<std::size_t>(i)];
  for (const auto& e : net.edges) {
    m(e.a, e.a) += e.c_c;
    m(e.b, e.b) += e.c_c;
    m(e.a, e.b) -= e.c_c;
    m(e.b, e.a) -= e.c_c;
  }
  return m;
}

}  // namespace oscnet
