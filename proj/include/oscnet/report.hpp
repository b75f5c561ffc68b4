#pragma once

#include <json.hpp>

#include "oscnet/analysis.hpp"
#include "oscnet/coloring.hpp"
#include "oscnet/experiments.hpp"
#include "oscnet/model.hpp"
#include "oscnet/noise.hpp"
#include "oscnet/sim.hpp"

// ADL serializers so any report type drops straight into nlohmann::json.
// nlohmann::json keeps keys sorted, which makes every dump deterministic;
// the CLI's byte-identical-output guarantee leans on that.

namespace oscnet {

inline void to_json(nlohmann::json& j, const OscillatorParams& p) {
  j = {{"r_f", p.r_f}, {"c_l", p.c_l}, {"beta", p.beta}, {"v_a", p.v_a}};
}

inline void to_json(nlohmann::json& j, const CouplingEdge& e) {
  j = {{"a", e.a}, {"b", e.b}, {"c_c", e.c_c}};
}

inline void to_json(nlohmann::json& j, const NetworkSpec& net) {
  j = {{"oscillators", net.oscillators},
       {"edges", net.edges},
       {"c_noise", net.c_noise},
       {"noise_common", net.noise_common}};
}

inline void to_json(nlohmann::json& j, const NoiseSpec& ns) {
  j = {{"rms_voltage", ns.rms_voltage}, {"hold_interval", ns.hold_interval}, {"seed", ns.seed}};
}

inline void to_json(nlohmann::json& j, const SimConfig& cfg) {
  j = {{"t_end", cfg.t_end},
       {"dt", cfg.dt},
       {"dt_out", cfg.dt_out},
       {"crossing_tol", cfg.crossing_tol},
       {"zeno_guard", cfg.zeno_guard}};
}

inline void to_json(nlohmann::json& j, const LockReport& r) {
  j = {{"locked", r.locked},
       {"mean_period", r.mean_period},
       {"max_rel_period_spread", r.max_rel_period_spread},
       {"phase_std_deg", r.phase_std_deg}};
}

inline void to_json(nlohmann::json& j, const PhaseReport& r) {
  j = {{"reference", r.reference},
       {"period_t", r.period_t},
       {"phases_deg", r.phases_deg},
       {"delta_t", r.delta_t}};
}

inline void to_json(nlohmann::json& j, const ProbePoint& p) {
  j = {{"x", p.x}, {"lock_probability", p.lock_probability}};
}

inline void to_json(nlohmann::json& j, const ThresholdResult& r) {
  j = {{"v_t_noise", r.v_t_noise ? nlohmann::json(*r.v_t_noise) : nlohmann::json(nullptr)},
       {"below_range", r.below_range},
       {"probes", r.probes},
       {"seeds", r.seeds},
       {"quorum", r.quorum},
       {"sim_failures", r.sim_failures}};
}

inline void to_json(nlohmann::json& j, const LinearFit& f) {
  j = {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}};
}

inline void to_json(nlohmann::json& j, const AmplitudePoint& p) {
  j = {{"amplitude", p.amplitude},
       {"threshold", p.threshold ? nlohmann::json(*p.threshold) : nlohmann::json(nullptr)},
       {"censored", p.censored},
       {"detail", p.detail}};
}

inline void to_json(nlohmann::json& j, const AmplitudeSweep& s) {
  j = {{"points", s.points},
       {"fit", s.fit ? nlohmann::json(*s.fit) : nlohmann::json(nullptr)},
       {"degenerate_variance", s.degenerate_variance}};
}

inline void to_json(nlohmann::json& j, const PopulationPoint& p) {
  j = {{"size", p.size},
       {"threshold", p.threshold ? nlohmann::json(*p.threshold) : nlohmann::json(nullptr)},
       {"censored", p.censored},
       {"detail", p.detail}};
}

inline void to_json(nlohmann::json& j, const PopulationSweep& s) {
  j = {{"points", s.points}, {"non_increasing", s.non_increasing}};
}

inline void to_json(nlohmann::json& j, const CouplingResult& r) {
  j = {{"c_star", r.c_star ? nlohmann::json(*r.c_star) : nlohmann::json(nullptr)},
       {"below_range", r.below_range},
       {"probes", r.probes},
       {"quorum", r.quorum}};
}

inline void to_json(nlohmann::json& j, const PhasePoint& p) {
  j = {{"rms", p.rms},
       {"mean_delta_phi_deg", p.mean_delta_phi_deg},
       {"circ_std_deg", p.circ_std_deg},
       {"lock_fraction", p.lock_fraction},
       {"sub_threshold", p.sub_threshold}};
}

inline void to_json(nlohmann::json& j, const PipelineSettings& s) {
  j = {{"defaults", s.defaults},
       {"c_c", s.c_c},
       {"c_noise", s.c_noise},
       {"noise_rms", s.noise_rms},
       {"hold_interval", s.hold_interval},
       {"noise_common", s.noise_common},
       {"t_end", s.t_end},
       {"detune_spread", s.detune_spread},
       {"window_fraction", s.window_fraction},
       {"eps_f", s.eps_f},
       {"eps_phi_deg", s.eps_phi_deg},
       {"runs", s.runs}};
}

inline void to_json(nlohmann::json& j, const RunRecord& r) {
  j = {{"seed", r.seed},
       {"locked", r.locked},
       {"num_colors", r.num_colors},
       {"max_rel_period_spread", r.max_rel_period_spread},
       {"phase_std_deg", r.phase_std_deg},
       {"error", r.error}};
}

inline void to_json(nlohmann::json& j, const ColoringResult& r) {
  j = {{"num_colors", r.coloring ? nlohmann::json(r.coloring->num_colors) : nlohmann::json(nullptr)},
       {"assignment", r.coloring ? nlohmann::json(r.coloring->assignment) : nlohmann::json(nullptr)},
       {"order", r.order ? nlohmann::json(r.order->sequence) : nlohmann::json(nullptr)},
       {"locked", r.locked},
       {"locked_runs", r.locked_runs},
       {"total_runs", r.total_runs},
       {"runs", r.runs}};
}

}  // namespace oscnet
