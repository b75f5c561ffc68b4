#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <exception>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oscnet/analysis.hpp"
#include "oscnet/coloring.hpp"
#include "oscnet/experiments.hpp"
#include "oscnet/graph.hpp"
#include "oscnet/io.hpp"
#include "oscnet/model.hpp"
#include "oscnet/noise.hpp"
#include "oscnet/report.hpp"
#include "oscnet/seeds.hpp"
#include "oscnet/sim.hpp"

namespace oscnet::cli {

/// Flag/argument problems exit 2; I/O and simulation problems exit 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string one_line(std::string s) {
  for (auto& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

inline std::string utc_timestamp() {
  std::time_t tt = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Defaults overridable through --params; flags still win where one exists.
struct Overrides {
  OscillatorParams osc;
  std::optional<double> t_end, dt, dt_out, crossing_tol;
};

inline Overrides load_overrides(const std::string& path) {
  Overrides ov;
  if (path.empty()) return ov;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("params file: " + one_line(e.what()));
  }
  if (!j.is_object()) throw UsageError("params file: top level must be an object");
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "r_f")
        ov.osc.r_f = v.get<double>();
      else if (k == "c_l")
        ov.osc.c_l = v.get<double>();
      else if (k == "beta")
        ov.osc.beta = v.get<double>();
      else if (k == "v_a")
        ov.osc.v_a = v.get<double>();
      else if (k == "t_end")
        ov.t_end = v.get<double>();
      else if (k == "dt")
        ov.dt = v.get<double>();
      else if (k == "dt_out")
        ov.dt_out = v.get<double>();
      else if (k == "crossing_tol")
        ov.crossing_tol = v.get<double>();
      else
        throw UsageError("params file: unknown key '" + k + "'");
    }
    ov.osc.validate();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("params file: " + one_line(e.what()));
  } catch (const std::invalid_argument& e) {
    throw UsageError("params file: " + one_line(e.what()));
  }
  return ov;
}

inline SimConfig config_for(const NetworkSpec& net, double t_end, const Overrides& ov) {
  SimConfig cfg = SimConfig::for_network(net, ov.t_end.value_or(t_end));
  if (ov.dt) cfg.dt = *ov.dt;
  if (ov.dt_out) cfg.dt_out = *ov.dt_out;
  if (ov.crossing_tol) cfg.crossing_tol = *ov.crossing_tol;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(one_line(e.what()));
  }
  return cfg;
}

inline std::vector<std::uint64_t> first_seeds(int count) {
  if (count < 1) throw UsageError("seed count must be >= 1");
  std::vector<std::uint64_t> s;
  for (int i = 1; i <= count; ++i) s.push_back(static_cast<std::uint64_t>(i));
  return s;
}

inline std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("bad number '" + tok + "' in list");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline void write_json_report(const std::string& path, nlohmann::json doc) {
  doc["timestamp_utc"] = utc_timestamp();
  write_text_file(path, doc.dump(2) + "\n");
}

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (k == a) ok = true;
    if (!ok) throw UsageError("sweep definition: unknown key '" + k + "'");
  }
}

inline std::vector<std::uint64_t> seeds_from_json(const nlohmann::json& j) {
  if (!j.contains("seeds")) return first_seeds(10);
  const auto& s = j["seeds"];
  if (s.is_number_integer()) return first_seeds(s.get<int>());
  if (s.is_array()) {
    auto v = s.get<std::vector<std::uint64_t>>();
    if (v.empty()) throw UsageError("sweep definition: seeds array is empty");
    return v;
  }
  throw UsageError("sweep definition: seeds must be a count or an array");
}

inline nlohmann::json settings_json(const ThresholdSweepSettings& st) {
  return {{"base", st.base},           {"c_noise", st.c_noise},
          {"hold_interval", st.noise.hold_interval}, {"t_end", st.t_end},
          {"v_lo", st.v_lo},           {"v_hi", st.v_hi},
          {"resolution", st.resolution}, {"seeds", st.seeds},
          {"quorum", st.quorum}};
}

}  // namespace detail

inline int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"coupled relaxation-oscillator network tools"};
  app.require_subcommand(1);

  std::string params_path;

  auto* gen = app.add_subcommand("gen", "generate a graph as a DIMACS .col file");
  std::vector<int> circulant;
  std::string gen_out;
  gen->add_option("--circulant", circulant, "ring size N and neighbor count K")
      ->expected(2)
      ->required();
  gen->add_option("--out", gen_out, "output .col path")->required();

  auto* sim = app.add_subcommand("sim", "simulate a graph-shaped oscillator network");
  std::string sim_graph, sim_trace, sim_report;
  double sim_cc = 50e-12, sim_rms = 0.0, sim_tend = 10e-3;
  std::uint64_t sim_seed = 1;
  sim->add_option("--graph", sim_graph, "input .col path")->required();
  sim->add_option("--cc", sim_cc, "coupling capacitance per edge, farads");
  sim->add_option("--noise-rms", sim_rms, "common noise level, volts")
      ->check(CLI::NonNegativeNumber);
  sim->add_option("--seed", sim_seed, "run seed");
  auto* sim_tend_opt = sim->add_option("--t-end", sim_tend, "simulated time, seconds")
                           ->check(CLI::PositiveNumber);
  sim->add_option("--trace", sim_trace, "write sampled trace CSV here");
  sim->add_option("--report", sim_report, "write lock report JSON here");
  sim->add_option("--params", params_path, "JSON file overriding oscillator/integration defaults");

  auto* spectrum = app.add_subcommand("spectrum", "periodogram of one oscillator from a trace");
  std::string sp_trace, sp_window = "hann", sp_out;
  int sp_osc = 1;
  spectrum->add_option("--trace", sp_trace, "input trace CSV")->required();
  spectrum->add_option("--osc", sp_osc, "oscillator index, 1-based")->check(CLI::PositiveNumber);
  spectrum->add_option("--window", sp_window, "hann or rect")
      ->check(CLI::IsMember({"hann", "rect"}));
  spectrum->add_option("--out", sp_out, "output spectrum CSV")->required();

  auto* color = app.add_subcommand("color", "color a graph through the oscillator pipeline");
  std::string col_graph, col_out;
  double col_cc = 50e-12, col_rms = 0.0;
  int col_runs = 12;
  std::uint64_t col_seed = 1;
  color->add_option("--graph", col_graph, "input .col path")->required();
  color->add_option("--cc", col_cc, "coupling capacitance per edge, farads");
  color->add_option("--noise-rms", col_rms, "common noise level, volts")
      ->check(CLI::NonNegativeNumber);
  color->add_option("--runs", col_runs, "independent runs per graph")->check(CLI::PositiveNumber);
  color->add_option("--seed", col_seed, "master seed");
  color->add_option("--out", col_out, "output JSON path")->required();
  color->add_option("--params", params_path, "JSON file overriding oscillator/integration defaults");

  auto* threshold = app.add_subcommand("threshold", "search the noise-locking threshold");
  std::string th_graph, th_detune, th_out;
  int th_n = 0, th_seeds = 10;
  double th_vmax = 1.0, th_res = 5e-3;
  auto* th_graph_opt = threshold->add_option("--graph", th_graph, "input .col path");
  auto* th_n_opt =
      threshold->add_option("--n", th_n, "oscillator count (no file)")->check(CLI::PositiveNumber);
  th_graph_opt->excludes(th_n_opt);
  threshold->add_option("--detune", th_detune, "comma-separated fractional detunes, one per oscillator");
  threshold->add_option("--v-max", th_vmax, "search ceiling, volts")->check(CLI::PositiveNumber);
  threshold->add_option("--resolution", th_res, "search resolution, volts")
      ->check(CLI::PositiveNumber);
  threshold->add_option("--seeds", th_seeds, "number of seeds (1..k)")->check(CLI::PositiveNumber);
  threshold->add_option("--out", th_out, "output JSON path")->required();
  threshold->add_option("--params", params_path,
                        "JSON file overriding oscillator/integration defaults");

  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep from a definition file");
  std::string sw_kind, sw_spec, sw_out;
  sweep->add_option("--kind", sw_kind, "amplitude, population, or coupling")
      ->check(CLI::IsMember({"amplitude", "population", "coupling"}))
      ->required();
  sweep->add_option("--spec", sw_spec, "sweep definition JSON")->required();
  sweep->add_option("--out", sw_out, "output JSON path")->required();
  sweep->add_option("--params", params_path, "JSON file overriding oscillator/integration defaults");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);

    detail::Overrides ov = detail::load_overrides(params_path);

    if (gen->parsed()) {
      Graph g;
      try {
        g = circulant_graph(circulant[0], circulant[1]);
      } catch (const std::invalid_argument& e) {
        throw UsageError(detail::one_line(e.what()));
      }
      write_text_file(gen_out, to_dimacs(g));
    }

    if (sim->parsed()) {
      Graph g = parse_dimacs(read_text_file(sim_graph));
      NetworkSpec net = build_network(g, ov.osc, sim_cc, 1e-12,
                                      std::vector<double>(static_cast<std::size_t>(g.n), 0.0));
      if (sim_tend_opt->count()) ov.t_end = sim_tend;  // flag beats the params file
      SimConfig cfg = detail::config_for(net, 10e-3, ov);
      NoiseSpec ns;
      ns.rms_voltage = sim_rms;
      ns.seed = derive_seed(sim_seed, kStreamNoise);
      Trace tr = simulate(net, ns, cfg, sim_seed);
      if (!sim_trace.empty()) write_trace_csv(tr, sim_trace);
      if (!sim_report.empty()) {
        nlohmann::json doc = {
            {"command", "sim"},
            {"params",
             {{"graph_file", sim_graph},
              {"network", net},
              {"noise", ns},
              {"config", cfg},
              {"seed", sim_seed}}},
            {"result",
             {{"lock", lock_report(tr)},
              {"switch_events", tr.events.size()},
              {"max_jump_residual", tr.max_jump_residual}}}};
        detail::write_json_report(sim_report, doc);
      }
    }

    if (spectrum->parsed()) {
      Trace tr = read_trace_csv(sp_trace);
      WindowKind kind = sp_window == "rect" ? WindowKind::rectangular : WindowKind::hann;
      Spectrum spec = periodogram(tr, sp_osc - 1, kind);
      write_text_file(sp_out, spectrum_to_csv(spec));
    }

    if (color->parsed()) {
      Graph g = parse_dimacs(read_text_file(col_graph));
      PipelineSettings ps;
      ps.defaults = ov.osc;
      ps.c_c = col_cc;
      ps.noise_rms = col_rms;
      ps.runs = col_runs;
      ps.t_end = ov.t_end.value_or(ps.t_end);
      ColoringResult res = color_via_oscillators(g, ps, col_seed);
      nlohmann::json doc = {{"command", "color"},
                            {"params",
                             {{"graph_file", col_graph},
                              {"settings", ps},
                              {"master_seed", col_seed}}},
                            {"result", res}};
      detail::write_json_report(col_out, doc);
    }

    if (threshold->parsed()) {
      if (!th_graph_opt->count() && !th_n_opt->count())
        throw UsageError("threshold: give either --graph or --n");
      Graph g = th_graph_opt->count() ? parse_dimacs(read_text_file(th_graph))
                                      : Graph::from_edges(th_n, {});
      std::vector<double> det = detail::parse_csv_doubles(th_detune);
      if (det.empty()) det.assign(static_cast<std::size_t>(g.n), 0.0);
      if (static_cast<int>(det.size()) != g.n)
        throw UsageError("threshold: detune list length must equal oscillator count");
      // The threshold protocol measures noise-induced locking of uncoupled
      // oscillators; edges only shape the recorded graph, not the wiring.
      NetworkSpec net = build_network(Graph::from_edges(g.n, {}), ov.osc, 0.0, 100e-12, det);
      SimConfig cfg = detail::config_for(net, 20e-3, ov);
      NoiseSpec ns;
      ThresholdResult res = find_noise_threshold(net, ns, cfg, 0.0, th_vmax, th_res,
                                                 detail::first_seeds(th_seeds), 0.8);
      nlohmann::json doc = {{"command", "threshold"},
                            {"params",
                             {{"graph_file", th_graph},
                              {"n", g.n},
                              {"network", net},
                              {"noise_hold_interval", ns.hold_interval},
                              {"config", cfg},
                              {"v_lo", 0.0},
                              {"v_max", th_vmax},
                              {"resolution", th_res},
                              {"quorum", 0.8}}},
                            {"result", res}};
      detail::write_json_report(th_out, doc);
    }

    if (sweep->parsed()) {
      nlohmann::json def;
      try {
        def = nlohmann::json::parse(read_text_file(sw_spec));
      } catch (const nlohmann::json::parse_error& e) {
        throw UsageError("sweep definition: " + detail::one_line(e.what()));
      }
      if (!def.is_object()) throw UsageError("sweep definition: top level must be an object");

      try {
        if (sw_kind == "amplitude" || sw_kind == "population") {
          ThresholdSweepSettings st;
          st.base = ov.osc;
          st.c_noise = def.value("c_noise", 100e-12);
          st.noise.hold_interval = def.value("hold_interval", 1e-6);
          st.t_end = def.contains("t_end") ? def["t_end"].get<double>()
                                           : ov.t_end.value_or(20e-3);
          st.v_lo = def.value("v_lo", 0.0);
          st.v_hi = def.value("v_hi", 1.0);
          st.resolution = def.value("resolution", 5e-3);
          st.quorum = def.value("quorum", 0.8);
          st.seeds = detail::seeds_from_json(def);

          nlohmann::json result;
          nlohmann::json params = detail::settings_json(st);
          if (sw_kind == "amplitude") {
            detail::reject_unknown(def, {"amplitudes", "detune", "seeds", "quorum", "resolution",
                                         "v_lo", "v_hi", "t_end", "c_noise", "hold_interval"});
            if (!def.contains("amplitudes") || !def.contains("detune"))
              throw UsageError("amplitude sweep needs 'amplitudes' and 'detune'");
            st.detune = def["detune"].get<std::vector<double>>();
            params["detune"] = st.detune;
            result = sweep_amplitude(def["amplitudes"].get<std::vector<double>>(), st);
          } else {
            detail::reject_unknown(def, {"sizes", "detune_spread", "seeds", "quorum", "resolution",
                                         "v_lo", "v_hi", "t_end", "c_noise", "hold_interval"});
            if (!def.contains("sizes") || !def.contains("detune_spread"))
              throw UsageError("population sweep needs 'sizes' and 'detune_spread'");
            double spread = def["detune_spread"].get<double>();
            params["detune_spread"] = spread;
            result = sweep_population(def["sizes"].get<std::vector<int>>(), spread, st);
          }
          nlohmann::json doc = {{"command", "sweep"},
                                {"kind", sw_kind},
                                {"params", params},
                                {"result", result}};
          detail::write_json_report(sw_out, doc);
        } else {
          detail::reject_unknown(def, {"graph", "detune", "noise_rms", "c_lo", "c_hi",
                                       "resolution_ratio", "seeds", "quorum", "t_end", "c_noise",
                                       "hold_interval"});
          if (!def.contains("graph") || !def.contains("detune"))
            throw UsageError("coupling sweep needs 'graph' and 'detune'");
          Graph g = parse_dimacs(read_text_file(def["graph"].get<std::string>()));
          CouplingSearchSettings cs;
          cs.base = ov.osc;
          cs.detune = def["detune"].get<std::vector<double>>();
          cs.c_noise = def.value("c_noise", 100e-12);
          cs.noise.hold_interval = def.value("hold_interval", 1e-6);
          cs.noise.rms_voltage = def.value("noise_rms", 0.0);
          cs.t_end = def.contains("t_end") ? def["t_end"].get<double>()
                                           : ov.t_end.value_or(20e-3);
          cs.quorum = def.value("quorum", 0.8);
          cs.seeds = detail::seeds_from_json(def);
          double c_lo = def.value("c_lo", 0.05e-12);
          double c_hi = def.value("c_hi", 100e-12);
          double ratio = def.value("resolution_ratio", 1.3);
          CouplingResult result = find_critical_coupling(g, cs, c_lo, c_hi, ratio);
          nlohmann::json doc = {{"command", "sweep"},
                                {"kind", "coupling"},
                                {"params",
                                 {{"base", cs.base},
                                  {"graph_file", def["graph"].get<std::string>()},
                                  {"detune", cs.detune},
                                  {"c_noise", cs.c_noise},
                                  {"noise", cs.noise},
                                  {"t_end", cs.t_end},
                                  {"seeds", cs.seeds},
                                  {"quorum", cs.quorum},
                                  {"c_lo", c_lo},
                                  {"c_hi", c_hi},
                                  {"resolution_ratio", ratio}}},
                                {"result", result}};
          detail::write_json_report(sw_out, doc);
        }
      } catch (const nlohmann::json::exception& e) {
        throw UsageError("sweep definition: " + detail::one_line(e.what()));
      } catch (const std::invalid_argument& e) {
        throw UsageError("sweep definition: " + detail::one_line(e.what()));
      }
    }

    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << detail::one_line(e.what()) << "\n";
    std::cout << app.help();
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: usage: " << detail::one_line(e.what()) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: runtime: " << detail::one_line(e.what()) << "\n";
    return 1;
  }
}

}  // namespace oscnet::cli
