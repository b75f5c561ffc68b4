#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "oscnet/sim.hpp"

namespace oscnet {

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

/// Trace CSV: header `t,v1..vN,s1..sN`, one row per dt_out sample.
/// %.17g keeps times and voltages exact through a round-trip.
inline std::string trace_to_csv(const Trace& trace) {
  int n = trace.n();
  std::ostringstream out;
  out << 't';
  for (int i = 1; i <= n; ++i) out << ",v" << i;
  for (int i = 1; i <= n; ++i) out << ",s" << i;
  out << '\n';
  char buf[32];
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", trace.times[k]);
    out << buf;
    for (int i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", trace.v[static_cast<std::size_t>(i)][k]);
      out << ',' << buf;
    }
    for (int i = 0; i < n; ++i) out << ',' << trace.s[static_cast<std::size_t>(i)][k];
    out << '\n';
  }
  return out.str();
}

inline void write_trace_csv(const Trace& trace, const std::string& path) {
  write_text_file(path, trace_to_csv(trace));
}

/// Events CSV: `osc,t,direction` with 1-based oscillator ids.
inline std::string events_to_csv(const Trace& trace) {
  std::ostringstream out;
  out << "osc,t,direction\n";
  char buf[32];
  for (const auto& e : trace.events) {
    std::snprintf(buf, sizeof buf, "%.17g", e.t);
    out << (e.osc + 1) << ',' << buf << ',' << to_string(e.direction) << '\n';
  }
  return out.str();
}

inline void write_events_csv(const Trace& trace, const std::string& path) {
  write_text_file(path, events_to_csv(trace));
}

/// Reads a trace CSV back into a Trace (samples only; the event list and
/// noise echo are not part of the CSV format).
inline Trace trace_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trace CSV: empty input");
  int ncols = 1;
  for (char c : line) ncols += (c == ',');
  if (ncols < 3 || (ncols - 1) % 2 != 0)
    throw std::runtime_error("trace CSV: malformed header");
  int n = (ncols - 1) / 2;
  Trace trace;
  trace.v.resize(static_cast<std::size_t>(n));
  trace.s.resize(static_cast<std::size_t>(n));
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> row;
    row.reserve(static_cast<std::size_t>(ncols));
    while (std::getline(ls, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("trace CSV: bad number at line " + std::to_string(lineno));
      }
    }
    if (static_cast<int>(row.size()) != ncols)
      throw std::runtime_error("trace CSV: wrong column count at line " + std::to_string(lineno));
    trace.times.push_back(row[0]);
    for (int i = 0; i < n; ++i) {
      trace.v[static_cast<std::size_t>(i)].push_back(row[static_cast<std::size_t>(1 + i)]);
      trace.s[static_cast<std::size_t>(i)].push_back(
          static_cast<int>(row[static_cast<std::size_t>(1 + n + i)]));
    }
  }
  if (trace.times.size() < 2) throw std::runtime_error("trace CSV: need at least 2 samples");
  trace.dt_out = trace.times[1] - trace.times[0];
  trace.t_end = trace.times.back();
  return trace;
}

inline Trace read_trace_csv(const std::string& path) {
  return trace_from_csv(read_text_file(path));
}

}  // namespace oscnet
