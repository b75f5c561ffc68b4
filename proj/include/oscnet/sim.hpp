#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "oscnet/model.hpp"
#include "oscnet/noise.hpp"
#include "oscnet/seeds.hpp"

namespace oscnet {

struct SimConfig {
  double t_end = 10e-3;       // seconds
  double dt = 0;              // integration step, 0 < dt <= dt_out
  double dt_out = 0;          // output sampling interval
  double crossing_tol = 1e-9; // event-time localization tolerance, < dt
  double zeno_guard = 10e-9;  // minimum spacing between switches of one oscillator

  void validate() const {
    if (!(std::isfinite(t_end) && t_end > 0)) throw std::invalid_argument("SimConfig: t_end must be > 0");
    if (!(std::isfinite(dt) && dt > 0)) throw std::invalid_argument("SimConfig: dt must be > 0");
    if (!(std::isfinite(dt_out) && dt_out >= dt))
      throw std::invalid_argument("SimConfig: need dt <= dt_out");
    if (!(std::isfinite(crossing_tol) && crossing_tol > 0 && crossing_tol < dt))
      throw std::invalid_argument("SimConfig: need 0 < crossing_tol < dt");
    if (!(std::isfinite(zeno_guard) && zeno_guard >= 0))
      throw std::invalid_argument("SimConfig: zeno_guard must be >= 0");
  }

  /// Steps derived from the fastest oscillator: dt = T_min/2000 (~110 ns at
  /// defaults), dt_out = T_min/64. crossing_tol is clamped below dt.
  static SimConfig for_network(const NetworkSpec& net, double t_end) {
    net.validate();
    double t_min = std::numeric_limits<double>::infinity();
    for (const auto& p : net.oscillators) t_min = std::min(t_min, natural_period(p));
    SimConfig cfg;
    cfg.t_end = t_end;
    cfg.dt = t_min / 2000.0;
    cfg.dt_out = t_min / 64.0;
    cfg.crossing_tol = std::min(1e-9, cfg.dt / 10.0);
    cfg.validate();
    return cfg;
  }
};

/// Instantaneous dynamical state: capacitor-node voltages and comparator
/// outputs (each s_i in {-1,+1}).
struct State {
  double t = 0;
  Eigen::VectorXd v;
  std::vector<int> s;
};

enum class SwitchDirection { rise, fall };

inline const char* to_string(SwitchDirection d) {
  return d == SwitchDirection::rise ? "rise" : "fall";
}

struct SwitchEvent {
  int osc = 0;  // 0-based
  double t = 0;
  SwitchDirection direction = SwitchDirection::rise;
};

/// Result of one simulation: samples on the dt_out grid, switching events,
/// and the inputs needed to replay it.
struct Trace {
  std::vector<double> times;
  std::vector<std::vector<double>> v;  // [oscillator][sample]
  std::vector<std::vector<int>> s;     // [oscillator][sample]
  std::vector<SwitchEvent> events;
  NoiseSpec noise_used;
  std::uint64_t seed = 0;
  double dt_out = 0;
  double t_end = 0;
  double max_jump_residual = 0;  // worst relative charge-balance residual over all noise jumps

  int n() const { return static_cast<int>(v.size()); }
};

/// Draws v_i uniformly from the open hysteresis interval
/// (-beta_i*v_a_i, +beta_i*v_a_i) and s_i uniformly from {-1,+1}.
/// No oscillator starts at a switching threshold.
inline State initial_state(const NetworkSpec& net, std::uint64_t seed) {
  net.validate();
  int n = net.size();
  State st;
  st.t = 0;
  st.v.resize(n);
  st.s.resize(static_cast<std::size_t>(n));
  std::mt19937_64 rng(derive_seed(seed, kStreamInitialState));
  for (int i = 0; i < n; ++i) {
    const auto& p = net.oscillators[static_cast<std::size_t>(i)];
    double thr = p.beta * p.v_a;
    // 53-bit uniform in [0,1); the (1 - 1e-12) factor keeps the endpoints out.
    double d = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    st.v(i) = thr * (2.0 * d - 1.0) * (1.0 - 1e-12);
    st.s[static_cast<std::size_t>(i)] = (rng() & 1u) ? 1 : -1;
  }
  return st;
}

namespace detail {

inline double hermite_eval(double g0, double m0, double g1, double m1, double th) {
  double th2 = th * th, th3 = th2 * th;
  return (2 * th3 - 3 * th2 + 1) * g0 + (th3 - 2 * th2 + th) * m0 +
         (-2 * th3 + 3 * th2) * g1 + (th3 - th2) * m1;
}

// Bisection for the guard root on [0,1]; g0 < 0 <= g1. Fixed iteration count
// keeps the result deterministic and localizes far below crossing_tol.
inline double hermite_root(double g0, double m0, double g1, double m1) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 64; ++it) {
    double mid = 0.5 * (lo + hi);
    if (hermite_eval(g0, m0, g1, m1, mid) < 0)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

class Integrator {
 public:
  Integrator(const NetworkSpec& net, const NoiseSpec& noise, const SimConfig& cfg,
             const State& init, std::uint64_t seed_echo)
      : net_(net), cfg_(cfg), n_(net.size()) {
    net.validate();
    noise.validate();
    cfg.validate();
    if (init.v.size() != n_ || static_cast<int>(init.s.size()) != n_)
      throw std::invalid_argument("simulate: initial state size mismatch");
    if (init.t != 0) throw std::invalid_argument("simulate: initial state must start at t = 0");
    for (int si : init.s)
      if (si != 1 && si != -1) throw std::invalid_argument("simulate: comparator states must be +-1");

    m_ = capacitance_matrix(net);
    llt_.compute(m_);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n_, n_);
    amp_.resize(n_);
    thr_.resize(n_);
    for (int i = 0; i < n_; ++i) {
      const auto& p = net.oscillators[static_cast<std::size_t>(i)];
      d(i, i) = 1.0 / p.r_f;
      amp_(i) = p.v_a;
      thr_(i) = p.beta * p.v_a;
    }
    a_ = llt_.solve(d);

    cn_.resize(n_);
    for (int i = 0; i < n_; ++i) cn_(i) = net.c_noise[static_cast<std::size_t>(i)];
    has_noise_ = noise.rms_voltage > 0 && cn_.maxCoeff() > 0;
    if (has_noise_) {
      if (net.noise_common) {
        signals_.push_back(generate_noise(noise, cfg.t_end));
        jump_common_ = llt_.solve(cn_);
      } else {
        std::uint64_t base = derive_seed(noise.seed, kStreamNoisePerOsc);
        for (int i = 0; i < n_; ++i) {
          NoiseSpec s2 = noise;
          s2.seed = derive_seed(base, static_cast<std::uint64_t>(i));
          signals_.push_back(generate_noise(s2, cfg.t_end));
        }
        jump_indep_ = llt_.solve(Eigen::MatrixXd(cn_.asDiagonal()));
      }
    }

    v_ = init.v;
    s_ = init.s;
    u_.resize(n_);
    for (int i = 0; i < n_; ++i) u_(i) = s_[static_cast<std::size_t>(i)] * amp_(i);
    last_event_t_.assign(static_cast<std::size_t>(n_),
                         -std::numeric_limits<double>::infinity());

    trace_.noise_used = noise;
    trace_.seed = seed_echo;
    trace_.dt_out = cfg.dt_out;
    trace_.t_end = cfg.t_end;
    trace_.v.resize(static_cast<std::size_t>(n_));
    trace_.s.resize(static_cast<std::size_t>(n_));
    auto reserve = static_cast<std::size_t>(cfg.t_end / cfg.dt_out) + 2;
    trace_.times.reserve(reserve);
    for (int i = 0; i < n_; ++i) {
      trace_.v[static_cast<std::size_t>(i)].reserve(reserve);
      trace_.s[static_cast<std::size_t>(i)].reserve(reserve);
    }

    k1_.resize(n_); k2_.resize(n_); k3_.resize(n_); k4_.resize(n_);
    tmp_.resize(n_); v1_.resize(n_); f1_.resize(n_); dv_.resize(n_);
    theta_.assign(static_cast<std::size_t>(n_), 0.0);
  }

  Trace run() {
    t_ = 0;
    process_immediate_events();
    record_sample();
    long jout = 1;
    long khold = 1;
    const double inf = std::numeric_limits<double>::infinity();
    const double hold = signals_.empty() ? 0 : signals_.front().hold_interval;
    while (t_ < cfg_.t_end) {
      double t_out = static_cast<double>(jout) * cfg_.dt_out;
      if (t_out > cfg_.t_end * (1 + 1e-12))
        t_out = inf;
      else
        t_out = std::min(t_out, cfg_.t_end);
      double t_hold = inf;
      if (has_noise_) {
        double th = static_cast<double>(khold) * hold;
        if (th < cfg_.t_end && khold < static_cast<long>(signals_.front().samples.size()))
          t_hold = th;
      }
      double t_stop = std::min({cfg_.t_end, t_out, t_hold});
      advance_to(t_stop);
      if (t_stop == t_hold) {
        apply_jump(khold);
        process_immediate_events();
        ++khold;
      }
      if (t_stop == t_out) {
        record_sample();
        ++jout;
      }
      if (t_stop == cfg_.t_end) break;
    }
    return std::move(trace_);
  }

 private:
  double guard(int i) const { return s_[static_cast<std::size_t>(i)] * v_(i) - thr_(i); }
  double guard_of(const Eigen::VectorXd& x, int i) const {
    return s_[static_cast<std::size_t>(i)] * x(i) - thr_(i);
  }

  void deriv(const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    tmp_ = u_ - x;
    out.noalias() = a_ * tmp_;
  }

  // Classical RK4 from v_ over step h into v1_ (k1 must hold deriv(v_)).
  void rk4(double h, const Eigen::VectorXd& k1) {
    tmp_ = v_ + (0.5 * h) * k1;
    deriv(tmp_, k2_);
    tmp_ = v_ + (0.5 * h) * k2_;
    deriv(tmp_, k3_);
    tmp_ = v_ + h * k3_;
    deriv(tmp_, k4_);
    v1_ = v_ + (h / 6.0) * (k1 + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

  void flip(int i, double te) {
    if (te - last_event_t_[static_cast<std::size_t>(i)] < cfg_.zeno_guard)
      throw std::runtime_error(
          "simulate: Zeno violation: oscillator " + std::to_string(i + 1) +
          " switched twice within " + std::to_string(cfg_.zeno_guard) + " s at t=" +
          std::to_string(te));
    last_event_t_[static_cast<std::size_t>(i)] = te;
    int& s = s_[static_cast<std::size_t>(i)];
    SwitchDirection dir = s > 0 ? SwitchDirection::fall : SwitchDirection::rise;
    s = -s;
    u_(i) = s * amp_(i);
    trace_.events.push_back({i, te, dir});
  }

  // Flips every oscillator already at/past its threshold (after a noise jump
  // or a caller-supplied boundary state). Flipping i only changes u_i, never
  // v, so one pass settles everything.
  void process_immediate_events() {
    for (int i = 0; i < n_; ++i)
      if (guard(i) >= 0) flip(i, t_);
  }

  void record_sample() {
    trace_.times.push_back(t_);
    for (int i = 0; i < n_; ++i) {
      trace_.v[static_cast<std::size_t>(i)].push_back(v_(i));
      trace_.s[static_cast<std::size_t>(i)].push_back(s_[static_cast<std::size_t>(i)]);
    }
  }

  void apply_jump(long k) {
    auto idx = static_cast<std::size_t>(k);
    if (net_.noise_common) {
      double dvn = signals_[0].samples[idx] - signals_[0].samples[idx - 1];
      if (dvn == 0) return;
      dv_ = jump_common_ * dvn;
      tmp_ = cn_ * dvn;  // injected charge per node
    } else {
      Eigen::VectorXd delta(n_);
      for (int i = 0; i < n_; ++i)
        delta(i) = signals_[static_cast<std::size_t>(i)].samples[idx] -
                   signals_[static_cast<std::size_t>(i)].samples[idx - 1];
      dv_.noalias() = jump_indep_ * delta;
      tmp_ = cn_.cwiseProduct(delta);
    }
    v_ += dv_;
    if (!v_.allFinite())
      throw std::runtime_error("simulate: non-finite state after noise jump at t=" + std::to_string(t_));
    // Charge-balance self-check: M*dv must equal the injected charge.
    f1_.noalias() = m_ * dv_;
    double denom = std::max(f1_.cwiseAbs().maxCoeff(), tmp_.cwiseAbs().maxCoeff());
    if (denom > 0) {
      double rel = (f1_ - tmp_).cwiseAbs().maxCoeff() / denom;
      trace_.max_jump_residual = std::max(trace_.max_jump_residual, rel);
    }
  }

  void advance_to(double target) {
    while (t_ < target) {
      double rem = target - t_;
      double h = std::min(cfg_.dt, rem);
      deriv(v_, k1_);
      rk4(h, k1_);
      if (!v1_.allFinite())
        throw std::runtime_error("simulate: non-finite state at t=" + std::to_string(t_));

      double theta_min = 2.0;
      bool crossing = false;
      bool f1_ready = false;
      for (int i = 0; i < n_; ++i) {
        theta_[static_cast<std::size_t>(i)] = 2.0;
        double g1 = guard_of(v1_, i);
        if (g1 < 0) continue;
        double g0 = guard(i);
        double th;
        if (g0 >= 0) {
          th = 0.0;  // boundary-start robustness; normally handled before stepping
        } else {
          if (!f1_ready) {
            deriv(v1_, f1_);
            f1_ready = true;
          }
          int sg = s_[static_cast<std::size_t>(i)];
          double m0 = sg * k1_(i) * h;
          double m1 = sg * f1_(i) * h;
          th = hermite_root(g0, m0, g1, m1);
        }
        theta_[static_cast<std::size_t>(i)] = th;
        theta_min = std::min(theta_min, th);
        crossing = true;
      }

      if (!crossing) {
        v_ = v1_;
        t_ = (h == rem) ? target : t_ + h;
        continue;
      }

      double he = theta_min * h;
      double te = (theta_min >= 1.0) ? ((h == rem) ? target : t_ + h) : t_ + he;
      if (he > 0) {
        rk4(he, k1_);
        if (!v1_.allFinite())
          throw std::runtime_error("simulate: non-finite state at t=" + std::to_string(t_));
        v_ = v1_;
      }
      t_ = te;
      for (int i = 0; i < n_; ++i)
        if (theta_[static_cast<std::size_t>(i)] == theta_min) flip(i, te);
    }
  }

  const NetworkSpec& net_;
  const SimConfig& cfg_;
  int n_;
  Eigen::MatrixXd m_, a_, jump_indep_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd amp_, thr_, cn_, jump_common_;
  std::vector<NoiseSignal> signals_;
  bool has_noise_ = false;

  Eigen::VectorXd v_, u_, v1_, f1_, dv_, tmp_, k1_, k2_, k3_, k4_;
  std::vector<int> s_;
  std::vector<double> last_event_t_, theta_;
  double t_ = 0;
  Trace trace_;
};

}  // namespace detail

/// Integrates the network from a caller-supplied state at t = 0.
/// Between events M dv/dt = D (u(s) - v); switching by hysteresis at
/// +-beta*v_a with event times localized to within crossing_tol; at each
/// noise-hold boundary v jumps by the charge-conserving response M^-1 c_N dV.
inline Trace simulate_from(const NetworkSpec& net, const NoiseSpec& noise, const SimConfig& cfg,
                           const State& init, std::uint64_t seed_echo = 0) {
  detail::Integrator integ(net, noise, cfg, init, seed_echo);
  return integ.run();
}

/// Same, but with initial conditions drawn from `seed`.
inline Trace simulate(const NetworkSpec& net, const NoiseSpec& noise, const SimConfig& cfg,
                      std::uint64_t seed) {
  return simulate_from(net, noise, cfg, initial_state(net, seed), seed);
}

/// Rise-event times of one oscillator: the voltage troughs (v at its minimum
/// -beta*v_a switching upward). Empty result means no troughs, not an error.
inline std::vector<double> extract_troughs(const Trace& trace, int oscillator) {
  if (oscillator < 0 || oscillator >= trace.n())
    throw std::invalid_argument("extract_troughs: oscillator index out of range");
  std::vector<double> out;
  for (const auto& e : trace.events)
    if (e.osc == oscillator && e.direction == SwitchDirection::rise) out.push_back(e.t);
  return out;
}

}  // namespace oscnet
