#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "wrbf/errors.hpp"

namespace wrbf {

enum class Scheme { ssprk33, explicit_euler };

inline Scheme parse_scheme(std::string_view name) {
  if (name == "ssprk33") return Scheme::ssprk33;
  if (name == "euler") return Scheme::explicit_euler;
  throw ConfigError("unknown time integrator '" + std::string(name) + "'");
}

inline std::string scheme_name(Scheme s) { return s == Scheme::ssprk33 ? "ssprk33" : "euler"; }

struct TimeStepConfig {
  double cfl = 0.1;
  double t_end = 0.0;
  Scheme scheme = Scheme::ssprk33;
  std::vector<double> snapshot_times;

  void validate() const {
    if (!(cfl > 0.0) || !std::isfinite(cfl)) throw ConfigError("CFL constant must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("final time must be nonnegative");
    for (double s : snapshot_times)
      if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("snapshot times must be nonnegative");
  }
};

// dt = C |Omega| / (N max|f'|).
inline double cfl_timestep(double cfl, double domain_measure, int n, double max_wave_speed) {
  if (!(cfl > 0.0) || !(domain_measure > 0.0) || n <= 0)
    throw ArgumentError("CFL inputs must be positive");
  if (!(max_wave_speed >= 0.0) || !std::isfinite(max_wave_speed))
    throw ArgumentError("maximum wave speed must be finite and nonnegative");
  if (max_wave_speed == 0.0) throw ArgumentError("zero wave speed gives an unbounded time step");
  return cfl * domain_measure / (n * max_wave_speed);
}

template <class S>
using RhsFunction = std::function<S(double, const S&)>;

// Called on every stage value (boundary injection for the strong method).
template <class S>
using StageHook = std::function<void(double, S&)>;

namespace detail {

template <class S>
void check_stage(const S& stage, const S& last, double t, int index) {
  if (!stage.allFinite())
    throw BlowUp<S>("non-finite state at t = " + std::to_string(t) + ", stage " + std::to_string(index), t, index,
                    last);
}

}  // namespace detail

// Shu-Osher form:
//   u1 = u + dt L(t, u)
//   u2 = 3/4 u + 1/4 (u1 + dt L(t + dt, u1))
//   u+ = 1/3 u + 2/3 (u2 + dt L(t + dt/2, u2))
template <class S>
S ssprk33_step(const RhsFunction<S>& rhs, double t, const S& u, double dt, const StageHook<S>& hook = {}) {
  if (!(dt > 0.0)) throw ArgumentError("time step must be positive");
  S u1 = u + dt * rhs(t, u);
  if (hook) hook(t + dt, u1);
  detail::check_stage(u1, u, t + dt, 1);
  S u2 = 0.75 * u + 0.25 * (u1 + dt * rhs(t + dt, u1));
  if (hook) hook(t + 0.5 * dt, u2);
  detail::check_stage(u2, u, t + 0.5 * dt, 2);
  S out = (1.0 / 3.0) * u + (2.0 / 3.0) * (u2 + dt * rhs(t + 0.5 * dt, u2));
  if (hook) hook(t + dt, out);
  detail::check_stage(out, u, t + dt, 3);
  return out;
}

template <class S>
S euler_step(const RhsFunction<S>& rhs, double t, const S& u, double dt, const StageHook<S>& hook = {}) {
  if (!(dt > 0.0)) throw ArgumentError("time step must be positive");
  S out = u + dt * rhs(t, u);
  if (hook) hook(t + dt, out);
  detail::check_stage(out, u, t + dt, 1);
  return out;
}

template <class S>
S time_step(Scheme scheme, const RhsFunction<S>& rhs, double t, const S& u, double dt,
            const StageHook<S>& hook = {}) {
  return scheme == Scheme::ssprk33 ? ssprk33_step(rhs, t, u, dt, hook) : euler_step(rhs, t, u, dt, hook);
}

// Fixed-step integration from t = 0 to t_end. Steps are shortened to land
// exactly on snapshot times and on t_end; on_step(t, u) runs after every
// accepted step. A state error raised by the right-hand side (e.g. negative
// pressure) is reported as a blow-up carrying the last finite state.
template <class S>
S integrate_to(const RhsFunction<S>& rhs, const S& u0, const TimeStepConfig& config, double dt,
               const std::function<void(double, const S&)>& on_step = {}, const StageHook<S>& hook = {}) {
  config.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ArgumentError("time step must be positive");
  std::vector<double> stops;
  for (double s : config.snapshot_times)
    if (s > 0.0 && s < config.t_end) stops.push_back(s);
  stops.push_back(config.t_end);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  S u = u0;
  double t = 0.0;
  for (double stop : stops) {
    if (stop <= t) continue;
    const double span = stop - t;
    const auto steps = static_cast<long long>(std::ceil(span / dt - 1e-9));
    const double t_start = t;
    for (long long k = 0; k < steps; ++k) {
      const double t_next = k + 1 == steps ? stop : t_start + (k + 1) * dt;
      try {
        u = time_step(config.scheme, rhs, t, u, t_next - t, hook);
      } catch (const StateError& e) {
        throw BlowUp<S>(std::string("invalid state: ") + e.what(), t, 0, u);
      }
      t = t_next;
      if (on_step) on_step(t, u);
    }
  }
  return u;
}

}  // namespace wrbf
