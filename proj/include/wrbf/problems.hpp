#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "wrbf/errors.hpp"
#include "wrbf/fluxes.hpp"
#include "wrbf/geometry.hpp"

namespace wrbf {

using State = Eigen::VectorXd;

enum class BoundaryKind { periodic, inflow };

struct Boundary {
  BoundaryKind kind = BoundaryKind::periodic;
  // Inflow data; an empty handle means no data on that side (outflow).
  std::function<State(double)> left;
  std::function<State(double)> right;
};

// A conservation law u_t + div F(u) = 0 with its data.
struct Problem {
  std::string name;
  Domain domain = Domain::interval(-1.0, 1.0);
  int components = 1;

  // Scalar problems.
  ScalarFlux flux;
  ScalarFlux flux_derivative;
  // Constant advection velocity (x, y) for linear problems.
  std::optional<Eigen::Vector2d> velocity;

  // Systems (and scalar problems through a size-1 adapter).
  SystemFlux system_flux;
  Wavespeed wavespeed;

  std::function<State(const Point&)> initial;
  Boundary boundary;
  // Empty when no closed-form solution is known.
  std::function<State(double, const Point&)> exact;

  bool is_linear() const noexcept { return velocity.has_value(); }
  bool is_scalar() const noexcept { return components == 1; }
};

enum class AdvectionProfile { gaussian20, cos_sq_4pi, two_d_sine };

// Wraps x into [a, b).
inline double wrap_periodic(double x, double a, double b) {
  const double len = b - a;
  double y = std::fmod(x - a, len);
  if (y < 0.0) y += len;
  return a + y;
}

inline double advection_profile(AdvectionProfile profile, const Point& x) {
  switch (profile) {
    case AdvectionProfile::gaussian20: return std::exp(-20.0 * x.x() * x.x());
    case AdvectionProfile::cos_sq_4pi: {
      const double c = std::cos(4.0 * std::numbers::pi * x.x());
      return c * c;
    }
    case AdvectionProfile::two_d_sine:
      return std::sin(2.0 * std::numbers::pi * x.x()) * (0.5 * std::sin(2.0 * std::numbers::pi * x.y()) - 1.0);
  }
  return 0.0;
}

namespace detail {

inline void attach_scalar_adapters(Problem& p) {
  auto f = p.flux;
  auto df = p.flux_derivative;
  p.system_flux = [f](const Eigen::VectorXd& u) { return Eigen::VectorXd::Constant(1, f(u[0])); };
  p.wavespeed = [df](const Eigen::VectorXd& u) { return std::abs(df(u[0])); };
}

}  // namespace detail

// Linear advection u_t + lambda . grad u = 0 on [-1,1] or [-1,1]^2. The exact
// solution is the initial profile transported with periodic wrapping; inflow
// data are the exact traces on the upwind side.
inline Problem linear_advection_problem(Eigen::Vector2d velocity, AdvectionProfile profile, BoundaryKind bc,
                                        int dim = 1) {
  if (profile == AdvectionProfile::two_d_sine && dim != 2)
    throw ArgumentError("the two-dimensional sine profile needs a 2D domain");
  if (profile != AdvectionProfile::two_d_sine && dim != 1)
    throw ArgumentError("one-dimensional profiles need a 1D domain");
  if (dim == 2 && bc != BoundaryKind::periodic)
    throw ArgumentError("2D advection supports periodic boundaries only");
  Problem p;
  p.domain = dim == 1 ? Domain::interval(-1.0, 1.0) : Domain::square(-1.0, 1.0);
  if (dim == 1) velocity.y() = 0.0;
  p.velocity = velocity;
  p.name = profile == AdvectionProfile::gaussian20   ? "advect-gauss"
           : profile == AdvectionProfile::cos_sq_4pi ? "advect-cos2"
                                                     : "advect-2d";
  const double lambda = velocity.x();
  p.flux = [lambda](double u) { return lambda * u; };
  p.flux_derivative = [lambda](double) { return lambda; };
  detail::attach_scalar_adapters(p);
  const Domain dom = p.domain;
  auto exact_value = [profile, velocity, dom](double t, const Point& x) {
    Point y(wrap_periodic(x.x() - velocity.x() * t, dom.lower(0), dom.upper(0)), 0.0);
    if (dom.dim() == 2) y.y() = wrap_periodic(x.y() - velocity.y() * t, dom.lower(1), dom.upper(1));
    return advection_profile(profile, y);
  };
  p.initial = [exact_value](const Point& x) { return State::Constant(1, exact_value(0.0, x)); };
  p.exact = [exact_value](double t, const Point& x) { return State::Constant(1, exact_value(t, x)); };
  p.boundary.kind = bc;
  if (bc == BoundaryKind::inflow) {
    const double a = dom.lower(0), b = dom.upper(0);
    auto trace = [exact_value](double x) {
      return [exact_value, x](double t) { return State::Constant(1, exact_value(t, point1d(x))); };
    };
    if (lambda > 0.0) p.boundary.left = trace(a);
    if (lambda < 0.0) p.boundary.right = trace(b);
  }
  return p;
}

// Burgers u_t + (u^2/2)_x = 0 with u0 = 0.5 + sin(pi x), periodic on [-1,1].
inline Problem burgers_problem() {
  Problem p;
  p.name = "burgers-sine";
  p.flux = [](double u) { return 0.5 * u * u; };
  p.flux_derivative = [](double u) { return u; };
  detail::attach_scalar_adapters(p);
  p.initial = [](const Point& x) { return State::Constant(1, 0.5 + std::sin(std::numbers::pi * x.x())); };
  return p;
}

// ----------------------------------------------------------------------------
// Euler equations for an ideal gas, U = (rho, rho u, E).

struct EulerState {
  double rho;
  double momentum;
  double total_energy;
  double gamma;

  static EulerState from_conserved(const Eigen::VectorXd& u, double gamma) {
    if (u.size() != 3) throw ArgumentError("Euler state needs three components");
    return {u[0], u[1], u[2], gamma};
  }
  static EulerState from_primitive(double rho, double velocity, double pressure, double gamma) {
    return {rho, rho * velocity, pressure / (gamma - 1.0) + 0.5 * rho * velocity * velocity, gamma};
  }

  double velocity() const { return momentum / rho; }
  double internal_energy() const { return total_energy / rho - 0.5 * velocity() * velocity(); }
  double pressure() const { return (gamma - 1.0) * rho * internal_energy(); }

  void validate() const {
    if (!(rho > 0.0) || !std::isfinite(momentum) || !std::isfinite(total_energy))
      throw StateError("Euler state has nonpositive density or non-finite components");
    if (!(internal_energy() > 0.0) || !(pressure() > 0.0))
      throw StateError("Euler state has nonpositive internal energy or pressure");
  }

  Eigen::VectorXd conserved() const { return Eigen::Vector3d(rho, momentum, total_energy); }
};

// (rho u, rho u^2 + p, u (E + p))
inline Eigen::VectorXd euler_flux(const EulerState& s) {
  s.validate();
  const double u = s.velocity(), p = s.pressure();
  return Eigen::Vector3d(s.momentum, s.momentum * u + p, u * (s.total_energy + p));
}

// |u| + sqrt(gamma p / rho)
inline double euler_wavespeed(const EulerState& s) {
  s.validate();
  return std::abs(s.velocity()) + std::sqrt(s.gamma * s.pressure() / s.rho);
}

struct EulerPrimitive {
  double rho;
  double velocity;
  double pressure;
};

namespace detail {

constexpr double kEulerGamma = 3.0;

inline double smooth_rho0(double x) { return 1.0 + 0.5 * std::sin(std::numbers::pi * x); }
inline double smooth_rho0_dx(double x) { return 0.5 * std::numbers::pi * std::cos(std::numbers::pi * x); }

// Solves x + sign sqrt(3) rho0(y) t - y = 0 for the characteristic foot y.
inline double characteristic_foot(double x, double t, double sign, double tol) {
  const double c = sign * std::sqrt(3.0) * t;
  auto residual = [&](double y) { return x + c * smooth_rho0(y) - y; };
  double y = x;
  double r = residual(y);
  double last = std::abs(r);
  int growth = 0;
  for (int it = 0; it < 100 && std::abs(r) > tol; ++it) {
    const double dr = c * smooth_rho0_dx(y) - 1.0;
    y -= r / dr;
    r = residual(y);
    growth = std::abs(r) > last ? growth + 1 : 0;
    last = std::abs(r);
    if (growth >= 5) break;
  }
  if (std::abs(r) <= tol) return y;
  // Bisection fallback on a bracket of width 2 sqrt(3) t max rho0 around x.
  const double half = std::sqrt(3.0) * std::abs(t) * 1.5 + tol;
  double lo = x - half, hi = x + half;
  double rlo = residual(lo);
  if (rlo * residual(hi) > 0.0) throw OracleError("characteristic foot not bracketed", std::abs(r));
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double rm = residual(mid);
    if (std::abs(rm) <= tol) return mid;
    if ((rm < 0.0) == (rlo < 0.0)) {
      lo = mid;
      rlo = rm;
    } else {
      hi = mid;
    }
  }
  r = residual(0.5 * (lo + hi));
  if (std::abs(r) > tol) throw OracleError("characteristic Newton solve did not converge", std::abs(r));
  return 0.5 * (lo + hi);
}

}  // namespace detail

struct EulerExactResult {
  EulerPrimitive state;
  double foot_plus;      // x1
  double foot_minus;     // x2
  double residual_plus;  // |x + sqrt3 rho0(x1) t - x1|
  double residual_minus;
};

// Exact smooth solution for gamma = 3, rho0 = 1 + sin(pi x)/2, u0 = 0,
// p0 = rho0^3. With gamma = 3 both characteristic families are straight lines
// carrying the Riemann invariants u +- sqrt(3) rho, so
//   rho = (rho0(x1) + rho0(x2)) / 2,   u = sqrt(3) (rho - rho0(x1)),   p = rho^3.
inline EulerExactResult euler_exact_detail(double t, double x, double tol = 1e-13) {
  if (!(tol > 0.0)) throw ArgumentError("oracle tolerance must be positive");
  const double x1 = detail::characteristic_foot(x, t, +1.0, tol);
  const double x2 = detail::characteristic_foot(x, t, -1.0, tol);
  const double r1 = detail::smooth_rho0(x1), r2 = detail::smooth_rho0(x2);
  const double rho = 0.5 * (r1 + r2);
  const double u = std::sqrt(3.0) * (rho - r1);
  const double s3t = std::sqrt(3.0) * t;
  return {{rho, u, rho * rho * rho},
          x1,
          x2,
          std::abs(x + s3t * r1 - x1),
          std::abs(x - s3t * r2 - x2)};
}

inline EulerPrimitive euler_exact(double t, double x, double tol = 1e-13) { return euler_exact_detail(t, x, tol).state; }

inline Problem euler_smooth_problem() {
  Problem p;
  p.name = "euler-smooth";
  p.components = 3;
  const double gamma = detail::kEulerGamma;
  p.system_flux = [gamma](const Eigen::VectorXd& u) { return euler_flux(EulerState::from_conserved(u, gamma)); };
  p.wavespeed = [gamma](const Eigen::VectorXd& u) { return euler_wavespeed(EulerState::from_conserved(u, gamma)); };
  p.initial = [gamma](const Point& x) {
    const double rho = detail::smooth_rho0(x.x());
    return EulerState::from_primitive(rho, 0.0, rho * rho * rho, gamma).conserved();
  };
  p.exact = [gamma](double t, const Point& x) {
    const auto s = euler_exact(t, x.x());
    return EulerState::from_primitive(s.rho, s.velocity, s.pressure, gamma).conserved();
  };
  return p;
}

// CLI names: advect-gauss | advect-cos2 | euler-smooth | advect-2d | burgers-sine.
inline Problem make_problem(std::string_view name, BoundaryKind bc = BoundaryKind::periodic,
                            std::optional<Eigen::Vector2d> velocity = std::nullopt) {
  if (name == "advect-gauss")
    return linear_advection_problem(velocity.value_or(Eigen::Vector2d(1.0, 0.0)), AdvectionProfile::gaussian20, bc);
  if (name == "advect-cos2")
    return linear_advection_problem(velocity.value_or(Eigen::Vector2d(1.0, 0.0)), AdvectionProfile::cos_sq_4pi, bc);
  if (name == "advect-2d")
    return linear_advection_problem(velocity.value_or(Eigen::Vector2d(1.0, 0.0)), AdvectionProfile::two_d_sine, bc, 2);
  if (name == "euler-smooth" || name == "burgers-sine") {
    if (bc != BoundaryKind::periodic) throw ConfigError(std::string(name) + " supports periodic boundaries only");
    if (velocity) throw ConfigError(std::string(name) + " has no advection velocity");
    return name == "euler-smooth" ? euler_smooth_problem() : burgers_problem();
  }
  throw ConfigError("unknown problem '" + std::string(name) + "'");
}

}  // namespace wrbf
