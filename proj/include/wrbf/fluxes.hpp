#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "wrbf/errors.hpp"

namespace wrbf {

using ScalarFlux = std::function<double(double)>;
using SystemFlux = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using Wavespeed = std::function<double(const Eigen::VectorXd&)>;

// f^num(a, b) = lambda a for lambda >= 0, lambda b otherwise.
inline double upwind_flux(double lambda, double a, double b) { return lambda >= 0.0 ? lambda * a : lambda * b; }

inline double central_flux(const ScalarFlux& f, double a, double b) { return 0.5 * (f(a) + f(b)); }

namespace detail {

inline double checked(const ScalarFlux& f, double u) {
  const double v = f(u);
  if (!std::isfinite(v)) throw StateError("flux is not finite at u = " + std::to_string(u));
  return v;
}

}  // namespace detail

// Godunov flux: min of f over [a, b] if a <= b, max over [b, a] otherwise.
//
// Interior extrema are located without f': a 1024-point grid is scanned for
// sign changes of the centered difference of f, and each bracket is refined
// by bisection to 1e-12. Endpoints and all grid samples are candidates too.
inline double godunov_flux(const ScalarFlux& f, double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw StateError("Godunov flux called with non-finite state");
  if (a == b) return detail::checked(f, a);
  const bool minimize = a < b;
  const double lo = std::min(a, b), hi = std::max(a, b);
  auto better = [minimize](double x, double y) { return minimize ? x < y : x > y; };

  constexpr int kGrid = 1024;
  const double h = (hi - lo) / (kGrid - 1);
  std::vector<double> values(kGrid);
  for (int i = 0; i < kGrid; ++i) values[i] = detail::checked(f, i == kGrid - 1 ? hi : lo + i * h);
  double best = values[0];
  for (double v : values)
    if (better(v, best)) best = v;

  const double dh = std::max(1e-7 * (hi - lo), 1e-13);
  auto slope = [&](double u) { return detail::checked(f, u + dh) - detail::checked(f, u - dh); };
  // Centered differences at interior grid points.
  for (int i = 1; i + 2 < kGrid; ++i) {
    const double s0 = values[i + 1] - values[i - 1];
    const double s1 = values[i + 2] - values[i];
    if (!((s0 < 0.0 && s1 > 0.0) || (s0 > 0.0 && s1 < 0.0))) continue;
    double left = lo + i * h, right = lo + (i + 1) * h;
    double sl = slope(left);
    while (right - left > 1e-12) {
      const double mid = 0.5 * (left + right);
      const double sm = slope(mid);
      if ((sm < 0.0) == (sl < 0.0)) {
        left = mid;
        sl = sm;
      } else {
        right = mid;
      }
    }
    const double v = detail::checked(f, 0.5 * (left + right));
    if (better(v, best)) best = v;
  }
  return best;
}

// 0.5 (F(UL) + F(UR)) - 0.5 max(s(UL), s(UR)) (UR - UL).
inline Eigen::VectorXd rusanov_flux(const SystemFlux& flux, const Wavespeed& speed, const Eigen::VectorXd& left,
                                    const Eigen::VectorXd& right) {
  if (left.size() != right.size()) throw ArgumentError("Rusanov flux states differ in length");
  const double sl = speed(left), sr = speed(right);
  if (!std::isfinite(sl) || !std::isfinite(sr) || sl < 0.0 || sr < 0.0)
    throw StateError("invalid wave speed in Rusanov flux");
  return 0.5 * (flux(left) + flux(right)) - 0.5 * std::max(sl, sr) * (right - left);
}

enum class FluxKind { upwind, godunov, central, rusanov };

inline FluxKind parse_flux_kind(std::string_view name) {
  if (name == "upwind") return FluxKind::upwind;
  if (name == "godunov") return FluxKind::godunov;
  if (name == "central") return FluxKind::central;
  if (name == "rusanov") return FluxKind::rusanov;
  throw ConfigError("unknown numerical flux '" + std::string(name) + "'");
}

inline std::string flux_kind_name(FluxKind kind) {
  switch (kind) {
    case FluxKind::upwind: return "upwind";
    case FluxKind::godunov: return "godunov";
    case FluxKind::central: return "central";
    case FluxKind::rusanov: return "rusanov";
  }
  return "unknown";
}

// A numerical flux bound to the physical flux it approximates. Scalar
// problems evaluate through scalar(); systems (and Rusanov) through system().
class NumericalFlux {
 public:
  static NumericalFlux upwind(double lambda) {
    NumericalFlux nf(FluxKind::upwind);
    nf.lambda_ = lambda;
    nf.flux_ = [lambda](double u) { return lambda * u; };
    return nf;
  }
  static NumericalFlux godunov(ScalarFlux f) {
    NumericalFlux nf(FluxKind::godunov);
    nf.flux_ = std::move(f);
    return nf;
  }
  static NumericalFlux central(ScalarFlux f) {
    NumericalFlux nf(FluxKind::central);
    nf.flux_ = std::move(f);
    return nf;
  }
  static NumericalFlux rusanov(SystemFlux f, Wavespeed s) {
    NumericalFlux nf(FluxKind::rusanov);
    nf.system_flux_ = std::move(f);
    nf.speed_ = std::move(s);
    return nf;
  }
  // Scalar Rusanov flux with wave speed |f'(u)|.
  static NumericalFlux rusanov(ScalarFlux f, ScalarFlux df) {
    NumericalFlux nf(FluxKind::rusanov);
    nf.flux_ = f;
    nf.system_flux_ = [f](const Eigen::VectorXd& u) { return Eigen::VectorXd::Constant(1, f(u[0])); };
    nf.speed_ = [df](const Eigen::VectorXd& u) { return std::abs(df(u[0])); };
    return nf;
  }

  FluxKind kind() const noexcept { return kind_; }
  double lambda() const noexcept { return lambda_; }

  double scalar(double a, double b) const {
    switch (kind_) {
      case FluxKind::upwind: return upwind_flux(lambda_, a, b);
      case FluxKind::godunov: return godunov_flux(flux_, a, b);
      case FluxKind::central: return central_flux(flux_, a, b);
      case FluxKind::rusanov:
        return rusanov_flux(system_flux_, speed_, Eigen::VectorXd::Constant(1, a), Eigen::VectorXd::Constant(1, b))[0];
    }
    return 0.0;
  }

  Eigen::VectorXd system(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    if (kind_ == FluxKind::rusanov) return rusanov_flux(system_flux_, speed_, a, b);
    if (a.size() != 1) throw ArgumentError(flux_kind_name(kind_) + " flux is scalar-only");
    return Eigen::VectorXd::Constant(1, scalar(a[0], b[0]));
  }

 private:
  explicit NumericalFlux(FluxKind kind) : kind_(kind) {}

  FluxKind kind_;
  double lambda_ = 0.0;
  ScalarFlux flux_;
  SystemFlux system_flux_;
  Wavespeed speed_;
};

}  // namespace wrbf
