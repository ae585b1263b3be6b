#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "wrbf/errors.hpp"
#include "wrbf/fluxes.hpp"
#include "wrbf/problems.hpp"
#include "wrbf/semidiscretization.hpp"

namespace wrbf {

struct Snapshot {
  double time = 0.0;
  Eigen::MatrixXd state;  // N x components
};

struct ErrorNorms {
  double max = 0.0;
  double l2 = 0.0;
};

struct RunRecord {
  std::vector<double> times;
  std::vector<double> momentum_series;
  std::vector<double> energy_series;
  std::vector<Snapshot> snapshots;
  std::optional<ErrorNorms> final_errors;
  bool blew_up = false;
  double blow_up_time = 0.0;

  void push(double t, double momentum, double energy) {
    times.push_back(t);
    momentum_series.push_back(momentum);
    energy_series.push_back(energy);
  }
};

// int u_N dV: w^T u when constants lie in the trial space, else quadrature
// of the interpolant.
inline double momentum(const WeakOperator& op, const Eigen::VectorXd& u) {
  if (op.space().poly_count() >= 1) return op.load().dot(u);
  const QuadratureRule& rule = op.rule();
  const Eigen::VectorXd values = op.space().cardinal_matrix(rule.nodes) * u;
  return Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), rule.weights.size()).dot(values);
}

// ||u_N||^2 = u^T M u.
inline double energy(const WeakOperator& op, const Eigen::VectorXd& u) { return u.dot(op.mass() * u); }

// Unnormalized nodal norms: max |e_n| and sqrt(sum e_n^2).
inline ErrorNorms error_norms(const Eigen::VectorXd& exact, const Eigen::VectorXd& numeric) {
  if (exact.size() != numeric.size()) throw ArgumentError("error_norms: length mismatch");
  const Eigen::VectorXd e = numeric - exact;
  return {e.size() ? e.cwiseAbs().maxCoeff() : 0.0, e.norm()};
}

// Least-squares slope of log(err) against log(1/N).
inline double convergence_order(const std::vector<int>& ns, const std::vector<double>& errors) {
  if (ns.size() != errors.size() || ns.size() < 2) throw ArgumentError("convergence_order needs >= 2 paired levels");
  const std::size_t m = ns.size();
  double sx = 0.0, sy = 0.0;
  std::vector<double> x(m), y(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(errors[i] > 0.0) || !std::isfinite(errors[i])) throw ArgumentError("convergence_order: errors must be positive");
    if (ns[i] <= 0) throw ArgumentError("convergence_order: N must be positive");
    x[i] = -std::log(static_cast<double>(ns[i]));
    y[i] = std::log(errors[i]);
    sx += x[i];
    sy += y[i];
  }
  sx /= m;
  sy /= m;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxy += (x[i] - sx) * (y[i] - sy);
    sxx += (x[i] - sx) * (x[i] - sx);
  }
  if (sxx == 0.0) throw ArgumentError("convergence_order: N values must differ");
  return sxy / sxx;
}

struct IdentityResiduals {
  double conservation = 0.0;
  // Undefined for nonlinear problems.
  std::optional<double> energy_rate;
  // Sizes for relative tolerances: max(sum |w_i du_i|, |f_R|, |f_L|, 1) and
  // max(2 sum |u_i (M du)_i|, lambda u_R^2, lambda u_L^2, 1), i.e. the
  // magnitudes the rounding error of each inner product scales with.
  double conservation_scale = 1.0;
  double energy_scale = 1.0;
};

// conservation = w^T du/dt + (f^num_R - f^num_L)
// energy_rate  = 2 u^T M du/dt - [lambda (u_R^2 - u_L^2) - 2 (f^num_R u_R - f^num_L u_L)]
inline IdentityResiduals identity_residuals(const WeakOperator& op, const NumericalFlux& flux,
                                            const Problem& problem, double t, const Eigen::VectorXd& u,
                                            bool analytical = false) {
  const WeakRhsResult res = analytical ? weak_analytical_rhs_detail(op, flux, problem, t, u)
                                       : weak_collocation_rhs_detail(op, flux, problem, t, u);
  const BoundaryFluxes& b = res.boundary;
  IdentityResiduals out;
  const double rate = op.load().dot(res.dudt);
  out.conservation = rate + (b.flux_right - b.flux_left);
  const double rate_size = op.load().cwiseProduct(res.dudt).cwiseAbs().sum();
  out.conservation_scale = std::max({rate_size, std::abs(b.flux_right), std::abs(b.flux_left), 1.0});
  if (problem.is_linear()) {
    const double lambda = problem.velocity->x();
    const Eigen::VectorXd Mdu = op.mass() * res.dudt;
    const double lhs = 2.0 * u.dot(Mdu);
    const double rhs = lambda * (b.trace_right * b.trace_right - b.trace_left * b.trace_left) -
                       2.0 * (b.flux_right * b.trace_right - b.flux_left * b.trace_left);
    out.energy_rate = lhs - rhs;
    out.energy_scale = std::max({2.0 * u.cwiseProduct(Mdu).cwiseAbs().sum(), std::abs(lambda) * b.trace_right * b.trace_right,
                                 std::abs(lambda) * b.trace_left * b.trace_left, 1.0});
  }
  return out;
}

}  // namespace wrbf
