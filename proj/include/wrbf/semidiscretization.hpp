#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "wrbf/errors.hpp"
#include "wrbf/fluxes.hpp"
#include "wrbf/problems.hpp"
#include "wrbf/quadrature.hpp"
#include "wrbf/rbf_space.hpp"

namespace wrbf {

// Traces of the cardinal basis on a pair of opposite edges of a rectangle,
// sampled at matching tangential quadrature nodes.
struct EdgePair {
  Eigen::MatrixXd lower;  // l_n on the edge {x_axis = a}
  Eigen::MatrixXd upper;  // l_n on the edge {x_axis = b}
  Eigen::VectorXd weights;
  // M^{-1} lower^T and M^{-1} upper^T.
  Eigen::MatrixXd lift_lower;
  Eigen::MatrixXd lift_upper;
};

// The Galerkin matrices of the weak form in the cardinal basis of V_{N,P}:
//   M_nm = int l_n l_m,   B^(axis)_mn = int (d l_m / d axis) l_n,
// boundary traces l_m = l_m(a), r_m = l_m(b) in 1D (edge tables in 2D), and
// the load vector w = M 1. Immutable after construction.
class WeakOperator {
 public:
  WeakOperator(SpacePtr space, QuadratureRule rule) : space_(std::move(space)), rule_(std::move(rule)) {
    if (rule_.dim != space_->dim()) throw ArgumentError("quadrature dimension does not match the domain");
    assemble();
  }

  const RbfSpace& space() const noexcept { return *space_; }
  const SpacePtr& space_ptr() const noexcept { return space_; }
  const QuadratureRule& rule() const noexcept { return rule_; }
  int size() const noexcept { return space_->size(); }
  int dim() const noexcept { return space_->dim(); }

  const Eigen::MatrixXd& mass() const noexcept { return mass_; }
  const Eigen::MatrixXd& advection(int axis = 0) const { return advection_.at(axis); }
  const Eigen::VectorXd& left_trace() const noexcept { return left_; }
  const Eigen::VectorXd& right_trace() const noexcept { return right_; }
  const Eigen::VectorXd& load() const noexcept { return load_; }
  double mass_condition() const noexcept { return mass_condition_; }
  // max-norm violation of the discrete integration-by-parts identity.
  double sbp_defect() const noexcept { return sbp_defect_; }

  Eigen::VectorXd solve_mass(const Eigen::VectorXd& rhs) const { return mass_llt_.solve(rhs); }

  // M^{-1} B^(axis), M^{-1} l, M^{-1} r.
  const Eigen::MatrixXd& stiffness(int axis = 0) const { return stiffness_.at(axis); }
  const Eigen::VectorXd& lifted_left() const noexcept { return lift_left_; }
  const Eigen::VectorXd& lifted_right() const noexcept { return lift_right_; }

  // 1D only: cardinal values/derivatives at the rule nodes and
  // M^{-1} E'^T W used by the analytical-flux form.
  const Eigen::MatrixXd& values_at_rule() const noexcept { return values_; }
  const Eigen::MatrixXd& derivatives_at_rule() const noexcept { return derivatives_; }
  const Eigen::MatrixXd& analytical_lift() const noexcept { return analytical_lift_; }

  // 2D only: edge tables for axis 0 (west/east) and axis 1 (south/north).
  const EdgePair& edges(int axis) const { return edges_.at(axis); }

 private:
  void assemble() {
    const int n = size();
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(rule_.weights.data(), rule_.weights.size());
    Eigen::MatrixXd values = space_->cardinal_matrix(rule_.nodes);
    mass_ = values.transpose() * w.asDiagonal() * values;
    mass_ = (0.5 * (mass_ + mass_.transpose())).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(mass_, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff(), hi = eig.eigenvalues().maxCoeff();
    mass_condition_ = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    mass_llt_.compute(mass_);
    if (mass_llt_.info() != Eigen::Success || !(lo > 0.0))
      throw FactorizationError("mass matrix is not positive definite (condition estimate " +
                                   std::to_string(mass_condition_) + ")",
                               mass_condition_);
    load_ = mass_ * Eigen::VectorXd::Ones(n);

    Eigen::MatrixXd weighted_values = w.asDiagonal() * values;
    for (int axis = 0; axis < dim(); ++axis) {
      Eigen::MatrixXd deriv = space_->cardinal_derivative_matrix(rule_.nodes, axis);
      advection_.push_back(deriv.transpose() * weighted_values);
      stiffness_.push_back(mass_llt_.solve(advection_.back()));
      if (dim() == 1) {
        analytical_lift_ = mass_llt_.solve(deriv.transpose() * w.asDiagonal());
        derivatives_ = std::move(deriv);
      }
    }

    const Domain& d = space_->domain();
    if (dim() == 1) {
      values_ = std::move(values);
      const Eigen::MatrixXd ends = space_->cardinal_matrix({point1d(d.lower(0)), point1d(d.upper(0))});
      left_ = ends.row(0).transpose();
      right_ = ends.row(1).transpose();
      lift_left_ = mass_llt_.solve(left_);
      lift_right_ = mass_llt_.solve(right_);
      const Eigen::MatrixXd defect =
          advection_[0] + advection_[0].transpose() - (right_ * right_.transpose() - left_ * left_.transpose());
      sbp_defect_ = defect.cwiseAbs().maxCoeff();
      return;
    }

    if (rule_.factors.size() != 2) throw ArgumentError("2D assembly needs a tensor-product rule");
    sbp_defect_ = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
      // Tangential nodes come from the other factor.
      const QuadratureRule& tangential = rule_.factors[1 - axis];
      std::vector<Point> lower, upper;
      for (const auto& q : tangential.nodes) {
        Point lo_pt, hi_pt;
        lo_pt[axis] = d.lower(axis);
        hi_pt[axis] = d.upper(axis);
        lo_pt[1 - axis] = hi_pt[1 - axis] = q.x();
        lower.push_back(lo_pt);
        upper.push_back(hi_pt);
      }
      EdgePair e;
      e.lower = space_->cardinal_matrix(lower);
      e.upper = space_->cardinal_matrix(upper);
      e.weights = Eigen::Map<const Eigen::VectorXd>(tangential.weights.data(), tangential.weights.size());
      e.lift_lower = mass_llt_.solve(e.lower.transpose());
      e.lift_upper = mass_llt_.solve(e.upper.transpose());
      const Eigen::MatrixXd boundary = e.upper.transpose() * e.weights.asDiagonal() * e.upper -
                                       e.lower.transpose() * e.weights.asDiagonal() * e.lower;
      const Eigen::MatrixXd defect = advection_[axis] + advection_[axis].transpose() - boundary;
      sbp_defect_ = std::max(sbp_defect_, defect.cwiseAbs().maxCoeff());
      edges_.push_back(std::move(e));
    }
  }

  SpacePtr space_;
  QuadratureRule rule_;
  Eigen::MatrixXd mass_;
  Eigen::LLT<Eigen::MatrixXd> mass_llt_;
  double mass_condition_ = 0.0;
  std::vector<Eigen::MatrixXd> advection_;
  std::vector<Eigen::MatrixXd> stiffness_;
  Eigen::VectorXd left_, right_, lift_left_, lift_right_;
  Eigen::VectorXd load_;
  double sbp_defect_ = 0.0;
  Eigen::MatrixXd values_, derivatives_, analytical_lift_;
  std::vector<EdgePair> edges_;
};

inline WeakOperator assemble_weak_operator(const SpacePtr& space, const QuadratureRule& rule) {
  return WeakOperator(space, rule);
}

// ----------------------------------------------------------------------------
// Weak right-hand sides (1D scalar).

// Boundary data and numerical fluxes of one weak RHS evaluation.
struct BoundaryFluxes {
  double trace_left = 0.0;   // u_N(a)
  double trace_right = 0.0;  // u_N(b)
  double flux_left = 0.0;    // f^num_L
  double flux_right = 0.0;   // f^num_R
};

struct WeakRhsResult {
  Eigen::VectorXd dudt;
  BoundaryFluxes boundary;
};

namespace detail {

inline void check_finite(const Eigen::VectorXd& u) {
  if (!u.allFinite()) throw StateError("state contains non-finite values");
}

inline void check_scalar_1d(const WeakOperator& op, const Problem& problem) {
  if (op.dim() != 1) throw ArgumentError("this right-hand side is for 1D operators");
  if (!problem.is_scalar()) throw ArgumentError("this right-hand side is for scalar problems");
}

// Periodic: f^num_L = f^num_R = f^num(u_R, u_L). Inflow: f^num_L =
// f^num(g_L, u_L), f^num_R = f^num(u_R, g_R); a side without data uses its
// own trace.
inline BoundaryFluxes scalar_boundary_fluxes(const WeakOperator& op, const NumericalFlux& flux,
                                             const Problem& problem, double t, const Eigen::VectorXd& u) {
  BoundaryFluxes b;
  b.trace_left = op.left_trace().dot(u);
  b.trace_right = op.right_trace().dot(u);
  if (problem.boundary.kind == BoundaryKind::periodic) {
    b.flux_left = b.flux_right = flux.scalar(b.trace_right, b.trace_left);
  } else {
    const double gl = problem.boundary.left ? problem.boundary.left(t)[0] : b.trace_left;
    const double gr = problem.boundary.right ? problem.boundary.right(t)[0] : b.trace_right;
    b.flux_left = flux.scalar(gl, b.trace_left);
    b.flux_right = flux.scalar(b.trace_right, gr);
  }
  return b;
}

}  // namespace detail

// Collocation form: f_N interpolates f(u_n), so
//   M du/dt = B f(u) - (f^num_R r - f^num_L l).
inline WeakRhsResult weak_collocation_rhs_detail(const WeakOperator& op, const NumericalFlux& flux,
                                                 const Problem& problem, double t, const Eigen::VectorXd& u) {
  detail::check_scalar_1d(op, problem);
  detail::check_finite(u);
  Eigen::VectorXd f(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) f[i] = problem.flux(u[i]);
  WeakRhsResult out;
  out.boundary = detail::scalar_boundary_fluxes(op, flux, problem, t, u);
  out.dudt = op.stiffness() * f - out.boundary.flux_right * op.lifted_right() +
             out.boundary.flux_left * op.lifted_left();
  return out;
}

inline Eigen::VectorXd weak_collocation_rhs(const WeakOperator& op, const NumericalFlux& flux, const Problem& problem,
                                            double t, const Eigen::VectorXd& u) {
  return weak_collocation_rhs_detail(op, flux, problem, t, u).dudt;
}

// Analytical form: f is applied to the interpolant at the quadrature nodes,
//   M du/dt = E'^T W f(E u) - (f^num_R r - f^num_L l).
inline WeakRhsResult weak_analytical_rhs_detail(const WeakOperator& op, const NumericalFlux& flux,
                                                const Problem& problem, double t, const Eigen::VectorXd& u) {
  detail::check_scalar_1d(op, problem);
  detail::check_finite(u);
  Eigen::VectorXd uq = op.values_at_rule() * u;
  for (Eigen::Index q = 0; q < uq.size(); ++q) uq[q] = problem.flux(uq[q]);
  WeakRhsResult out;
  out.boundary = detail::scalar_boundary_fluxes(op, flux, problem, t, u);
  out.dudt = op.analytical_lift() * uq - out.boundary.flux_right * op.lifted_right() +
             out.boundary.flux_left * op.lifted_left();
  return out;
}

inline Eigen::VectorXd weak_analytical_rhs(const WeakOperator& op, const NumericalFlux& flux, const Problem& problem,
                                           double t, const Eigen::VectorXd& u) {
  return weak_analytical_rhs_detail(op, flux, problem, t, u).dudt;
}

// Systems: the scalar matrices act on every component; the system flux
// couples the periodic traces. U is N x components.
inline Eigen::MatrixXd weak_collocation_rhs_system(const WeakOperator& op, const NumericalFlux& flux,
                                                   const Problem& problem, double t, const Eigen::MatrixXd& U) {
  if (op.dim() != 1) throw ArgumentError("system right-hand side is for 1D operators");
  if (!U.allFinite()) throw StateError("state contains non-finite values");
  const Eigen::Index n = U.rows(), c = U.cols();
  Eigen::MatrixXd F(n, c);
  for (Eigen::Index i = 0; i < n; ++i) F.row(i) = problem.system_flux(U.row(i).transpose()).transpose();
  const Eigen::VectorXd ul = U.transpose() * op.left_trace();
  const Eigen::VectorXd ur = U.transpose() * op.right_trace();
  Eigen::VectorXd fl, fr;
  if (problem.boundary.kind == BoundaryKind::periodic) {
    fl = fr = flux.system(ur, ul);
  } else {
    const Eigen::VectorXd gl = problem.boundary.left ? problem.boundary.left(t) : ul;
    const Eigen::VectorXd gr = problem.boundary.right ? problem.boundary.right(t) : ur;
    fl = flux.system(gl, ul);
    fr = flux.system(ur, gr);
  }
  return op.stiffness() * F - op.lifted_right() * fr.transpose() + op.lifted_left() * fl.transpose();
}

// ----------------------------------------------------------------------------
// Two-dimensional weak collocation for linear advection on a rectangle with
// periodic boundaries. On each edge the interior trace a is paired with the
// wrapped trace b from the opposite edge:
//   F^num . n = (lambda . n) a  if lambda . n >= 0,  (lambda . n) b  otherwise
// (central: (lambda . n)(a + b)/2).

namespace detail {

inline double normal_flux(FluxKind kind, double lambda_n, double inner, double outer) {
  if (kind == FluxKind::central) return 0.5 * lambda_n * (inner + outer);
  return upwind_flux(lambda_n, inner, outer);
}

}  // namespace detail

inline Eigen::VectorXd weak_collocation_rhs_2d(const WeakOperator& op, const NumericalFlux& flux,
                                               const Problem& problem, double /*t*/, const Eigen::VectorXd& u) {
  if (op.dim() != 2 || problem.domain.dim() != 2) throw ArgumentError("unsupported domain: 2D rectangle required");
  if (!problem.velocity) throw ArgumentError("2D weak method supports linear advection only");
  if (problem.boundary.kind != BoundaryKind::periodic)
    throw ArgumentError("2D weak method supports periodic boundaries only");
  detail::check_finite(u);
  const Eigen::Vector2d lambda = *problem.velocity;
  Eigen::VectorXd du = lambda.x() * (op.stiffness(0) * u) + lambda.y() * (op.stiffness(1) * u);
  for (int axis = 0; axis < 2; ++axis) {
    const EdgePair& e = op.edges(axis);
    const Eigen::VectorXd lo = e.lower * u, hi = e.upper * u;
    Eigen::VectorXd flux_lo(lo.size()), flux_hi(hi.size());
    for (Eigen::Index q = 0; q < lo.size(); ++q) {
      flux_hi[q] = detail::normal_flux(flux.kind(), lambda[axis], hi[q], lo[q]) * e.weights[q];
      flux_lo[q] = detail::normal_flux(flux.kind(), -lambda[axis], lo[q], hi[q]) * e.weights[q];
    }
    du -= e.lift_upper * flux_hi + e.lift_lower * flux_lo;
  }
  return du;
}

// ----------------------------------------------------------------------------
// Strong collocation baseline: du/dt = -D f(u) at the centers, with the
// boundary treatment applied after every stage.

enum class StrongBoundary { none, inject_inflow, inject_periodic };

inline StrongBoundary parse_strong_boundary(std::string_view name) {
  if (name == "none") return StrongBoundary::none;
  if (name == "inflow") return StrongBoundary::inject_inflow;
  if (name == "periodic") return StrongBoundary::inject_periodic;
  throw ConfigError("unknown strong boundary mode '" + std::string(name) + "'");
}

inline std::string strong_boundary_name(StrongBoundary mode) {
  switch (mode) {
    case StrongBoundary::none: return "none";
    case StrongBoundary::inject_inflow: return "inflow";
    case StrongBoundary::inject_periodic: return "periodic";
  }
  return "none";
}

class StrongOperator {
 public:
  StrongOperator(SpacePtr space, StrongBoundary mode) : space_(std::move(space)), mode_(mode) {
    const auto& centers = space_->nodes().points();
    for (int axis = 0; axis < space_->dim(); ++axis)
      diff_.push_back(space_->cardinal_derivative_matrix(centers, axis));
  }

  const RbfSpace& space() const noexcept { return *space_; }
  const Eigen::MatrixXd& differentiation(int axis = 0) const { return diff_.at(axis); }
  StrongBoundary boundary_mode() const noexcept { return mode_; }

 private:
  SpacePtr space_;
  std::vector<Eigen::MatrixXd> diff_;
  StrongBoundary mode_;
};

inline Eigen::VectorXd strong_collocation_rhs(const StrongOperator& op, const Problem& problem, double /*t*/,
                                              const Eigen::VectorXd& u) {
  detail::check_finite(u);
  if (!problem.is_scalar()) throw ArgumentError("scalar strong right-hand side called for a system");
  if (op.space().dim() == 2) {
    if (!problem.velocity) throw ArgumentError("2D strong method supports linear advection only");
    const Eigen::Vector2d lambda = *problem.velocity;
    return -(lambda.x() * (op.differentiation(0) * u) + lambda.y() * (op.differentiation(1) * u));
  }
  Eigen::VectorXd f(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) f[i] = problem.flux(u[i]);
  return -(op.differentiation(0) * f);
}

inline Eigen::MatrixXd strong_collocation_rhs_system(const StrongOperator& op, const Problem& problem, double /*t*/,
                                                     const Eigen::MatrixXd& U) {
  if (!U.allFinite()) throw StateError("state contains non-finite values");
  Eigen::MatrixXd F(U.rows(), U.cols());
  for (Eigen::Index i = 0; i < U.rows(); ++i) F.row(i) = problem.system_flux(U.row(i).transpose()).transpose();
  return -(op.differentiation(0) * F);
}

// Overwrites inflow-boundary nodes of U (N x components) according to the
// operator's boundary mode. In 1D the inflow node is the left-most center
// (right-most when the advection speed is negative); in 2D every center on
// an inflow edge is overwritten.
class StrongBoundaryEnforcer {
 public:
  StrongBoundaryEnforcer(const StrongOperator& op, const Problem& problem) : mode_(op.boundary_mode()) {
    if (mode_ == StrongBoundary::none) return;
    const RbfSpace& space = op.space();
    const Domain& d = space.domain();
    const auto& centers = space.nodes().points();
    Eigen::Vector2d direction(1.0, 0.0);
    if (problem.velocity) direction = *problem.velocity;
    std::vector<Point> wrapped;
    for (int n = 0; n < space.size(); ++n) {
      const Point& x = centers[n];
      if (d.dim() == 1) {
        const bool right_inflow = direction.x() < 0.0;
        if (n != (right_inflow ? space.size() - 1 : 0)) continue;
        nodes_.push_back(n);
        wrapped.push_back(point1d(right_inflow ? d.lower(0) : d.upper(0)));
        continue;
      }
      Point target = x;
      bool on_inflow = false;
      for (int axis = 0; axis < 2; ++axis) {
        const double tol = 1e-12 * d.width(axis);
        if (direction[axis] > 0.0 && std::abs(x[axis] - d.lower(axis)) <= tol) {
          on_inflow = true;
          target[axis] = d.upper(axis);
        } else if (direction[axis] < 0.0 && std::abs(x[axis] - d.upper(axis)) <= tol) {
          on_inflow = true;
          target[axis] = d.lower(axis);
        }
      }
      if (on_inflow) {
        nodes_.push_back(n);
        wrapped.push_back(target);
      }
    }
    if (mode_ == StrongBoundary::inject_periodic) {
      traces_ = space.cardinal_matrix(wrapped);
      return;
    }
    // Inflow injection: prescribed data, else the exact solution.
    for (int n : nodes_) {
      const Point x = centers[n];
      if (d.dim() == 1 && problem.boundary.kind == BoundaryKind::inflow) {
        const auto& data = direction.x() < 0.0 ? problem.boundary.right : problem.boundary.left;
        if (data) {
          data_.push_back([data](double t) { return data(t); });
          continue;
        }
      }
      if (!problem.exact) throw ConfigError("inflow injection needs boundary data or an exact solution");
      auto exact = problem.exact;
      data_.push_back([exact, x](double t) { return exact(t, x); });
    }
  }

  void apply(double t, Eigen::MatrixXd& U) const {
    if (mode_ == StrongBoundary::none || nodes_.empty()) return;
    if (mode_ == StrongBoundary::inject_periodic) {
      const Eigen::MatrixXd values = traces_ * U;
      for (std::size_t i = 0; i < nodes_.size(); ++i) U.row(nodes_[i]) = values.row(i);
      return;
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) U.row(nodes_[i]) = data_[i](t).transpose();
  }

  const std::vector<int>& boundary_nodes() const noexcept { return nodes_; }

 private:
  StrongBoundary mode_;
  std::vector<int> nodes_;
  Eigen::MatrixXd traces_;
  std::vector<std::function<State(double)>> data_;
};

// ----------------------------------------------------------------------------

// Row-major text dump, one row per line, 17 significant digits.
inline void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.16e", m(i, j));
      if (j) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace wrbf
