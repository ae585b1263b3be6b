#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wrbf/errors.hpp"
#include "wrbf/geometry.hpp"
#include "wrbf/kernels.hpp"

namespace wrbf {

// Condition estimates above this are reported as a warning by callers.
inline constexpr double kConditionWarning = 1e12;

// The trial space V_{N,P}: kernel translates at the centers plus polynomials
// of total degree <= P-1, with the moment constraints sum_n alpha_n p_k(x_n) = 0.
//
// The polynomial basis is the monomial basis in coordinates centered at the
// domain midpoint and scaled by the half-width, ordered by total degree.
// The saddle matrix V = [[Phi, P^T], [P, 0]] is LU-factorized once; the
// cardinal coefficients V^{-1} [I; 0] are kept so that any cardinal
// (Lagrange) evaluation is one matrix product.
class RbfSpace {
 public:
  RbfSpace(Kernel kernel, NodeSet nodes, int poly_count)
      : kernel_(kernel), nodes_(std::move(nodes)), poly_count_(poly_count) {
    if (poly_count_ < 0) throw ArgumentError("polynomial count P must be nonnegative");
    const int dim = nodes_.domain().dim();
    for (int deg = 0; deg < poly_count_; ++deg)
      for (int i = deg; i >= 0; --i) {
        if (dim == 1 && i != deg) break;
        exponents_.emplace_back(i, deg - i);
      }
    const Point mid = nodes_.domain().midpoint();
    origin_ = mid;
    scale_ = Point(0.5 * nodes_.domain().width(0), dim == 2 ? 0.5 * nodes_.domain().width(1) : 1.0);
    assemble_and_factor();
  }

  const Kernel& kernel() const noexcept { return kernel_; }
  const NodeSet& nodes() const noexcept { return nodes_; }
  const Domain& domain() const noexcept { return nodes_.domain(); }
  int dim() const noexcept { return nodes_.domain().dim(); }
  int poly_count() const noexcept { return poly_count_; }
  // Number of centers N.
  int size() const noexcept { return static_cast<int>(nodes_.size()); }
  // Number of polynomial basis functions K.
  int poly_size() const noexcept { return static_cast<int>(exponents_.size()); }
  const Eigen::MatrixXd& saddle_matrix() const noexcept { return saddle_; }
  double condition_estimate() const noexcept { return condition_; }
  bool ill_conditioned() const noexcept { return condition_ > kConditionWarning; }
  const std::vector<std::pair<int, int>>& monomial_exponents() const noexcept { return exponents_; }

  // p_k(x) for k = 1..K.
  Eigen::VectorXd polynomial_values(const Point& x) const {
    Eigen::VectorXd out(poly_size());
    const double s = (x.x() - origin_.x()) / scale_.x();
    const double t = (x.y() - origin_.y()) / scale_.y();
    for (int k = 0; k < poly_size(); ++k)
      out[k] = detail::ipow(s, exponents_[k].first) * detail::ipow(t, exponents_[k].second);
    return out;
  }

  Eigen::VectorXd polynomial_derivatives(const Point& x, int axis) const {
    Eigen::VectorXd out(poly_size());
    const double s = (x.x() - origin_.x()) / scale_.x();
    const double t = (x.y() - origin_.y()) / scale_.y();
    for (int k = 0; k < poly_size(); ++k) {
      auto [i, j] = exponents_[k];
      if (axis == 0)
        out[k] = i == 0 ? 0.0 : i * detail::ipow(s, i - 1) * detail::ipow(t, j) / scale_.x();
      else
        out[k] = j == 0 ? 0.0 : j * detail::ipow(s, i) * detail::ipow(t, j - 1) / scale_.y();
    }
    return out;
  }

  // Row [phi(eps|x - x_1|), ..., phi(eps|x - x_N|), p_1(x), ..., p_K(x)].
  Eigen::RowVectorXd basis_row(const Point& x) const {
    Eigen::RowVectorXd row(size() + poly_size());
    for (int n = 0; n < size(); ++n) row[n] = eval_kernel(kernel_, distance(x, nodes_[n]));
    if (poly_size() > 0) row.tail(poly_size()) = polynomial_values(x).transpose();
    return row;
  }

  Eigen::RowVectorXd basis_derivative_row(const Point& x, int axis) const {
    check_axis(axis);
    Eigen::RowVectorXd row(size() + poly_size());
    for (int n = 0; n < size(); ++n) {
      const Point diff = x - nodes_[n];
      const double r = dim() == 1 ? std::abs(diff.x()) : diff.norm();
      if (r == 0.0) {
        if (!radial_derivative_vanishes_at_origin(kernel_))
          throw SingularPointError("derivative of " + kernel_.name() + " undefined at a center");
        row[n] = 0.0;
      } else {
        row[n] = diff[axis] / r * eval_kernel_dr(kernel_, r);
      }
    }
    if (poly_size() > 0) row.tail(poly_size()) = polynomial_derivatives(x, axis).transpose();
    return row;
  }

  // Solves V z = rhs with the stored factorization.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const { return lu_.solve(rhs); }

  // (N+K) x N matrix V^{-1} [I_N; 0]: column n holds (alpha, beta) of l_n.
  const Eigen::MatrixXd& cardinal_coefficients() const noexcept { return cardinal_coeffs_; }

  // Entry (m, n) = l_n(points[m]).
  Eigen::MatrixXd cardinal_matrix(const std::vector<Point>& points) const {
    Eigen::MatrixXd rows(points.size(), size() + poly_size());
    for (std::size_t m = 0; m < points.size(); ++m) rows.row(m) = basis_row(points[m]);
    return rows * cardinal_coeffs_;
  }

  // Entry (m, n) = d l_n / d axis at points[m].
  Eigen::MatrixXd cardinal_derivative_matrix(const std::vector<Point>& points, int axis) const {
    Eigen::MatrixXd rows(points.size(), size() + poly_size());
    for (std::size_t m = 0; m < points.size(); ++m) rows.row(m) = basis_derivative_row(points[m], axis);
    return rows * cardinal_coeffs_;
  }

 private:
  double distance(const Point& x, const Point& c) const {
    return dim() == 1 ? std::abs(x.x() - c.x()) : (x - c).norm();
  }

  void check_axis(int axis) const {
    if (axis < 0 || axis >= dim()) throw ArgumentError("derivative axis out of range");
  }

  void assemble_and_factor() {
    const int n = size();
    const int k = poly_size();
    saddle_ = Eigen::MatrixXd::Zero(n + k, n + k);
    for (int i = 0; i < n; ++i) {
      saddle_(i, i) = eval_kernel(kernel_, 0.0);
      for (int j = i + 1; j < n; ++j) {
        const double v = eval_kernel(kernel_, distance(nodes_[i], nodes_[j]));
        saddle_(i, j) = v;
        saddle_(j, i) = v;
      }
    }
    if (k > 0) {
      Eigen::MatrixXd poly(k, n);
      for (int j = 0; j < n; ++j) poly.col(j) = polynomial_values(nodes_[j]);
      Eigen::FullPivLU<Eigen::MatrixXd> rank_check(poly);
      rank_check.setThreshold(1e-12);
      if (rank_check.rank() < k)
        throw InvalidNodesError("centers are not unisolvent for polynomials of degree " +
                                std::to_string(poly_count_ - 1));
      saddle_.bottomLeftCorner(k, n) = poly;
      saddle_.topRightCorner(n, k) = poly.transpose();
    }
    lu_.compute(saddle_);
    const double rcond = lu_.rcond();
    condition_ = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!std::isfinite(condition_) || rcond < std::numeric_limits<double>::epsilon())
      throw FactorizationError("interpolation matrix is numerically singular (condition estimate " +
                                   std::to_string(condition_) + ")",
                               condition_);
    Eigen::MatrixXd unit = Eigen::MatrixXd::Zero(n + k, n);
    unit.topRows(n).setIdentity();
    cardinal_coeffs_ = lu_.solve(unit);
    if (k > 0) {
      // Constants are in the space, so the columns must sum to the
      // coefficients of 1 (alpha = 0, beta = e_0). Spread the rounding
      // residual evenly over the columns.
      Eigen::VectorXd target = Eigen::VectorXd::Zero(n + k);
      target[n] = 1.0;
      const Eigen::VectorXd residual = cardinal_coeffs_.rowwise().sum() - target;
      cardinal_coeffs_.colwise() -= residual / n;
    }
    if (!cardinal_coeffs_.allFinite())
      throw FactorizationError("interpolation solve produced non-finite values", condition_);
  }

  Kernel kernel_;
  NodeSet nodes_;
  int poly_count_;
  std::vector<std::pair<int, int>> exponents_;
  Point origin_;
  Point scale_;
  Eigen::MatrixXd saddle_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::MatrixXd cardinal_coeffs_;
  double condition_ = 0.0;
};

using SpacePtr = std::shared_ptr<const RbfSpace>;

inline SpacePtr build_space(const Kernel& kernel, const NodeSet& nodes, int poly_count) {
  return std::make_shared<const RbfSpace>(kernel, nodes, poly_count);
}

// An element of V_{N,P} in coefficient form.
class Interpolant {
 public:
  Interpolant(SpacePtr space, Eigen::VectorXd alpha, Eigen::VectorXd beta)
      : space_(std::move(space)), alpha_(std::move(alpha)), beta_(std::move(beta)) {}

  const RbfSpace& space() const noexcept { return *space_; }
  const Eigen::VectorXd& alpha() const noexcept { return alpha_; }
  const Eigen::VectorXd& beta() const noexcept { return beta_; }

  double operator()(const Point& x) const {
    const Eigen::RowVectorXd row = space_->basis_row(x);
    return row.head(alpha_.size()).dot(alpha_) + row.tail(beta_.size()).dot(beta_);
  }

  double derivative(const Point& x, int axis) const {
    const Eigen::RowVectorXd row = space_->basis_derivative_row(x, axis);
    return row.head(alpha_.size()).dot(alpha_) + row.tail(beta_.size()).dot(beta_);
  }

 private:
  SpacePtr space_;
  Eigen::VectorXd alpha_;
  Eigen::VectorXd beta_;
};

inline Interpolant fit(const SpacePtr& space, const Eigen::VectorXd& nodal_values) {
  const int n = space->size();
  if (nodal_values.size() != n)
    throw ArgumentError("fit expects " + std::to_string(n) + " nodal values, got " +
                        std::to_string(nodal_values.size()));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + space->poly_size());
  rhs.head(n) = nodal_values;
  const Eigen::VectorXd coeffs = space->solve(rhs);
  return Interpolant(space, coeffs.head(n), coeffs.tail(space->poly_size()));
}

inline Eigen::VectorXd evaluate(const Interpolant& interp, const std::vector<Point>& points) {
  Eigen::VectorXd out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = interp(points[i]);
  return out;
}

inline Eigen::VectorXd evaluate_derivative(const Interpolant& interp, const std::vector<Point>& points, int axis) {
  Eigen::VectorXd out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = interp.derivative(points[i], axis);
  return out;
}

}  // namespace wrbf
