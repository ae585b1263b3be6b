#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wrbf/errors.hpp"
#include "wrbf/geometry.hpp"
#include "wrbf/kernels.hpp"

namespace wrbf {

struct QuadratureRule {
  std::vector<Point> nodes;
  std::vector<double> weights;
  int dim = 1;
  // Polynomial degree integrated exactly (per axis for tensor rules);
  // empty for composite rules without a single global degree.
  std::optional<int> exactness_degree;
  // The 1D factors of a tensor-product rule (x then y); empty in 1D.
  std::vector<QuadratureRule> factors;

  std::size_t size() const noexcept { return nodes.size(); }
  double weight_sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

namespace detail {

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
inline std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

inline QuadratureRule map_rule_1d(const std::vector<double>& ref_nodes, const std::vector<double>& ref_weights,
                                  double a, double b) {
  QuadratureRule rule;
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < ref_nodes.size(); ++i) {
    rule.nodes.push_back(point1d(mid + half * ref_nodes[i]));
    rule.weights.push_back(half * ref_weights[i]);
  }
  return rule;
}

inline void check_interval(double a, double b) {
  if (!(a < b)) throw ArgumentError("quadrature interval must satisfy a < b");
}

}  // namespace detail

// Composite trapezoid: J equispaced nodes including both endpoints.
inline QuadratureRule trapezoid_rule(double a, double b, int J) {
  detail::check_interval(a, b);
  if (J < 2) throw ArgumentError("trapezoid rule needs J >= 2");
  QuadratureRule rule;
  const double h = (b - a) / (J - 1);
  for (int j = 0; j < J; ++j) {
    rule.nodes.push_back(point1d(j == J - 1 ? b : a + j * h));
    rule.weights.push_back(j == 0 || j == J - 1 ? 0.5 * h : h);
  }
  rule.exactness_degree = 1;
  return rule;
}

// Gauss-Legendre nodes by Newton iteration on P_J.
inline QuadratureRule gauss_legendre_rule(double a, double b, int J) {
  detail::check_interval(a, b);
  if (J < 1) throw ArgumentError("Gauss-Legendre rule needs J >= 1");
  std::vector<double> x(J), w(J);
  for (int i = 0; i < (J + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (J + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      auto [p, d] = detail::legendre(J, z);
      dp = d;
      const double step = p / d;
      z -= step;
      if (std::abs(step) <= 1e-15) break;
    }
    dp = detail::legendre(J, z).second;
    x[i] = -z;
    x[J - 1 - i] = z;
    w[i] = w[J - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  if (J % 2 == 1) x[J / 2] = 0.0;
  auto rule = detail::map_rule_1d(x, w, a, b);
  rule.exactness_degree = 2 * J - 1;
  return rule;
}

// Gauss-Lobatto: endpoints plus the roots of P'_{J-1}.
inline QuadratureRule gauss_lobatto_rule(double a, double b, int J) {
  detail::check_interval(a, b);
  if (J < 2) throw ArgumentError("Gauss-Lobatto rule needs J >= 2");
  const int n = J - 1;
  std::vector<double> x(J), w(J);
  x[0] = -1.0;
  x[n] = 1.0;
  w[0] = w[n] = 2.0 / (n * (n + 1.0));
  for (int i = 1; i <= (n) / 2; ++i) {
    // Chebyshev-Gauss-Lobatto initial guess, Newton on q = P_n'(x),
    // q' = (2x P_n' - n(n+1) P_n) / (1 - x^2).
    double z = -std::cos(std::numbers::pi * i / n);
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = detail::legendre(n, z);
      const double ddp = (2.0 * z * dp - n * (n + 1.0) * p) / (1.0 - z * z);
      const double step = dp / ddp;
      z -= step;
      if (std::abs(step) <= 1e-15) break;
    }
    const double p = detail::legendre(n, z).first;
    x[i] = z;
    x[n - i] = -z;
    w[i] = w[n - i] = 2.0 / (n * (n + 1.0) * p * p);
  }
  if (n % 2 == 0) {
    const double p = detail::legendre(n, 0.0).first;
    x[n / 2] = 0.0;
    w[n / 2] = 2.0 / (n * (n + 1.0) * p * p);
  }
  auto rule = detail::map_rule_1d(x, w, a, b);
  rule.exactness_degree = 2 * J - 3;
  return rule;
}

inline QuadratureRule tensor_product(const QuadratureRule& rx, const QuadratureRule& ry) {
  if (rx.dim != 1 || ry.dim != 1) throw ArgumentError("tensor_product expects two 1D rules");
  QuadratureRule rule;
  rule.dim = 2;
  for (std::size_t j = 0; j < ry.size(); ++j)
    for (std::size_t i = 0; i < rx.size(); ++i) {
      rule.nodes.emplace_back(rx.nodes[i].x(), ry.nodes[j].x());
      rule.weights.push_back(rx.weights[i] * ry.weights[j]);
    }
  if (rx.exactness_degree && ry.exactness_degree)
    rule.exactness_degree = std::min(*rx.exactness_degree, *ry.exactness_degree);
  rule.factors = {rx, ry};
  return rule;
}

// Gauss-Legendre on each panel between consecutive breakpoints, with about
// total_points nodes overall. Breakpoints outside [a,b] are ignored.
inline QuadratureRule composite_gauss_legendre(double a, double b, std::vector<double> breaks, int total_points) {
  detail::check_interval(a, b);
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> cuts;
  for (double x : breaks) {
    if (x < a || x > b) continue;
    if (cuts.empty() || x - cuts.back() > 1e-14 * (b - a)) cuts.push_back(x);
  }
  cuts.back() = b;
  const int panels = static_cast<int>(cuts.size()) - 1;
  const int per_panel = std::max(8, (total_points + panels - 1) / panels);
  QuadratureRule rule;
  for (int p = 0; p < panels; ++p) {
    auto piece = gauss_legendre_rule(cuts[p], cuts[p + 1], per_panel);
    rule.nodes.insert(rule.nodes.end(), piece.nodes.begin(), piece.nodes.end());
    rule.weights.insert(rule.weights.end(), piece.weights.begin(), piece.weights.end());
  }
  return rule;
}

// Stand-in for exact integration of the cardinal functions: composite
// Gauss-Legendre with panels cut at the center coordinates (where
// polyharmonic kernels lose smoothness), about 50 N points in 1D.
// In 2D: tensor Gauss-Legendre with 20 ceil(sqrt N) points per axis.
inline QuadratureRule reference_rule(const NodeSet& nodes) {
  const Domain& d = nodes.domain();
  const int n = static_cast<int>(nodes.size());
  if (d.dim() == 1) {
    std::vector<double> breaks;
    for (const auto& p : nodes.points()) breaks.push_back(p.x());
    auto rule = composite_gauss_legendre(d.lower(0), d.upper(0), breaks, 50 * n);
    return rule;
  }
  const int per_axis = 20 * static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  return tensor_product(gauss_legendre_rule(d.lower(0), d.upper(0), per_axis),
                        gauss_legendre_rule(d.lower(1), d.upper(1), per_axis));
}

// sum_q w_q f(x_q); a non-finite integrand value raises IntegrationError.
template <class F>
double integrate(const QuadratureRule& rule, F&& f) {
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double v = f(rule.nodes[q]);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "integrand is not finite at node (" << rule.nodes[q].x();
      if (rule.dim == 2) msg << ", " << rule.nodes[q].y();
      msg << ")";
      throw IntegrationError(msg.str());
    }
    sum += rule.weights[q] * v;
  }
  return sum;
}

// Quadrature selection: trapezoid:J | gauss:J | lobatto:J | reference | default.
struct QuadratureSpec {
  enum class Kind { default_rule, trapezoid, gauss, lobatto, reference };
  Kind kind = Kind::default_rule;
  int points = 0;

  static QuadratureSpec parse(std::string_view text) {
    QuadratureSpec spec;
    if (text == "default" || text.empty()) return spec;
    if (text == "reference") {
      spec.kind = Kind::reference;
      return spec;
    }
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw ConfigError("unknown quadrature '" + std::string(text) + "'");
    const auto name = text.substr(0, colon);
    const auto count = detail::parse_int(text.substr(colon + 1));
    if (!count || *count < 1) throw ConfigError("invalid quadrature point count in '" + std::string(text) + "'");
    spec.points = *count;
    if (name == "trapezoid")
      spec.kind = Kind::trapezoid;
    else if (name == "gauss")
      spec.kind = Kind::gauss;
    else if (name == "lobatto")
      spec.kind = Kind::lobatto;
    else
      throw ConfigError("unknown quadrature '" + std::string(text) + "'");
    return spec;
  }

  std::string str() const {
    switch (kind) {
      case Kind::default_rule: return "default";
      case Kind::trapezoid: return "trapezoid:" + std::to_string(points);
      case Kind::gauss: return "gauss:" + std::to_string(points);
      case Kind::lobatto: return "lobatto:" + std::to_string(points);
      case Kind::reference: return "reference";
    }
    return "default";
  }
};

// Builds the assembly rule for a node set. Defaults: Gauss-Legendre with
// max(100, 5N) points in 1D, tensor trapezoid with 200 points per axis in 2D.
// In 2D the point count applies per axis.
inline QuadratureRule make_rule(const QuadratureSpec& spec, const NodeSet& nodes) {
  const Domain& d = nodes.domain();
  const int n = static_cast<int>(nodes.size());
  using Kind = QuadratureSpec::Kind;
  if (spec.kind == Kind::reference) return reference_rule(nodes);
  Kind kind = spec.kind;
  int points = spec.points;
  if (kind == Kind::default_rule) {
    kind = d.dim() == 1 ? Kind::gauss : Kind::trapezoid;
    points = d.dim() == 1 ? std::max(100, 5 * n) : 200;
  }
  auto line = [&](int axis) {
    switch (kind) {
      case Kind::trapezoid: return trapezoid_rule(d.lower(axis), d.upper(axis), points);
      case Kind::lobatto: return gauss_lobatto_rule(d.lower(axis), d.upper(axis), points);
      default: return gauss_legendre_rule(d.lower(axis), d.upper(axis), points);
    }
  };
  if (d.dim() == 1) return line(0);
  return tensor_product(line(0), line(1));
}

}  // namespace wrbf
