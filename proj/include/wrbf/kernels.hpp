#pragma once

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "wrbf/errors.hpp"

namespace wrbf {

enum class KernelKind { gaussian, multiquadric, inverse_quadratic, phs_odd, phs_even_log };

// A radial profile phi together with its shape parameter. Polyharmonic
// splines carry an exponent instead and keep shape fixed at 1.
class Kernel {
 public:
  static Kernel gaussian(double eps) { return Kernel(KernelKind::gaussian, eps, 0); }
  static Kernel multiquadric(double eps) { return Kernel(KernelKind::multiquadric, eps, 0); }
  static Kernel inverse_quadratic(double eps) { return Kernel(KernelKind::inverse_quadratic, eps, 0); }
  static Kernel phs(int k) {
    if (k < 1) throw ArgumentError("polyharmonic exponent must be positive");
    return k % 2 == 1 ? Kernel(KernelKind::phs_odd, 1.0, k) : Kernel(KernelKind::phs_even_log, 1.0, k);
  }
  static Kernel cubic() { return phs(3); }
  static Kernel quintic() { return phs(5); }

  KernelKind kind() const noexcept { return kind_; }
  double shape() const noexcept { return shape_; }
  int exponent() const noexcept { return exponent_; }
  bool is_polyharmonic() const noexcept {
    return kind_ == KernelKind::phs_odd || kind_ == KernelKind::phs_even_log;
  }

  std::string name() const {
    switch (kind_) {
      case KernelKind::gaussian: return "gaussian";
      case KernelKind::multiquadric: return "mq";
      case KernelKind::inverse_quadratic: return "iq";
      case KernelKind::phs_odd:
        if (exponent_ == 3) return "cubic";
        if (exponent_ == 5) return "quintic";
        return "phs:" + std::to_string(exponent_);
      case KernelKind::phs_even_log: return "phslog:" + std::to_string(exponent_);
    }
    return "unknown";
  }

 private:
  Kernel(KernelKind kind, double shape, int exponent) : kind_(kind), shape_(shape), exponent_(exponent) {
    if (!is_polyharmonic() && !(shape > 0.0 && std::isfinite(shape)))
      throw ArgumentError("kernel shape parameter must be positive");
  }

  KernelKind kind_;
  double shape_;
  int exponent_;
};

namespace detail {

inline double ipow(double r, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= r;
  return out;
}

}  // namespace detail

// phi(eps * r)
inline double eval_kernel(const Kernel& kernel, double r) {
  if (!(r >= 0.0)) throw DomainError("kernel evaluated at negative radius");
  const double e = kernel.shape();
  switch (kernel.kind()) {
    case KernelKind::gaussian: return std::exp(-(e * r) * (e * r));
    case KernelKind::multiquadric: return std::sqrt(1.0 + (e * r) * (e * r));
    case KernelKind::inverse_quadratic: return 1.0 / (1.0 + (e * r) * (e * r));
    case KernelKind::phs_odd: return detail::ipow(r, kernel.exponent());
    case KernelKind::phs_even_log:
      if (r == 0.0) return 0.0;
      return detail::ipow(r, kernel.exponent()) * std::log(r);
  }
  return 0.0;
}

// d/dr phi(eps * r)
inline double eval_kernel_dr(const Kernel& kernel, double r) {
  if (!(r >= 0.0)) throw DomainError("kernel derivative evaluated at negative radius");
  const double e2 = kernel.shape() * kernel.shape();
  const int k = kernel.exponent();
  switch (kernel.kind()) {
    case KernelKind::gaussian: return -2.0 * e2 * r * std::exp(-e2 * r * r);
    case KernelKind::multiquadric: return e2 * r / std::sqrt(1.0 + e2 * r * r);
    case KernelKind::inverse_quadratic: {
      const double d = 1.0 + e2 * r * r;
      return -2.0 * e2 * r / (d * d);
    }
    case KernelKind::phs_odd: return k * detail::ipow(r, k - 1);
    case KernelKind::phs_even_log:
      if (r == 0.0) return 0.0;
      return detail::ipow(r, k - 1) * (k * std::log(r) + 1.0);
  }
  return 0.0;
}

// Limit of the radial derivative as r -> 0+. Only r^1 has a nonzero limit.
inline bool radial_derivative_vanishes_at_origin(const Kernel& kernel) {
  return !(kernel.kind() == KernelKind::phs_odd && kernel.exponent() == 1);
}

// Gradient of x -> phi(eps * |x - center|) for x, center in R^1 or R^2.
inline Eigen::VectorXd kernel_gradient(const Kernel& kernel, const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& center) {
  if (x.size() != center.size() || x.size() < 1 || x.size() > 2)
    throw ArgumentError("kernel_gradient supports matching points in one or two dimensions");
  const Eigen::VectorXd diff = x - center;
  const double r = diff.norm();
  if (r == 0.0) {
    if (!radial_derivative_vanishes_at_origin(kernel))
      throw SingularPointError("kernel gradient undefined at its center for " + kernel.name());
    return Eigen::VectorXd::Zero(x.size());
  }
  return diff * (eval_kernel_dr(kernel, r) / r);
}

namespace detail {

inline std::optional<int> parse_int(std::string_view text) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace detail

// Parses gaussian | mq | iq | cubic | quintic | phs:<k> | phslog:<k>.
// Smooth kernels default to eps = 5; PHS kernels reject an explicit eps.
inline Kernel parse_kernel(std::string_view spec, std::optional<double> eps = std::nullopt) {
  const double shape = eps.value_or(5.0);
  auto reject_eps = [&] {
    if (eps) throw ConfigError("kernel '" + std::string(spec) + "' takes no shape parameter");
  };
  if (spec == "gaussian") return Kernel::gaussian(shape);
  if (spec == "mq") return Kernel::multiquadric(shape);
  if (spec == "iq") return Kernel::inverse_quadratic(shape);
  if (spec == "cubic") {
    reject_eps();
    return Kernel::cubic();
  }
  if (spec == "quintic") {
    reject_eps();
    return Kernel::quintic();
  }
  for (std::string_view prefix : {"phs:", "phslog:"}) {
    if (spec.substr(0, prefix.size()) != prefix) continue;
    reject_eps();
    auto k = detail::parse_int(spec.substr(prefix.size()));
    const bool odd = prefix == "phs:";
    if (!k || *k < 1 || (*k % 2 == 1) != odd)
      throw ConfigError("invalid polyharmonic exponent in '" + std::string(spec) + "'");
    return Kernel::phs(*k);
  }
  throw ConfigError("unknown kernel '" + std::string(spec) + "'");
}

}  // namespace wrbf
