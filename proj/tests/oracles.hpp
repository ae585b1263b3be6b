#pragma once
// Reference computations written without the library's code paths: plain
// std::vector arithmetic, raw monomials, explicit Gaussian elimination,
// brute-force quadrature and sampling, and a finite-volume Euler solver.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

// Kernel profiles as plain formulas. kind: "cubic", "quintic", "gaussian",
// "mq", "iq".
inline double phi(const std::string& kind, double eps, double r) {
  if (kind == "cubic") return r * r * r;
  if (kind == "quintic") return std::pow(r, 5);
  if (kind == "gaussian") return std::exp(-(eps * r) * (eps * r));
  if (kind == "mq") return std::sqrt(1.0 + (eps * r) * (eps * r));
  if (kind == "iq") return 1.0 / (1.0 + (eps * r) * (eps * r));
  throw std::invalid_argument("oracle kernel");
}

// d/dx phi(|x - c|) by a symmetric difference with step 1e-6.
inline double phi_dx(const std::string& kind, double eps, double x, double c) {
  const double h = 1e-6;
  return (phi(kind, eps, std::abs(x + h - c)) - phi(kind, eps, std::abs(x - h - c))) / (2.0 * h);
}

// Gaussian elimination with partial pivoting, several right-hand sides.
inline Mat solve(Mat a, Mat b) {
  const std::size_t n = a.size(), m = b[0].size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    std::swap(a[k], a[p]);
    std::swap(b[k], b[p]);
    if (a[k][k] == 0.0) throw std::runtime_error("oracle: singular system");
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      for (std::size_t j = 0; j < m; ++j) b[i][j] -= f * b[k][j];
    }
  }
  Mat x(n, Vec(m, 0.0));
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t ii = n; ii-- > 0;) {
      double s = b[ii][j];
      for (std::size_t k = ii + 1; k < n; ++k) s -= a[ii][k] * x[k][j];
      x[ii][j] = s / a[ii][ii];
    }
  return x;
}

// Cardinal functions of a 1D polynomial-augmented RBF space built from raw
// monomials 1, x, ..., x^{P-1}. coeffs[i][n]: i-th coefficient of l_n.
struct Cardinal1d {
  std::string kind;
  double eps;
  Vec centers;
  int P;
  Mat coeffs;

  Cardinal1d(std::string k, double e, Vec c, int p) : kind(std::move(k)), eps(e), centers(std::move(c)), P(p) {
    const std::size_t n = centers.size(), s = n + P;
    Mat a(s, Vec(s, 0.0)), rhs(s, Vec(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) a[i][j] = phi(kind, eps, std::abs(centers[i] - centers[j]));
      for (int k = 0; k < P; ++k) a[i][n + k] = a[n + k][i] = std::pow(centers[i], k);
      rhs[i][i] = 1.0;
    }
    coeffs = solve(a, rhs);
  }

  double value(std::size_t n, double x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) s += coeffs[i][n] * phi(kind, eps, std::abs(x - centers[i]));
    for (int k = 0; k < P; ++k) s += coeffs[centers.size() + k][n] * std::pow(x, k);
    return s;
  }

  double derivative(std::size_t n, double x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) s += coeffs[i][n] * phi_dx(kind, eps, x, centers[i]);
    for (int k = 1; k < P; ++k) s += coeffs[centers.size() + k][n] * k * std::pow(x, k - 1);
    return s;
  }
};

// Composite trapezoid with J points on [a, b].
template <class F>
double trapezoid(double a, double b, int J, F&& f) {
  const double h = (b - a) / (J - 1);
  double s = 0.5 * (f(a) + f(b));
  for (int j = 1; j + 1 < J; ++j) s += f(a + j * h);
  return s * h;
}

// M_nm = int l_n l_m and B_mn = int l_m' l_n by trapezoid with J points;
// values are tabulated once per node.
inline std::pair<Mat, Mat> galerkin_matrices(const Cardinal1d& c, double a, double b, int J) {
  const std::size_t n = c.centers.size();
  const double h = (b - a) / (J - 1);
  Mat val(n, Vec(J)), der(n, Vec(J));
  for (std::size_t k = 0; k < n; ++k)
    for (int j = 0; j < J; ++j) {
      const double x = j == J - 1 ? b : a + j * h;
      val[k][j] = c.value(k, x);
      der[k][j] = c.derivative(k, x);
    }
  Mat M(n, Vec(n, 0.0)), B(n, Vec(n, 0.0));
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      double sm = 0.0, sb = 0.0;
      for (int j = 0; j < J; ++j) {
        const double w = (j == 0 || j == J - 1) ? 0.5 * h : h;
        sm += w * val[p][j] * val[q][j];
        sb += w * der[p][j] * val[q][j];
      }
      M[p][q] = sm;
      B[p][q] = sb;
    }
  return {M, B};
}

// Godunov flux by brute-force sampling of f on [min(a,b), max(a,b)].
inline double godunov_sampled(const std::function<double(double)>& f, double a, double b, int samples) {
  const double lo = std::min(a, b), hi = std::max(a, b);
  double best = f(a);
  for (int i = 0; i < samples; ++i) {
    const double v = f(lo + (hi - lo) * i / (samples - 1));
    best = a <= b ? std::min(best, v) : std::max(best, v);
  }
  return a <= b ? std::min(best, f(b)) : std::max(best, f(b));
}

// Finite-volume solution of the gamma = 3 Euler equations with
// rho0 = 1 + sin(pi x)/2, u0 = 0, p0 = rho0^3, periodic on [-1, 1].
// Unlimited piecewise-linear reconstruction of primitive variables,
// Rusanov interface flux, SSPRK3 in time. Returns (rho, u, p) per cell center.
struct FvEuler {
  int cells;
  double h;
  std::vector<std::array<double, 3>> U;

  explicit FvEuler(int m) : cells(m), h(2.0 / m), U(m) {
    // Cell averages of the conserved initial data by 4-point Gauss.
    const double g[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
    const double w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};
    for (int i = 0; i < m; ++i) {
      const double xc = -1.0 + (i + 0.5) * h;
      std::array<double, 3> avg{0.0, 0.0, 0.0};
      for (int q = 0; q < 4; ++q) {
        const double x = xc + 0.5 * h * g[q];
        const double rho = 1.0 + 0.5 * std::sin(std::numbers::pi * x);
        avg[0] += 0.5 * w[q] * rho;
        avg[2] += 0.5 * w[q] * (rho * rho * rho / 2.0);  // E = p/(gamma-1) at rest
      }
      U[i] = avg;
    }
  }

  static std::array<double, 3> primitive(const std::array<double, 3>& u) {
    const double v = u[1] / u[0];
    return {u[0], v, 2.0 * (u[2] - 0.5 * u[0] * v * v)};
  }
  static std::array<double, 3> conserved(const std::array<double, 3>& w) {
    return {w[0], w[0] * w[1], w[2] / 2.0 + 0.5 * w[0] * w[1] * w[1]};
  }
  static std::array<double, 3> flux(const std::array<double, 3>& w) {
    const double E = w[2] / 2.0 + 0.5 * w[0] * w[1] * w[1];
    return {w[0] * w[1], w[0] * w[1] * w[1] + w[2], w[1] * (E + w[2])};
  }
  static double speed(const std::array<double, 3>& w) { return std::abs(w[1]) + std::sqrt(3.0 * w[2] / w[0]); }

  std::vector<std::array<double, 3>> rhs(const std::vector<std::array<double, 3>>& u) const {
    const int m = cells;
    std::vector<std::array<double, 3>> W(m), L(m), R(m), F(m), out(m);
    for (int i = 0; i < m; ++i) W[i] = primitive(u[i]);
    for (int i = 0; i < m; ++i) {
      const auto& wl = W[(i - 1 + m) % m];
      const auto& wr = W[(i + 1) % m];
      for (int k = 0; k < 3; ++k) {
        const double slope = 0.5 * (wr[k] - wl[k]);
        L[i][k] = W[i][k] - 0.5 * slope;  // left face value of cell i
        R[i][k] = W[i][k] + 0.5 * slope;  // right face value of cell i
      }
    }
    // F[i]: flux through the right face of cell i.
    for (int i = 0; i < m; ++i) {
      const auto& a = R[i];
      const auto& b = L[(i + 1) % m];
      const auto fa = flux(a), fb = flux(b);
      const auto ua = conserved(a), ub = conserved(b);
      const double s = std::max(speed(a), speed(b));
      for (int k = 0; k < 3; ++k) F[i][k] = 0.5 * (fa[k] + fb[k]) - 0.5 * s * (ub[k] - ua[k]);
    }
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < 3; ++k) out[i][k] = -(F[i][k] - F[(i - 1 + m) % m][k]) / h;
    return out;
  }

  void advance(double t_end, double cfl = 0.4) {
    double t = 0.0;
    while (t < t_end - 1e-15) {
      double smax = 0.0;
      for (const auto& u : U) smax = std::max(smax, speed(primitive(u)));
      double dt = cfl * h / smax;
      if (t + dt > t_end) dt = t_end - t;
      auto k1 = rhs(U);
      std::vector<std::array<double, 3>> u1(cells), u2(cells), un(cells);
      for (int i = 0; i < cells; ++i)
        for (int k = 0; k < 3; ++k) u1[i][k] = U[i][k] + dt * k1[i][k];
      auto k2 = rhs(u1);
      for (int i = 0; i < cells; ++i)
        for (int k = 0; k < 3; ++k) u2[i][k] = 0.75 * U[i][k] + 0.25 * (u1[i][k] + dt * k2[i][k]);
      auto k3 = rhs(u2);
      for (int i = 0; i < cells; ++i)
        for (int k = 0; k < 3; ++k) un[i][k] = U[i][k] / 3.0 + 2.0 / 3.0 * (u2[i][k] + dt * k3[i][k]);
      U = std::move(un);
      t += dt;
    }
  }

  // Primitive state at x by linear interpolation between cell centers.
  std::array<double, 3> at(double x) const {
    const double s = (x + 1.0) / h - 0.5;
    const int i0 = static_cast<int>(std::floor(s));
    const double th = s - i0;
    const auto a = primitive(U[(i0 % cells + cells) % cells]);
    const auto b = primitive(U[((i0 + 1) % cells + cells) % cells]);
    return {(1 - th) * a[0] + th * b[0], (1 - th) * a[1] + th * b[1], (1 - th) * a[2] + th * b[2]};
  }
};

}  // namespace oracle
