#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wrbf/errors.hpp"

namespace wrbf {

// Points live in R^2; one-dimensional points keep y = 0 so distances agree.
using Point = Eigen::Vector2d;

inline Point point1d(double x) { return Point(x, 0.0); }

// An interval [a,b] or an axis-aligned rectangle.
class Domain {
 public:
  static Domain interval(double a, double b) { return Domain(1, a, b, 0.0, 0.0); }
  static Domain rectangle(double ax, double bx, double ay, double by) { return Domain(2, ax, bx, ay, by); }
  static Domain square(double a, double b) { return rectangle(a, b, a, b); }

  int dim() const noexcept { return dim_; }
  double lower(int axis) const { return axis == 0 ? ax_ : ay_; }
  double upper(int axis) const { return axis == 0 ? bx_ : by_; }
  double width(int axis) const { return upper(axis) - lower(axis); }
  double measure() const noexcept { return dim_ == 1 ? bx_ - ax_ : (bx_ - ax_) * (by_ - ay_); }

  bool contains(const Point& p, double tol = 1e-12) const {
    for (int axis = 0; axis < dim_; ++axis) {
      const double slack = tol * std::max(1.0, width(axis));
      if (p[axis] < lower(axis) - slack || p[axis] > upper(axis) + slack) return false;
    }
    return true;
  }

  Point midpoint() const {
    return Point(0.5 * (ax_ + bx_), dim_ == 2 ? 0.5 * (ay_ + by_) : 0.0);
  }

 private:
  Domain(int dim, double ax, double bx, double ay, double by)
      : dim_(dim), ax_(ax), bx_(bx), ay_(ay), by_(by) {
    if (!(ax < bx) || (dim == 2 && !(ay < by)))
      throw ArgumentError("domain bounds must satisfy lower < upper on every axis");
  }

  int dim_;
  double ax_, bx_, ay_, by_;
};

// Ordered, pairwise-distinct centers inside a domain (sorted in 1D).
class NodeSet {
 public:
  NodeSet(Domain domain, std::vector<Point> points) : domain_(domain), points_(std::move(points)) {
    if (points_.empty()) throw InvalidNodesError("node set is empty");
    for (auto& p : points_) {
      if (!p.allFinite()) throw InvalidNodesError("node set contains non-finite coordinates");
      if (domain_.dim() == 1) p.y() = 0.0;
      if (!domain_.contains(p)) throw InvalidNodesError("node lies outside the domain");
    }
    if (domain_.dim() == 1) {
      std::sort(points_.begin(), points_.end(), [](const Point& l, const Point& r) { return l.x() < r.x(); });
      for (std::size_t i = 1; i < points_.size(); ++i)
        if (points_[i].x() == points_[i - 1].x()) throw InvalidNodesError("duplicate centers");
    } else {
      for (std::size_t i = 0; i < points_.size(); ++i)
        for (std::size_t j = i + 1; j < points_.size(); ++j)
          if (points_[i] == points_[j]) throw InvalidNodesError("duplicate centers");
    }
  }

  const Domain& domain() const noexcept { return domain_; }
  const std::vector<Point>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }

 private:
  Domain domain_;
  std::vector<Point> points_;
};

// Equispaced nodes including the boundary. In 2D, n must be a perfect square.
inline NodeSet equidistant_nodes(const Domain& domain, int n) {
  if (n < 1) throw ArgumentError("node count must be positive");
  auto line = [](double a, double b, int m) {
    std::vector<double> xs(m);
    if (m == 1) {
      xs[0] = 0.5 * (a + b);
      return xs;
    }
    for (int i = 0; i < m; ++i) xs[i] = a + (b - a) * i / (m - 1);
    xs[m - 1] = b;
    return xs;
  };
  std::vector<Point> pts;
  if (domain.dim() == 1) {
    for (double x : line(domain.lower(0), domain.upper(0), n)) pts.push_back(point1d(x));
  } else {
    const int m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    if (m * m != n) throw ArgumentError("equidistant 2D node sets need a square node count");
    const auto xs = line(domain.lower(0), domain.upper(0), m);
    const auto ys = line(domain.lower(1), domain.upper(1), m);
    for (double y : ys)
      for (double x : xs) pts.emplace_back(x, y);
  }
  return NodeSet(domain, std::move(pts));
}

// Uniform i.i.d. nodes from a seeded mt19937_64. Candidates closer than 1e-12
// to an accepted node are redrawn.
inline NodeSet random_nodes(const Domain& domain, int n, std::uint64_t seed) {
  if (n < 1) throw ArgumentError("node count must be positive");
  std::mt19937_64 gen(seed);
  // Explicit 53-bit mapping keeps the sequence identical across standard libraries.
  auto unit = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  std::vector<Point> pts;
  while (static_cast<int>(pts.size()) < n) {
    Point p(domain.lower(0) + domain.width(0) * unit(), 0.0);
    if (domain.dim() == 2) p.y() = domain.lower(1) + domain.width(1) * unit();
    const bool clash = std::any_of(pts.begin(), pts.end(), [&](const Point& q) { return (p - q).norm() < 1e-12; });
    if (!clash) pts.push_back(p);
  }
  return NodeSet(domain, std::move(pts));
}

// One point per line, whitespace-separated coordinates. Blank lines and
// lines starting with '#' are skipped.
inline NodeSet load_nodes(const std::string& path, const Domain& domain) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open node file '" + path + "'");
  std::vector<Point> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t\r")] == '#')
      continue;
    std::istringstream ss(line);
    std::vector<double> coords;
    double v;
    while (ss >> v) coords.push_back(v);
    if (!ss.eof() || static_cast<int>(coords.size()) != domain.dim())
      throw ArgumentError("node file '" + path + "' line " + std::to_string(lineno) + ": expected " +
                          std::to_string(domain.dim()) + " coordinate(s)");
    pts.emplace_back(coords[0], domain.dim() == 2 ? coords[1] : 0.0);
  }
  return NodeSet(domain, std::move(pts));
}

}  // namespace wrbf
