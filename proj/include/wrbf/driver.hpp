#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include "json.hpp"

#include "wrbf/diagnostics.hpp"
#include "wrbf/errors.hpp"
#include "wrbf/fluxes.hpp"
#include "wrbf/geometry.hpp"
#include "wrbf/kernels.hpp"
#include "wrbf/problems.hpp"
#include "wrbf/quadrature.hpp"
#include "wrbf/rbf_space.hpp"
#include "wrbf/semidiscretization.hpp"
#include "wrbf/time_integration.hpp"

namespace wrbf {

enum class Method { strong, weak_analytical, weak_collocation };

inline Method parse_method(std::string_view name) {
  if (name == "strong") return Method::strong;
  if (name == "weak-analytical") return Method::weak_analytical;
  if (name == "weak-collocation") return Method::weak_collocation;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

inline std::string method_name(Method m) {
  switch (m) {
    case Method::strong: return "strong";
    case Method::weak_analytical: return "weak-analytical";
    case Method::weak_collocation: return "weak-collocation";
  }
  return "weak-collocation";
}

// All run parameters. String-valued fields are parsed on validation so a
// config can be built from text and overridden key by key.
struct RunConfig {
  std::string problem = "advect-gauss";
  std::string bc = "periodic";  // periodic | inflow
  std::string method = "weak-collocation";
  std::string kernel = "cubic";
  std::optional<double> eps;
  int P = 1;
  int N = 20;
  std::string nodes = "equidistant";  // equidistant | random:<seed> | file:<path>
  std::string quadrature = "default";
  std::string flux = "default";      // default picks upwind / godunov / rusanov
  std::string strong_bc = "auto";    // auto | none | inflow | periodic
  std::string scheme = "ssprk33";
  double cfl = 0.1;
  double t_end = 2.0;
  std::vector<double> snapshots;
  std::vector<int> Ns;  // convergence levels
  std::string out;      // empty: no files

  // key = value; unknown keys are errors.
  void set(const std::string& key, const std::string& value);
  void validate() const;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size() || !std::isfinite(v))
    throw ConfigError("invalid number for '" + key + "': '" + value + "'");
  return v;
}

inline int parse_count(const std::string& key, const std::string& value) {
  const auto v = parse_int(value);
  if (!v) throw ConfigError("invalid integer for '" + key + "': '" + value + "'");
  return *v;
}

inline std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(value);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace detail

inline void RunConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = detail::trim(raw_key), value = detail::trim(raw_value);
  if (key == "problem") problem = value;
  else if (key == "bc") bc = value;
  else if (key == "method") method = value;
  else if (key == "kernel") kernel = value;
  else if (key == "eps") eps = value.empty() || value == "none" ? std::nullopt : std::optional(detail::parse_double(key, value));
  else if (key == "P") P = detail::parse_count(key, value);
  else if (key == "N") N = detail::parse_count(key, value);
  else if (key == "nodes") nodes = value;
  else if (key == "quadrature") quadrature = value;
  else if (key == "flux") flux = value;
  else if (key == "strong_bc") strong_bc = value;
  else if (key == "scheme") scheme = value;
  else if (key == "cfl") cfl = detail::parse_double(key, value);
  else if (key == "tend") t_end = detail::parse_double(key, value);
  else if (key == "snapshots") {
    snapshots.clear();
    for (const auto& s : detail::split_list(value)) snapshots.push_back(detail::parse_double(key, s));
  } else if (key == "Ns") {
    Ns.clear();
    for (const auto& s : detail::split_list(value)) Ns.push_back(detail::parse_count(key, s));
  } else if (key == "out") out = value;
  else throw ConfigError("unknown config key '" + key + "'");
}

inline BoundaryKind parse_boundary_kind(std::string_view name) {
  if (name == "periodic") return BoundaryKind::periodic;
  if (name == "inflow") return BoundaryKind::inflow;
  throw ConfigError("unknown boundary condition '" + std::string(name) + "'");
}

inline void RunConfig::validate() const {
  parse_method(method);
  parse_boundary_kind(bc);
  parse_kernel(kernel, eps);
  QuadratureSpec::parse(quadrature);
  parse_scheme(scheme);
  if (flux != "default") parse_flux_kind(flux);
  if (strong_bc != "auto") parse_strong_boundary(strong_bc);
  if (P < 0) throw ConfigError("P must be nonnegative");
  if (N < 1) throw ConfigError("N must be positive");
  if (!(cfl > 0.0)) throw ConfigError("cfl must be positive");
  if (!(t_end >= 0.0)) throw ConfigError("tend must be nonnegative");
  for (int n : Ns)
    if (n < 1) throw ConfigError("Ns entries must be positive");
  if (!(nodes == "equidistant" || nodes.rfind("random:", 0) == 0 || nodes.rfind("file:", 0) == 0))
    throw ConfigError("unknown node spec '" + nodes + "'");
  if (nodes.rfind("random:", 0) == 0 && !detail::parse_int(nodes.substr(7)))
    throw ConfigError("random node spec needs an integer seed");
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (detail::trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    cfg.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

// ----------------------------------------------------------------------------

struct RunOutput {
  RunRecord record;
  double dt = 0.0;
  long long steps = 0;
  double interpolation_condition = 0.0;
  double mass_condition = 0.0;
  double tau_q = 0.0;
  double max_wave_speed = 0.0;
  std::vector<Point> centers;
  Eigen::MatrixXd initial_state;
  Eigen::MatrixXd final_state;
  std::optional<Eigen::MatrixXd> exact_final;
  double final_time = 0.0;
  std::string blow_up_message;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline NodeSet make_nodes(const RunConfig& cfg, const Domain& domain) {
  if (cfg.nodes == "equidistant") return equidistant_nodes(domain, cfg.N);
  if (cfg.nodes.rfind("random:", 0) == 0)
    return random_nodes(domain, cfg.N, static_cast<std::uint64_t>(*parse_int(cfg.nodes.substr(7))));
  NodeSet set = load_nodes(cfg.nodes.substr(5), domain);
  if (static_cast<int>(set.size()) != cfg.N)
    throw ConfigError("node file has " + std::to_string(set.size()) + " nodes but N = " + std::to_string(cfg.N));
  return set;
}

inline std::vector<Point> dense_points(const Domain& d, int n) {
  std::vector<Point> pts;
  if (d.dim() == 1) {
    const int m = 10 * n;
    for (int i = 0; i < m; ++i) pts.push_back(point1d(d.lower(0) + d.width(0) * i / (m - 1)));
    pts.back() = point1d(d.upper(0));
    return pts;
  }
  const int m = static_cast<int>(std::ceil(std::sqrt(10.0 * n)));
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i)
      pts.emplace_back(d.lower(0) + d.width(0) * i / (m - 1), d.lower(1) + d.width(1) * j / (m - 1));
  return pts;
}

// Scalar: max |f'(u)| for u between min and max of the initial data (sampled
// on 10 N points). Systems: max of the characteristic speed over the samples.
inline double max_wave_speed(const Problem& problem, int n) {
  if (problem.velocity) return problem.domain.dim() == 2 ? problem.velocity->norm() : std::abs(problem.velocity->x());
  double speed = 0.0;
  const auto pts = dense_points(problem.domain, n);
  if (!problem.is_scalar()) {
    for (const auto& x : pts) speed = std::max(speed, problem.wavespeed(problem.initial(x)));
    return speed;
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& x : pts) {
    const double u = problem.initial(x)[0];
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  constexpr int kSamples = 1001;
  for (int i = 0; i < kSamples; ++i)
    speed = std::max(speed, std::abs(problem.flux_derivative(lo + (hi - lo) * i / (kSamples - 1))));
  return speed;
}

inline NumericalFlux make_flux(const RunConfig& cfg, const Problem& problem) {
  FluxKind kind;
  if (cfg.flux == "default")
    kind = !problem.is_scalar() ? FluxKind::rusanov : problem.is_linear() ? FluxKind::upwind : FluxKind::godunov;
  else
    kind = parse_flux_kind(cfg.flux);
  if (!problem.is_scalar()) {
    if (kind != FluxKind::rusanov) throw ConfigError("systems support the rusanov flux only");
    return NumericalFlux::rusanov(problem.system_flux, problem.wavespeed);
  }
  switch (kind) {
    case FluxKind::upwind:
      if (!problem.is_linear()) throw ConfigError("the upwind flux needs a linear problem");
      return NumericalFlux::upwind(problem.velocity->x());
    case FluxKind::godunov: return NumericalFlux::godunov(problem.flux);
    case FluxKind::central: return NumericalFlux::central(problem.flux);
    case FluxKind::rusanov: return NumericalFlux::rusanov(problem.flux, problem.flux_derivative);
  }
  throw ConfigError("unsupported flux");
}

inline StrongBoundary strong_mode(const RunConfig& cfg, const Problem& problem) {
  if (cfg.strong_bc != "auto") return parse_strong_boundary(cfg.strong_bc);
  return problem.boundary.kind == BoundaryKind::inflow ? StrongBoundary::inject_inflow : StrongBoundary::none;
}

inline Eigen::MatrixXd sample(const std::function<State(const Point&)>& f, const std::vector<Point>& pts, int comps) {
  Eigen::MatrixXd out(pts.size(), comps);
  for (std::size_t i = 0; i < pts.size(); ++i) out.row(i) = f(pts[i]).transpose();
  return out;
}

inline std::vector<std::string> component_names(const Problem& p) {
  if (p.is_scalar()) return {"u"};
  return {"rho", "rhou", "E"};
}

}  // namespace detail

// Builds the space and operators, integrates, and (when cfg.out is set)
// writes solution.csv, dense.csv, series.csv and summary.json. A blow-up
// ends the run with record.blew_up set and partial output written.
inline RunOutput run(const RunConfig& cfg) {
  cfg.validate();
  const Method method = parse_method(cfg.method);
  const Problem problem = make_problem(cfg.problem, parse_boundary_kind(cfg.bc));
  const Kernel kernel = parse_kernel(cfg.kernel, cfg.eps);
  const NodeSet nodes = detail::make_nodes(cfg, problem.domain);
  const SpacePtr space = build_space(kernel, nodes, cfg.P);
  const QuadratureRule rule = make_rule(QuadratureSpec::parse(cfg.quadrature), nodes);
  const WeakOperator weak = assemble_weak_operator(space, rule);
  const NumericalFlux flux = detail::make_flux(cfg, problem);
  const int dim = problem.domain.dim();
  const int comps = problem.components;

  if (method == Method::weak_analytical && (dim != 1 || !problem.is_scalar()))
    throw ConfigError("weak-analytical supports scalar 1D problems only");
  if (dim == 2 && method != Method::strong && problem.boundary.kind != BoundaryKind::periodic)
    throw ConfigError("2D weak method supports periodic boundaries only");

  RunOutput out;
  out.interpolation_condition = space->condition_estimate();
  out.mass_condition = weak.mass_condition();
  out.tau_q = weak.sbp_defect();
  out.centers = nodes.points();
  if (space->ill_conditioned())
    out.warnings.push_back("interpolation matrix condition estimate " + detail::format_number(out.interpolation_condition));

  std::optional<StrongOperator> strong;
  std::optional<StrongBoundaryEnforcer> enforcer;
  if (method == Method::strong) {
    strong.emplace(space, detail::strong_mode(cfg, problem));
    enforcer.emplace(*strong, problem);
  }

  RhsFunction<Eigen::MatrixXd> rhs = [&](double t, const Eigen::MatrixXd& U) -> Eigen::MatrixXd {
    if (method == Method::strong)
      return comps == 1 ? Eigen::MatrixXd(strong_collocation_rhs(*strong, problem, t, U.col(0)))
                        : strong_collocation_rhs_system(*strong, problem, t, U);
    if (method == Method::weak_analytical) return weak_analytical_rhs(weak, flux, problem, t, U.col(0));
    if (dim == 2) return weak_collocation_rhs_2d(weak, flux, problem, t, U.col(0));
    return comps == 1 ? Eigen::MatrixXd(weak_collocation_rhs(weak, flux, problem, t, U.col(0)))
                      : weak_collocation_rhs_system(weak, flux, problem, t, U);
  };
  StageHook<Eigen::MatrixXd> hook;
  if (enforcer) hook = [&](double t, Eigen::MatrixXd& U) { enforcer->apply(t, U); };

  TimeStepConfig ts;
  ts.cfl = cfg.cfl;
  ts.t_end = cfg.t_end;
  ts.scheme = parse_scheme(cfg.scheme);
  ts.snapshot_times = cfg.snapshots;

  out.max_wave_speed = detail::max_wave_speed(problem, cfg.N);
  out.dt = out.max_wave_speed > 0.0 ? cfl_timestep(cfg.cfl, problem.domain.measure(), cfg.N, out.max_wave_speed)
                                    : std::max(cfg.t_end, 1.0);

  Eigen::MatrixXd U = detail::sample(problem.initial, nodes.points(), comps);
  out.initial_state = U;
  RunRecord& rec = out.record;
  auto observe = [&](double t, const Eigen::MatrixXd& state) {
    rec.push(t, momentum(weak, state.col(0)), energy(weak, state.col(0)));
    for (double s : cfg.snapshots)
      if (std::abs(s - t) <= 1e-12 * std::max(1.0, std::abs(s))) rec.snapshots.push_back({t, state});
  };
  observe(0.0, U);
  Eigen::MatrixXd last = U;
  double t_last = 0.0;
  try {
    U = integrate_to<Eigen::MatrixXd>(
        rhs, U, ts, out.dt,
        [&](double t, const Eigen::MatrixXd& state) {
          ++out.steps;
          last = state;
          t_last = t;
          observe(t, state);
        },
        hook);
    out.final_time = cfg.t_end;
  } catch (const BlowUp<Eigen::MatrixXd>& e) {
    rec.blew_up = true;
    rec.blow_up_time = e.time();
    out.blow_up_message = e.what();
    U = e.last_state();
    out.final_time = t_last;
  }
  out.final_state = U;
  if (problem.exact) {
    auto exact = problem.exact;
    const double tf = out.final_time;
    out.exact_final = detail::sample([&](const Point& x) { return exact(tf, x); }, nodes.points(), comps);
    if (!rec.blew_up) rec.final_errors = error_norms(out.exact_final->col(0), U.col(0));
  }

  if (cfg.out.empty()) return out;

  // ---- files
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out);
  const auto names = detail::component_names(problem);
  auto header = [&](std::ostream& os, bool with_exact) {
    os << (dim == 1 ? "x" : "x,y");
    for (const auto& n : names) os << ',' << n << "_numeric";
    if (with_exact)
      for (const auto& n : names) os << ',' << n << "_exact";
    os << '\n';
  };
  auto row = [&](std::ostream& os, const Point& x, const Eigen::RowVectorXd& num, const Eigen::RowVectorXd* ex) {
    os << detail::format_number(x.x());
    if (dim == 2) os << ',' << detail::format_number(x.y());
    for (Eigen::Index c = 0; c < num.size(); ++c) os << ',' << detail::format_number(num[c]);
    if (ex)
      for (Eigen::Index c = 0; c < ex->size(); ++c) os << ',' << detail::format_number((*ex)[c]);
    os << '\n';
  };
  {
    std::ofstream sol(fs::path(cfg.out) / "solution.csv");
    header(sol, out.exact_final.has_value());
    for (std::size_t i = 0; i < out.centers.size(); ++i) {
      const Eigen::RowVectorXd num = U.row(i);
      Eigen::RowVectorXd ex;
      if (out.exact_final) ex = out.exact_final->row(i);
      row(sol, out.centers[i], num, out.exact_final ? &ex : nullptr);
    }
  }
  {
    const auto pts = detail::dense_points(problem.domain, cfg.N);
    const Eigen::MatrixXd dense = space->cardinal_matrix(pts) * U;
    std::ofstream os(fs::path(cfg.out) / "dense.csv");
    header(os, static_cast<bool>(problem.exact));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Eigen::RowVectorXd num = dense.row(i);
      Eigen::RowVectorXd ex;
      if (problem.exact) ex = problem.exact(out.final_time, pts[i]).transpose();
      row(os, pts[i], num, problem.exact ? &ex : nullptr);
    }
  }
  {
    std::ofstream os(fs::path(cfg.out) / "series.csv");
    os << "t,momentum,energy\n";
    for (std::size_t i = 0; i < rec.times.size(); ++i)
      os << detail::format_number(rec.times[i]) << ',' << detail::format_number(rec.momentum_series[i]) << ','
         << detail::format_number(rec.energy_series[i]) << '\n';
  }
  for (std::size_t k = 0; k < rec.snapshots.size(); ++k) {
    std::ofstream os(fs::path(cfg.out) / ("snapshot_" + std::to_string(k) + ".csv"));
    os << "# t = " << detail::format_number(rec.snapshots[k].time) << '\n';
    header(os, false);
    for (std::size_t i = 0; i < out.centers.size(); ++i) row(os, out.centers[i], rec.snapshots[k].state.row(i), nullptr);
  }
  {
    nlohmann::ordered_json j;
    j["problem"] = cfg.problem;
    j["bc"] = cfg.bc;
    j["method"] = cfg.method;
    j["kernel"] = kernel.name();
    j["eps"] = kernel.is_polyharmonic() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(kernel.shape());
    j["P"] = cfg.P;
    j["N"] = cfg.N;
    j["nodes"] = cfg.nodes;
    j["quadrature"] = QuadratureSpec::parse(cfg.quadrature).str();
    j["flux"] = flux_kind_name(flux.kind());
    if (method == Method::strong) j["strong_bc"] = strong_boundary_name(strong->boundary_mode());
    j["cfl"] = cfg.cfl;
    j["t_end"] = cfg.t_end;
    j["dt"] = out.dt;
    j["steps"] = out.steps;
    j["max_wave_speed"] = out.max_wave_speed;
    j["interpolation_condition"] = out.interpolation_condition;
    j["mass_condition"] = out.mass_condition;
    j["tau_q"] = out.tau_q;
    j["energy_initial"] = rec.energy_series.front();
    j["energy_final"] = rec.energy_series.back();
    j["momentum_initial"] = rec.momentum_series.front();
    j["momentum_final"] = rec.momentum_series.back();
    if (rec.final_errors) {
      j["err_inf"] = rec.final_errors->max;
      j["err_2"] = rec.final_errors->l2;
    } else {
      j["err_inf"] = nullptr;
      j["err_2"] = nullptr;
    }
    j["blew_up"] = rec.blew_up;
    j["blow_up_time"] = rec.blew_up ? nlohmann::ordered_json(rec.blow_up_time) : nlohmann::ordered_json(nullptr);
    if (rec.blew_up) j["blow_up_message"] = out.blow_up_message;
    j["warnings"] = out.warnings;
    std::ofstream os(fs::path(cfg.out) / "summary.json");
    os << j.dump(2) << '\n';
  }
  return out;
}

struct ConvergenceLevel {
  int N = 0;
  double err_inf = 0.0;
  double err_2 = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergenceLevel> levels;
  double order_inf = 0.0;
  double order_2 = 0.0;
};

// Runs every N in Ns (levels write no files of their own) and, when cfg.out
// is set, writes convergence.csv with pairwise orders and a least-squares row.
inline ConvergenceResult convergence_study(RunConfig cfg, const std::vector<int>& ns) {
  if (ns.size() < 2) throw ConfigError("a convergence study needs at least two N values");
  const std::string dir = cfg.out;
  cfg.out.clear();
  ConvergenceResult res;
  std::vector<double> e_inf, e_2;
  for (int n : ns) {
    cfg.N = n;
    const RunOutput r = run(cfg);
    if (r.record.blew_up) throw BlowUpError("level N = " + std::to_string(n) + " blew up", r.record.blow_up_time, 0);
    if (!r.record.final_errors) throw ConfigError("convergence study needs an exact solution");
    res.levels.push_back({n, r.record.final_errors->max, r.record.final_errors->l2});
    e_inf.push_back(r.record.final_errors->max);
    e_2.push_back(r.record.final_errors->l2);
  }
  res.order_inf = convergence_order(ns, e_inf);
  res.order_2 = convergence_order(ns, e_2);
  if (!dir.empty()) {
    std::filesystem::create_directories(dir);
    std::ofstream os(std::filesystem::path(dir) / "convergence.csv");
    os << "N,err_inf,err_2,order_inf,order_2\n";
    for (std::size_t i = 0; i < res.levels.size(); ++i) {
      const auto& l = res.levels[i];
      os << l.N << ',' << detail::format_number(l.err_inf) << ',' << detail::format_number(l.err_2) << ',';
      if (i == 0) {
        os << ",\n";
        continue;
      }
      const auto& p = res.levels[i - 1];
      const double ratio = std::log(static_cast<double>(l.N) / p.N);
      os << detail::format_number(std::log(p.err_inf / l.err_inf) / ratio) << ','
         << detail::format_number(std::log(p.err_2 / l.err_2) / ratio) << '\n';
    }
    os << "lsq,,," << detail::format_number(res.order_inf) << ',' << detail::format_number(res.order_2) << '\n';
  }
  return res;
}

}  // namespace wrbf
