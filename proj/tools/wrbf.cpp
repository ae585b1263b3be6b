// Command-line front end: `wrbf run` and `wrbf convergence`.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "wrbf/driver.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kBlowUp = 3;

struct Options {
  std::string config;
  std::map<std::string, std::string> overrides;
  std::string dump;
};

void add_overrides(CLI::App& app, Options& o) {
  app.add_option("--config", o.config, "key = value config file")->check(CLI::ExistingFile);
  // Each flag maps onto the config key of the same meaning.
  const std::pair<const char*, const char*> keys[] = {
      {"--problem", "problem"}, {"--bc", "bc"},           {"--method", "method"},     {"--kernel", "kernel"},
      {"--eps", "eps"},         {"--P", "P"},             {"--N", "N"},               {"--nodes", "nodes"},
      {"--quadrature", "quadrature"}, {"--flux", "flux"}, {"--strong-bc", "strong_bc"}, {"--scheme", "scheme"},
      {"--cfl", "cfl"},         {"--tend", "tend"},       {"--snapshots", "snapshots"}, {"--Ns", "Ns"},
      {"--out", "out"}};
  for (const auto& [flag, key] : keys) {
    const std::string k = key;
    app.add_option_function<std::string>(flag, [&o, k](const std::string& v) { o.overrides[k] = v; }, "sets '" + k + "'");
  }
}

wrbf::RunConfig resolve(const Options& o) {
  wrbf::RunConfig cfg = o.config.empty() ? wrbf::RunConfig{} : wrbf::load_config(o.config);
  for (const auto& [k, v] : o.overrides) cfg.set(k, v);
  cfg.validate();
  return cfg;
}

void dump_operators(const wrbf::RunConfig& cfg, const std::string& dir) {
  namespace fs = std::filesystem;
  const auto problem = wrbf::make_problem(cfg.problem, wrbf::parse_boundary_kind(cfg.bc));
  const auto nodes = wrbf::detail::make_nodes(cfg, problem.domain);
  const auto space = wrbf::build_space(wrbf::parse_kernel(cfg.kernel, cfg.eps), nodes, cfg.P);
  const auto op = wrbf::assemble_weak_operator(space, wrbf::make_rule(wrbf::QuadratureSpec::parse(cfg.quadrature), nodes));
  const wrbf::StrongOperator strong(space, wrbf::StrongBoundary::none);
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const Eigen::MatrixXd& m) {
    std::ofstream os(fs::path(dir) / name);
    wrbf::write_matrix(os, m);
  };
  write("M.txt", op.mass());
  write("w.txt", op.load());
  for (int axis = 0; axis < op.dim(); ++axis) {
    const std::string suffix = op.dim() == 1 ? "" : (axis == 0 ? "x" : "y");
    write("B" + suffix + ".txt", op.advection(axis));
    write("D" + suffix + ".txt", strong.differentiation(axis));
  }
  if (op.dim() == 1) {
    write("l.txt", op.left_trace());
    write("r.txt", op.right_trace());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak-form RBF solver for hyperbolic conservation laws"};
  app.require_subcommand(1);
  Options run_opts, conv_opts;
  auto* run_cmd = app.add_subcommand("run", "single run: solution.csv, dense.csv, series.csv, summary.json");
  add_overrides(*run_cmd, run_opts);
  run_cmd->add_option("--dump-operators", run_opts.dump, "write M, B, D, l, r, w as text matrices to this directory");
  auto* conv_cmd = app.add_subcommand("convergence", "convergence study over Ns: convergence.csv");
  add_overrides(*conv_cmd, conv_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*run_cmd) {
      const auto cfg = resolve(run_opts);
      if (!run_opts.dump.empty()) dump_operators(cfg, run_opts.dump);
      const auto out = wrbf::run(cfg);
      for (const auto& w : out.warnings) std::cerr << "warning: " << w << '\n';
      if (out.record.final_errors)
        std::cout << "err_inf " << wrbf::detail::format_number(out.record.final_errors->max) << "  err_2 "
                  << wrbf::detail::format_number(out.record.final_errors->l2) << '\n';
      std::cout << "energy " << wrbf::detail::format_number(out.record.energy_series.front()) << " -> "
                << wrbf::detail::format_number(out.record.energy_series.back()) << '\n';
      if (out.record.blew_up) {
        std::cerr << "blow-up: " << out.blow_up_message << '\n';
        return kBlowUp;
      }
      return kOk;
    }
    const auto cfg = resolve(conv_opts);
    if (cfg.Ns.empty()) throw wrbf::ConfigError("convergence needs Ns");
    const auto res = wrbf::convergence_study(cfg, cfg.Ns);
    for (const auto& l : res.levels)
      std::cout << "N " << l.N << "  err_inf " << wrbf::detail::format_number(l.err_inf) << "  err_2 "
                << wrbf::detail::format_number(l.err_2) << '\n';
    std::cout << "order_inf " << res.order_inf << "  order_2 " << res.order_2 << '\n';
    return kOk;
  } catch (const wrbf::BlowUpError& e) {
    std::cerr << "blow-up: " << e.what() << '\n';
    return kBlowUp;
  } catch (const wrbf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
}
