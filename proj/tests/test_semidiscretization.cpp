#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wrbf/semidiscretization.hpp"

using namespace wrbf;

namespace {

const Domain kLine = Domain::interval(-1.0, 1.0);

WeakOperator reference_operator(const Kernel& k, int n, int P) {
  const auto nodes = equidistant_nodes(kLine, n);
  return assemble_weak_operator(build_space(k, nodes, P), reference_rule(nodes));
}

Eigen::VectorXd sample(const WeakOperator& op, double (*f)(double)) {
  Eigen::VectorXd u(op.size());
  for (int i = 0; i < op.size(); ++i) u[i] = f(op.space().nodes()[i].x());
  return u;
}

double bump(double x) { return std::exp(-4.0 * x * x) + 0.3 * x; }

}  // namespace

TEST(WeakOperator, LoadVectorSumsToMeasure) {
  for (const auto& k : {Kernel::cubic(), Kernel::gaussian(5.0), Kernel::quintic()}) {
    const auto op = reference_operator(k, 12, 1);
    EXPECT_NEAR(op.load().sum(), 2.0, 2e-10) << k.name();
  }
}

TEST(WeakOperator, MassSymmetricPositiveDefinite) {
  const auto op = reference_operator(Kernel::cubic(), 15, 2);
  EXPECT_LT((op.mass() - op.mass().transpose()).cwiseAbs().maxCoeff(), 1e-15);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(op.mass());
  EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
  EXPECT_GT(op.mass_condition(), 1.0);
}

TEST(WeakOperator, SbpIdentityWithReferenceQuadrature) {
  for (const auto& k : {Kernel::cubic(), Kernel::quintic()})
    for (int P : {1, 2}) {
      const auto op = reference_operator(k, 14, P);
      const Eigen::MatrixXd& B = op.advection();
      const Eigen::MatrixXd defect = B + B.transpose() - (op.right_trace() * op.right_trace().transpose() -
                                                          op.left_trace() * op.left_trace().transpose());
      EXPECT_LE(defect.cwiseAbs().maxCoeff(), 1e-8) << k.name() << " P=" << P;
      EXPECT_DOUBLE_EQ(op.sbp_defect(), defect.cwiseAbs().maxCoeff());
      // Column sums vanish, row sums give r - l.
      EXPECT_LT(B.colwise().sum().cwiseAbs().maxCoeff(), 1e-8);
      EXPECT_LT((B.rowwise().sum() - (op.right_trace() - op.left_trace())).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(WeakOperator, SingleSymmetricCenterHasZeroAdvection) {
  const NodeSet nodes(kLine, {point1d(0.0)});
  const auto op = assemble_weak_operator(build_space(Kernel::gaussian(2.0), nodes, 0), gauss_legendre_rule(-1, 1, 60));
  EXPECT_NEAR(op.advection()(0, 0), 0.0, 1e-14);
}

TEST(WeakOperator, MatchesBruteForceOracle) {
  for (int n : {2, 3, 5})
    for (int P : {1, 2}) {
      const auto nodes = equidistant_nodes(kLine, n);
      const auto op = assemble_weak_operator(build_space(Kernel::cubic(), nodes, P), reference_rule(nodes));
      std::vector<double> c;
      for (const auto& p : nodes.points()) c.push_back(p.x());
      const auto [M, B] = oracle::galerkin_matrices(oracle::Cardinal1d("cubic", 1.0, c, P), -1.0, 1.0, 100000);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          EXPECT_NEAR(op.mass()(i, j), M[i][j], 1e-6);
          EXPECT_NEAR(op.advection()(i, j), B[i][j], 1e-6);
        }
    }
}

TEST(WeakOperator, DimensionMismatchRejected) {
  const auto nodes = equidistant_nodes(kLine, 5);
  const auto rule2 = tensor_product(gauss_legendre_rule(-1, 1, 4), gauss_legendre_rule(-1, 1, 4));
  EXPECT_THROW(assemble_weak_operator(build_space(Kernel::cubic(), nodes, 1), rule2), ArgumentError);
}

TEST(WeakCollocation, ConstantStateIsStationary) {
  const auto op = reference_operator(Kernel::cubic(), 16, 1);
  const auto adv = linear_advection_problem({1.0, 0.0}, AdvectionProfile::gaussian20, BoundaryKind::periodic);
  const auto bur = burgers_problem();
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(16, 0.7);
  EXPECT_LT(weak_collocation_rhs(op, NumericalFlux::upwind(1.0), adv, 0.0, u).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(weak_collocation_rhs(op, NumericalFlux::godunov(bur.flux), bur, 0.0, u).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(weak_analytical_rhs(op, NumericalFlux::godunov(bur.flux), bur, 0.0, u).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(WeakCollocation, PeriodicUpwindEnergyRate) {
  const auto op = reference_operator(Kernel::cubic(), 20, 1);
  const auto adv = linear_advection_problem({1.0, 0.0}, AdvectionProfile::gaussian20, BoundaryKind::periodic);
  const Eigen::VectorXd u = sample(op, bump);
  const auto res = weak_collocation_rhs_detail(op, NumericalFlux::upwind(1.0), adv, 0.0, u);
  const double jump = res.boundary.trace_right - res.boundary.trace_left;
  EXPECT_NEAR(2.0 * u.dot(op.mass() * res.dudt), -jump * jump, 1e-8);
  EXPECT_GT(jump * jump, 1e-3);
}

TEST(WeakCollocation, ConservationRate) {
  const auto op = reference_operator(Kernel::quintic(), 18, 1);
  const auto bur = burgers_problem();
  const Eigen::VectorXd u = sample(op, bump);
  const auto res = weak_collocation_rhs_detail(op, NumericalFlux::godunov(bur.flux), bur, 0.0, u);
  EXPECT_NEAR(op.load().dot(res.dudt), -(res.boundary.flux_right - res.boundary.flux_left), 1e-10);
}

TEST(WeakCollocation, InflowUsesBoundaryData) {
  const auto op = reference_operator(Kernel::cubic(), 10, 1);
  auto adv = linear_advection_problem({1.0, 0.0}, AdvectionProfile::gaussian20, BoundaryKind::inflow);
  adv.boundary.left = [](double) { return State::Constant(1, 0.25); };
  const Eigen::VectorXd u = sample(op, bump);
  const auto res = weak_collocation_rhs_detail(op, NumericalFlux::upwind(1.0), adv, 0.0, u);
  EXPECT_DOUBLE_EQ(res.boundary.flux_left, 0.25);
  EXPECT_NEAR(res.boundary.flux_right, res.boundary.trace_right, 1e-15);
}

TEST(WeakCollocation, NonFiniteStateRejected) {
  const auto op = reference_operator(Kernel::cubic(), 6, 1);
  const auto adv = linear_advection_problem({1.0, 0.0}, AdvectionProfile::gaussian20, BoundaryKind::periodic);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(6);
  u[2] = NAN;
  EXPECT_THROW(weak_collocation_rhs(op, NumericalFlux::upwind(1.0), adv, 0.0, u), StateError);
}

TEST(WeakAnalytical, AgreesWithCollocationForLinearFlux) {
  const auto op = reference_operator(Kernel::gaussian(5.0), 15, 1);
  const auto adv = linear_advection_problem({1.0, 0.0}, AdvectionProfile::gaussian20, BoundaryKind::periodic);
  const Eigen::VectorXd u = sample(op, bump);
  const auto flux = NumericalFlux::upwind(1.0);
  EXPECT_LT((weak_analytical_rhs(op, flux, adv, 0.0, u) - weak_collocation_rhs(op, flux, adv, 0.0, u)).cwiseAbs().maxCoeff(),
            1e-10);
}

TEST(WeakAnalytical, BurgersMatchesDenseGalerkinOracle) {
  const auto nodes = equidistant_nodes(kLine, 3);
  const auto op = assemble_weak_operator(build_space(Kernel::cubic(), nodes, 1), reference_rule(nodes));
  const auto bur = burgers_problem();
  Eigen::VectorXd u(3);
  u << 0.2, 1.1, -0.4;
  const Eigen::VectorXd got = weak_analytical_rhs(op, NumericalFlux::godunov(bur.flux), bur, 0.0, u);

  const oracle::Cardinal1d c("cubic", 1.0, {-1.0, 0.0, 1.0}, 1);
  const auto [M, B] = oracle::galerkin_matrices(c, -1.0, 1.0, 100001);
  auto uN = [&](double x) { return u[0] * c.value(0, x) + u[1] * c.value(1, x) + u[2] * c.value(2, x); };
  const double uL = uN(-1.0), uR = uN(1.0);
  const double fnum = oracle::godunov_sampled([](double v) { return 0.5 * v * v; }, uR, uL, 100001);
  oracle::Mat rhs(3, oracle::Vec(1));
  for (int m = 0; m < 3; ++m) {
    const double q = oracle::trapezoid(-1.0, 1.0, 100001, [&](double x) {
      const double v = uN(x);
      return c.derivative(m, x) * 0.5 * v * v;
    });
    rhs[m][0] = q - fnum * c.value(m, 1.0) + fnum * c.value(m, -1.0);
  }
  const auto expect = oracle::solve(M, rhs);
  for (int m = 0; m < 3; ++m) EXPECT_NEAR(got[m], expect[m][0], 1e-6);
}

TEST(WeakSystem, EulerConstantStateIsStationary) {
  const auto op = reference_operator(Kernel::cubic(), 12, 1);
  const auto eu = euler_smooth_problem();
  Eigen::MatrixXd U(12, 3);
  U.rowwise() = Eigen::RowVector3d(1.2, 0.3, 2.0);
  const auto flux = NumericalFlux::rusanov(eu.system_flux, eu.wavespeed);
  EXPECT_LT(weak_collocation_rhs_system(op, flux, eu, 0.0, U).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(WeakSystem, ScalarSystemPathMatchesScalarPath) {
  const auto op = reference_operator(Kernel::cubic(), 12, 1);
  const auto bur = burgers_problem();
  const Eigen::VectorXd u = sample(op, bump);
  const auto flux = NumericalFlux::rusanov(bur.flux, bur.flux_derivative);
  const Eigen::MatrixXd sys = weak_collocation_rhs_system(op, flux, bur, 0.0, u);
  EXPECT_LT((sys.col(0) - weak_collocation_rhs(op, flux, bur, 0.0, u)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(StrongCollocation, ConstantsAndLinears) {
  const auto space = build_space(Kernel::cubic(), equidistant_nodes(kLine, 12), 2);
  const StrongOperator op(space, StrongBoundary::none);
  const auto adv = linear_advection_problem({1.0, 0.0}, AdvectionProfile::gaussian20, BoundaryKind::periodic);
  EXPECT_LT(strong_collocation_rhs(op, adv, 0.0, Eigen::VectorXd::Constant(12, 3.0)).cwiseAbs().maxCoeff(), 1e-8);
  Eigen::VectorXd x(12);
  for (int i = 0; i < 12; ++i) x[i] = space->nodes()[i].x();
  EXPECT_LT((strong_collocation_rhs(op, adv, 0.0, x).array() + 1.0).abs().maxCoeff(), 1e-8);
}

TEST(StrongCollocation, MatchesFiniteDifferenceOfFluxInterpolant) {
  const auto space = build_space(Kernel::quintic(), equidistant_nodes(kLine, 15), 1);
  const StrongOperator op(space, StrongBoundary::none);
  const auto bur = burgers_problem();
  Eigen::VectorXd u(15), f(15);
  for (int i = 0; i < 15; ++i) {
    u[i] = bump(space->nodes()[i].x());
    f[i] = 0.5 * u[i] * u[i];
  }
  const Eigen::VectorXd got = strong_collocation_rhs(op, bur, 0.0, u);
  const auto fN = fit(space, f);
  const double h = 1e-6;
  for (int i = 0; i < 15; ++i) {
    const double x = space->nodes()[i].x();
    const double lo = std::max(-1.0, x - h), hi = std::min(1.0, x + h);
    const double fd = (fN(point1d(hi)) - fN(point1d(lo))) / (hi - lo);
    EXPECT_NEAR(got[i], -fd, 1e-4);
  }
}

TEST(StrongBoundary, InjectionModes) {
  const auto space = build_space(Kernel::cubic(), equidistant_nodes(kLine, 8), 1);
  auto adv = linear_advection_problem({1.0, 0.0}, AdvectionProfile::gaussian20, BoundaryKind::inflow);
  Eigen::MatrixXd U = Eigen::MatrixXd::Constant(8, 1, 0.5);
  U(7, 0) = 0.9;
  StrongBoundaryEnforcer(StrongOperator(space, StrongBoundary::inject_inflow), adv).apply(0.3, U);
  EXPECT_DOUBLE_EQ(U(0, 0), adv.boundary.left(0.3)[0]);
  StrongBoundaryEnforcer(StrongOperator(space, StrongBoundary::inject_periodic), adv).apply(0.3, U);
  EXPECT_NEAR(U(0, 0), 0.9, 1e-12);
  Eigen::MatrixXd V = U;
  StrongBoundaryEnforcer(StrongOperator(space, StrongBoundary::none), adv).apply(0.3, V);
  EXPECT_EQ(V, U);
  EXPECT_EQ(parse_strong_boundary("periodic"), StrongBoundary::inject_periodic);
  EXPECT_THROW(parse_strong_boundary("reflect"), ConfigError);
}

TEST(StrongBoundary, TwoDimensionalInflowEdge) {
  const auto space = build_space(Kernel::cubic(), equidistant_nodes(Domain::square(-1, 1), 16), 1);
  const auto adv = make_problem("advect-2d");
  const StrongBoundaryEnforcer e(StrongOperator(space, StrongBoundary::inject_periodic), adv);
  EXPECT_EQ(e.boundary_nodes().size(), 4u);
  for (int n : e.boundary_nodes()) EXPECT_DOUBLE_EQ(space->nodes()[n].x(), -1.0);
}

namespace {

struct TwoD {
  SpacePtr space;
  WeakOperator op;
};

TwoD two_d_operator(int n, const QuadratureRule& line) {
  const auto nodes = equidistant_nodes(Domain::square(-1, 1), n);
  auto space = build_space(Kernel::cubic(), nodes, 1);
  return {space, assemble_weak_operator(space, tensor_product(line, line))};
}

}  // namespace

TEST(WeakCollocation2d, ConstantStateIsStationary) {
  // Free-stream preservation holds to quadrature accuracy in 2D; a fine
  // Gauss rule brings it below 1e-8.
  const auto t = two_d_operator(36, gauss_legendre_rule(-1, 1, 800));
  const auto adv = make_problem("advect-2d");
  const Eigen::VectorXd du =
      weak_collocation_rhs_2d(t.op, NumericalFlux::upwind(1.0), adv, 0.0, Eigen::VectorXd::Constant(36, 1.3));
  EXPECT_LT(du.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(WeakCollocation2d, EnergyRateAndConservation) {
  const auto t = two_d_operator(36, trapezoid_rule(-1, 1, 200));
  const auto adv = make_problem("advect-2d");
  const auto flux = NumericalFlux::upwind(1.0);
  Eigen::VectorXd u(36);
  for (int i = 0; i < 36; ++i) u[i] = adv.initial(t.space->nodes()[i])[0];
  const Eigen::VectorXd du = weak_collocation_rhs_2d(t.op, flux, adv, 0.0, u);
  EXPECT_LE(2.0 * u.dot(t.op.mass() * du), 1e-8);
  EXPECT_NEAR(t.op.load().dot(du), 0.0, 1e-10);
  EXPECT_NEAR(t.op.load().sum(), 4.0, 1e-10);
  const Eigen::VectorXd central = weak_collocation_rhs_2d(t.op, NumericalFlux::central(adv.flux), adv, 0.0, u);
  EXPECT_NEAR(t.op.load().dot(central), 0.0, 1e-10);
}

TEST(WeakCollocation2d, MatchesOneDimensionalRhsOnYConstantData) {
  const int m = 10;
  const auto t = two_d_operator(m * m, gauss_legendre_rule(-1, 1, 600));
  const auto line = equidistant_nodes(kLine, m);
  const auto op1 = assemble_weak_operator(build_space(Kernel::cubic(), line, 1), reference_rule(line));
  const auto adv2 = make_problem("advect-2d");
  const auto adv1 = linear_advection_problem({1.0, 0.0}, AdvectionProfile::gaussian20, BoundaryKind::periodic);
  Eigen::VectorXd u(m * m), v(m);
  for (int i = 0; i < m * m; ++i) u[i] = bump(t.space->nodes()[i].x());
  for (int i = 0; i < m; ++i) v[i] = bump(line[i].x());
  const Eigen::VectorXd du = weak_collocation_rhs_2d(t.op, NumericalFlux::upwind(1.0), adv2, 0.0, u);
  const Eigen::VectorXd dv = weak_collocation_rhs(op1, NumericalFlux::upwind(1.0), adv1, 0.0, v);
  double worst = 0.0;
  for (int i = 0; i < m * m; ++i) {
    const int j = static_cast<int>(std::lround((t.space->nodes()[i].x() + 1.0) * (m - 1) / 2.0));
    worst = std::max(worst, std::abs(du[i] - dv[j]));
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(WeakCollocation2d, RejectsOneDimensionalOperator) {
  const auto op = reference_operator(Kernel::cubic(), 6, 1);
  const auto adv = linear_advection_problem({1.0, 0.0}, AdvectionProfile::gaussian20, BoundaryKind::periodic);
  EXPECT_THROW(weak_collocation_rhs_2d(op, NumericalFlux::upwind(1.0), adv, 0.0, Eigen::VectorXd::Zero(6)),
               ArgumentError);
}

TEST(OperatorDump, SeventeenSignificantDigits) {
  Eigen::MatrixXd m(2, 2);
  m << 1.0 / 3.0, -2.0, 0.0, 1e-300;
  std::ostringstream os;
  write_matrix(os, m);
  EXPECT_EQ(os.str(),
            "3.3333333333333331e-01 -2.0000000000000000e+00\n"
            "0.0000000000000000e+00 1.0000000000000000e-300\n");
}
