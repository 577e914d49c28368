#include <gtest/gtest.h>

#include <random>

#include "testing.hpp"

using namespace gibc;
namespace tk = gibc::testkit;

TEST(GaussianFilter, LeavesTheMeanAndDampsOthers) {
  const int Nh = 4;
  RVec e1 = RVec::Zero(2 * Nh + 1);
  e1[0] = 1.0;
  EXPECT_EQ(gaussian_filter(e1, 0.3, Nh), e1);
  const RVec ones = RVec::Ones(2 * Nh + 1);
  const RVec g = gaussian_filter(ones, 0.5, Nh);
  // Cosine m and sine m share the factor exp(-m^2 / (sigma Nh)^2).
  for (int m = 1; m <= Nh; ++m) {
    EXPECT_DOUBLE_EQ(g[m], std::exp(-double(m * m) / 4.0));
    EXPECT_DOUBLE_EQ(g[Nh + m], g[m]);
  }
  EXPECT_THROW(gaussian_filter(ones.head(4), 0.5, Nh), std::invalid_argument);
}

TEST(GaussianFilter, NeverIncreasesMagnitudes) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N;
  for (int t = 0; t < 2000; ++t) {
    const int Nh = 1 + t % 17;
    RVec w(2 * Nh + 1);
    for (int i = 0; i < w.size(); ++i) w[i] = N(rng);
    const RVec g = gaussian_filter(w, std::pow(0.1, t % 4), Nh);
    EXPECT_TRUE((g.array().abs() <= w.array().abs()).all());
  }
}

TEST(FilterStep, StepLengthLevels) {
  OptimizerConfig cfg;
  const RVec w = RVec::Constant(3, 64.0);
  const FilterResult r = filter_step(FilterKind::step_length, w, [](const RVec& c) { return c[0] <= 1.0; }, cfg);
  ASSERT_TRUE(r.accepted);
  EXPECT_EQ(r.n_filt, 2);
  EXPECT_DOUBLE_EQ(r.w[0], 1.0);
  const FilterResult none = filter_step(FilterKind::gaussian, w, [](const RVec&) { return false; }, cfg);
  EXPECT_FALSE(none.accepted);
  EXPECT_EQ(none.n_filt, cfg.N_filt);
  EXPECT_EQ(none.w.norm(), 0.0);
}

TEST(Directions, GaussNewtonSolvesLinearProblemInOneStep) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N;
  CMat J(30, 5);
  for (int i = 0; i < J.rows(); ++i)
    for (int j = 0; j < J.cols(); ++j) J(i, j) = cplx(N(rng), N(rng));
  RVec x(5);
  for (int j = 0; j < 5; ++j) x[j] = N(rng);
  const CVec r = -J * x.cast<cplx>();
  const DescentDirection d = descent_direction(DirectionKind::gauss_newton, J, r);
  EXPECT_FALSE(d.fallback);
  EXPECT_LE((d.d * d.step - x).norm(), 1e-12 * x.norm());
}

TEST(Directions, RankDeficientGaussNewtonFallsBack) {
  CMat J = CMat::Zero(6, 2);
  J.col(0).setConstant(cplx(1, 1));
  J.col(1) = J.col(0);
  const DescentDirection d = descent_direction(DirectionKind::gauss_newton, J, CVec::Constant(6, 1.0));
  EXPECT_TRUE(d.fallback);
  EXPECT_THROW(descent_direction(DirectionKind::steepest_descent, CMat::Zero(3, 2), CVec::Ones(3)),
               std::invalid_argument);
}

TEST(Directions, CauchyPointMinimizesTheLinearModel) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> N;
  CMat J(20, 4);
  CVec r(20);
  for (int i = 0; i < 20; ++i) {
    r[i] = cplx(N(rng), N(rng));
    for (int j = 0; j < 4; ++j) J(i, j) = cplx(N(rng), N(rng));
  }
  const DescentDirection d = descent_direction(DirectionKind::steepest_descent, J, r);
  auto model = [&](double t) { return (r + J * (t * d.step).cast<cplx>()).squaredNorm(); };
  EXPECT_LT(model(d.d), model(0.99 * d.d));
  EXPECT_LT(model(d.d), model(1.01 * d.d));
}

namespace {

FrequencyData impedance_data(const FourierCurve& truth, const ImpedanceParams& p, double omega,
                             const OptimizerConfig& cfg, int n) {
  FrequencyData fd;
  fd.omega = omega;
  fd.sensors = build_sensors(omega);
  SolverOptions opt;
  opt.n = n;
  fd.field = solve_impedance(truth, eval_impedance(p, sample_curve(truth, n), omega / cfg.c2), omega, fd.sensors, opt)
                 .field;
  return fd;
}

}  // namespace

TEST(Residual, ZeroAtTheGeneratingParameters) {
  OptimizerConfig cfg;
  const FourierCurve c = tk::starfish_curve();
  const ImpedanceParams p = ImpedanceParams::abv(1.0, 0.8, 0.3);
  const FrequencyData fd = impedance_data(c, p, 2.0, cfg, cfg.nodes(2.0, c.L));
  EXPECT_LE(relative_residual(fd, c, p, cfg), 1e-10);
  EXPECT_GT(relative_residual(fd, c, ImpedanceParams::abv(1.0, 0.8, 0.0), cfg), 1e-3);
}

TEST(SingleFrequency, ResidualsDecreaseAndIteratesStayAdmissible) {
  OptimizerConfig cfg;
  cfg.N_f = 8;
  const FourierCurve truth = make_ellipse(1.2, 0.9, 32);
  const FrequencyData fd = impedance_data(truth, ImpedanceParams::constant(cplx(0.8, 0.3)), 2.0, cfg, 400);
  InversionState st;
  st.curve = FourierCurve::circle(1.0);
  st.params = ImpedanceParams::constant(1.0);
  const InversionState out = solve_single_frequency(st, fd, cfg);
  ASSERT_GE(out.residuals.size(), 2u);
  for (std::size_t i = 1; i < out.residuals.size(); ++i) EXPECT_LE(out.residuals[i], out.residuals[i - 1]);
  EXPECT_LT(out.residuals.back(), 0.5 * out.residuals.front());
  for (const auto& r : out.records) {
    EXPECT_TRUE(r.domain_ok);
    EXPECT_TRUE(r.impedance_ok);
  }
}

TEST(Continuation, RejectsUnsortedFrequencies) {
  ScatteringDataset ds;
  ds.slices.resize(2);
  ds.slices[0].omega = 2.0;
  ds.slices[1].omega = 1.0;
  EXPECT_THROW(continuation_solve(ds, InversionState{}, OptimizerConfig{}), std::invalid_argument);
}

TEST(Continuation, ConstantToAbvKeepsTheFlatImpedance) {
  for (cplx c : {cplx(0.7, -0.2), cplx(1.3, 0.0), cplx(0.5, -0.3)}) {
    const ImpedanceParams p = from_constant(ModelKind::abv, c, ImpedanceParams::abv(1, 1, 1));
    EXPECT_TRUE(is_feasible(p));
    EXPECT_LE(std::abs(p.beta[1] * std::sqrt(cplx(1.0, -p.beta[0])) - c), 1e-12);
    EXPECT_EQ(p.beta[2], 0.0);
  }
  // Phases outside the reachable sector are capped.
  const ImpedanceParams far = from_constant(ModelKind::abv, cplx(0.1, -1.0), ImpedanceParams::abv(1, 1, 1));
  EXPECT_NEAR(far.beta[0], std::tan(0.45 * pi), 1e-9);
}

TEST(Continuation, InitialStateIsAUnitCircleAtTheSensorCentroid) {
  ScatteringDataset ds;
  FrequencyData fd;
  fd.omega = 1.0;
  fd.sensors = build_sensors(1.0);
  for (auto& r : fd.sensors.receptors) r += Vec2(2.0, -1.0);
  ds.slices.push_back(fd);
  const InversionState s = initial_state(ds, ModelKind::abv);
  EXPECT_NEAR(s.curve.a1[0], 2.0, 1e-12);
  EXPECT_NEAR(s.curve.a2[0], -1.0, 1e-12);
  EXPECT_NEAR(s.curve.L, 2 * pi, 1e-12);
}

TEST(Policy, NodeAndBandSizes) {
  OptimizerConfig cfg;
  const double L = 2 * pi;
  EXPECT_EQ(cfg.nodes(1.0, L), 300);
  EXPECT_EQ(cfg.nodes(40.0, L), 400);
  EXPECT_EQ(cfg.n_gamma(5.0, L), 10);
  EXPECT_EQ(cfg.n_c(5.0, L), 5);
  EXPECT_EQ(cfg.n_gamma(0.1, L), 1);
  EXPECT_EQ(OptimizerConfig::curve_order(301), 75);
}
