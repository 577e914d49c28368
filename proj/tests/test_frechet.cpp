#include <gtest/gtest.h>

#include "testing.hpp"

using namespace gibc;
namespace tk = gibc::testkit;

namespace {

struct Fixture {
  FourierCurve curve = tk::starfish_curve();
  double k = 3.0;
  SensorGeometry s = tk::ring_sensors(12);
  SolverOptions opt;
};

CVec field(const Fixture& S, const FourierCurve& c, const ImpedanceParams& p) {
  return solve_impedance(c, eval_impedance(p, sample_curve(c, S.opt.n), S.k), S.k, S.s, S.opt).field.flatten();
}

double domain_column_error(const Fixture& S, const ImpedanceParams& p, int col, double eps) {
  const int Ng = 2;
  const ImpedanceSolution sol =
      solve_impedance(S.curve, eval_impedance(p, sample_curve(S.curve, S.opt.n), S.k), S.k, S.s, S.opt);
  const CVec J = domain_jacobian(sol, p, Ng).J.col(col);
  RVec w = RVec::Zero(2 * Ng + 1);
  w[col] = 1.0;
  const CVec fd = (field(S, tk::displaced(S.curve, w, eps), p) - field(S, tk::displaced(S.curve, w, -eps), p)) /
                  (2 * eps);
  return (fd - J).norm() / J.norm();
}

}  // namespace

class DomainJacobian : public ::testing::TestWithParam<int> {};

TEST_P(DomainJacobian, CentralDifferencesConvergeAtSecondOrder) {
  Fixture S;
  const ImpedanceParams models[] = {ImpedanceParams::constant(cplx(0.8, 0.3)),
                                    ImpedanceParams::ch(cplx(1.0, -0.3), cplx(0.2, -0.1)),
                                    ImpedanceParams::abv(1.7, 0.6, 0.15), ImpedanceParams::neumann()};
  const ImpedanceParams& p = models[GetParam()];
  for (int col : {0, 1, 4}) {
    const double e3 = domain_column_error(S, p, col, 1e-3), e4 = domain_column_error(S, p, col, 1e-4);
    EXPECT_LE(e4, 1e-6) << to_string(p.kind) << " column " << col;
    EXPECT_NEAR(std::log10(e3 / e4), 2.0, 0.2) << to_string(p.kind) << " column " << col;
  }
}

INSTANTIATE_TEST_SUITE_P(Models, DomainJacobian, ::testing::Values(0, 1, 2, 3));

TEST(ImpedanceJacobian, MatchesFiniteDifferencesForEveryModel) {
  Fixture S;
  CVec fs(3);
  fs << cplx(0.1, 0.05), cplx(0.9, 0.3), cplx(-0.05, 0.02);
  for (const ImpedanceParams& p : {ImpedanceParams::constant(cplx(0.8, 0.3)), ImpedanceParams::fs(fs),
                                   ImpedanceParams::ch(cplx(1.0, -0.3), cplx(0.2, -0.1)),
                                   ImpedanceParams::abv(1.7, 0.6, 0.15)}) {
    const ImpedanceSystem sys = prepare_impedance(S.curve, S.k, S.s, S.opt);
    const ImpedanceSolution sol = sys.solve(eval_impedance(p, sys.C, S.k));
    const CMat J = impedance_jacobian(sol, p).J;
    ASSERT_EQ(J.cols(), p.real_size());
    for (int col = 0; col < J.cols(); ++col) {
      const double eps = 1e-4;
      RVec rp = p.real_params(), rm = rp;
      rp[col] += eps;
      rm[col] -= eps;
      const CVec fd = (sys.solve(eval_impedance(p.with_real_params(rp), sys.C, S.k)).field.flatten() -
                       sys.solve(eval_impedance(p.with_real_params(rm), sys.C, S.k)).field.flatten()) / (2 * eps);
      EXPECT_LE((fd - J.col(col)).norm() / J.col(col).norm(), 1e-6) << to_string(p.kind) << " column " << col;
    }
  }
}

TEST(ImpedanceJacobian, NeumannHasNoColumns) {
  Fixture S;
  const ImpedanceSolution sol = solve_neumann(S.curve, S.k, S.s, S.opt);
  EXPECT_EQ(impedance_jacobian(sol, ImpedanceParams::neumann()).J.cols(), 0);
}

TEST(DomainJacobian, RowOrderFollowsMask) {
  Fixture S;
  S.s = build_sensors(3.0, 1.0, Aperture{Aperture::Kind::backscatter, pi / 2});
  const ImpedanceParams p = ImpedanceParams::constant(0.5);
  const ImpedanceSolution sol = solve_impedance(S.curve, CVec::Constant(S.opt.n, 0.5), S.k, S.s, S.opt);
  const CMat J = domain_jacobian(sol, p, 1).J;
  EXPECT_EQ(J.rows(), S.s.active());
  // Column 0 (uniform dilation) against the flattened field derivative.
  RVec w = RVec::Zero(3);
  w[0] = 1.0;
  const double eps = 1e-4;
  auto F = [&](double e) {
    const FourierCurve c = tk::displaced(S.curve, w, e);
    return solve_impedance(c, CVec::Constant(S.opt.n, 0.5), S.k, S.s, S.opt).field.flatten();
  };
  EXPECT_LE(((F(eps) - F(-eps)) / (2 * eps) - J.col(0)).norm() / J.col(0).norm(), 1e-6);
}
