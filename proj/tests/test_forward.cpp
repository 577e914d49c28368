#include <gtest/gtest.h>

#include "testing.hpp"

using namespace gibc;
namespace tk = gibc::testkit;

TEST(Impedance, SeparationOfVariablesOnTheDisk) {
  const cplx lam(1.0, 0.5);
  SolverOptions opt;
  const SensorGeometry s = tk::ring_sensors(12);
  for (double k : {1.0, 5.0, 10.0}) {
    const auto f = solve_impedance(make_circle(1.0, 8), CVec::Constant(opt.n, lam), k, s, opt).field;
    EXPECT_LE(tk::sov_error(f, s, sov::impedance_coefficients(k, 1.0, lam), k), 1e-7) << "k = " << k;
  }
}

TEST(Impedance, NeumannIsZeroImpedance) {
  const FourierCurve c = tk::starfish_curve();
  const SensorGeometry s = tk::ring_sensors(8);
  SolverOptions opt;
  const CMat a = solve_neumann(c, 2.0, s, opt).field.values;
  const CMat b = solve_impedance(c, CVec::Zero(opt.n), 2.0, s, opt).field.values;
  EXPECT_EQ((a - b).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE(tk::sov_error(solve_neumann(make_circle(1.0, 8), 4.0, s, opt).field, s,
                               sov::impedance_coefficients(4.0, 1.0, 0.0), 4.0),
            1e-7);
}

TEST(Impedance, PreparedSystemMatchesDirectSolve) {
  const FourierCurve c = tk::starfish_curve();
  const SensorGeometry s = tk::ring_sensors(8);
  SolverOptions opt;
  const ImpedanceSystem sys = prepare_impedance(c, 3.0, s, opt);
  const CVec lam = eval_impedance(ImpedanceParams::abv(1.0, 0.7, 0.2), sys.C, 3.0);
  const CMat a = sys.solve(lam).field.values, b = solve_impedance(c, lam, 3.0, s, opt).field.values;
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-13 * b.cwiseAbs().maxCoeff());
  EXPECT_THROW(solve_impedance(c, CVec::Zero(10), 3.0, s, opt), std::invalid_argument);
}

TEST(Impedance, TranslationShiftsThePhase) {
  // Translating the obstacle by t multiplies the boundary total field for
  // direction d by exp(i k d.t).
  const SensorGeometry s = tk::ring_sensors(6);
  SolverOptions opt;
  const double k = 2.0;
  const auto a = solve_impedance(FourierCurve::circle(1.0).with_order(8), CVec::Constant(opt.n, 0.5), k, s, opt);
  const auto b =
      solve_impedance(FourierCurve::circle(1.0, 0.3, -0.2).with_order(8), CVec::Constant(opt.n, 0.5), k, s, opt);
  for (int d = 0; d < s.nd(); ++d) {
    const cplx ph = std::exp(I * k * s.directions[d].dot(Vec2(0.3, -0.2)));
    EXPECT_LE((b.u.col(d) - ph * a.u.col(d)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Transmission, SeparationOfVariablesAndJumps) {
  SolverOptions opt;
  const SensorGeometry s = tk::ring_sensors(12);
  for (double omega : {1.0, 5.0}) {
    PhysicalParams ph;
    ph.omega = omega;
    ph.delta = std::sqrt(3.0) * omega;
    const TransmissionSolution sol = solve_transmission(make_circle(1.0, 8), ph, s, opt);
    EXPECT_LE(tk::sov_error(sol.field, s, sov::transmission_coefficients(ph.k2(), ph.k1(), ph.alpha(), 1.0),
                                 ph.k2()),
              1e-6);
    const JumpResidual jr = transmission_jump_residual(sol, s, opt);
    EXPECT_LE(jr.field, 1e-8);
    EXPECT_LE(jr.flux, 1e-8);
  }
}

TEST(Transmission, JumpsOnStarfish) {
  PhysicalParams ph;
  ph.omega = 3.0;
  ph.delta = 5.0;
  const SensorGeometry s = tk::ring_sensors(6);
  SolverOptions opt;
  const TransmissionSolution sol = solve_transmission(tk::starfish_curve(), ph, s, opt);
  const JumpResidual jr = transmission_jump_residual(sol, s, opt);
  EXPECT_LE(std::max(jr.field, jr.flux), 1e-8);
}

TEST(Transmission, ParameterValidation) {
  PhysicalParams ph;
  ph.delta = -1.0;
  EXPECT_THROW(ph.validate(), std::invalid_argument);
}

TEST(ForwardMap, MaskSelectsEntries) {
  const SensorGeometry s = build_sensors(2.0, 1.0, Aperture{Aperture::Kind::backscatter, pi / 4});
  const ReceptorField f = forward_map(ForwardModel::neumann, make_circle(1.0, 8), PhysicalParams{2.0}, s);
  EXPECT_EQ(f.flatten().size(), s.active());
  EXPECT_LT(s.active(), long(s.nd()) * s.nr());
}
