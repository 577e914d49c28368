#include <gtest/gtest.h>

#include "testing.hpp"

using namespace gibc;
namespace tk = gibc::testkit;

namespace {
// Eigenvalues of S on the unit circle: (i pi / 2) J_m(k) H_m(k).
cplx single_layer_eigenvalue(int m, double k) {
  return I * pi / 2.0 * std::cyl_bessel_j(m, k) * cplx(std::cyl_bessel_j(m, k), std::cyl_neumann(m, k));
}
}  // namespace

TEST(SingleLayer, CircleEigenvalues) {
  const FourierCurve c = make_circle(1.0, 8);
  const int n = 128;
  const CurveSamples C = sample_curve(c, n);
  const CMat S = build_operator(OpKind::S, 3.0, c, C, alpert_log_rule16());
  for (int m = 0; m < 5; ++m) {
    CVec v(n);
    for (int j = 0; j < n; ++j) v[j] = std::exp(I * double(m * C.s[j]));
    const CVec Sv = S * v;
    EXPECT_LE((Sv - single_layer_eigenvalue(m, 3.0) * v).cwiseAbs().maxCoeff(), 1e-12) << "mode " << m;
  }
}

TEST(LayerPotentials, GreenRepresentationOnStarfish) {
  const FourierCurve s = tk::starfish_curve();
  const CurveSamples C = sample_curve(s, 256);
  const cplx k = 3.0;
  const Vec2 src(0.1, 0.2), target(3.0, 1.0);
  CVec u(C.n), du(C.n);
  for (int j = 0; j < C.n; ++j) {
    u[j] = greens_kernel(k, C.pos(j), src, GreenKind::value);
    du[j] = greens_kernel(k, C.pos(j), src, GreenKind::dn_x, C.normal(j));
  }
  // Exterior field of an interior source: D u - S dn u reproduces it outside.
  const cplx val = (eval_potential(OpKind::D, k, C, u, {target}) - eval_potential(OpKind::S, k, C, du, {target}))[0];
  EXPECT_LE(std::abs(val - greens_kernel(k, target, src, GreenKind::value)), 1e-11);
  // On the boundary: (-1/2 + D) u - S dn u = 0.
  detail::WantOps w;
  w.Sa = w.Da = true;
  const LayerOperators ops = assemble_layer_operators(s, C, k, cplx(0, 3), alpert_log_rule16(), w);
  EXPECT_LE((-0.5 * u + ops.Da * u - ops.Sa * du).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(LayerPotentials, InteriorJumpRelationComplexWavenumber) {
  // Exterior source: the trace of an interior solution satisfies
  // (1/2 + D) u = S dn u.
  const FourierCurve s = tk::starfish_curve();
  const CurveSamples C = sample_curve(s, 256);
  const cplx k(2.0, 0.5);
  const Vec2 src(4.0, -1.0);
  CVec u(C.n), du(C.n);
  for (int j = 0; j < C.n; ++j) {
    u[j] = greens_kernel(k, C.pos(j), src, GreenKind::value);
    du[j] = greens_kernel(k, C.pos(j), src, GreenKind::dn_x, C.normal(j));
  }
  detail::WantOps w;
  w.Sa = w.Da = true;
  const LayerOperators ops = assemble_layer_operators(s, C, k, cplx(0, 1), alpert_log_rule16(), w);
  EXPECT_LE((0.5 * u + ops.Da * u - ops.Sa * du).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(LayerPotentials, ArgumentChecks) {
  const FourierCurve c = make_circle(1.0, 4);
  const CurveSamples C = sample_curve(c, 20);
  EXPECT_THROW(build_operator(OpKind::S, 1.0, c, C, alpert_log_rule16()), std::invalid_argument);
  const CurveSamples C2 = sample_curve(c, 64);
  EXPECT_THROW(build_operator(OpKind::Tdiff, 1.0, c, C2, alpert_log_rule16(), 1.0), std::invalid_argument);
  EXPECT_THROW(potential_matrix(OpKind::K, 1.0, C2, {Vec2(3, 0)}), std::invalid_argument);
  EXPECT_THROW(potential_matrix(OpKind::S, 1.0, C2, {Vec2(1.0, 0)}), std::domain_error);
}
