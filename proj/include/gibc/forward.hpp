#pragma once
// Forward scattering solvers on a closed curve: impedance (and Neumann as
// lambda = 0) through a regularized combined-field equation, and the
// penetrable transmission problem through a 2x2 block system.

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "gibc/geometry.hpp"
#include "gibc/layerpot.hpp"
#include "gibc/quadrature.hpp"
#include "gibc/special.hpp"

namespace gibc {

using BoolMat = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct PhysicalParams {
  double omega = 1.0;
  double c1 = 0.5, c2 = 1.0;
  double rho1 = 1.2, rho2 = 0.7;
  double delta = 0.0;

  double k2() const { return omega / c2; }
  cplx k1() const { return interior_wavenumber(omega, delta, c1); }
  double cr() const { return c1 / c2; }
  double rhor() const { return rho1 / rho2; }
  cplx refractive_index() const { return std::sqrt(cplx(1.0, delta / omega)) / cr(); }
  cplx alpha() const { return 1.0 / (rhor() * cplx(1.0, delta / omega)); }
  cplx b1() const { return alpha(); }
  double b2() const { return 1.0; }
  cplx q() const { return 0.5 * (1.0 / b1() + 1.0 / b2()); }

  void validate() const {
    if (!(omega > 0 && c1 > 0 && c2 > 0 && rho1 > 0 && rho2 > 0 && delta >= 0))
      throw std::invalid_argument("PhysicalParams: need omega, c, rho > 0 and delta >= 0");
  }
};

struct SensorGeometry {
  std::vector<Vec2> directions;  // unit incident directions
  std::vector<Vec2> receptors;
  BoolMat mask;                  // directions x receptors

  int nd() const { return int(directions.size()); }
  int nr() const { return int(receptors.size()); }
  long active() const { return mask.count(); }
};

/// Field at receptors, one row per incident direction.
struct ReceptorField {
  CMat values;
  BoolMat mask;

  /// Unmasked entries, incident-major then receptor.
  CVec flatten() const {
    CVec out(mask.count());
    long k = 0;
    for (int i = 0; i < values.rows(); ++i)
      for (int j = 0; j < values.cols(); ++j)
        if (mask(i, j)) out[k++] = values(i, j);
    return out;
  }
};

/// Stacks per-direction receptor blocks (nr x nd*p, column = dir*p + col)
/// into rows ordered incident-major, receptor-minor, masked rows dropped.
inline CMat stack_rows(const CMat& block, const BoolMat& mask, int p) {
  const int nd = int(mask.rows()), nr = int(mask.cols());
  CMat out(mask.count(), p);
  long r = 0;
  for (int i = 0; i < nd; ++i)
    for (int j = 0; j < nr; ++j)
      if (mask(i, j)) out.row(r++) = block.block(j, long(i) * p, 1, p);
  return out;
}

struct SolverStats {
  std::atomic<long> factorizations{0};
  std::atomic<long> back_substitutions{0};
};

inline SolverStats& solver_stats() {
  static SolverStats s;
  return s;
}

struct IllConditionedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kConditionLimit = 1e13;

struct SolverOptions {
  int n = 300;                                // boundary nodes
  const QuadratureRule* rule = nullptr;       // defaults to the order-16 rule
  const QuadratureRule& quadrature() const { return rule ? *rule : alpert_log_rule16(); }
};

inline CMat incident_values(const CurveSamples& C, const std::vector<Vec2>& dirs, double k) {
  CMat u(C.n, dirs.size());
  for (std::size_t i = 0; i < dirs.size(); ++i)
    for (int j = 0; j < C.n; ++j) u(j, i) = std::exp(I * k * dirs[i].dot(C.pos(j)));
  return u;
}

inline CMat incident_normal_derivative(const CurveSamples& C, const std::vector<Vec2>& dirs, double k) {
  CMat du(C.n, dirs.size());
  for (std::size_t i = 0; i < dirs.size(); ++i)
    for (int j = 0; j < C.n; ++j)
      du(j, i) = I * k * dirs[i].dot(C.normal(j)) * std::exp(I * k * dirs[i].dot(C.pos(j)));
  return du;
}

template <class LU>
double condition_estimate(const LU& lu) {
  const double rc = lu.rcond();
  return rc > 0 ? 1.0 / rc : INFINITY;
}

/// Solution of the impedance problem with everything needed to reuse the
/// factorization for further right-hand sides on the same curve and k.
struct ImpedanceSolution {
  FourierCurve curve;
  CurveSamples C;
  double k = 0.0;
  CVec lambda;
  SensorGeometry sensors;
  Eigen::PartialPivLU<CMat> lu;
  double condition = 0.0;
  CMat trace_map;     // phi -> u_scat on the boundary (exterior side)
  CMat receptor_map;  // phi -> u_scat at receptors
  CMat u;             // total field on the boundary, one column per direction
  CMat dnu;           // its normal derivative
  ReceptorField field;

  /// Scattered field at receptors for impedance data f (columns) on Gamma,
  /// i.e. the radiating v with dn v + i k lambda v = f.
  CMat receptors_for(const CMat& f) const {
    solver_stats().back_substitutions += f.cols();
    return receptor_map * lu.solve(f);
  }
};

/// Everything in the impedance system that does not depend on lambda. Trial
/// impedance values on a fixed curve only need a new factorization.
struct ImpedanceSystem {
  FourierCurve curve;
  CurveSamples C;
  double k = 0.0;
  SensorGeometry sensors;
  CMat A0;  // system matrix without the lambda term
  CMat trace_map;
  CMat receptor_map;
  CMat uin, dnin;

  ImpedanceSolution solve(const CVec& lambda) const {
    const int n = C.n;
    if (lambda.size() != n) throw std::invalid_argument("solve_impedance: lambda size != node count");
    const cplx ik = I * k;
    ImpedanceSolution sol;
    sol.curve = curve;
    sol.C = C;
    sol.k = k;
    sol.sensors = sensors;
    sol.lambda = lambda;
    sol.trace_map = trace_map;
    sol.receptor_map = receptor_map;
    sol.lu.compute(A0 + (ik * lambda).asDiagonal() * trace_map);
    solver_stats().factorizations++;
    sol.condition = condition_estimate(sol.lu);
    if (sol.condition > kConditionLimit)
      throw IllConditionedError("solve_impedance: condition estimate " + std::to_string(sol.condition));
    const CMat rhs = -(dnin + (ik * lambda).asDiagonal() * uin);
    const CMat phi = sol.lu.solve(rhs);
    solver_stats().back_substitutions += rhs.cols();
    sol.u = uin + trace_map * phi;
    sol.dnu = (-ik * lambda).asDiagonal() * sol.u;
    sol.field.values = (receptor_map * phi).transpose();
    sol.field.mask = sensors.mask;
    return sol;
  }
};

inline ImpedanceSystem prepare_impedance(const FourierCurve& curve, double k2, const SensorGeometry& sensors,
                                         const SolverOptions& opt = {}) {
  if (!(k2 > 0)) throw std::invalid_argument("solve_impedance: k2 must be positive");
  ImpedanceSystem sys;
  sys.curve = curve;
  sys.C = sample_curve(curve, opt.n);
  sys.k = k2;
  sys.sensors = sensors;
  const CurveSamples& C = sys.C;
  const cplx k = k2, ik = I * k2, kb = I * std::abs(k2);

  detail::WantOps want;
  want.Sa = want.Da = want.Ka = want.Sb = want.Kb = want.T = true;
  const LayerOperators ops = assemble_layer_operators(curve, C, k, kb, opt.quadrature(), want);

  sys.A0 = ops.Ka + ik * (ops.T * ops.Sb + ops.Kb * ops.Kb);
  sys.A0.diagonal().array() -= (2.0 + ik) / 4.0;
  // u_scat|Gamma = [S + ik (1/2 + D) S_b] phi
  sys.trace_map = ops.Sa + ik * (ops.Da * ops.Sb) + (0.5 * ik) * ops.Sb;

  const CMat RS = potential_matrix(OpKind::S, k, C, sensors.receptors);
  const CMat RD = potential_matrix(OpKind::D, k, C, sensors.receptors);
  sys.receptor_map = RS + ik * (RD * ops.Sb);
  sys.uin = incident_values(C, sensors.directions, k2);
  sys.dnin = incident_normal_derivative(C, sensors.directions, k2);
  return sys;
}

inline ImpedanceSolution solve_impedance(const FourierCurve& curve, const CVec& lambda, double k2,
                                         const SensorGeometry& sensors, const SolverOptions& opt = {}) {
  if (lambda.size() != opt.n) throw std::invalid_argument("solve_impedance: lambda size != node count");
  return prepare_impedance(curve, k2, sensors, opt).solve(lambda);
}

inline ImpedanceSolution solve_neumann(const FourierCurve& curve, double k2, const SensorGeometry& sensors,
                                       const SolverOptions& opt = {}) {
  return solve_impedance(curve, CVec::Zero(opt.n), k2, sensors, opt);
}

struct TransmissionSolution {
  FourierCurve curve;
  CurveSamples C;
  PhysicalParams phys;
  CMat mu, sigma;  // densities, one column per direction
  double condition = 0.0;
  ReceptorField field;
};

namespace detail {

// Suffix a is the exterior wavenumber k2, suffix b the interior k1.
inline LayerOperators transmission_operators(const FourierCurve& curve, const CurveSamples& C,
                                             const PhysicalParams& phys, const QuadratureRule& rule) {
  WantOps want;
  want.Sa = want.Da = want.Ka = want.Sb = want.Db = want.Kb = want.T = true;
  return assemble_layer_operators(curve, C, phys.k2(), phys.k1(), rule, want);
}

}  // namespace detail

inline TransmissionSolution solve_transmission(const FourierCurve& curve, const PhysicalParams& phys,
                                               const SensorGeometry& sensors, const SolverOptions& opt = {}) {
  phys.validate();
  TransmissionSolution sol;
  sol.curve = curve;
  sol.phys = phys;
  sol.C = sample_curve(curve, opt.n);
  const CurveSamples& C = sol.C;
  const int n = C.n;
  const LayerOperators ops = detail::transmission_operators(curve, C, phys, opt.quadrature());
  const cplx b1 = phys.b1(), b2 = phys.b2(), q = phys.q();

  CMat A(2 * n, 2 * n);
  A.topLeftCorner(n, n) = ops.Da / (q * b2) - ops.Db / (q * b1);
  A.topLeftCorner(n, n).diagonal().array() += 1.0;
  A.topRightCorner(n, n) = -(ops.Sa / (q * b2) - ops.Sb / (q * b1));
  A.bottomLeftCorner(n, n) = ops.T;
  A.bottomRightCorner(n, n) = -(ops.Ka - ops.Kb);
  A.bottomRightCorner(n, n).diagonal().array() += 1.0;

  Eigen::PartialPivLU<CMat> lu(A);
  solver_stats().factorizations++;
  sol.condition = condition_estimate(lu);
  if (sol.condition > kConditionLimit)
    throw IllConditionedError("solve_transmission: condition estimate " + std::to_string(sol.condition));

  const double k2 = phys.k2();
  const int nd = sensors.nd();
  CMat rhs(2 * n, nd);
  rhs.topRows(n) = -incident_values(C, sensors.directions, k2) / q;
  rhs.bottomRows(n) = -b2 * incident_normal_derivative(C, sensors.directions, k2);
  const CMat x = lu.solve(rhs);
  solver_stats().back_substitutions += nd;
  sol.mu = x.topRows(n);
  sol.sigma = x.bottomRows(n);

  const CMat RS = potential_matrix(OpKind::S, k2, C, sensors.receptors);
  const CMat RD = potential_matrix(OpKind::D, k2, C, sensors.receptors);
  sol.field.values = ((RD * sol.mu - RS * sol.sigma) / b2).transpose();
  sol.field.mask = sensors.mask;
  return sol;
}

/// Largest jump of the field and of the weighted flux across Gamma, measured
/// on the grid shifted by half a node spacing. Densities are carried over by
/// trigonometric interpolation and both one-sided traces are recomputed there.
struct JumpResidual {
  double field = 0.0;  // max |u_ext - u_int| / max |u_inc|
  double flux = 0.0;   // max |b2 dn u_ext - b1 dn u_int| / max |dn u_inc|
};

inline JumpResidual transmission_jump_residual(const TransmissionSolution& sol, const SensorGeometry& sensors,
                                               const SolverOptions& opt = {}) {
  const int n = sol.C.n;
  const double hs = 0.5 * sol.C.h;
  FourierCurve shifted = sol.curve;
  for (int m = 1; m <= shifted.order(); ++m) {
    const double c = std::cos(2.0 * pi * m * hs / sol.curve.L), s = std::sin(2.0 * pi * m * hs / sol.curve.L);
    shifted.a1[m] = sol.curve.a1[m] * c + sol.curve.b1[m] * s;
    shifted.b1[m] = -sol.curve.a1[m] * s + sol.curve.b1[m] * c;
    shifted.a2[m] = sol.curve.a2[m] * c + sol.curve.b2[m] * s;
    shifted.b2[m] = -sol.curve.a2[m] * s + sol.curve.b2[m] * c;
  }
  const CurveSamples C = sample_curve(shifted, n);
  const LayerOperators ops = detail::transmission_operators(shifted, C, sol.phys, opt.quadrature());
  const PhysicalParams& ph = sol.phys;
  const cplx b1 = ph.b1(), b2 = ph.b2();
  const double k2 = ph.k2();
  const CMat uin = incident_values(C, sensors.directions, k2);
  const CMat dnin = incident_normal_derivative(C, sensors.directions, k2);
  JumpResidual r;
  for (int d = 0; d < sol.mu.cols(); ++d) {
    const CVec mu = fourier::shift(sol.mu.col(d), 0.5);
    const CVec sg = fourier::shift(sol.sigma.col(d), 0.5);
    // Exterior: u = u_inc + (1/b2)(D2 mu - S2 sigma); interior: (1/b1)(D1 mu - S1 sigma).
    const CVec ue = uin.col(d) + ((0.5 * mu + ops.Da * mu) - ops.Sa * sg) / b2;
    const CVec ui = ((-0.5 * mu + ops.Db * mu) - ops.Sb * sg) / b1;
    // b2 dn u_ext = b2 dn u_inc + T2 mu - (-1/2 + K2) sigma
    // b1 dn u_int = T1 mu - (1/2 + K1) sigma
    const CVec flux = b2 * dnin.col(d) + ops.T * mu + sg - (ops.Ka - ops.Kb) * sg;
    r.field = std::max(r.field, (ue - ui).cwiseAbs().maxCoeff() / uin.col(d).cwiseAbs().maxCoeff());
    r.flux = std::max(r.flux, flux.cwiseAbs().maxCoeff() / dnin.col(d).cwiseAbs().maxCoeff());
  }
  return r;
}

enum class ForwardModel { transmission, impedance, neumann };

/// Receptor data for one frequency with the aperture mask applied.
inline ReceptorField forward_map(ForwardModel model, const FourierCurve& curve, const PhysicalParams& phys,
                                 const SensorGeometry& sensors, const CVec& lambda = CVec(),
                                 const SolverOptions& opt = {}) {
  switch (model) {
    case ForwardModel::transmission:
      return solve_transmission(curve, phys, sensors, opt).field;
    case ForwardModel::impedance:
      return solve_impedance(curve, lambda, phys.k2(), sensors, opt).field;
    case ForwardModel::neumann:
      return solve_neumann(curve, phys.k2(), sensors, opt).field;
  }
  throw std::invalid_argument("forward_map: unknown model");
}

}  // namespace gibc
