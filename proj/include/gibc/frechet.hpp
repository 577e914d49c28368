#pragma once
// Linearized impedance forward map. Every derivative is the receptor trace of
// a radiating field solving the impedance problem with new boundary data, so
// all of them reuse the factorization held by an ImpedanceSolution.
//
// Receptor blocks are (n_r x n_d*p) with column dir*p + j.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "gibc/forward.hpp"
#include "gibc/geometry.hpp"
#include "gibc/models.hpp"

namespace gibc {

using RMat = Eigen::MatrixXd;

namespace detail {

inline void check_state(const ImpedanceSolution& sol, long rows) {
  if (rows != sol.C.n) throw std::invalid_argument("frechet: data size does not match the stored solution");
}

// Boundary data -i k g u for every direction and every column of g.
inline CMat lambda_rhs(const ImpedanceSolution& sol, const CMat& g) {
  const int nd = int(sol.u.cols()), p = int(g.cols());
  CMat f(sol.C.n, long(nd) * p);
  for (int i = 0; i < nd; ++i)
    for (int j = 0; j < p; ++j) f.col(long(i) * p + j) = (-I * sol.k) * g.col(j).cwiseProduct(sol.u.col(i));
  return f;
}

// Boundary data k^2 h u + d/ds(h du/ds) - i k lambda h (dn u + H u).
inline CMat gamma_rhs(const ImpedanceSolution& sol, const RMat& h) {
  const CurveSamples& C = sol.C;
  const int nd = int(sol.u.cols()), p = int(h.cols());
  const double k = sol.k;
  const Eigen::ArrayXd inv_speed = C.speed.array().inverse();
  CMat f(C.n, long(nd) * p);
  for (int i = 0; i < nd; ++i) {
    const Eigen::ArrayXcd u = sol.u.col(i).array();
    const Eigen::ArrayXcd dnu = sol.dnu.col(i).array();
    const Eigen::ArrayXcd dus = fourier::derivative(CVec(sol.u.col(i)), C.L, 1).array() * inv_speed;
    const Eigen::ArrayXcd tail = (I * k) * sol.lambda.array() * (dnu + C.curvature.array() * u);
    for (int j = 0; j < p; ++j) {
      const Eigen::ArrayXd hj = h.col(j).array();
      const CVec flux = (hj * dus).matrix();
      const Eigen::ArrayXcd dflux = fourier::derivative(flux, C.L, 1).array() * inv_speed;
      f.col(long(i) * p + j) = (k * k * hj * u + dflux - hj * tail).matrix();
    }
  }
  return f;
}

}  // namespace detail

/// v_lambda at the receptors for impedance perturbations g (columns).
inline CMat dlambda_forward(const ImpedanceSolution& sol, const CMat& g) {
  detail::check_state(sol, g.rows());
  return sol.receptors_for(detail::lambda_rhs(sol, g));
}

/// v_gamma at the receptors for normal displacements h (columns), lambda held
/// fixed along the normals.
inline CMat dgamma_forward(const ImpedanceSolution& sol, const RMat& h) {
  detail::check_state(sol, h.rows());
  return sol.receptors_for(detail::gamma_rhs(sol, h));
}

struct JacobianBlock {
  CMat J;  // rows: incident-major, receptor-minor, masked entries dropped
  std::vector<std::string> labels;
};

/// Columns 1, cos(2 pi m s/L) (m = 1..Ng), sin(2 pi m s/L) (m = 1..Ng) at the nodes.
inline RMat normal_basis(const CurveSamples& C, int Ng) {
  RMat B(C.n, 2 * Ng + 1);
  for (int j = 0; j < C.n; ++j) {
    const double t = 2.0 * pi * C.s[j] / C.L;
    B(j, 0) = 1.0;
    for (int m = 1; m <= Ng; ++m) {
      B(j, m) = std::cos(m * t);
      B(j, Ng + m) = std::sin(m * t);
    }
  }
  return B;
}

/// Derivative of the receptor data with respect to the normal-update
/// coefficients w. For curvature-dependent models the change of lambda
/// through the curvature is included.
inline JacobianBlock domain_jacobian(const ImpedanceSolution& sol, const ImpedanceParams& params, int Ng) {
  const RMat B = normal_basis(sol.C, Ng);
  CMat f = detail::gamma_rhs(sol, B);
  const cplx slope = dlambda_dcurvature(params, sol.k);
  if (slope != 0.0) {
    CMat g(sol.C.n, B.cols());
    for (int j = 0; j < B.cols(); ++j) g.col(j) = slope * curvature_frechet(sol.C, B.col(j)).cast<cplx>();
    f += detail::lambda_rhs(sol, g);
  }
  JacobianBlock out;
  out.J = stack_rows(sol.receptors_for(f), sol.sensors.mask, int(B.cols()));
  out.labels.push_back("a0");
  for (int m = 1; m <= Ng; ++m) out.labels.push_back("a" + std::to_string(m));
  for (int m = 1; m <= Ng; ++m) out.labels.push_back("b" + std::to_string(m));
  return out;
}

/// Derivative of the receptor data with respect to the real impedance
/// parameters (ImpedanceParams::real_params ordering).
inline JacobianBlock impedance_jacobian(const ImpedanceSolution& sol, const ImpedanceParams& params) {
  const CMat G = impedance_partials(params, sol.C, sol.k);
  JacobianBlock out;
  if (G.cols() == 0) {
    out.J = CMat(sol.sensors.mask.count(), 0);
    return out;
  }
  out.J = stack_rows(dlambda_forward(sol, G), sol.sensors.mask, int(G.cols()));
  for (int j = 0; j < G.cols(); ++j) out.labels.push_back("p" + std::to_string(j));
  return out;
}

}  // namespace gibc
