#pragma once
// Impedance function models and their parameterizations.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

#include "gibc/forward.hpp"
#include "gibc/geometry.hpp"
#include "gibc/special.hpp"

namespace gibc {

// neumann carries no parameters (lambda == 0, sound-hard obstacle).
enum class ModelKind { constant, fs, ch, abv, neumann };

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::constant: return "constant";
    case ModelKind::fs: return "fs";
    case ModelKind::ch: return "ch";
    case ModelKind::abv: return "abv";
    case ModelKind::neumann: return "neumann";
  }
  return "?";
}

inline ModelKind model_from_string(const std::string& s) {
  if (s == "constant") return ModelKind::constant;
  if (s == "fs") return ModelKind::fs;
  if (s == "ch") return ModelKind::ch;
  if (s == "abv") return ModelKind::abv;
  if (s == "neumann") return ModelKind::neumann;
  throw std::invalid_argument("unknown impedance model: " + s);
}

/// constant: c = (c0); fs: c = (c_{-Nc}, ..., c_{Nc}); ch: c = (alpha1, alpha2);
/// abv: beta = (beta1, beta2, beta3); neumann: no parameters.
struct ImpedanceParams {
  ModelKind kind = ModelKind::constant;
  CVec c;
  RVec beta;

  static ImpedanceParams constant(cplx c0) {
    ImpedanceParams p;
    p.kind = ModelKind::constant;
    p.c = CVec::Constant(1, c0);
    return p;
  }
  static ImpedanceParams fs(const CVec& coeffs) {
    if (coeffs.size() % 2 != 1) throw std::invalid_argument("FS coefficients need odd length 2Nc+1");
    ImpedanceParams p;
    p.kind = ModelKind::fs;
    p.c = coeffs;
    return p;
  }
  static ImpedanceParams ch(cplx a1, cplx a2) {
    ImpedanceParams p;
    p.kind = ModelKind::ch;
    p.c = CVec(2);
    p.c << a1, a2;
    return p;
  }
  static ImpedanceParams abv(double b1, double b2, double b3) {
    ImpedanceParams p;
    p.kind = ModelKind::abv;
    p.beta = RVec(3);
    p.beta << b1, b2, b3;
    return p;
  }
  static ImpedanceParams neumann() {
    ImpedanceParams p;
    p.kind = ModelKind::neumann;
    return p;
  }

  int fs_order() const { return (int(c.size()) - 1) / 2; }
  bool curvature_dependent() const { return kind == ModelKind::ch || kind == ModelKind::abv; }

  /// Real parameter vector seen by the optimizer. Complex entries are split
  /// as (re, im) pairs.
  RVec real_params() const {
    if (kind == ModelKind::abv) return beta;
    if (kind == ModelKind::neumann) return RVec();
    RVec r(2 * c.size());
    for (int i = 0; i < c.size(); ++i) {
      r[2 * i] = c[i].real();
      r[2 * i + 1] = c[i].imag();
    }
    return r;
  }
  ImpedanceParams with_real_params(const RVec& r) const {
    ImpedanceParams p = *this;
    if (kind == ModelKind::abv) {
      p.beta = r;
    } else if (kind != ModelKind::neumann) {
      for (int i = 0; i < c.size(); ++i) p.c[i] = cplx(r[2 * i], r[2 * i + 1]);
    }
    return p;
  }
  int real_size() const { return int(real_params().size()); }
};

/// Node values of lambda on the sampled curve.
inline CVec eval_impedance(const ImpedanceParams& p, const CurveSamples& C, double k2) {
  const int n = C.n;
  switch (p.kind) {
    case ModelKind::constant:
      return CVec::Constant(n, p.c[0]);
    case ModelKind::neumann:
      return CVec::Zero(n);
    case ModelKind::fs: {
      const int Nc = p.fs_order();
      CVec lam = CVec::Zero(n);
      for (int j = 0; j < n; ++j)
        for (int m = -Nc; m <= Nc; ++m) lam[j] += p.c[m + Nc] * std::exp(I * (2.0 * pi * m * C.s[j] / C.L));
      return lam;
    }
    case ModelKind::ch:
      return (p.c[0] + p.c[1] * C.curvature.array().cast<cplx>()).matrix();
    case ModelKind::abv: {
      if (k2 == 0.0) throw std::domain_error("eval_impedance: ABV needs k2 != 0");
      const double b1 = p.beta[0], b2 = p.beta[1], b3 = p.beta[2];
      const cplx s = std::sqrt(cplx(1.0, -b1));
      const cplx slope = -I * b3 * cplx(1.0, -b1) / k2;
      return (b2 * s + slope * C.curvature.array().cast<cplx>()).matrix();
    }
  }
  throw std::invalid_argument("eval_impedance: unknown model");
}

/// d lambda / dH for curvature-dependent models (zero otherwise).
inline cplx dlambda_dcurvature(const ImpedanceParams& p, double k2) {
  if (p.kind == ModelKind::ch) return p.c[1];
  if (p.kind == ModelKind::abv) return -I * p.beta[2] * cplx(1.0, -p.beta[0]) / k2;
  return 0.0;
}

/// Node values of d lambda / d p_r for each real parameter p_r (columns).
inline CMat impedance_partials(const ImpedanceParams& p, const CurveSamples& C, double k2) {
  const int n = C.n;
  const Eigen::ArrayXcd H = C.curvature.array().cast<cplx>();
  CMat G(n, p.real_size());
  switch (p.kind) {
    case ModelKind::neumann:
      break;
    case ModelKind::constant:
      G.col(0).setOnes();
      G.col(1).setConstant(I);
      break;
    case ModelKind::fs: {
      const int Nc = p.fs_order();
      for (int m = -Nc; m <= Nc; ++m) {
        for (int j = 0; j < n; ++j) G(j, 2 * (m + Nc)) = std::exp(I * (2.0 * pi * m * C.s[j] / C.L));
        G.col(2 * (m + Nc) + 1) = I * G.col(2 * (m + Nc));
      }
      break;
    }
    case ModelKind::ch:
      G.col(0).setOnes();
      G.col(1).setConstant(I);
      G.col(2) = H.matrix();
      G.col(3) = I * H.matrix();
      break;
    case ModelKind::abv: {
      const double b1 = p.beta[0], b2 = p.beta[1], b3 = p.beta[2];
      const cplx s = std::sqrt(cplx(1.0, -b1));
      G.col(0) = (-I * b2 / (2.0 * s) - b3 * H / k2).matrix();
      G.col(1).setConstant(s);
      G.col(2) = (-I * cplx(1.0, -b1) * H / k2).matrix();
      break;
    }
  }
  return G;
}

/// (beta1, beta2, beta3) from physical parameters.
inline ImpedanceParams beta_from_physical(const PhysicalParams& ph) {
  const double b1 = ph.delta / ph.omega;
  const double s = 1.0 + b1 * b1;
  return ImpedanceParams::abv(b1, 1.0 / (ph.rhor() * ph.cr() * std::sqrt(s)), 1.0 / (ph.rhor() * s));
}

struct RecoveredPhysical {
  double delta, rhor_cr, rhor, cr;
};

inline RecoveredPhysical physical_from_beta(const RVec& beta, double omega) {
  const double b1 = beta[0], b2 = beta[1], b3 = beta[2];
  if (b2 == 0.0 || b3 == 0.0) throw std::domain_error("physical_from_beta: beta2 and beta3 must be nonzero");
  const double s = 1.0 + b1 * b1;
  RecoveredPhysical r;
  r.delta = omega * b1;
  r.rhor = 1.0 / (b3 * s);
  r.cr = b3 * std::sqrt(s) / b2;
  r.rhor_cr = 1.0 / (b2 * std::sqrt(s));
  return r;
}

/// Euclidean projection onto the admissible set of each model.
inline ImpedanceParams project_params(const ImpedanceParams& p) {
  ImpedanceParams q = p;
  if (p.kind == ModelKind::abv) {
    q.beta = p.beta.cwiseMax(0.0);
  } else if (p.kind == ModelKind::ch) {
    for (int i = 0; i < q.c.size(); ++i) q.c[i] = cplx(q.c[i].real(), std::min(q.c[i].imag(), 0.0));
  }
  return q;
}

inline bool is_feasible(const ImpedanceParams& p) {
  if (p.kind == ModelKind::abv) return (p.beta.array() >= 0.0).all();
  if (p.kind == ModelKind::ch) return (p.c.imag().array() <= 0.0).all();
  return true;
}

}  // namespace gibc
