#pragma once
// Nystrom matrices for the Helmholtz layer operators on a closed curve.
//
// All operators integrate against arc length:
//   S sigma(x) = int G(x,y) sigma(y) ds_y        D: dG/dn_y
//   K sigma(x) = int dG/dn_x sigma(y) ds_y       T: d2G/dn_x dn_y
// Only the difference T_a - T_b is ever assembled.
//
// Singular rows use the hybrid Gauss-trapezoidal rule: plain trapezoid for
// nodes at least `a` steps from the target, plus correction points at
// s_i +- v_p h where the kernel is evaluated on the exact curve and the density
// is interpolated by the periodic (Dirichlet) interpolant of its node values.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gibc/geometry.hpp"
#include "gibc/quadrature.hpp"
#include "gibc/special.hpp"

namespace gibc {

using CMat = Eigen::MatrixXcd;

enum class OpKind { S, D, K, Tdiff };

namespace detail {

struct KernelPoint {
  Vec2 p;
  Vec2 n;
  double speed;
};

// Kernel values for one source/target pair at up to two wavenumbers.
struct PairKernels {
  cplx Sa, Da, Ka, Sb, Db, Kb, T;
};

struct WantOps {
  bool Sa = false, Da = false, Ka = false, Sb = false, Db = false, Kb = false, T = false;
  bool need_b() const { return Sb || Db || Kb || T; }
};

// d = x - y is passed separately so near-diagonal callers can supply it
// without the cancellation of subtracting two nearby points.
inline PairKernels pair_kernels_d(cplx ka, cplx kb, const Vec2& d, const Vec2& nx, const Vec2& ny, const WantOps& w) {
  PairKernels out{};
  const double r = d.norm();
  const double dny = d.dot(ny) / r, dnx = d.dot(nx) / r;
  const cplx q = 0.25 * I;
  const HankelPair ha = hankel01_reg(ka * r);
  const cplx pole_a = 2.0 * I / (pi * ka * r);
  const cplx h1a = ha.h1 - pole_a;
  out.Sa = q * ha.h0;
  out.Da = q * ka * h1a * dny;
  out.Ka = -q * ka * h1a * dnx;
  if (w.need_b()) {
    const HankelPair hb = hankel01_reg(kb * r);
    const cplx h1b = hb.h1 - 2.0 * I / (pi * kb * r);
    out.Sb = q * hb.h0;
    out.Db = q * kb * h1b * dny;
    out.Kb = -q * kb * h1b * dnx;
    if (w.T) {
      // The 1/r^2 and log parts common to both wavenumbers cancel; using the
      // pole-free H1 parts avoids forming them at all.
      const cplx g1 = ka * ha.h1 - kb * hb.h1;
      const cplx g0 = ka * ka * ha.h0 - kb * kb * hb.h0;
      out.T = q * ((g0 - 2.0 * g1 / r) * dnx * dny + g1 * nx.dot(ny) / r);
    }
  }
  return out;
}

inline PairKernels pair_kernels(cplx ka, cplx kb, const Vec2& x, const Vec2& nx, const Vec2& y, const Vec2& ny,
                                const WantOps& w) {
  return pair_kernels_d(ka, kb, x - y, nx, ny, w);
}

}  // namespace detail

/// Layer operators at wavenumber ka (suffix a) and kb (suffix b), plus the
/// difference T_ka - T_kb. Only requested matrices are filled.
struct LayerOperators {
  CMat Sa, Da, Ka, Sb, Db, Kb, T;
};

inline int min_nodes(const QuadratureRule& rule) { return 2 * rule.a + 2; }

inline LayerOperators assemble_layer_operators(const FourierCurve& curve, const CurveSamples& C, cplx ka, cplx kb,
                                               const QuadratureRule& rule, const detail::WantOps& want) {
  const int n = C.n;
  if (n < min_nodes(rule)) throw std::invalid_argument("assemble_layer_operators: too few nodes");
  const int a = rule.a;
  const int m = rule.size();
  LayerOperators ops;
  auto init = [&](bool on, CMat& M) {
    if (on) M = CMat::Zero(n, n);
  };
  init(want.Sa, ops.Sa);
  init(want.Da, ops.Da);
  init(want.Ka, ops.Ka);
  init(want.Sb, ops.Sb);
  init(want.Db, ops.Db);
  init(want.Kb, ops.Kb);
  init(want.T, ops.T);

  auto put = [&](int i, int j, const detail::PairKernels& k, cplx scale) {
    if (want.Sa) ops.Sa(i, j) += scale * k.Sa;
    if (want.Da) ops.Da(i, j) += scale * k.Da;
    if (want.Ka) ops.Ka(i, j) += scale * k.Ka;
    if (want.Sb) ops.Sb(i, j) += scale * k.Sb;
    if (want.Db) ops.Db(i, j) += scale * k.Db;
    if (want.Kb) ops.Kb(i, j) += scale * k.Kb;
    if (want.T) ops.T(i, j) += scale * k.T;
  };

  // Smooth trapezoid part.
  for (int j = 0; j < n; ++j) {
    const Vec2 y = C.pos(j), ny = C.normal(j);
    const double wj = C.weights[j];
    for (int i = 0; i < n; ++i) {
      int dist = std::abs(i - j);
      dist = std::min(dist, n - dist);
      if (dist < a) continue;
      put(i, j, detail::pair_kernels(ka, kb, C.pos(i), C.normal(i), y, ny, want), wj);
    }
  }

  // Interpolation weights from node offsets l = 0..n-1 to each correction point.
  std::vector<Eigen::VectorXd> interp(2 * m, Eigen::VectorXd(n));
  for (int p = 0; p < m; ++p)
    for (int sg = 0; sg < 2; ++sg) {
      const double v = sg == 0 ? rule.nodes[p] : -rule.nodes[p];
      for (int l = 0; l < n; ++l) interp[2 * p + sg][l] = periodic_interp_weight(v - l, n);
    }

  std::vector<cplx> row_coef(2 * m);
  detail::PairKernels kvals[64];
  if (2 * m > 64) throw std::logic_error("quadrature rule too large");
  for (int i = 0; i < n; ++i) {
    const Vec2 nx = C.normal(i);
    for (int p = 0; p < m; ++p)
      for (int sg = 0; sg < 2; ++sg) {
        const double s = C.s[i] + (sg == 0 ? 1.0 : -1.0) * rule.nodes[p] * C.h;
        const auto jx = fourier::eval_point(curve.a1, curve.b1, curve.L, s);
        const auto jy = fourier::eval_point(curve.a2, curve.b2, curve.L, s);
        const double sp = std::hypot(jx.df, jy.df);
        const Vec2 ny(jy.df / sp, -jx.df / sp);
        const double t = s - C.s[i];
        const Vec2 d(-fourier::eval_increment(curve.a1, curve.b1, curve.L, C.s[i], t),
                     -fourier::eval_increment(curve.a2, curve.b2, curve.L, C.s[i], t));
        detail::PairKernels k = detail::pair_kernels_d(ka, kb, d, nx, ny, want);
        const double wgt = C.h * rule.weights[p] * sp;
        k.Sa *= wgt;
        k.Da *= wgt;
        k.Ka *= wgt;
        k.Sb *= wgt;
        k.Db *= wgt;
        k.Kb *= wgt;
        k.T *= wgt;
        kvals[2 * p + sg] = k;
      }
    for (int l = 0; l < n; ++l) {
      const int j = (i + l) % n;
      detail::PairKernels acc{};
      for (int q = 0; q < 2 * m; ++q) {
        const double w = interp[q][l];
        acc.Sa += w * kvals[q].Sa;
        acc.Da += w * kvals[q].Da;
        acc.Ka += w * kvals[q].Ka;
        acc.Sb += w * kvals[q].Sb;
        acc.Db += w * kvals[q].Db;
        acc.Kb += w * kvals[q].Kb;
        acc.T += w * kvals[q].T;
      }
      put(i, j, acc, 1.0);
    }
  }
  return ops;
}

/// One operator matrix. Tdiff needs a second wavenumber kb != k.
inline CMat build_operator(OpKind kind, cplx k, const FourierCurve& curve, const CurveSamples& C,
                           const QuadratureRule& rule, cplx kb = 0.0) {
  detail::WantOps w;
  switch (kind) {
    case OpKind::S: w.Sa = true; break;
    case OpKind::D: w.Da = true; break;
    case OpKind::K: w.Ka = true; break;
    case OpKind::Tdiff:
      if (kb == k) throw std::invalid_argument("build_operator: Tdiff needs two distinct wavenumbers");
      if (kb == 0.0) throw std::invalid_argument("build_operator: Tdiff needs kb");
      w.T = true;
      break;
  }
  LayerOperators ops = assemble_layer_operators(curve, C, k, kb, rule, w);
  switch (kind) {
    case OpKind::S: return ops.Sa;
    case OpKind::D: return ops.Da;
    case OpKind::K: return ops.Ka;
    case OpKind::Tdiff: return ops.T;
  }
  return {};
}

/// Smooth-rule matrix mapping node densities to S or D potentials at targets.
inline CMat potential_matrix(OpKind kind, cplx k, const CurveSamples& C, const std::vector<Vec2>& targets) {
  if (kind != OpKind::S && kind != OpKind::D) throw std::invalid_argument("potential_matrix: S or D only");
  const int nt = int(targets.size());
  double spacing = C.weights.maxCoeff();
  CMat R(nt, C.n);
  for (int t = 0; t < nt; ++t) {
    const Vec2& x = targets[t];
    for (int j = 0; j < C.n; ++j) {
      const Vec2 d = x - C.pos(j);
      const double r = d.norm();
      if (r < 2.0 * spacing) throw std::domain_error("potential: target too close to the boundary");
      const HankelPair h = hankel01(k * r);
      const cplx v = kind == OpKind::S ? 0.25 * I * h.h0 : 0.25 * I * k * h.h1 * d.dot(C.normal(j)) / r;
      R(t, j) = v * C.weights[j];
    }
  }
  return R;
}

inline CVec eval_potential(OpKind kind, cplx k, const CurveSamples& C, const CVec& density,
                           const std::vector<Vec2>& targets) {
  return potential_matrix(kind, k, C, targets) * density;
}

}  // namespace gibc
