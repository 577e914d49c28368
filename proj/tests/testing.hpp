#pragma once
// Helpers shared by the unit tests and the acceptance runner.

#include <quadmath.h>

#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gibc/frechet.hpp"
#include "gibc/harness.hpp"
#include "sov_oracle.hpp"

namespace gibc::testkit {

struct HankelRef {
  cplx z, h0, h1;
};

inline std::vector<HankelRef> hankel_oracle(const std::string& path = std::string(GIBC_TEST_DATA) +
                                                                     "/hankel_oracle.json") {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing " + path);
  const auto j = nlohmann::json::parse(in);
  std::vector<HankelRef> out;
  auto c = [](const nlohmann::json& v) { return cplx(v[0].get<double>(), v[1].get<double>()); };
  for (const auto& p : j.at("points")) out.push_back({c(p["z"]), c(p["h0"]), c(p["h1"])});
  return out;
}

/// Worst relative error of hankel01 over the oracle table (both orders).
inline double hankel_oracle_error(const std::vector<HankelRef>& table) {
  double worst = 0.0;
  for (const HankelRef& r : table) {
    const HankelPair h = hankel01(r.z);
    worst = std::max({worst, std::abs(h.h0 - r.h0) / std::abs(r.h0), std::abs(h.h1 - r.h1) / std::abs(r.h1)});
  }
  return worst;
}

/// Relative residual of J1 Y0 - J0 Y1 = 2/(pi x) on a geometric grid in [a, b].
inline double wronskian_error(double a = 0.1, double b = 50.0, int samples = 400) {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = a * std::pow(b / a, double(i) / (samples - 1));
    const HankelPair h = hankel01(x);
    const double w = h.h1.real() * h.h0.imag() - h.h0.real() * h.h1.imag();
    const double ref = 2.0 / (pi * x);
    worst = std::max(worst, std::abs(w - ref) / ref);
  }
  return worst;
}

// Test integral: the integral over [0, 2 pi) of log|2 sin(s/2)| cos(8 s)
// equals -pi/8.
inline constexpr int kLogTestMode = 8;

inline double log_rule_error(const QuadratureRule& rule, int n) {
  auto f = [](double s) { return std::log(std::abs(2.0 * std::sin(0.5 * s))) * std::cos(kLogTestMode * s); };
  return std::abs(rule.integrate(f, n, 2.0 * pi) + pi / kLogTestMode);
}

/// Same rule evaluated in quad precision from the decimal node table, so the
/// algebraic order is visible past double rounding.
inline double log_rule_error_quad(int n) {
  using q = __float128;
  const q P = M_PIq;
  std::vector<q> v, w;
  for (const char* s : detail::kAlpert16Nodes) v.push_back(strtoflt128(s, nullptr));
  for (const char* s : detail::kAlpert16Weights) w.push_back(strtoflt128(s, nullptr));
  const int a = detail::kAlpert16A;
  auto f = [&](q s) { return logq(fabsq(2 * sinq(s / 2))) * cosq(kLogTestMode * s); };
  const q h = 2 * P / n;
  q sum = 0;
  for (int j = a; j <= n - a; ++j) sum += f(j * h);
  for (std::size_t p = 0; p < v.size(); ++p) sum += w[p] * (f(v[p] * h) + f(-v[p] * h));
  return double(fabsq(h * sum + P / kLogTestMode));
}

inline SensorGeometry ring_sensors(int N, double radius = kReceptorRadius) {
  SensorGeometry s;
  for (int i = 0; i < N; ++i) {
    const double t = 2.0 * pi * i / N;
    s.directions.emplace_back(std::cos(t), std::sin(t));
    s.receptors.emplace_back(radius * std::cos(t), radius * std::sin(t));
  }
  s.mask = BoolMat::Constant(N, N, true);
  return s;
}

/// Max-norm relative error of receptor data against a disk series.
inline double sov_error(const ReceptorField& f, const SensorGeometry& s, const std::vector<cplx>& coef, double k) {
  double err = 0.0, scale = 0.0;
  for (int i = 0; i < s.nd(); ++i)
    for (int j = 0; j < s.nr(); ++j) {
      const double td = std::atan2(s.directions[i].y(), s.directions[i].x());
      const double tr = std::atan2(s.receptors[j].y(), s.receptors[j].x());
      const cplx ref = sov::scattered(coef, k, s.receptors[j].norm(), tr, td);
      err = std::max(err, std::abs(f.values(i, j) - ref));
      scale = std::max(scale, std::abs(ref));
    }
  return err / scale;
}

/// gamma + eps h n sampled at the parameter nodes and fitted without
/// reparameterization, so node j stays attached to the same material point.
/// The normal has an infinite Fourier series; `order` < 0 keeps a few modes
/// past the sum of the two bands, which suffices for field values. Second
/// derivatives need a much longer fit.
inline FourierCurve displaced(const FourierCurve& c, const RVec& w, double eps, int order = -1) {
  const int n = order < 0 ? 1024 : 4 * order;
  const CurveSamples S = sample_curve(c, n);
  const RVec h = NormalPerturbation{w}.eval(c.L, n);
  CVec z(n);
  for (int j = 0; j < n; ++j) z[j] = cplx(S.x[j] + eps * h[j] * S.nx[j], S.y[j] + eps * h[j] * S.ny[j]);
  return detail::curve_from_samples(z, c.L, order < 0 ? c.order() + NormalPerturbation{w}.band() + 8 : order);
}

/// F(lam_p) - F(lam_m) at the receptors, evaluated without subtracting two
/// solved fields. With A(lam) phi = -(dn u_in + ik lam u_in) the two densities
/// satisfy A(lam_p) (phi_p - phi_m) = -ik (lam_p - lam_m) u_m exactly, so only
/// the impedance difference itself carries cancellation.
inline CVec impedance_field_difference(const ImpedanceSystem& sys, const CVec& lam_p, const CVec& lam_m,
                                       const CVec& dlam) {
  const ImpedanceSolution sp = sys.solve(lam_p);
  const ImpedanceSolution sm = sys.solve(lam_m);
  const CMat rhs = (-I * sys.k * dlam).asDiagonal() * sm.u;
  ReceptorField d;
  d.values = (sys.receptor_map * sp.lu.solve(rhs)).transpose();
  d.mask = sys.sensors.mask;
  return d.flatten();
}

/// lambda(rp) - lambda(rm) on the nodes. Constant, FS and CH are linear and
/// homogeneous in their parameters, so the difference is the model evaluated
/// at rp - rm. For ABV the square root is differenced through
/// sqrt(a) - sqrt(b) = (a - b) / (sqrt(a) + sqrt(b)).
inline CVec impedance_difference(const ImpedanceParams& p, const RVec& rp, const RVec& rm, const CurveSamples& C,
                                 double k2) {
  if (p.kind != ModelKind::abv) return eval_impedance(p.with_real_params(rp - rm), C, k2);
  const cplx ap(1.0, -rp[0]), am(1.0, -rm[0]);
  const cplx sp = std::sqrt(ap), sm = std::sqrt(am);
  const cplx dsqrt = cplx(0.0, rm[0] - rp[0]) / (sp + sm);
  const cplx root = rp[1] * dsqrt + (rp[1] - rm[1]) * sm;
  const cplx slope = (-I / k2) * (rp[2] * cplx(0.0, rm[0] - rp[0]) + (rp[2] - rm[2]) * am);
  return (CVec::Constant(C.n, root).array() + slope * C.curvature.array().cast<cplx>()).matrix();
}

/// Least-squares slope of log(err) against log(eps).
inline double loglog_slope(const std::vector<double>& eps, const std::vector<double>& err) {
  const int n = int(eps.size());
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += std::log(eps[i]) / n;
    my += std::log(err[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (int i = 0; i < n; ++i) {
    const double dx = std::log(eps[i]) - mx;
    sxy += dx * (std::log(err[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

inline FourierCurve starfish_curve(int order = 64) { return make_starfish(3, 0.2, order); }

}  // namespace gibc::testkit
