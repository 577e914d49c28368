#pragma once
// Bandlimited closed curves: sampling, curvature, elastic energy, simplicity,
// normal updates, arc-length refitting and symmetric-difference areas.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gibc/fourier.hpp"
#include "gibc/special.hpp"

namespace gibc {

using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

/// x(s) = a1[0] + sum_m a1[m] cos(2 pi m s/L) + b1[m] sin(2 pi m s/L), same
/// for y with (a2, b2). b1[0] and b2[0] are unused and kept at zero.
struct FourierCurve {
  double L = 2.0 * pi;
  RVec a1, b1, a2, b2;

  int order() const { return int(a1.size()) - 1; }

  static FourierCurve zeros(double L, int N) {
    FourierCurve c;
    c.L = L;
    c.a1 = c.b1 = c.a2 = c.b2 = RVec::Zero(N + 1);
    return c;
  }
  static FourierCurve circle(double R = 1.0, double cx = 0.0, double cy = 0.0) {
    FourierCurve c = zeros(2.0 * pi * R, 1);
    c.a1 << cx, R;
    c.a2 << cy, 0.0;
    c.b2 << 0.0, R;
    return c;
  }
  FourierCurve reversed() const {
    FourierCurve c = *this;
    c.b1 = -b1;
    c.b2 = -b2;
    return c;
  }
  FourierCurve with_order(int N) const {
    FourierCurve c = zeros(L, N);
    const int k = std::min(N, order()) + 1;
    c.a1.head(k) = a1.head(k);
    c.b1.head(k) = b1.head(k);
    c.a2.head(k) = a2.head(k);
    c.b2.head(k) = b2.head(k);
    return c;
  }
  Vec2 point(double s) const {
    return {fourier::eval_point(a1, b1, L, s).f, fourier::eval_point(a2, b2, L, s).f};
  }
};

struct CurveSamples {
  int n = 0;
  double L = 0.0;
  double h = 0.0;  // parameter spacing L/n
  RVec s, x, y;
  RVec dx, dy, ddx, ddy;
  RVec speed;       // |gamma'|
  RVec tx, ty;      // unit tangent
  RVec nx, ny;      // outward unit normal (y', -x')/|gamma'|
  RVec curvature;   // signed curvature
  RVec weights;     // h * |gamma'|

  Vec2 pos(int j) const { return {x[j], y[j]}; }
  Vec2 normal(int j) const { return {nx[j], ny[j]}; }
};

inline CurveSamples sample_curve(const FourierCurve& c, int n) {
  if (n < 2 * c.order() + 1)
    throw std::invalid_argument("sample_curve: node_count < 2*order+1");
  CurveSamples S;
  S.n = n;
  S.L = c.L;
  S.h = c.L / n;
  S.s = RVec::LinSpaced(n, 0.0, c.L - S.h);
  S.x = fourier::eval_grid(c.a1, c.b1, c.L, n, 0);
  S.y = fourier::eval_grid(c.a2, c.b2, c.L, n, 0);
  S.dx = fourier::eval_grid(c.a1, c.b1, c.L, n, 1);
  S.dy = fourier::eval_grid(c.a2, c.b2, c.L, n, 1);
  S.ddx = fourier::eval_grid(c.a1, c.b1, c.L, n, 2);
  S.ddy = fourier::eval_grid(c.a2, c.b2, c.L, n, 2);
  S.speed = (S.dx.array().square() + S.dy.array().square()).sqrt();
  if (S.speed.minCoeff() < 1e-12) throw std::domain_error("sample_curve: degenerate parameterization");
  S.tx = S.dx.array() / S.speed.array();
  S.ty = S.dy.array() / S.speed.array();
  S.nx = S.ty;
  S.ny = -S.tx;
  S.curvature = (S.dx.array() * S.ddy.array() - S.ddx.array() * S.dy.array()) / S.speed.array().cube();
  S.weights = S.h * S.speed;
  return S;
}

/// Signed curvature at n equispaced nodes (default 4N+2).
inline RVec signed_curvature(const FourierCurve& c, int n = 0) {
  if (n <= 0) n = 4 * c.order() + 2;
  return sample_curve(c, n).curvature;
}

struct ElasticEnergy {
  double total = 0.0;
  double band = 0.0;
};

/// Elastic energy of the curvature expansion up to mode 2N and within the
/// first M modes.
inline ElasticEnergy elastic_energy(const FourierCurve& c, int M) {
  if (M < 0) throw std::invalid_argument("elastic_energy: M < 0");
  const int N = c.order();
  const int n = 8 * N + 16;
  RVec a, b;
  fourier::real_coeffs(signed_curvature(c, n), 2 * N, a, b);
  ElasticEnergy e;
  e.total = e.band = 0.5 * a[0] * a[0];
  for (int m = 1; m <= 2 * N; ++m) {
    const double t = a[m] * a[m] + b[m] * b[m];
    e.total += t;
    if (m <= M) e.band += t;
  }
  return e;
}

// ---------------------------------------------------------------------------
// Exact orientation predicate (error-free transforms plus expansion sums).

namespace detail {

inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  const double bv = s - a;
  e = (a - (s - bv)) + (b - bv);
}

inline void two_prod(double a, double b, double& p, double& e) {
  p = a * b;
  e = std::fma(a, b, -p);
}

// Adds a scalar to a nonoverlapping expansion (Shewchuk's Grow-Expansion).
inline void grow(std::vector<double>& e, double b) {
  double q = b;
  std::vector<double> out;
  out.reserve(e.size() + 1);
  for (double ei : e) {
    double s, err;
    two_sum(q, ei, s, err);
    if (err != 0.0) out.push_back(err);
    q = s;
  }
  if (q != 0.0 || out.empty()) out.push_back(q);
  e.swap(out);
}

inline int orient_exact(const Vec2& a, const Vec2& b, const Vec2& c) {
  double ux, uxe, uy, uye, vx, vxe, vy, vye;
  two_sum(b.x(), -a.x(), ux, uxe);
  two_sum(b.y(), -a.y(), uy, uye);
  two_sum(c.x(), -a.x(), vx, vxe);
  two_sum(c.y(), -a.y(), vy, vye);
  const double p[4][2] = {{ux, vy}, {ux, vye}, {uxe, vy}, {uxe, vye}};
  const double q[4][2] = {{uy, vx}, {uy, vxe}, {uye, vx}, {uye, vxe}};
  std::vector<double> e;
  for (int k = 0; k < 4; ++k) {
    double hi, lo;
    two_prod(p[k][0], p[k][1], hi, lo);
    grow(e, hi);
    grow(e, lo);
    two_prod(q[k][0], q[k][1], hi, lo);
    grow(e, -hi);
    grow(e, -lo);
  }
  for (auto it = e.rbegin(); it != e.rend(); ++it)
    if (*it != 0.0) return *it > 0.0 ? 1 : -1;
  return 0;
}

}  // namespace detail

/// Sign of the orientation of (a, b, c): +1 counterclockwise, -1 clockwise,
/// 0 collinear. Exact for all finite double inputs.
inline int orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double l = (b.x() - a.x()) * (c.y() - a.y());
  const double r = (b.y() - a.y()) * (c.x() - a.x());
  const double det = l - r;
  const double bound = 3.4e-16 * (std::abs(l) + std::abs(r));
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return detail::orient_exact(a, b, c);
}

inline bool on_segment(const Vec2& p, const Vec2& q, const Vec2& r) {
  return std::min(p.x(), q.x()) <= r.x() && r.x() <= std::max(p.x(), q.x()) &&
         std::min(p.y(), q.y()) <= r.y() && r.y() <= std::max(p.y(), q.y());
}

/// Closed segments [p1,p2] and [q1,q2] share at least one point.
inline bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const int o1 = orient2d(p1, p2, q1), o2 = orient2d(p1, p2, q2);
  const int o3 = orient2d(q1, q2, p1), o4 = orient2d(q1, q2, p2);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

/// Simplicity test for a closed polyline: no two non-adjacent edges touch.
/// Candidate pairs come from a uniform grid over the bounding box.
inline bool polyline_is_simple(const std::vector<Vec2>& P) {
  const int n = int(P.size());
  if (n < 3) return false;
  double xmin = P[0].x(), xmax = xmin, ymin = P[0].y(), ymax = ymin, len = 0.0;
  for (int i = 0; i < n; ++i) {
    xmin = std::min(xmin, P[i].x());
    xmax = std::max(xmax, P[i].x());
    ymin = std::min(ymin, P[i].y());
    ymax = std::max(ymax, P[i].y());
    len += (P[(i + 1) % n] - P[i]).norm();
  }
  const double cell = std::max(2.0 * len / n, 1e-300);
  const long nxc = std::max(1L, long((xmax - xmin) / cell) + 1);
  const long nyc = std::max(1L, long((ymax - ymin) / cell) + 1);
  std::unordered_map<long, std::vector<int>> grid;
  auto cx = [&](double v) { return std::clamp(long((v - xmin) / cell), 0L, nxc - 1); };
  auto cy = [&](double v) { return std::clamp(long((v - ymin) / cell), 0L, nyc - 1); };
  for (int i = 0; i < n; ++i) {
    const Vec2& a = P[i];
    const Vec2& b = P[(i + 1) % n];
    for (long gx = cx(std::min(a.x(), b.x())); gx <= cx(std::max(a.x(), b.x())); ++gx)
      for (long gy = cy(std::min(a.y(), b.y())); gy <= cy(std::max(a.y(), b.y())); ++gy)
        grid[gx * nyc + gy].push_back(i);
  }
  for (const auto& [key, segs] : grid) {
    for (std::size_t u = 0; u < segs.size(); ++u)
      for (std::size_t v = u + 1; v < segs.size(); ++v) {
        const int i = segs[u], j = segs[v];
        const int d = std::abs(i - j);
        if (d == 0 || d == 1 || d == n - 1) continue;
        if (segments_intersect(P[i], P[(i + 1) % n], P[j], P[(j + 1) % n])) return false;
      }
  }
  // Adjacent edges only meet at their shared vertex unless they fold back.
  for (int i = 0; i < n; ++i) {
    const Vec2& a = P[(i + n - 1) % n];
    const Vec2& b = P[i];
    const Vec2& c = P[(i + 1) % n];
    if (orient2d(a, b, c) == 0 && (a - b).dot(c - b) > 0.0) return false;
  }
  return true;
}

inline std::vector<Vec2> polygon(const FourierCurve& c, int n) {
  const RVec x = fourier::eval_grid(c.a1, c.b1, c.L, n);
  const RVec y = fourier::eval_grid(c.a2, c.b2, c.L, n);
  std::vector<Vec2> P(n);
  for (int i = 0; i < n; ++i) P[i] = {x[i], y[i]};
  return P;
}

inline int simplicity_sample_count(const FourierCurve& c) {
  return std::max(20 * c.order() + 10, 400);
}

inline bool is_simple(const FourierCurve& c) {
  return polyline_is_simple(polygon(c, simplicity_sample_count(c)));
}

struct ConstraintReport {
  bool ok = false;
  bool energy_ok = false;
  bool simple_ok = false;
  ElasticEnergy energy;
};

inline ConstraintReport constraint_check(const FourierCurve& c, int M, double C_H) {
  ConstraintReport r;
  r.energy = elastic_energy(c, M);
  r.energy_ok = r.energy.band >= C_H * r.energy.total;
  r.simple_ok = is_simple(c);
  r.ok = r.energy_ok && r.simple_ok;
  return r;
}

// ---------------------------------------------------------------------------
// Arc-length refitting.

namespace detail {

// Complex trigonometric interpolant z(t) = sum_{|m|<=K} c_m e^{i m t}.
// For even n the Nyquist coefficient is split evenly between +-n/2.
struct TrigInterp {
  int n, K;
  std::vector<cplx> c;  // c[m + K]

  explicit TrigInterp(const CVec& z) : n(int(z.size())), K(int(z.size()) / 2), c(2 * K + 1, 0.0) {
    std::vector<cplx> v(z.data(), z.data() + n);
    v = fourier::fwd(v);
    for (int j = 0; j < n; ++j) {
      const int f = fourier::freq(j, n);
      const cplx cj = v[j] / double(n);
      if (n % 2 == 0 && j == n / 2) {
        c[K + f] += 0.5 * cj;
        c[K - f] += 0.5 * cj;
      } else {
        c[K + f] += cj;
      }
    }
  }
  // Value and first derivative at t.
  std::pair<cplx, cplx> eval(double t) const {
    const cplx e = std::exp(I * t);
    cplx ep = 1.0, em = 1.0;
    cplx f = c[K], df = 0.0;
    for (int m = 1; m <= K; ++m) {
      ep *= e;
      em = std::conj(ep);
      f += c[K + m] * ep + c[K - m] * em;
      df += I * double(m) * (c[K + m] * ep - c[K - m] * em);
    }
    return {f, df};
  }
  CVec grid_derivative() const {
    std::vector<cplx> v(n, 0.0);
    for (int m = -K; m <= K; ++m) v[(m % n + n) % n] += c[K + m] * I * double(m) * double(n);
    v = fourier::inv(v);
    return Eigen::Map<CVec>(v.data(), n);
  }
};

inline FourierCurve curve_from_samples(const CVec& z, double L, int N) {
  FourierCurve c = FourierCurve::zeros(L, N);
  fourier::real_coeffs(z.real(), N, c.a1, c.b1);
  fourier::real_coeffs(z.imag(), N, c.a2, c.b2);
  c.b1[0] = c.b2[0] = 0.0;
  return c;
}

inline double speed_deviation(const FourierCurve& c, int n) {
  const RVec dx = fourier::eval_grid(c.a1, c.b1, c.L, n, 1);
  const RVec dy = fourier::eval_grid(c.a2, c.b2, c.L, n, 1);
  return ((dx.array().square() + dy.array().square()).sqrt() - 1.0).abs().maxCoeff();
}

}  // namespace detail

struct RefitOptions {
  double tol = 1e-6;
  int max_passes = 100;
};

/// Refit a closed curve given by equispaced-parameter samples z_j = x_j + i y_j
/// into an order-N curve whose parameter is arc length to within tol.
inline FourierCurve reparameterize_arclength(const CVec& z0, int N, RefitOptions opt = {}) {
  const int n = int(z0.size());
  if (n < 2 * N + 1) throw std::invalid_argument("reparameterize_arclength: too few samples");
  CVec z = z0;
  double prev_dev = INFINITY;
  int stalled = 0;
  for (int pass = 0; pass < opt.max_passes; ++pass) {
    detail::TrigInterp T(z);
    const RVec sp = T.grid_derivative().cwiseAbs();
    // Arc length S(t) = L t / (2 pi) + periodic part, from the spectrum of |z'|.
    std::vector<cplx> v(n);
    for (int j = 0; j < n; ++j) v[j] = sp[j];
    v = fourier::fwd(v);
    const double L = v[0].real() / n * 2.0 * pi;
    const int K = (n - 1) / 2;
    std::vector<cplx> fc(K + 1, 0.0);
    for (int m = 1; m <= K; ++m) fc[m] = v[m] / double(n) / (I * double(m));
    auto S = [&](double t) {
      const cplx e = std::exp(I * t);
      cplx ep = 1.0, acc = 0.0;
      for (int m = 1; m <= K; ++m) {
        ep *= e;
        acc += fc[m] * (ep - 1.0);
      }
      return L * t / (2.0 * pi) + 2.0 * acc.real();
    };
    CVec znew(n);
    double t = 0.0;
    for (int j = 0; j < n; ++j) {
      const double target = L * j / n;
      auto fd = T.eval(t);
      for (int it = 0; it < 60; ++it) {
        const double dt = (S(t) - target) / std::abs(fd.second);
        t -= dt;
        fd = T.eval(t);
        if (std::abs(dt) < 1e-14) break;
      }
      znew[j] = fd.first;
    }
    const FourierCurve c = detail::curve_from_samples(znew, L, N);
    const double dev = detail::speed_deviation(c, n);
    if (dev <= opt.tol) return c;
    stalled = dev > 0.9 * prev_dev ? stalled + 1 : 0;
    if (stalled >= 5) break;
    prev_dev = dev;
    const RVec x = fourier::eval_grid(c.a1, c.b1, L, n), y = fourier::eval_grid(c.a2, c.b2, L, n);
    for (int j = 0; j < n; ++j) z[j] = cplx(x[j], y[j]);
  }
  throw std::runtime_error("reparameterize_arclength: no convergence");
}

/// Dense sample count used when refitting an order-N curve.
inline int refit_sample_count(int N) { return std::max(8 * N + 64, 512); }

inline FourierCurve reparameterize_arclength(const FourierCurve& c, int N = -1, RefitOptions opt = {}) {
  if (N < 0) N = c.order();
  const int n = refit_sample_count(std::max(N, c.order()));
  const RVec x = fourier::eval_grid(c.a1, c.b1, c.L, n);
  const RVec y = fourier::eval_grid(c.a2, c.b2, c.L, n);
  CVec z(n);
  for (int j = 0; j < n; ++j) z[j] = cplx(x[j], y[j]);
  return reparameterize_arclength(z, N, opt);
}

/// Normal perturbation h(s) = w[0] + sum_m w[m] cos(2 pi m s/L) + w[Ng+m] sin(...).
struct NormalPerturbation {
  RVec w;
  int band() const { return (int(w.size()) - 1) / 2; }
  RVec eval(double L, int n) const {
    const int Ng = band();
    RVec a = w.head(Ng + 1), b = RVec::Zero(Ng + 1);
    b.tail(Ng) = w.tail(Ng);
    return fourier::eval_grid(a, b, L, n);
  }
};

/// gamma + h n refit to arc length. new_order < 0 keeps the current order.
inline FourierCurve apply_normal_update(const FourierCurve& c, const NormalPerturbation& w, int new_order = -1) {
  const int N = new_order < 0 ? c.order() : new_order;
  const int n = refit_sample_count(std::max(N, c.order()) + w.band());
  const CurveSamples S = sample_curve(c, n);
  const RVec h = w.eval(c.L, n);
  CVec z(n);
  for (int j = 0; j < n; ++j) z[j] = cplx(S.x[j] + h[j] * S.nx[j], S.y[j] + h[j] * S.ny[j]);
  const CVec dz = fourier::derivative(z, c.L, 1);
  if (dz.cwiseAbs().minCoeff() < 1e-8) throw std::runtime_error("apply_normal_update: degenerate curve");
  return reparameterize_arclength(z, N);
}

/// Shape derivative of the signed curvature for the normal perturbation h n,
/// with h given at the sample nodes.
inline RVec curvature_frechet(const CurveSamples& S, const RVec& h) {
  if (h.size() != S.n) throw std::invalid_argument("curvature_frechet: size mismatch");
  const RVec hp = fourier::derivative(h, S.L, 1);
  const RVec hpp = fourier::derivative(h, S.L, 2);
  const Eigen::ArrayXd g2 = S.speed.array().square();
  const Eigen::ArrayXd dot = S.dx.array() * S.ddx.array() + S.dy.array() * S.ddy.array();
  return (-S.curvature.array().square() * h.array() + dot / g2.square() * hp.array() - hpp.array() / g2).matrix();
}

inline RVec curvature_frechet(const FourierCurve& c, const RVec& h) {
  return curvature_frechet(sample_curve(c, int(h.size())), h);
}

// ---------------------------------------------------------------------------
// Polygon areas.

inline double signed_area(const std::vector<Vec2>& P) {
  double a = 0.0;
  const int n = int(P.size());
  for (int i = 0; i < n; ++i) {
    const Vec2& p = P[i];
    const Vec2& q = P[(i + 1) % n];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

/// Area of the symmetric difference of two simple polygons, by a vertical
/// slab decomposition of the plane.
inline double symmetric_difference_polygons(const std::vector<Vec2>& A, const std::vector<Vec2>& B) {
  struct Edge {
    Vec2 p, q;
    int owner;
  };
  std::vector<Edge> edges;
  std::vector<double> xs;
  auto add = [&](const std::vector<Vec2>& P, int owner) {
    const int n = int(P.size());
    for (int i = 0; i < n; ++i) {
      Vec2 p = P[i], q = P[(i + 1) % n];
      xs.push_back(p.x());
      if (p.x() == q.x()) continue;
      if (p.x() > q.x()) std::swap(p, q);
      edges.push_back({p, q, owner});
    }
  };
  add(A, 0);
  add(B, 1);
  // Crossing abscissae between the two boundaries.
  for (const Edge& e : edges) {
    if (e.owner != 0) continue;
    for (const Edge& f : edges) {
      if (f.owner != 1) continue;
      if (f.q.x() < e.p.x() || f.p.x() > e.q.x()) continue;
      const Vec2 r = e.q - e.p, s = f.q - f.p;
      const double den = r.x() * s.y() - r.y() * s.x();
      if (den == 0.0) continue;
      const Vec2 d = f.p - e.p;
      const double t = (d.x() * s.y() - d.y() * s.x()) / den;
      const double u = (d.x() * r.y() - d.y() * r.x()) / den;
      if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) xs.push_back(e.p.x() + t * r.x());
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.p.x() < b.p.x(); });

  struct Cut {
    double y0, y1, ym;
    int owner;
  };
  std::vector<Cut> cuts;
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double x0 = xs[k], x1 = xs[k + 1], xm = 0.5 * (x0 + x1);
    if (x1 <= x0) continue;
    cuts.clear();
    for (const Edge& e : edges) {
      if (e.p.x() > xm) break;
      if (e.q.x() < xm) continue;
      const double sl = (e.q.y() - e.p.y()) / (e.q.x() - e.p.x());
      cuts.push_back({e.p.y() + sl * (x0 - e.p.x()), e.p.y() + sl * (x1 - e.p.x()), e.p.y() + sl * (xm - e.p.x()),
                      e.owner});
    }
    std::sort(cuts.begin(), cuts.end(), [](const Cut& a, const Cut& b) { return a.ym < b.ym; });
    int inA = 0, inB = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      (cuts[i].owner == 0 ? inA : inB) ^= 1;
      if (inA != inB) area += 0.5 * ((cuts[i + 1].y0 - cuts[i].y0) + (cuts[i + 1].y1 - cuts[i].y1)) * (x1 - x0);
    }
  }
  return area;
}

inline int area_sample_count() { return 1024; }

/// (|A \ B| + |B \ A|) / |A| from boundary-node polygons; A is the reference.
inline double symmetric_difference_area(const FourierCurve& A, const FourierCurve& B, int n = area_sample_count()) {
  const auto PA = polygon(A, n), PB = polygon(B, n);
  const double aA = std::abs(signed_area(PA));
  if (aA <= 0.0) throw std::domain_error("symmetric_difference_area: degenerate polygon");
  return symmetric_difference_polygons(PA, PB) / aA;
}

}  // namespace gibc
