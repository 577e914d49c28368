#pragma once
// Hankel functions of the first kind (orders 0 and 1) for complex argument
// in the closed upper half plane, and the 2D Helmholtz Green's function.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace gibc {

using cplx = std::complex<double>;
using Vec2 = Eigen::Vector2d;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

struct HankelPair {
  cplx h0;
  cplx h1;
};

namespace detail {

// Generalized Gauss-Laguerre rule for the weight u^{-1/2} e^{-u} on (0, inf),
// built once by Golub-Welsch.
struct LaguerreRule {
  std::vector<double> u, w;
  explicit LaguerreRule(int n) : u(n), w(n) {
    const double a = -0.5;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
      J(k, k) = 2.0 * k + a + 1.0;
      if (k + 1 < n) {
        const double b = std::sqrt((k + 1.0) * (k + 1.0 + a));
        J(k, k + 1) = b;
        J(k + 1, k) = b;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    const double mu0 = std::sqrt(pi);  // Gamma(1/2)
    for (int k = 0; k < n; ++k) {
      u[k] = es.eigenvalues()(k);
      const double v = es.eigenvectors()(0, k);
      w[k] = mu0 * v * v;
    }
  }
};

inline const LaguerreRule& laguerre_rule(int n) {
  static const LaguerreRule r12(12), r20(20), r32(32);
  if (n <= 12) return r12;
  if (n <= 20) return r20;
  return r32;
}

// Integral representation: valid for Im z >= 0, accurate once |z| >~ 2.5.
inline HankelPair hankel_integral(cplx z) {
  const double az = std::abs(z);
  const LaguerreRule& r = laguerre_rule(az < 5.0 ? 32 : (az < 10.0 ? 20 : 12));
  const cplx c = I / (2.0 * z);
  cplx s0 = 0.0, s1 = 0.0;
  for (std::size_t p = 0; p < r.u.size(); ++p) {
    const cplx s = std::sqrt(1.0 + c * r.u[p]);
    s0 += r.w[p] / s;
    s1 += (r.w[p] * r.u[p]) * s;
  }
  const cplx pre = std::sqrt(2.0 / (pi * z)) * std::exp(I * (z - 0.25 * pi)) / std::sqrt(pi);
  return {pre * s0, -2.0 * I * pre * s1};
}

// Ascending series. Returns H0 and H1 + 2i/(pi z) so the caller can choose
// whether to keep the 1/z pole.
inline HankelPair hankel_series_reg(cplx z) {
  const cplx q = 0.25 * z * z;
  const cplx lg = std::log(0.5 * z) + std::numbers::egamma;
  cplx j0 = 0.0, j1 = 0.0, y0s = 0.0, y1s = 0.0;
  cplx t0 = 1.0;  // (-q)^k / (k!)^2
  cplx t1 = 1.0;  // (-q)^k / (k! (k+1)!)
  double hk = 0.0;  // harmonic number H_k
  for (int k = 0; k < 60; ++k) {
    if (k > 0) {
      t0 *= -q / double(k * k);
      t1 *= -q / double(k * (k + 1));
      hk += 1.0 / k;
    }
    j0 += t0;
    j1 += t1;
    y0s -= hk * t0;
    // psi(k+1) + psi(k+2) = 2 H_k + 1/(k+1) - 2 gamma
    y1s += (2.0 * hk + 1.0 / (k + 1)) * t1;
    if (k > 4 && std::abs(t0) < 1e-18 * std::abs(j0) && std::abs(t1) < 1e-18 * std::abs(j1)) break;
  }
  const cplx hz = 0.5 * z;
  j1 *= hz;
  const cplx y0 = (2.0 / pi) * (lg * j0 + y0s);
  // Y1 + 2/(pi z): the gamma part of the digamma sum is folded into lg.
  const cplx y1r = (2.0 / pi) * lg * j1 - (1.0 / pi) * hz * y1s;
  return {j0 + I * y0, j1 + I * y1r};
}

inline constexpr double kSeriesRadius = 2.5;

inline void check_arg(cplx z) {
  if (z == 0.0) throw std::domain_error("hankel1: z = 0");
  if (z.imag() < 0.0) throw std::domain_error("hankel1: Im z < 0");
}

}  // namespace detail

/// H0^(1)(z) and H1^(1)(z). Requires z != 0 and Im z >= 0.
inline HankelPair hankel01(cplx z) {
  detail::check_arg(z);
  if (std::abs(z) < detail::kSeriesRadius) {
    HankelPair h = detail::hankel_series_reg(z);
    h.h1 -= 2.0 * I / (pi * z);
    return h;
  }
  return detail::hankel_integral(z);
}

/// H0^(1)(z) and the pole-free part H1^(1)(z) + 2i/(pi z).
inline HankelPair hankel01_reg(cplx z) {
  detail::check_arg(z);
  if (std::abs(z) < detail::kSeriesRadius) return detail::hankel_series_reg(z);
  HankelPair h = detail::hankel_integral(z);
  h.h1 += 2.0 * I / (pi * z);
  return h;
}

inline cplx hankel1(int order, cplx z) {
  if (order != 0 && order != 1) throw std::domain_error("hankel1: order must be 0 or 1");
  const HankelPair h = hankel01(z);
  return order == 0 ? h.h0 : h.h1;
}

enum class GreenKind { value, dn_y, dn_x, dn_x_dn_y };

/// Free-space Green's function G(x,y) = (i/4) H0(k|x-y|) and its normal
/// derivatives. Normals are unit vectors; unused normals are ignored.
inline cplx greens_kernel(cplx k, const Vec2& x, const Vec2& y, GreenKind which,
                          const Vec2& nx = Vec2::Zero(), const Vec2& ny = Vec2::Zero()) {
  const Vec2 d = x - y;
  const double r = d.norm();
  if (r == 0.0) throw std::domain_error("greens_kernel: x == y");
  const HankelPair h = hankel01(k * r);
  switch (which) {
    case GreenKind::value:
      return 0.25 * I * h.h0;
    case GreenKind::dn_y:
      return 0.25 * I * k * h.h1 * d.dot(ny) / r;
    case GreenKind::dn_x:
      return -0.25 * I * k * h.h1 * d.dot(nx) / r;
    case GreenKind::dn_x_dn_y: {
      const double c = d.dot(nx) * d.dot(ny) / (r * r);
      return 0.25 * I * ((k * k * h.h0 - 2.0 * k * h.h1 / r) * c + k * h.h1 * nx.dot(ny) / r);
    }
  }
  throw std::domain_error("greens_kernel: unknown kind");
}

/// Interior wavenumber omega * sqrt(1 + i delta/omega) / c1 (principal branch).
inline cplx interior_wavenumber(double omega, double delta, double c1) {
  return omega * std::sqrt(cplx(1.0, delta / omega)) / c1;
}

}  // namespace gibc
