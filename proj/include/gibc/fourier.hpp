#pragma once
// FFT-based helpers for periodic samples on an equispaced grid of [0, L).

#include <unsupported/Eigen/FFT>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

#include "gibc/special.hpp"

namespace gibc::fourier {

using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline std::vector<cplx> fwd(const std::vector<cplx>& in) {
  Eigen::FFT<double> f;
  std::vector<cplx> out;
  f.fwd(out, in);
  return out;
}

inline std::vector<cplx> inv(const std::vector<cplx>& in) {
  Eigen::FFT<double> f;
  std::vector<cplx> out;
  f.inv(out, in);  // includes the 1/n factor
  return out;
}

// Signed frequency of FFT bin j for length n.
inline int freq(int j, int n) { return j <= n / 2 ? j : j - n; }

// d^order/ds^order of periodic samples with period L. For even n the Nyquist
// mode is dropped on odd derivatives so real input stays real.
inline CVec derivative(const CVec& f, double L, int order) {
  const int n = int(f.size());
  std::vector<cplx> v(f.data(), f.data() + n);
  v = fwd(v);
  const double w0 = 2.0 * pi / L;
  for (int j = 0; j < n; ++j) {
    const int m = freq(j, n);
    if (n % 2 == 0 && j == n / 2 && order % 2 == 1) {
      v[j] = 0.0;
      continue;
    }
    v[j] *= std::pow(I * (w0 * m), order);
  }
  v = inv(v);
  return Eigen::Map<CVec>(v.data(), n);
}

inline RVec derivative(const RVec& f, double L, int order) {
  return derivative(CVec(f.cast<cplx>()), L, order).real();
}

// Trigonometric interpolant of the samples evaluated on the grid shifted by
// frac * (L / n).
inline CVec shift(const CVec& f, double frac) {
  const int n = int(f.size());
  std::vector<cplx> v(f.data(), f.data() + n);
  v = fwd(v);
  for (int j = 0; j < n; ++j) {
    const int m = freq(j, n);
    if (n % 2 == 0 && j == n / 2) {
      v[j] *= std::cos(pi * frac * m);
      continue;
    }
    v[j] *= std::exp(I * (2.0 * pi * frac * m / n));
  }
  v = inv(v);
  return Eigen::Map<CVec>(v.data(), n);
}

// Real Fourier coefficients (a_0..a_N, b_0..b_N with b_0 = 0) of real samples
// f(s_j), s_j = jL/n, truncated at order N <= (n-1)/2.
inline void real_coeffs(const RVec& f, int N, RVec& a, RVec& b) {
  const int n = int(f.size());
  std::vector<cplx> v(n);
  for (int j = 0; j < n; ++j) v[j] = f[j];
  v = fwd(v);
  a = RVec::Zero(N + 1);
  b = RVec::Zero(N + 1);
  a[0] = v[0].real() / n;
  for (int m = 1; m <= N && m < n; ++m) {
    const double scale = (2 * m == n) ? 1.0 : 2.0;
    a[m] = scale * v[m].real() / n;
    b[m] = -scale * v[m].imag() / n;
  }
}

// Samples at s_j = jL/n of the order-th derivative of the real trigonometric
// polynomial with coefficients (a, b).
inline RVec eval_grid(const RVec& a, const RVec& b, double L, int n, int order = 0) {
  const int N = int(a.size()) - 1;
  std::vector<cplx> v(n, 0.0);
  const double w0 = 2.0 * pi / L;
  for (int m = 0; m <= N; ++m) {
    const cplx c = (m == 0) ? cplx(a[0]) : 0.5 * cplx(a[m], -b[m]);
    const cplx dm = std::pow(I * (w0 * m), order);
    const int jp = m % n;
    v[jp] += c * dm * double(n);
    if (m > 0) {
      const int jn = (n - m % n) % n;
      v[jn] += std::conj(c) * std::conj(dm) * double(n);
    }
  }
  v = inv(v);
  RVec out(n);
  for (int j = 0; j < n; ++j) out[j] = v[j].real();
  return out;
}

// Value and first two derivatives at one arbitrary parameter s.
struct Jet {
  double f, df, ddf;
};

inline Jet eval_point(const RVec& a, const RVec& b, double L, double s) {
  const double w0 = 2.0 * pi / L;
  const cplx e = std::exp(I * (w0 * s));
  cplx z = 1.0;
  Jet r{a[0], 0.0, 0.0};
  for (int m = 1; m < a.size(); ++m) {
    z *= e;
    const double c = z.real(), sn = z.imag(), wm = w0 * m;
    r.f += a[m] * c + b[m] * sn;
    r.df += wm * (-a[m] * sn + b[m] * c);
    r.ddf -= wm * wm * (a[m] * c + b[m] * sn);
  }
  return r;
}

/// f(s + t) - f(s) without cancellation, for small offsets t.
inline double eval_increment(const RVec& a, const RVec& b, double L, double s, double t) {
  const double w0 = 2.0 * pi / L;
  const cplx e = std::exp(I * (w0 * (s + 0.5 * t)));
  cplx z = 1.0;
  double r = 0.0;
  for (int m = 1; m < a.size(); ++m) {
    z *= e;
    const double half = 2.0 * std::sin(0.5 * w0 * m * t);
    r += half * (b[m] * z.real() - a[m] * z.imag());
  }
  return r;
}

}  // namespace gibc::fourier
