#pragma once
// Hybrid Gauss-trapezoidal rules for periodic integrands with a logarithmic
// singularity at one node (Alpert-type end corrections).
//
// On the grid s_j = j h the rule for the integral of f over one period,
// singular at s_0, is
//   h * sum_{a <= |j| <= n-a} f(s_j) + h * sum_p w_p (f(v_p h) + f(-v_p h)).
// Nodes v_p lie in (0, a) in units of h.

#include <array>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <vector>

#include "gibc/special.hpp"

namespace gibc {

struct QuadratureRule {
  int order = 0;
  int a = 0;  // trapezoid nodes with |j| < a are replaced by the corrections
  std::vector<double> nodes;
  std::vector<double> weights;

  int size() const { return int(nodes.size()); }

  /// Integral of f over one period [0, period) on n nodes, singular at 0.
  double integrate(const std::function<double(double)>& f, int n, double period) const {
    if (n < 2 * a + 1) throw std::invalid_argument("QuadratureRule: too few nodes");
    const double h = period / n;
    double sum = 0.0;
    for (int j = a; j <= n - a; ++j) sum += f(j * h);
    for (int p = 0; p < size(); ++p) sum += weights[p] * (f(nodes[p] * h) + f(-nodes[p] * h));
    return h * sum;
  }
};

namespace detail {

// Order-16 rule: 15 correction nodes, a = 11. Solved in 34-digit arithmetic
// from the moment equations
//   sum_p w_p v_p^j          = sum_{k<a} k^j - zeta(-j)
//   sum_p w_p v_p^j log v_p  = sum_{k<a} k^j log k + zeta'(-j),  j = 0..14.
// Stored as decimal strings so tests can parse them at higher precision.
inline constexpr int kAlpert16A = 11;
inline constexpr std::array<const char*, 15> kAlpert16Nodes{
    "0.0009768083033538343532770305",
    "0.01446192976784901543696882",
    "0.07012482913269618369100071",
    "0.2107678734429075908276711",
    "0.4835478035581979894183793",
    "0.9297787392012948297307438",
    "1.575032091261299581738279",
    "2.421215172974630810853533",
    "3.442051754285960425752257",
    "4.583082879875903631415073",
    "5.76781664037676519111593",
    "6.915939441102480582776257",
    "7.984573895705251406901196",
    "8.998991654998934502606561",
    "9.999987182026467338984304"};
inline constexpr std::array<const char*, 15> kAlpert16Weights{
    "0.003723258424887275314698877",
    "0.02828113175674599512862487",
    "0.09032821393648521944524654",
    "0.1989914468797744713992266",
    "0.3536232076857176365957898",
    "0.5432360269450271444867808",
    "0.7476663704876765475584036",
    "0.9403230677011513842829341",
    "1.092181478785151291171354",
    "1.176868296765846844862673",
    "1.17850364996882268493157",
    "1.109701250563510642234055",
    "1.033075026947258561162057",
    "1.00342533130072633557836",
    "1.000072241851217965848227"};

// Order-6 rule (5 nodes, a = 3), useful for cheap cross-checks.
inline constexpr std::array<double, 5> kAlpert6Nodes{
    0.004004884194926569617659298, 0.07745655373336686132423647, 0.3972849993523248593830132,
    1.075673352915103744318071, 2.003796927111871943975468};
inline constexpr std::array<double, 5> kAlpert6Weights{
    0.01671879691147101715107222, 0.1636958371447359701109673, 0.4981856569770636544361101,
    0.8372266245578912202373916, 0.9841730844088381380644587};

}  // namespace detail

inline const QuadratureRule& alpert_log_rule16() {
  static const QuadratureRule r = [] {
    QuadratureRule q{16, detail::kAlpert16A, {}, {}};
    for (const char* v : detail::kAlpert16Nodes) q.nodes.push_back(std::strtod(v, nullptr));
    for (const char* w : detail::kAlpert16Weights) q.weights.push_back(std::strtod(w, nullptr));
    return q;
  }();
  return r;
}

inline const QuadratureRule& alpert_log_rule6() {
  static const QuadratureRule r{6, 3, std::vector<double>(detail::kAlpert6Nodes.begin(), detail::kAlpert6Nodes.end()),
                                std::vector<double>(detail::kAlpert6Weights.begin(), detail::kAlpert6Weights.end())};
  return r;
}

/// Periodic interpolation weight of grid value l for the point at offset x
/// (in units of h) on an n-point grid: the Dirichlet kernel, with the Nyquist
/// mode split evenly when n is even.
inline double periodic_interp_weight(double x, int n) {
  const double t = pi * x;
  const double s = std::sin(t);
  if (std::abs(s) < 1e-14 && std::abs(std::remainder(x, 1.0)) < 1e-14) {
    const long k = std::lround(x);
    return (k % n == 0) ? 1.0 : 0.0;
  }
  const double den = (n % 2 == 1) ? n * std::sin(t / n) : n * std::tan(t / n);
  return s / den;
}

}  // namespace gibc
