#pragma once
// Synthetic experiments: frequency schedule, sensor layout, named obstacles,
// noisy data generation and per-frequency error reports.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gibc/dataset.hpp"
#include "gibc/forward.hpp"
#include "gibc/geometry.hpp"
#include "gibc/inverse.hpp"
#include "gibc/models.hpp"

namespace gibc {

inline constexpr double kReceptorRadius = 10.0;

inline double reference_dissipation(int k2max) { return std::sqrt(3.0) * k2max; }

/// omega_j = c2 (1 + (j - 1)/2), j = 1..2 k2max + 1.
inline std::vector<double> frequency_schedule(int k2max, double c2 = 1.0) {
  if (k2max < 1) throw std::invalid_argument("frequency_schedule: k2max must be >= 1");
  std::vector<double> w;
  for (int j = 1; j <= 2 * k2max + 1; ++j) w.push_back(c2 * (1.0 + 0.5 * (j - 1)));
  return w;
}

struct Aperture {
  enum class Kind { full, backscatter } kind = Kind::full;
  double alpha = 0.0;  // total opening angle of the backscatter cone
};

/// N_d = N_r = floor(10 omega / c2) on uniform angles, receptors on r = 10.
inline SensorGeometry build_sensors(double omega, double c2 = 1.0, const Aperture& ap = {}) {
  if (!(omega > 0)) throw std::invalid_argument("build_sensors: omega must be positive");
  const int N = int(std::floor(10.0 * omega / c2 + 1e-12));
  SensorGeometry s;
  for (int i = 0; i < N; ++i) {
    const double t = 2.0 * pi * i / N;
    s.directions.emplace_back(std::cos(t), std::sin(t));
    s.receptors.emplace_back(kReceptorRadius * std::cos(t), kReceptorRadius * std::sin(t));
  }
  s.mask = BoolMat::Constant(N, N, true);
  if (ap.kind == Aperture::Kind::backscatter) {
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        const Vec2 r = s.receptors[j].normalized();
        const double c = std::clamp(-r.dot(s.directions[i]), -1.0, 1.0);
        s.mask(i, j) = std::acos(c) <= 0.5 * ap.alpha + 1e-12;
      }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Obstacles. Each is sampled densely and refit to arc length.

inline FourierCurve curve_from_function(const std::function<Vec2(double)>& f, int order) {
  const int n = refit_sample_count(order);
  CVec z(n);
  for (int j = 0; j < n; ++j) {
    const Vec2 p = f(2.0 * pi * j / n);
    z[j] = cplx(p.x(), p.y());
  }
  return reparameterize_arclength(z, order);
}

inline FourierCurve make_circle(double R = 1.0, int order = 64) { return FourierCurve::circle(R).with_order(order); }

inline FourierCurve make_ellipse(double a, double b, int order = 64) {
  return curve_from_function([=](double t) { return Vec2(a * std::cos(t), b * std::sin(t)); }, order);
}

/// r(theta) = 1 + amplitude cos(petals theta).
inline FourierCurve make_starfish(int petals = 3, double amplitude = 0.2, int order = 80) {
  return curve_from_function(
      [=](double t) {
        const double r = 1.0 + amplitude * std::cos(petals * t);
        return Vec2(r * std::cos(t), r * std::sin(t));
      },
      order);
}

/// r(theta) = 1 + sum_{m=1}^{modes} (a_m cos m theta + b_m sin m theta) with
/// uniform coefficients in [-amplitude/m, amplitude/m].
inline FourierCurve make_random_fourier(std::uint64_t seed, int modes = 5, double amplitude = 0.1, int order = 80) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> a(modes + 1), b(modes + 1);
  for (int m = 1; m <= modes; ++m) {
    a[m] = amplitude * U(rng) / m;
    b[m] = amplitude * U(rng) / m;
  }
  return curve_from_function(
      [=](double t) {
        double r = 1.0;
        for (int m = 1; m <= modes; ++m) r += a[m] * std::cos(m * t) + b[m] * std::sin(m * t);
        return Vec2(r * std::cos(t), r * std::sin(t));
      },
      order);
}

/// Two lobes joined by a neck of half-width `neck`.
inline FourierCurve make_dumbbell(double neck = 0.35, int order = 96) {
  return curve_from_function(
      [=](double t) {
        const double c = std::cos(t);
        return Vec2(1.5 * c, std::sin(t) * (neck + (1.0 - neck) * c * c));
      },
      order);
}

struct ShapeSpec {
  std::string name = "starfish";  // circle | ellipse | starfish | random-fourier | dumbbell
  double radius = 1.0;
  double a = 1.5, b = 1.0;
  int petals = 3;
  double amplitude = 0.2;
  int modes = 5;
  std::uint64_t seed = 1;
  double neck = 0.35;
  int order = 80;
};

inline FourierCurve make_shape(const ShapeSpec& s) {
  if (s.name == "circle") return make_circle(s.radius, s.order);
  if (s.name == "ellipse") return make_ellipse(s.a, s.b, s.order);
  if (s.name == "starfish") return make_starfish(s.petals, s.amplitude, s.order);
  if (s.name == "random-fourier") return make_random_fourier(s.seed, s.modes, s.amplitude, s.order);
  if (s.name == "dumbbell") return make_dumbbell(s.neck, s.order);
  throw std::invalid_argument("unknown shape: " + s.name);
}

// ---------------------------------------------------------------------------
// Data generation.

struct ExperimentConfig {
  int k2max = 5;
  PhysicalParams physical;        // omega is set per frequency
  double delta_over_delta0 = 1.0;  // delta = this * sqrt(3) k2max
  ShapeSpec shape;
  double noise_sigma = 0.0;
  Aperture aperture;
  double ppw = 20.0;
  int min_data_nodes = 600;
  std::string data_model = "transmission";  // transmission | impedance | neumann
  ImpedanceParams data_impedance = ImpedanceParams::constant(cplx(1.0, 0.5));
  ModelKind inverse_model = ModelKind::abv;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;

  double delta() const { return delta_over_delta0 * reference_dissipation(k2max); }
  PhysicalParams physical_at(double omega) const {
    PhysicalParams p = physical;
    p.omega = omega;
    p.delta = delta();
    return p;
  }
};

/// Nodes for the data solve: ppw points per shortest wavelength, at least
/// min_nodes and enough to represent the curve.
inline int data_nodes(const FourierCurve& c, const PhysicalParams& ph, double ppw, int min_nodes) {
  const double kmax = std::max(std::abs(ph.k1()), ph.k2());
  int n = std::max(int(std::ceil(ppw * kmax * c.L / (2.0 * pi))), min_nodes);
  return std::max(n, 2 * c.order() + 2);
}

/// Adds sigma max|F| times complex normal noise (independent standard
/// normal real and imaginary parts) to every entry of F.
inline void add_noise(CMat& F, double sigma, std::mt19937_64& rng) {
  if (sigma == 0.0) return;
  const double S = sigma * F.cwiseAbs().maxCoeff();
  std::normal_distribution<double> N(0.0, 1.0);
  for (Eigen::Index i = 0; i < F.rows(); ++i)
    for (Eigen::Index j = 0; j < F.cols(); ++j) {
      const double re = N(rng), im = N(rng);
      F(i, j) += S * cplx(re, im);
    }
}

inline ScatteringDataset generate_data(const FourierCurve& truth, const ExperimentConfig& cfg) {
  if (!is_simple(truth)) throw std::invalid_argument("generate_data: truth curve is not simple");
  ScatteringDataset ds;
  ds.provenance.model = cfg.data_model;
  ds.provenance.ppw = cfg.ppw;
  ds.provenance.noise_sigma = cfg.noise_sigma;
  ds.provenance.seed = cfg.seed;
  ds.provenance.physical = cfg.physical_at(1.0);
  ds.provenance.k2max = cfg.k2max;
  ds.provenance.shape = cfg.shape.name;
  std::mt19937_64 rng(cfg.seed);
  for (double omega : frequency_schedule(cfg.k2max, cfg.physical.c2)) {
    const PhysicalParams ph = cfg.physical_at(omega);
    FrequencyData fd;
    fd.omega = omega;
    fd.sensors = build_sensors(omega, ph.c2, cfg.aperture);
    SolverOptions opt;
    opt.n = data_nodes(truth, ph, cfg.ppw, cfg.min_data_nodes);
    ReceptorField f;
    if (cfg.data_model == "transmission") {
      f = forward_map(ForwardModel::transmission, truth, ph, fd.sensors, CVec(), opt);
    } else if (cfg.data_model == "impedance") {
      const CVec lam = eval_impedance(cfg.data_impedance, sample_curve(truth, opt.n), ph.k2());
      f = forward_map(ForwardModel::impedance, truth, ph, fd.sensors, lam, opt);
    } else if (cfg.data_model == "neumann") {
      f = forward_map(ForwardModel::neumann, truth, ph, fd.sensors, CVec(), opt);
    } else {
      throw std::invalid_argument("generate_data: unknown data model " + cfg.data_model);
    }
    add_noise(f.values, cfg.noise_sigma, rng);
    fd.field = f;
    ds.slices.push_back(std::move(fd));
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Reports.

struct ReportRow {
  double omega = 0.0;
  double residual = 0.0;
  double area_error = 0.0;
  double delta_hat = std::numeric_limits<double>::quiet_NaN();
  double rhor_hat = std::numeric_limits<double>::quiet_NaN();
  double cr_hat = std::numeric_limits<double>::quiet_NaN();
  double rhorcr_hat = std::numeric_limits<double>::quiet_NaN();
};

inline std::vector<ReportRow> error_report(const std::vector<FrequencyResult>& trajectory, const FourierCurve& truth) {
  if (trajectory.empty()) throw std::invalid_argument("error_report: empty trajectory");
  std::vector<ReportRow> rows;
  for (const FrequencyResult& fr : trajectory) {
    ReportRow r;
    r.omega = fr.omega;
    r.residual = fr.residual;
    try {
      r.area_error = symmetric_difference_area(truth, fr.curve);
    } catch (const std::exception&) {
      r.area_error = std::numeric_limits<double>::quiet_NaN();
    }
    if (fr.params.kind == ModelKind::abv && fr.params.beta[1] != 0.0 && fr.params.beta[2] != 0.0) {
      const RecoveredPhysical p = physical_from_beta(fr.params.beta, fr.omega);
      r.delta_hat = p.delta;
      r.rhor_hat = p.rhor;
      r.cr_hat = p.cr;
      r.rhorcr_hat = p.rhor_cr;
    } else if (fr.params.kind == ModelKind::abv) {
      r.delta_hat = fr.omega * fr.params.beta[0];
    }
    rows.push_back(r);
  }
  return rows;
}

inline void write_report_csv(std::ostream& os, const std::vector<ReportRow>& rows) {
  os << "omega,residual,area_error,delta_hat,rhor_hat,cr_hat,rhorcr_hat\n";
  os.precision(17);
  for (const ReportRow& r : rows)
    os << r.omega << ',' << r.residual << ',' << r.area_error << ',' << r.delta_hat << ',' << r.rhor_hat << ','
       << r.cr_hat << ',' << r.rhorcr_hat << '\n';
}

}  // namespace gibc
