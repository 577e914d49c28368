#pragma once
// Single-frequency alternating minimization over the boundary curve and the
// impedance parameters, and the continuation driver that sweeps frequencies
// in ascending order with warm starts.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gibc/dataset.hpp"
#include "gibc/forward.hpp"
#include "gibc/frechet.hpp"
#include "gibc/geometry.hpp"
#include "gibc/models.hpp"

namespace gibc {

struct IterationRecord {
  double omega = 0.0;
  int freq_index = 0;
  int iteration = 0;
  double residual = 0.0;
  std::string domain_kind = "none";     // gn-sf, gn-gf, sd-sf, sd-gf or none
  int domain_nfilt = 0;
  bool domain_gn_fallback = false;       // GN system was rank deficient
  std::string impedance_kind = "none";  // sd, gn, gn-restricted or none
  int impedance_nfilt = 0;
  bool domain_ok = true;                 // curve lies in the admissible set
  bool impedance_ok = true;              // parameters lie in their constraint set
};

struct OptimizerConfig {
  double eps_R = 1e-4;
  double eps_s_gamma = 1e-4, eps_s_lambda = 1e-4, eps_s_R = 1e-4;
  int N_f = 40;
  double eta_filt = 8.0;
  double sigma_filt = 0.1;
  int N_filt = 3;
  double C_H = 0.9;
  double c2 = 1.0;
  int min_nodes = 300;
  double nodes_factor = 5.0;  // 10 points per wavelength
  bool impedance_gauss_newton = false;
  double gn_condition_limit = 1e8;
  bool constant_bootstrap = false;
  const QuadratureRule* rule = nullptr;
  std::function<void(const IterationRecord&)> on_iteration;

  int nodes(double omega, double L) const {
    return std::max(int(std::ceil(nodes_factor * omega * L / (c2 * pi))), min_nodes);
  }
  int n_gamma(double omega, double L) const { return std::max(1, int(std::floor(omega * L / (c2 * pi)))); }
  int energy_band(double omega, double L) const { return n_gamma(omega, L); }
  int n_c(double omega, double L) const { return n_gamma(omega, L) / 2; }
  // Highest curve mode resolvable on n nodes with room for the products
  // (h times normal, curvature) the solver forms.
  static int curve_order(int nodes) { return (nodes - 1) / 4; }
};

struct InversionState {
  FourierCurve curve;
  ImpedanceParams params;
  int freq_index = 0;
  double omega = 0.0;
  std::vector<double> residuals;  // accepted residuals at the current frequency
  std::vector<IterationRecord> records;
  bool stagnated = false;
};

// ---------------------------------------------------------------------------
// Residuals.

struct Evaluation {
  std::shared_ptr<const ImpedanceSystem> sys;
  ImpedanceSolution sol;
  CVec r;  // prediction minus measurement over unmasked entries
  double R = std::numeric_limits<double>::infinity();
  double F = std::numeric_limits<double>::infinity();  // half squared misfit
};

inline double relative_residual_from(const CVec& predicted, const CVec& measured) {
  const double z = measured.norm();
  if (z == 0.0) throw std::domain_error("relative_residual: measurements are all zero");
  return (measured - predicted).norm() / z;
}

namespace detail {

inline Evaluation evaluate_on(std::shared_ptr<const ImpedanceSystem> sys, const ImpedanceParams& params,
                              const FrequencyData& data) {
  Evaluation e;
  e.sol = sys->solve(eval_impedance(params, sys->C, sys->k));
  e.sys = std::move(sys);
  const CVec z = data.field.flatten();
  e.r = e.sol.field.flatten() - z;
  const double zn = z.norm();
  if (zn == 0.0) throw std::domain_error("relative_residual: measurements are all zero");
  e.R = e.r.norm() / zn;
  e.F = 0.5 * e.r.squaredNorm();
  return e;
}

inline SolverOptions solver_options(const OptimizerConfig& cfg, int n) {
  SolverOptions o;
  o.n = n;
  o.rule = cfg.rule;
  return o;
}

inline Evaluation evaluate(const FourierCurve& curve, const ImpedanceParams& params, const FrequencyData& data,
                           const OptimizerConfig& cfg, int n) {
  auto sys = std::make_shared<const ImpedanceSystem>(
      prepare_impedance(curve, data.omega / cfg.c2, data.sensors, solver_options(cfg, n)));
  return evaluate_on(std::move(sys), params, data);
}

}  // namespace detail

/// Relative residual of the impedance forward map against one frequency of
/// data, discretized with the optimizer's node policy.
inline double relative_residual(const FrequencyData& data, const FourierCurve& curve, const ImpedanceParams& params,
                                const OptimizerConfig& cfg = {}) {
  return detail::evaluate(curve, params, data, cfg, cfg.nodes(data.omega, curve.L)).R;
}

// ---------------------------------------------------------------------------
// Descent directions.

enum class DirectionKind { gauss_newton, steepest_descent };

struct DescentDirection {
  RVec step;       // unscaled direction (GN: the full step)
  double d = 1.0;  // initial step scale
  bool fallback = false;
};

inline RMat stack_real(const CMat& J) {
  RMat A(2 * J.rows(), J.cols());
  A.topRows(J.rows()) = J.real();
  A.bottomRows(J.rows()) = J.imag();
  return A;
}

inline RVec stack_real(const CVec& r) {
  RVec b(2 * r.size());
  b.head(r.size()) = r.real();
  b.tail(r.size()) = r.imag();
  return b;
}

/// r is the residual f(v) - z. SD uses the Cauchy point of the linearization.
inline DescentDirection descent_direction(DirectionKind kind, const CMat& J, const CVec& r) {
  if (J.cols() == 0 || J.cwiseAbs().maxCoeff() == 0.0) throw std::invalid_argument("descent_direction: zero Jacobian");
  const RMat A = stack_real(J);
  const RVec b = stack_real(r);
  DescentDirection out;
  if (kind == DirectionKind::gauss_newton) {
    Eigen::ColPivHouseholderQR<RMat> qr(A);
    if (qr.rank() == A.cols()) {
      out.step = qr.solve(-b);
      out.d = 1.0;
      return out;
    }
    out.fallback = true;
  }
  const RVec g = A.transpose() * b;
  out.step = -g;
  const double Ag = (A * g).squaredNorm();
  out.d = Ag > 0.0 ? g.squaredNorm() / Ag : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Step filtering.

enum class FilterKind { step_length, gaussian };

/// Diagonal Gaussian damping of cosine (first Nh+1 entries) and sine (last Nh)
/// coefficients.
inline RVec gaussian_filter(const RVec& w, double sigma, int Nh) {
  if (w.size() != 2 * Nh + 1) throw std::invalid_argument("gaussian_filter: expected 2Nh+1 coefficients");
  RVec out = w;
  const double s2 = sigma * sigma * double(Nh) * double(Nh);
  for (int m = 1; m <= 2 * Nh + 1; ++m) {
    const int j = m <= Nh + 1 ? m - 1 : m - Nh - 1;
    out[m - 1] *= std::exp(-double(j) * double(j) / s2);
  }
  return out;
}

struct FilterResult {
  RVec w;
  int n_filt = 0;
  bool accepted = false;
};

/// Tries the candidate filtered with level 0, 1, ..., N_filt and returns the
/// first one the predicate accepts, or a zero step.
inline FilterResult filter_step(FilterKind kind, const RVec& w, const std::function<bool(const RVec&)>& accept,
                                const OptimizerConfig& cfg, int Nh = -1) {
  FilterResult res;
  if (kind == FilterKind::gaussian && Nh < 0) Nh = int(w.size() - 1) / 2;
  for (int l = 0; l <= cfg.N_filt; ++l) {
    const RVec c = kind == FilterKind::step_length ? RVec(w / std::pow(cfg.eta_filt, l))
                                                   : gaussian_filter(w, std::pow(cfg.sigma_filt, l), Nh);
    if (accept(c)) {
      res.w = c;
      res.n_filt = l;
      res.accepted = true;
      return res;
    }
  }
  res.w = RVec::Zero(w.size());
  res.n_filt = cfg.N_filt;
  return res;
}

// ---------------------------------------------------------------------------
// Alternating steps. A Session keeps the evaluation of the current iterate so
// consecutive steps share solves.

struct StepOutcome {
  bool moved = false;
  std::string kind = "none";
  int n_filt = 0;
  bool fallback = false;
};

struct Session {
  const FrequencyData* data = nullptr;
  const OptimizerConfig* cfg = nullptr;
  FourierCurve curve;
  ImpedanceParams params;
  Evaluation current;
  int n = 0;
  double k2() const { return data->omega / cfg->c2; }
  int n_gamma() const { return cfg->n_gamma(data->omega, curve.L); }
  int band() const { return cfg->energy_band(data->omega, curve.L); }
};

inline Session start_session(const FourierCurve& curve, const ImpedanceParams& params, const FrequencyData& data,
                             const OptimizerConfig& cfg) {
  Session s;
  s.data = &data;
  s.cfg = &cfg;
  s.n = cfg.nodes(data.omega, curve.L);
  const int order = OptimizerConfig::curve_order(s.n);
  s.curve = curve.order() == order ? curve : reparameterize_arclength(curve, order);
  s.params = params;
  if (params.kind == ModelKind::fs) {
    const int Nc = cfg.n_c(data.omega, s.curve.L);
    if (params.fs_order() != Nc) {
      CVec c = CVec::Zero(2 * Nc + 1);
      const int keep = std::min(Nc, params.fs_order());
      for (int m = -keep; m <= keep; ++m) c[m + Nc] = params.c[m + params.fs_order()];
      s.params = ImpedanceParams::fs(c);
    }
  }
  s.current = detail::evaluate(s.curve, s.params, data, cfg, s.n);
  return s;
}

inline StepOutcome domain_step(Session& s) {
  const OptimizerConfig& cfg = *s.cfg;
  StepOutcome out;
  if (s.current.F == 0.0) return out;
  const int Ng = s.n_gamma();
  const JacobianBlock jb = domain_jacobian(s.current.sol, s.params, Ng);
  if (jb.J.cwiseAbs().maxCoeff() == 0.0) return out;

  const DescentDirection gn = descent_direction(DirectionKind::gauss_newton, jb.J, s.current.r);
  const DescentDirection sd = descent_direction(DirectionKind::steepest_descent, jb.J, s.current.r);
  out.fallback = gn.fallback;

  struct Candidate {
    std::string kind;
    FilterResult f;
    std::optional<Evaluation> eval;
    FourierCurve curve;
  };
  std::vector<Candidate> cands;
  const double F0 = s.current.F;
  auto run = [&](const std::string& name, const RVec& w, FilterKind fk) {
    Candidate c;
    c.kind = name;
    auto accept = [&](const RVec& trial) {
      if (!trial.allFinite() || trial.norm() == 0.0) return false;
      try {
        const int order = OptimizerConfig::curve_order(cfg.nodes(s.data->omega, s.curve.L));
        FourierCurve next = apply_normal_update(s.curve, NormalPerturbation{trial}, order);
        const int M = cfg.energy_band(s.data->omega, next.L);
        if (!constraint_check(next, M, cfg.C_H).ok) return false;
        const int n = cfg.nodes(s.data->omega, next.L);
        if (OptimizerConfig::curve_order(n) != next.order()) next = reparameterize_arclength(next, OptimizerConfig::curve_order(n));
        Evaluation e = detail::evaluate(next, s.params, *s.data, cfg, n);
        if (!(e.F <= F0)) return false;
        c.eval = std::move(e);
        c.curve = next;
        return true;
      } catch (const std::exception&) {
        return false;
      }
    };
    c.f = filter_step(fk, w, accept, cfg, Ng);
    cands.push_back(std::move(c));
  };
  const RVec wg = gn.d * gn.step, ws = sd.d * sd.step;
  run("gn-sf", wg, FilterKind::step_length);
  run("gn-gf", wg, FilterKind::gaussian);
  run("sd-sf", ws, FilterKind::step_length);
  run("sd-gf", ws, FilterKind::gaussian);

  // Strict minimum; earlier entries win ties.
  const Candidate* best = nullptr;
  for (const Candidate& c : cands)
    if (c.f.accepted && (!best || c.eval->F < best->eval->F)) best = &c;
  if (!best) return out;
  out.moved = true;
  out.kind = best->kind;
  out.n_filt = best->f.n_filt;
  s.curve = best->curve;
  s.n = best->eval->sol.C.n;
  s.current = *best->eval;
  return out;
}

/// Real-parameter columns that change only the curvature-independent part
/// of lambda.
inline std::vector<int> constant_part_columns(const ImpedanceParams& p) {
  switch (p.kind) {
    case ModelKind::constant: return {0, 1};
    case ModelKind::ch: return {0, 1};
    case ModelKind::abv: return {0, 1};
    case ModelKind::fs: {
      const int Nc = p.fs_order();
      return {2 * Nc, 2 * Nc + 1};
    }
    case ModelKind::neumann: return {};
  }
  return {};
}

inline StepOutcome impedance_step(Session& s) {
  const OptimizerConfig& cfg = *s.cfg;
  StepOutcome out;
  if (s.params.kind == ModelKind::neumann || s.current.F == 0.0) return out;
  const JacobianBlock jb = impedance_jacobian(s.current.sol, s.params);
  if (jb.J.cols() == 0 || jb.J.cwiseAbs().maxCoeff() == 0.0) return out;

  const RVec v0 = s.params.real_params();
  RVec dir;
  double d = 1.0;
  out.kind = "sd";
  if (cfg.impedance_gauss_newton) {
    const RMat A = stack_real(jb.J);
    Eigen::JacobiSVD<RMat> svd(A);
    const auto sv = svd.singularValues();
    const double cond = sv[sv.size() - 1] > 0 ? sv[0] / sv[sv.size() - 1] : INFINITY;
    if (cond <= cfg.gn_condition_limit) {
      const DescentDirection gn = descent_direction(DirectionKind::gauss_newton, jb.J, s.current.r);
      dir = gn.step;
      d = gn.d;
      out.kind = gn.fallback ? "sd" : "gn";
      out.fallback = gn.fallback;
    } else {
      const std::vector<int> cols = constant_part_columns(s.params);
      CMat Jc(jb.J.rows(), long(cols.size()));
      for (std::size_t i = 0; i < cols.size(); ++i) Jc.col(long(i)) = jb.J.col(cols[i]);
      const DescentDirection gn = descent_direction(DirectionKind::gauss_newton, Jc, s.current.r);
      dir = RVec::Zero(v0.size());
      for (std::size_t i = 0; i < cols.size(); ++i) dir[cols[i]] = gn.step[long(i)];
      d = gn.d;
      out.kind = "gn-restricted";
      out.fallback = true;
    }
  } else {
    const DescentDirection sd = descent_direction(DirectionKind::steepest_descent, jb.J, s.current.r);
    dir = sd.step;
    d = sd.d;
  }
  if (!dir.allFinite() || d == 0.0 || dir.norm() == 0.0) {
    out.kind = "none";
    return out;
  }

  const double F0 = s.current.F;
  std::optional<Evaluation> accepted;
  ImpedanceParams accepted_params;
  for (int l = 0; l <= cfg.N_filt; ++l) {
    ImpedanceParams trial = s.params.with_real_params(v0 + (d / std::pow(cfg.eta_filt, l)) * dir);
    trial = project_params(trial);
    try {
      Evaluation e = detail::evaluate_on(s.current.sys, trial, *s.data);
      if (e.F <= F0) {
        accepted = std::move(e);
        accepted_params = trial;
        out.n_filt = l;
        break;
      }
    } catch (const std::exception&) {
    }
  }
  if (!accepted) {
    out.kind = "none";
    out.n_filt = cfg.N_filt;
    return out;
  }
  out.moved = true;
  s.params = accepted_params;
  s.current = std::move(*accepted);
  return out;
}

// ---------------------------------------------------------------------------
// Drivers.

inline RVec curve_vector(const FourierCurve& c) {
  const long m = c.a1.size();
  RVec v(4 * m);
  v << c.a1, c.b1, c.a2, c.b2;
  return v;
}

inline double relative_change(const RVec& a, const RVec& b) {
  if (a.size() != b.size()) return INFINITY;
  return (b - a).norm() / std::max(a.norm(), 1e-14);
}

inline InversionState solve_single_frequency(InversionState state, const FrequencyData& data,
                                             const OptimizerConfig& cfg) {
  Session s = start_session(state.curve, state.params, data, cfg);
  state.omega = data.omega;
  state.residuals.assign(1, s.current.R);
  state.stagnated = false;
  auto emit = [&](IterationRecord rec) {
    rec.omega = data.omega;
    rec.freq_index = state.freq_index;
    rec.residual = s.current.R;
    rec.domain_ok = constraint_check(s.curve, cfg.energy_band(data.omega, s.curve.L), cfg.C_H).ok;
    rec.impedance_ok = is_feasible(s.params);
    state.records.push_back(rec);
    if (cfg.on_iteration) cfg.on_iteration(rec);
  };
  emit(IterationRecord{});

  for (int it = 1; it <= cfg.N_f && s.current.R > cfg.eps_R; ++it) {
    const RVec c_old = curve_vector(s.curve), p_old = s.params.real_params();
    const double R_old = s.current.R;
    IterationRecord rec;
    rec.iteration = it;
    const StepOutcome ds = domain_step(s);
    rec.domain_kind = ds.kind;
    rec.domain_nfilt = ds.n_filt;
    rec.domain_gn_fallback = ds.fallback;
    const StepOutcome is = impedance_step(s);
    rec.impedance_kind = is.kind;
    rec.impedance_nfilt = is.n_filt;
    state.residuals.push_back(s.current.R);
    emit(rec);

    const double dg = relative_change(c_old, curve_vector(s.curve));
    const double dl = p_old.size() ? relative_change(p_old, s.params.real_params()) : 0.0;
    const double dr = std::abs(s.current.R - R_old) / std::max(R_old, 1e-14);
    if (dg < cfg.eps_s_gamma && dl < cfg.eps_s_lambda && dr < cfg.eps_s_R) {
      state.stagnated = true;
      break;
    }
  }
  state.curve = s.curve;
  state.params = s.params;
  return state;
}

struct FrequencyResult {
  double omega = 0.0;
  FourierCurve curve;
  ImpedanceParams params;
  double residual = 0.0;
  int iterations = 0;
  bool failed = false;
  std::string message;
};

/// Nearest parameters of `kind` reproducing a constant impedance c.
inline ImpedanceParams from_constant(ModelKind kind, cplx c, const ImpedanceParams& like) {
  switch (kind) {
    case ModelKind::constant: return ImpedanceParams::constant(c);
    case ModelKind::ch: return project_params(ImpedanceParams::ch(c, 0.0));
    case ModelKind::fs: {
      CVec v = CVec::Zero(like.c.size() ? like.c.size() : 1);
      v[v.size() / 2] = c;
      return ImpedanceParams::fs(v);
    }
    case ModelKind::abv: {
      // c = beta2 sqrt(1 - i beta1) with beta1 >= 0 puts arg c in (-pi/4, 0].
      // Phases at or beyond the limit are capped at beta1 = tan(0.45 pi).
      const double ang = std::clamp(std::arg(c), -0.225 * pi, 0.0);
      const double b1 = std::tan(-2.0 * ang);
      const double b2 = std::abs(c) / std::sqrt(std::abs(cplx(1.0, -b1)));
      return ImpedanceParams::abv(b1, b2, 0.0);
    }
    case ModelKind::neumann: return ImpedanceParams::neumann();
  }
  return like;
}

inline std::vector<FrequencyResult> continuation_solve(const ScatteringDataset& data, InversionState state,
                                                       const OptimizerConfig& cfg) {
  for (std::size_t j = 1; j < data.slices.size(); ++j)
    if (!(data.slices[j].omega > data.slices[j - 1].omega))
      throw std::invalid_argument("continuation_solve: frequencies must be strictly increasing");
  std::vector<FrequencyResult> out;
  double prev_omega = 0.0;
  for (std::size_t j = 0; j < data.slices.size(); ++j) {
    const FrequencyData& slice = data.slices[j];
    state.freq_index = int(j);
    if (prev_omega > 0.0 && state.params.kind == ModelKind::abv) state.params.beta[0] *= prev_omega / slice.omega;
    FrequencyResult fr;
    fr.omega = slice.omega;
    try {
      if (j == 0 && cfg.constant_bootstrap && state.params.kind != ModelKind::constant &&
          state.params.kind != ModelKind::neumann) {
        const ImpedanceParams target = state.params;
        InversionState boot = state;
        boot.params = ImpedanceParams::constant(1.0);
        boot = solve_single_frequency(boot, slice, cfg);
        state.curve = boot.curve;
        state.records = boot.records;
        state.params = from_constant(target.kind, boot.params.c[0], target);
      }
      state = solve_single_frequency(state, slice, cfg);
      fr.residual = state.residuals.back();
      fr.iterations = int(state.residuals.size()) - 1;
    } catch (const std::exception& e) {
      fr.failed = true;
      fr.message = e.what();
      fr.residual = NAN;
    }
    fr.curve = state.curve;
    fr.params = state.params;
    out.push_back(fr);
    prev_omega = slice.omega;
  }
  return out;
}

/// Default starting point: unit circle centred at the receptor centroid with
/// model-neutral parameters.
inline InversionState initial_state(const ScatteringDataset& data, ModelKind kind) {
  InversionState s;
  Vec2 c = Vec2::Zero();
  if (!data.slices.empty()) {
    const auto& r = data.slices.front().sensors.receptors;
    for (const Vec2& p : r) c += p;
    if (!r.empty()) c /= double(r.size());
  }
  s.curve = FourierCurve::circle(1.0, c.x(), c.y());
  switch (kind) {
    case ModelKind::constant: s.params = ImpedanceParams::constant(1.0); break;
    case ModelKind::fs: s.params = ImpedanceParams::fs(CVec::Zero(1)); break;
    case ModelKind::ch: s.params = ImpedanceParams::ch(1.0, 0.0); break;
    case ModelKind::abv: s.params = ImpedanceParams::abv(1.0, 1.0, 1.0); break;
    case ModelKind::neumann: s.params = ImpedanceParams::neumann(); break;
  }
  return s;
}

}  // namespace gibc
