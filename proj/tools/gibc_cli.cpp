// Command-line front end: generate, invert, forward, report, selftest.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "gibc/harness.hpp"
#include "gibc/io.hpp"
#include "sov_oracle.hpp"

using namespace gibc;
using io::json;

namespace {

bool verbose = false;

void note(const std::string& s) {
  if (verbose) std::cerr << s << '\n';
}

ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed) {
  ExperimentConfig cfg = path.empty() ? ExperimentConfig{} : io::config_from(io::read_file(path));
  if (seed) cfg.seed = *seed;
  return cfg;
}

int cmd_generate(const std::string& config, const std::string& out, std::optional<std::uint64_t> seed) {
  const ExperimentConfig cfg = load_config(config, seed);
  const FourierCurve truth = make_shape(cfg.shape);
  note("generating " + std::to_string(2 * cfg.k2max + 1) + " frequencies for shape " + cfg.shape.name);
  const ScatteringDataset ds = generate_data(truth, cfg);
  json j = io::to_json(ds);
  j["truth"] = io::to_json(truth);
  io::write_file(out, j);
  return 0;
}

int cmd_invert(const std::string& config, const std::string& data, const std::string& out, const std::string& log,
               std::optional<std::uint64_t> seed) {
  ExperimentConfig cfg = load_config(config, seed);
  const ScatteringDataset ds = io::dataset_from(io::read_file(data));
  std::ofstream logf;
  if (!log.empty()) {
    logf.open(log);
    if (!logf) throw std::runtime_error("cannot write " + log);
  }
  cfg.optimizer.c2 = cfg.physical.c2;
  cfg.optimizer.on_iteration = [&](const IterationRecord& r) {
    if (logf) logf << io::to_json(r).dump() << '\n';
    if (verbose)
      std::fprintf(stderr, "omega %.2f it %2d R %.3e domain %s impedance %s\n", r.omega, r.iteration, r.residual,
                   r.domain_kind.c_str(), r.impedance_kind.c_str());
  };
  const auto traj = continuation_solve(ds, initial_state(ds, cfg.inverse_model), cfg.optimizer);
  io::write_file(out, io::to_json(traj));
  for (const auto& f : traj)
    if (f.failed) std::cerr << "warning: frequency " << f.omega << " failed: " << f.message << '\n';
  return 0;
}

int cmd_forward(const std::string& curve_path, const std::string& params_path, const std::string& model, double omega,
                const std::string& config, const std::string& out, int nodes) {
  const json cj = io::read_file(curve_path);
  const FourierCurve curve = io::curve_from(cj.contains("truth") ? cj["truth"] : cj);
  const ExperimentConfig cfg = load_config(config, std::nullopt);
  const PhysicalParams ph = cfg.physical_at(omega);
  const SensorGeometry sensors = build_sensors(omega, ph.c2, cfg.aperture);
  SolverOptions opt;
  opt.n = nodes > 0 ? nodes : std::max(cfg.optimizer.nodes(omega, curve.L), 2 * curve.order() + 2);
  ReceptorField f;
  if (model == "transmission") {
    f = forward_map(ForwardModel::transmission, curve, ph, sensors, CVec(), opt);
  } else if (model == "neumann") {
    f = forward_map(ForwardModel::neumann, curve, ph, sensors, CVec(), opt);
  } else if (model == "impedance") {
    if (params_path.empty()) throw std::runtime_error("forward: impedance model needs --params");
    const ImpedanceParams p = io::params_from(io::read_file(params_path));
    f = forward_map(ForwardModel::impedance, curve, ph, sensors, eval_impedance(p, sample_curve(curve, opt.n), ph.k2()),
                    opt);
  } else {
    throw std::runtime_error("forward: unknown model " + model);
  }
  io::write_file(out, {{"omega", omega}, {"nodes", opt.n}, {"sensors", io::to_json(sensors)}, {"field", io::to_json(f)}});
  return 0;
}

int cmd_report(const std::string& traj_path, const std::string& truth_path, const std::string& out) {
  const auto traj = io::trajectory_from(io::read_file(traj_path));
  const json t = io::read_file(truth_path);
  const FourierCurve truth = io::curve_from(t.contains("truth") ? t["truth"] : t);
  const auto rows = error_report(traj, truth);
  if (out.empty() || out == "-") {
    write_report_csv(std::cout, rows);
  } else {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write " + out);
    write_report_csv(f, rows);
  }
  return 0;
}

// A small oracle suite: separation of variables on the disk, Hankel
// identities and a finite-difference Jacobian check.
int cmd_selftest() {
  int pass = 0, fail = 0;
  auto check = [&](const std::string& name, double value, double tol) {
    const bool ok = std::isfinite(value) && value <= tol;
    (ok ? pass : fail)++;
    std::printf("%-44s %-4s %.3e (tol %.0e)\n", name.c_str(), ok ? "ok" : "FAIL", value, tol);
  };

  {
    // Wronskian J1 Y0 - J0 Y1 = 2/(pi x).
    double worst = 0.0;
    for (double x = 0.1; x <= 50.0; x *= 1.3) {
      const HankelPair h = hankel01(x);
      const double w = h.h1.real() * h.h0.imag() - h.h0.real() * h.h1.imag();
      worst = std::max(worst, std::abs(w - 2.0 / (pi * x)) / (2.0 / (pi * x)));
    }
    check("hankel wronskian", worst, 1e-12);
  }
  {
    const FourierCurve c = make_circle(1.0, 16);
    const SensorGeometry s = build_sensors(1.0);
    SolverOptions opt;
    const double k = 5.0;
    const cplx lam(1.0, 0.5);
    const ReceptorField f = solve_impedance(c, CVec::Constant(opt.n, lam), k, s, opt).field;
    const auto coef = sov::impedance_coefficients(k, 1.0, lam);
    double num = 0, den = 0;
    for (int i = 0; i < s.nd(); ++i)
      for (int j = 0; j < s.nr(); ++j) {
        const double td = std::atan2(s.directions[i].y(), s.directions[i].x());
        const double tr = std::atan2(s.receptors[j].y(), s.receptors[j].x());
        const cplx ref = sov::scattered(coef, k, s.receptors[j].norm(), tr, td);
        num += std::norm(f.values(i, j) - ref);
        den += std::norm(ref);
      }
    check("impedance solver vs disk series (k=5)", std::sqrt(num / den), 1e-7);
  }
  {
    PhysicalParams ph;
    ph.omega = 3.0;
    ph.delta = std::sqrt(3.0) * 3.0;
    const FourierCurve c = make_circle(1.0, 16);
    const SensorGeometry s = build_sensors(1.0);
    const ReceptorField f = solve_transmission(c, ph, s).field;
    const auto coef = sov::transmission_coefficients(ph.k2(), ph.k1(), ph.alpha(), 1.0);
    double num = 0, den = 0;
    for (int i = 0; i < s.nd(); ++i)
      for (int j = 0; j < s.nr(); ++j) {
        const double td = std::atan2(s.directions[i].y(), s.directions[i].x());
        const double tr = std::atan2(s.receptors[j].y(), s.receptors[j].x());
        const cplx ref = sov::scattered(coef, ph.k2(), s.receptors[j].norm(), tr, td);
        num += std::norm(f.values(i, j) - ref);
        den += std::norm(ref);
      }
    check("transmission solver vs disk series (w=3)", std::sqrt(num / den), 1e-6);
  }
  {
    const FourierCurve c = make_starfish(3, 0.2, 64);
    const SensorGeometry s = build_sensors(1.0);
    SolverOptions opt;
    const double k = 3.0;
    const ImpedanceParams p = ImpedanceParams::abv(1.0, 0.6, 0.2);
    const ImpedanceSolution sol = solve_impedance(c, eval_impedance(p, sample_curve(c, opt.n), k), k, s, opt);
    const CMat J = impedance_jacobian(sol, p).J;
    const double eps = 1e-4;
    double worst = 0.0;
    for (int j = 0; j < p.real_size(); ++j) {
      RVec v = p.real_params();
      v[j] += eps;
      const ImpedanceParams pp = p.with_real_params(v);
      v[j] -= 2 * eps;
      const ImpedanceParams pm = p.with_real_params(v);
      const CVec fp = solve_impedance(c, eval_impedance(pp, sol.C, k), k, s, opt).field.flatten();
      const CVec fm = solve_impedance(c, eval_impedance(pm, sol.C, k), k, s, opt).field.flatten();
      const CVec fd = (fp - fm) / (2 * eps);
      worst = std::max(worst, (fd - J.col(j)).norm() / J.col(j).norm());
    }
    check("ABV impedance Jacobian vs finite differences", worst, 1e-6);
  }
  std::printf("selftest: %d passed, %d failed\n", pass, fail);
  return fail == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shape and impedance recovery from multifrequency scattering data"};
  app.require_subcommand(1);
  app.add_flag("--verbose,-v", verbose, "progress on stderr");

  std::string config, out, data, log, curve, params, model = "transmission", traj, truth;
  std::optional<std::uint64_t> seed;
  double omega = 1.0;
  int nodes = 0;

  auto* gen = app.add_subcommand("generate", "synthesize a dataset from a config");
  gen->add_option("--config", config, "experiment config (JSON)")->check(CLI::ExistingFile);
  gen->add_option("--out", out, "dataset file to write")->required();
  gen->add_option("--seed", seed, "override the config seed");

  auto* inv = app.add_subcommand("invert", "recover shape and impedance from a dataset");
  inv->add_option("--config", config, "experiment config (JSON)")->check(CLI::ExistingFile);
  inv->add_option("--data", data, "dataset file")->required()->check(CLI::ExistingFile);
  inv->add_option("--out", out, "trajectory file to write")->required();
  inv->add_option("--log", log, "JSON-lines iteration log");
  inv->add_option("--seed", seed, "override the config seed");

  auto* fwd = app.add_subcommand("forward", "receptor data for one curve and frequency");
  fwd->add_option("--curve", curve, "curve file, or a dataset holding a truth curve")->required()->check(CLI::ExistingFile);
  fwd->add_option("--params", params, "impedance parameters (JSON)")->check(CLI::ExistingFile);
  fwd->add_option("--model", model, "transmission | impedance | neumann");
  fwd->add_option("--omega", omega, "angular frequency");
  fwd->add_option("--config", config, "config supplying physical parameters and aperture")->check(CLI::ExistingFile);
  fwd->add_option("--nodes", nodes, "boundary nodes (default: inversion policy)");
  fwd->add_option("--out", out, "receptor file to write")->required();

  auto* rep = app.add_subcommand("report", "per-frequency error report as CSV");
  rep->add_option("--trajectory", traj, "trajectory file")->required()->check(CLI::ExistingFile);
  rep->add_option("--truth", truth, "truth curve, or a dataset holding one")->required()->check(CLI::ExistingFile);
  rep->add_option("--out", out, "CSV file (default stdout)");

  auto* st = app.add_subcommand("selftest", "run the built-in oracle checks");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) return cmd_generate(config, out, seed);
    if (*inv) return cmd_invert(config, data, out, log, seed);
    if (*fwd) return cmd_forward(curve, params, model, omega, config, out, nodes);
    if (*rep) return cmd_report(traj, truth, out);
    if (*st) return cmd_selftest();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
