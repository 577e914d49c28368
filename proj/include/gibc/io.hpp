#pragma once
// JSON persistence for curves, impedance parameters, datasets, trajectories,
// run logs and experiment configs. Doubles are written with round-trip
// precision by nlohmann::json, so parse(serialize(x)) == x exactly.

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gibc/dataset.hpp"
#include "gibc/harness.hpp"
#include "gibc/inverse.hpp"

namespace gibc::io {

using json = nlohmann::json;

inline json to_json(const RVec& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

inline RVec rvec_from(const json& j) {
  RVec v(long(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[long(i)] = j[i].get<double>();
  return v;
}

// Complex vectors as {"re": [...], "im": [...]}.
inline json to_json(const CVec& v) {
  return {{"re", to_json(RVec(v.real()))}, {"im", to_json(RVec(v.imag()))}};
}

inline CVec cvec_from(const json& j) {
  const RVec re = rvec_from(j.at("re")), im = rvec_from(j.at("im"));
  if (re.size() != im.size()) throw std::invalid_argument("complex vector: re/im length mismatch");
  CVec v(re.size());
  for (long i = 0; i < re.size(); ++i) v[i] = cplx(re[i], im[i]);
  return v;
}

inline json to_json(const FourierCurve& c, bool with_nodes = false) {
  json j{{"length", c.L}, {"a1", to_json(c.a1)}, {"b1", to_json(c.b1)}, {"a2", to_json(c.a2)}, {"b2", to_json(c.b2)}};
  if (with_nodes) {
    const CurveSamples S = sample_curve(c, 2 * c.order() + 2);
    j["nodes"] = {{"s", to_json(S.s)}, {"x", to_json(S.x)}, {"y", to_json(S.y)}};
  }
  return j;
}

inline FourierCurve curve_from(const json& j) {
  FourierCurve c;
  c.L = j.at("length").get<double>();
  c.a1 = rvec_from(j.at("a1"));
  c.b1 = rvec_from(j.at("b1"));
  c.a2 = rvec_from(j.at("a2"));
  c.b2 = rvec_from(j.at("b2"));
  const long m = c.a1.size();
  if (m == 0 || c.b1.size() != m || c.a2.size() != m || c.b2.size() != m || !(c.L > 0))
    throw std::invalid_argument("curve: inconsistent coefficient arrays");
  return c;
}

inline json to_json(const ImpedanceParams& p) {
  json j{{"kind", to_string(p.kind)}};
  if (p.kind == ModelKind::abv) j["beta"] = to_json(p.beta);
  else if (p.kind != ModelKind::neumann) j["c"] = to_json(p.c);
  return j;
}

inline ImpedanceParams params_from(const json& j) {
  ImpedanceParams p;
  p.kind = model_from_string(j.at("kind").get<std::string>());
  switch (p.kind) {
    case ModelKind::abv:
      p.beta = j.contains("beta") ? rvec_from(j["beta"]) : RVec::Ones(3);
      if (p.beta.size() != 3) throw std::invalid_argument("abv: beta needs 3 entries");
      break;
    case ModelKind::neumann: break;
    case ModelKind::constant:
      p.c = j.contains("c") ? cvec_from(j["c"]) : CVec::Ones(1);
      if (p.c.size() != 1) throw std::invalid_argument("constant: c needs 1 entry");
      break;
    case ModelKind::ch:
      p.c = j.contains("c") ? cvec_from(j["c"]) : CVec(CVec::Zero(2));
      if (p.c.size() != 2) throw std::invalid_argument("ch: c needs 2 entries");
      break;
    case ModelKind::fs:
      p.c = j.contains("c") ? cvec_from(j["c"]) : CVec(CVec::Zero(1));
      if (p.c.size() % 2 != 1) throw std::invalid_argument("fs: c needs odd length");
      break;
  }
  return p;
}

inline json to_json(const PhysicalParams& p) {
  return {{"omega", p.omega}, {"c1", p.c1}, {"c2", p.c2}, {"rho1", p.rho1}, {"rho2", p.rho2}, {"delta", p.delta}};
}

inline PhysicalParams physical_from(const json& j) {
  PhysicalParams p;
  p.omega = j.value("omega", p.omega);
  p.c1 = j.value("c1", p.c1);
  p.c2 = j.value("c2", p.c2);
  p.rho1 = j.value("rho1", p.rho1);
  p.rho2 = j.value("rho2", p.rho2);
  p.delta = j.value("delta", p.delta);
  return p;
}

inline json to_json(const std::vector<Vec2>& pts) {
  json a = json::array();
  for (const Vec2& p : pts) a.push_back({p.x(), p.y()});
  return a;
}

inline std::vector<Vec2> points_from(const json& j) {
  std::vector<Vec2> out;
  for (const json& p : j) out.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  return out;
}

inline json to_json(const SensorGeometry& s) {
  json mask = json::array();
  for (Eigen::Index i = 0; i < s.mask.rows(); ++i) {
    std::string row(std::size_t(s.mask.cols()), '0');
    for (Eigen::Index k = 0; k < s.mask.cols(); ++k) row[std::size_t(k)] = s.mask(i, k) ? '1' : '0';
    mask.push_back(row);
  }
  return {{"directions", to_json(s.directions)}, {"receptors", to_json(s.receptors)}, {"mask", mask}};
}

inline SensorGeometry sensors_from(const json& j) {
  SensorGeometry s;
  s.directions = points_from(j.at("directions"));
  s.receptors = points_from(j.at("receptors"));
  s.mask = BoolMat::Constant(s.nd(), s.nr(), true);
  if (j.contains("mask")) {
    const json& m = j["mask"];
    if (long(m.size()) != s.nd()) throw std::invalid_argument("sensors: mask row count");
    for (int i = 0; i < s.nd(); ++i) {
      const std::string row = m[std::size_t(i)].get<std::string>();
      if (long(row.size()) != s.nr()) throw std::invalid_argument("sensors: mask row length");
      for (int k = 0; k < s.nr(); ++k) s.mask(i, k) = row[std::size_t(k)] == '1';
    }
  }
  return s;
}

// Field values as row-major re/im arrays (directions x receptors).
inline json to_json(const ReceptorField& f) {
  const long nd = f.values.rows(), nr = f.values.cols();
  CVec flat(nd * nr);
  for (long i = 0; i < nd; ++i)
    for (long k = 0; k < nr; ++k) flat[i * nr + k] = f.values(i, k);
  return {{"rows", nd}, {"cols", nr}, {"values", to_json(flat)}};
}

inline ReceptorField field_from(const json& j, const BoolMat& mask) {
  const long nd = j.at("rows").get<long>(), nr = j.at("cols").get<long>();
  const CVec flat = cvec_from(j.at("values"));
  if (flat.size() != nd * nr) throw std::invalid_argument("field: size mismatch");
  if (mask.rows() != nd || mask.cols() != nr) throw std::invalid_argument("field: mask shape mismatch");
  ReceptorField f;
  f.values.resize(nd, nr);
  for (long i = 0; i < nd; ++i)
    for (long k = 0; k < nr; ++k) f.values(i, k) = flat[i * nr + k];
  f.mask = mask;
  return f;
}

inline json to_json(const ScatteringDataset& ds) {
  const Provenance& p = ds.provenance;
  json j;
  j["provenance"] = {{"model", p.model},     {"ppw", p.ppw},     {"noise_sigma", p.noise_sigma},
                     {"seed", p.seed},       {"k2max", p.k2max}, {"physical", to_json(p.physical)},
                     {"shape", p.shape}};
  json sl = json::array();
  for (const FrequencyData& fd : ds.slices)
    sl.push_back({{"omega", fd.omega}, {"sensors", to_json(fd.sensors)}, {"field", to_json(fd.field)}});
  j["frequencies"] = sl;
  return j;
}

inline ScatteringDataset dataset_from(const json& j) {
  ScatteringDataset ds;
  const json& p = j.at("provenance");
  ds.provenance.model = p.value("model", std::string("transmission"));
  ds.provenance.ppw = p.value("ppw", 20.0);
  ds.provenance.noise_sigma = p.value("noise_sigma", 0.0);
  ds.provenance.seed = p.value("seed", std::uint64_t(0));
  ds.provenance.k2max = p.value("k2max", 0);
  ds.provenance.shape = p.value("shape", std::string());
  if (p.contains("physical")) ds.provenance.physical = physical_from(p["physical"]);
  for (const json& s : j.at("frequencies")) {
    FrequencyData fd;
    fd.omega = s.at("omega").get<double>();
    fd.sensors = sensors_from(s.at("sensors"));
    fd.field = field_from(s.at("field"), fd.sensors.mask);
    if (!ds.slices.empty() && !(fd.omega > ds.slices.back().omega))
      throw std::invalid_argument("dataset: frequencies must be ascending");
    ds.slices.push_back(std::move(fd));
  }
  return ds;
}

inline json to_json(const IterationRecord& r) {
  return {{"frequency", r.omega},
          {"freq_index", r.freq_index},
          {"iteration", r.iteration},
          {"residual", r.residual},
          {"domain_step", r.domain_kind},
          {"domain_nfilt", r.domain_nfilt},
          {"domain_gn_fallback", r.domain_gn_fallback},
          {"impedance_step", r.impedance_kind},
          {"impedance_nfilt", r.impedance_nfilt},
          {"domain_ok", r.domain_ok},
          {"impedance_ok", r.impedance_ok}};
}

inline json to_json(const std::vector<FrequencyResult>& traj) {
  json a = json::array();
  for (const FrequencyResult& f : traj) {
    json e{{"omega", f.omega},
           {"curve", to_json(f.curve)},
           {"params", to_json(f.params)},
           {"residual", std::isfinite(f.residual) ? json(f.residual) : json(nullptr)},
           {"iterations", f.iterations},
           {"failed", f.failed}};
    if (!f.message.empty()) e["message"] = f.message;
    a.push_back(e);
  }
  return {{"trajectory", a}};
}

inline std::vector<FrequencyResult> trajectory_from(const json& j) {
  std::vector<FrequencyResult> out;
  for (const json& e : j.at("trajectory")) {
    FrequencyResult f;
    f.omega = e.at("omega").get<double>();
    f.curve = curve_from(e.at("curve"));
    f.params = params_from(e.at("params"));
    f.residual = e.at("residual").is_null() ? NAN : e["residual"].get<double>();
    f.iterations = e.value("iterations", 0);
    f.failed = e.value("failed", false);
    f.message = e.value("message", std::string());
    out.push_back(std::move(f));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Experiment config. Unknown keys are rejected so typos fail loudly.

inline void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw std::invalid_argument(where + ": unknown key '" + it.key() + "'");
  }
}

inline void apply_optimizer(const json& j, OptimizerConfig& o) {
  check_keys(j,
             {"eps_R", "eps_s_gamma", "eps_s_lambda", "eps_s_R", "N_f", "eta_filt", "sigma_filt", "N_filt", "C_H",
              "min_nodes", "nodes_factor", "impedance_gauss_newton", "gn_condition_limit", "constant_bootstrap"},
             "optimizer");
  o.eps_R = j.value("eps_R", o.eps_R);
  o.eps_s_gamma = j.value("eps_s_gamma", o.eps_s_gamma);
  o.eps_s_lambda = j.value("eps_s_lambda", o.eps_s_lambda);
  o.eps_s_R = j.value("eps_s_R", o.eps_s_R);
  o.N_f = j.value("N_f", o.N_f);
  o.eta_filt = j.value("eta_filt", o.eta_filt);
  o.sigma_filt = j.value("sigma_filt", o.sigma_filt);
  o.N_filt = j.value("N_filt", o.N_filt);
  o.C_H = j.value("C_H", o.C_H);
  o.min_nodes = j.value("min_nodes", o.min_nodes);
  o.nodes_factor = j.value("nodes_factor", o.nodes_factor);
  o.impedance_gauss_newton = j.value("impedance_gauss_newton", o.impedance_gauss_newton);
  o.gn_condition_limit = j.value("gn_condition_limit", o.gn_condition_limit);
  o.constant_bootstrap = j.value("constant_bootstrap", o.constant_bootstrap);
  if (o.N_f < 0 || o.N_filt < 0 || !(o.eta_filt > 1) || !(o.sigma_filt > 0) || !(o.C_H >= 0 && o.C_H <= 1))
    throw std::invalid_argument("optimizer: parameter out of range");
}

inline ExperimentConfig config_from(const json& j) {
  check_keys(j, {"k2max", "physical", "shape", "noise_sigma", "aperture", "model", "optimizer", "seed", "ppw", "data"},
             "config");
  ExperimentConfig c;
  c.k2max = j.value("k2max", c.k2max);
  if (c.k2max < 1) throw std::invalid_argument("config: k2max must be >= 1");
  if (j.contains("physical")) {
    const json& p = j["physical"];
    check_keys(p, {"c1", "c2", "rho1", "rho2", "delta_over_delta0"}, "physical");
    c.physical.c1 = p.value("c1", c.physical.c1);
    c.physical.c2 = p.value("c2", c.physical.c2);
    c.physical.rho1 = p.value("rho1", c.physical.rho1);
    c.physical.rho2 = p.value("rho2", c.physical.rho2);
    c.delta_over_delta0 = p.value("delta_over_delta0", c.delta_over_delta0);
    c.physical_at(1.0).validate();
  }
  if (j.contains("shape")) {
    const json& s = j["shape"];
    check_keys(s, {"name", "radius", "a", "b", "petals", "amplitude", "modes", "seed", "neck", "order"}, "shape");
    c.shape.name = s.value("name", c.shape.name);
    c.shape.radius = s.value("radius", c.shape.radius);
    c.shape.a = s.value("a", c.shape.a);
    c.shape.b = s.value("b", c.shape.b);
    c.shape.petals = s.value("petals", c.shape.petals);
    c.shape.amplitude = s.value("amplitude", c.shape.amplitude);
    c.shape.modes = s.value("modes", c.shape.modes);
    c.shape.seed = s.value("seed", c.shape.seed);
    c.shape.neck = s.value("neck", c.shape.neck);
    c.shape.order = s.value("order", c.shape.order);
  }
  c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
  if (!(c.noise_sigma >= 0)) throw std::invalid_argument("config: noise_sigma must be >= 0");
  c.ppw = j.value("ppw", c.ppw);
  if (j.contains("aperture")) {
    const json& a = j["aperture"];
    check_keys(a, {"kind", "alpha"}, "aperture");
    const std::string kind = a.value("kind", std::string("full"));
    if (kind == "full") c.aperture.kind = Aperture::Kind::full;
    else if (kind == "backscatter") c.aperture.kind = Aperture::Kind::backscatter;
    else throw std::invalid_argument("aperture: kind must be full or backscatter");
    c.aperture.alpha = a.value("alpha", 0.25 * pi);
  }
  if (j.contains("data")) {
    const json& d = j["data"];
    check_keys(d, {"model", "impedance"}, "data");
    c.data_model = d.value("model", c.data_model);
    if (d.contains("impedance")) c.data_impedance = params_from(d["impedance"]);
  }
  if (j.contains("model")) {
    const json& m = j["model"];
    check_keys(m, {"kind"}, "model");
    c.inverse_model = model_from_string(m.value("kind", std::string("abv")));
  }
  if (j.contains("optimizer")) apply_optimizer(j["optimizer"], c.optimizer);
  c.seed = j.value("seed", c.seed);
  return c;
}

inline json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

inline void write_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(1) << '\n';
}

}  // namespace gibc::io
