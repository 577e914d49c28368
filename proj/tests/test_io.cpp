#include <gtest/gtest.h>

#include "gibc/io.hpp"
#include "testing.hpp"

using namespace gibc;
namespace tk = gibc::testkit;
using io::json;

TEST(Io, CurveRoundTripIsExact) {
  const FourierCurve c = tk::starfish_curve();
  const FourierCurve d = io::curve_from(json::parse(io::to_json(c).dump()));
  EXPECT_EQ(c.L, d.L);
  EXPECT_EQ(c.a1, d.a1);
  EXPECT_EQ(c.b2, d.b2);
}

TEST(Io, ParamsRoundTrip) {
  CVec fs(3);
  fs << 1, cplx(0, 2), -3;
  for (const ImpedanceParams& p : {ImpedanceParams::constant(cplx(1, -1)), ImpedanceParams::fs(fs),
                                   ImpedanceParams::ch(1.0, cplx(0, -1)), ImpedanceParams::abv(1, 2, 3),
                                   ImpedanceParams::neumann()}) {
    const ImpedanceParams q = io::params_from(json::parse(io::to_json(p).dump()));
    EXPECT_EQ(q.kind, p.kind);
    EXPECT_EQ(q.real_params(), p.real_params());
  }
}

TEST(Io, DatasetRoundTripKeepsMaskAndValues) {
  ExperimentConfig cfg;
  cfg.k2max = 1;
  cfg.shape.name = "circle";
  cfg.aperture = {Aperture::Kind::backscatter, pi / 2};
  cfg.min_data_nodes = 200;
  const ScatteringDataset ds = generate_data(make_shape(cfg.shape), cfg);
  const ScatteringDataset back = io::dataset_from(json::parse(io::to_json(ds).dump()));
  ASSERT_EQ(back.slices.size(), ds.slices.size());
  for (std::size_t j = 0; j < ds.slices.size(); ++j) {
    EXPECT_EQ(back.slices[j].sensors.mask.matrix(), ds.slices[j].sensors.mask.matrix());
    EXPECT_EQ(back.slices[j].field.flatten(), ds.slices[j].field.flatten());
    EXPECT_EQ(back.slices[j].omega, ds.slices[j].omega);
  }
}

TEST(Io, ConfigParsingAndValidation) {
  const json j = json::parse(R"({
    "k2max": 3,
    "physical": {"c1": 0.5, "c2": 1.0, "rho1": 1.2, "rho2": 0.7, "delta_over_delta0": 0.25},
    "shape": {"name": "ellipse", "a": 1.4, "b": 0.8},
    "noise_sigma": 0.02,
    "aperture": {"kind": "backscatter", "alpha": 0.7853981633974483},
    "model": {"kind": "ch"},
    "optimizer": {"N_f": 10, "constant_bootstrap": true},
    "seed": 42
  })");
  const ExperimentConfig c = io::config_from(j);
  EXPECT_EQ(c.k2max, 3);
  EXPECT_NEAR(c.delta(), 0.25 * std::sqrt(3.0) * 3, 1e-14);
  EXPECT_EQ(c.shape.name, "ellipse");
  EXPECT_EQ(c.aperture.kind, Aperture::Kind::backscatter);
  EXPECT_EQ(c.inverse_model, ModelKind::ch);
  EXPECT_EQ(c.optimizer.N_f, 10);
  EXPECT_TRUE(c.optimizer.constant_bootstrap);
  EXPECT_EQ(c.seed, 42u);

  EXPECT_THROW(io::config_from(json::parse(R"({"k2max": 3, "noize": 1})")), std::invalid_argument);
  EXPECT_THROW(io::config_from(json::parse(R"({"k2max": 0})")), std::invalid_argument);
  EXPECT_THROW(io::config_from(json::parse(R"({"physical": {"c1": -1}})")), std::invalid_argument);
  EXPECT_THROW(io::config_from(json::parse(R"({"optimizer": {"eta_filt": 0.5}})")), std::invalid_argument);
}

TEST(Io, TrajectoryRoundTrip) {
  FrequencyResult f;
  f.omega = 1.5;
  f.curve = make_circle(1.0, 4);
  f.params = ImpedanceParams::abv(1, 1, 0);
  f.residual = 0.25;
  f.iterations = 7;
  FrequencyResult g = f;
  g.failed = true;
  g.residual = NAN;
  g.message = "boom";
  const auto back = io::trajectory_from(json::parse(io::to_json(std::vector<FrequencyResult>{f, g}).dump()));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].residual, 0.25);
  EXPECT_EQ(back[0].iterations, 7);
  EXPECT_TRUE(back[1].failed);
  EXPECT_TRUE(std::isnan(back[1].residual));
  EXPECT_EQ(back[1].message, "boom");
}

TEST(Io, MissingFileReportsThePath) {
  try {
    io::read_file("/nonexistent/file.json");
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/file.json"), std::string::npos);
  }
}
