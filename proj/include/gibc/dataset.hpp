#pragma once
// Multifrequency measurement containers shared by the optimizer and the
// experiment harness.

#include <cstdint>
#include <string>
#include <vector>

#include "gibc/forward.hpp"

namespace gibc {

/// Measurements at one frequency.
struct FrequencyData {
  double omega = 0.0;
  SensorGeometry sensors;
  ReceptorField field;
};

/// Enough to regenerate a dataset bit for bit.
struct Provenance {
  std::string model = "transmission";  // transmission | impedance | neumann
  double ppw = 20.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  PhysicalParams physical;
  int k2max = 0;
  std::string shape;  // free-form description of the truth obstacle
};

struct ScatteringDataset {
  std::vector<FrequencyData> slices;  // ascending omega
  Provenance provenance;
};

}  // namespace gibc
