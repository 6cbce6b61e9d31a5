#pragma once

#include "weylshape/spectrum.hpp"

namespace fixtures {

/// The a = 1, b = 3 benchmark: 10 000 eigenvalues after skipping five,
/// enumerated over 1 <= m, n <= 800.
inline const weylshape::SpectrumSample& benchmark() {
  static const auto sample = weylshape::generate_rectangle_spectrum({1.0, 3.0}, 10000, 5, 800);
  return sample;
}

} // namespace fixtures
