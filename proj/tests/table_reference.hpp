#pragma once

#include <array>
#include <cmath>

#include "topoplasma/bulk.hpp"

// Closed-form curvature integrals (C1..C4) per phase at sigma.
inline std::array<double, 4> reference_curvatures(topoplasma::Phase ph, double sigma) {
  using topoplasma::Phase;
  const double s = std::isinf(sigma) ? 1.0 : sigma / std::sqrt(sigma * sigma + 1.0);
  std::array<double, 4> c{};
  switch (ph) {
    case Phase::IPlus: case Phase::IMinus: c = {0, s - 1, 1, -1}; break;
    case Phase::IIPlus: case Phase::IIMinus: c = {-1, s, 1, -1}; break;
    case Phase::IIIPlus: case Phase::IIIMinus: c = {-1, 1 + s, 0, -1}; break;
    case Phase::IVPlus: case Phase::IVMinus: c = {0, 1 + s, 0, -1}; break;
    case Phase::Boundary: break;
  }
  if (topoplasma::phase_sign(ph) < 0)
    for (double& x : c) x = -x;
  return c;
}
