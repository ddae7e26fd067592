#pragma once

#include <array>

#include "gmrfgeo/fisher_metric.hpp"
#include "gmrfgeo/types.hpp"

namespace gmrfgeo {

/// Christoffel symbols of the second kind. gamma[k](i, j) = Gamma^k_ij,
/// symmetric in (i, j).
struct ChristoffelTensor {
  std::array<Mat3, 3> gamma{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};

  const Mat3& operator[](int k) const { return gamma[static_cast<std::size_t>(k)]; }
  Mat3& operator[](int k) { return gamma[static_cast<std::size_t>(k)]; }
};

/// Production path: the ten distinct nonzero symbols written out for the
/// GMRF metric's zero pattern (dg/dmu = 0, g12 = g13 = 0). The 13 structural
/// zeros are set exactly.
ChristoffelTensor christoffel_specialized(const InverseMetric& g_inv, const MetricDerivatives& dg);

/// Reference path: Gamma^k_ij = 1/2 sum_m (d_i g_jm + d_j g_im - d_m g_ij) g^mk
/// by direct triple loop, with d_mu g = 0.
ChristoffelTensor christoffel_general(const InverseMetric& g_inv, const MetricDerivatives& dg);

/// Number of exactly-zero entries over all 27 symbols.
int count_zero_symbols(const ChristoffelTensor& c);

}  // namespace gmrfgeo
