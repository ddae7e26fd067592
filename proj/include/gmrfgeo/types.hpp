#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace gmrfgeo {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Coordinates on the manifold: theta_1 = mu, theta_2 = sigma2, theta_3 = beta.
enum Coord : int { kMu = 0, kSigma2 = 1, kBeta = 2 };

/// splitmix64 finalizer. Maps (base seed, stream index) to a well-mixed seed
/// so that per-iteration and per-field generators are independent streams.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace gmrfgeo
