#pragma once

#include <stdexcept>
#include <string>

namespace gmrfgeo {

/// Non-finite or malformed input (wrong neighbor count, NaN values, ...).
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input outside the model's domain (sigma2 <= 0, lattice too small, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The MCMC chain or the geodesic state left the finite/stable region.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Singular regularized metric. Carries the offending determinant.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double determinant)
      : std::runtime_error(what), determinant_(determinant) {}
  double determinant() const noexcept { return determinant_; }

 private:
  double determinant_;
};

}  // namespace gmrfgeo
