#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tcsim/core/random.hpp"

namespace tcsim::quantum {

using Complex = std::complex<double>;

/// Pure state of L spin-1/2 sites in the computational basis. Bit i of a basis
/// index is site i; bit value 0 means sigma^z_i = +1 (up).
class StateVector {
 public:
  explicit StateVector(int sites);  // all up
  StateVector(int sites, Eigen::VectorXcd amplitudes);

  /// Product state from per-site z orientations (+1 up, -1 down).
  static StateVector product_z(std::span<const int> orientation);
  static StateVector all_up(int sites) { return StateVector(sites); }
  /// |up down up down ...>
  static StateVector neel(int sites);
  /// Every site along +x.
  static StateVector x_polarized(int sites);
  /// Uniformly random computational basis state.
  static StateVector random_bitstring(int sites, core::RandomSource& rng);

  int sites() const { return sites_; }
  std::size_t dimension() const { return static_cast<std::size_t>(amplitudes_.size()); }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  Eigen::VectorXcd& amplitudes() { return amplitudes_; }
  double norm() const { return amplitudes_.norm(); }

  double expect_z(int site) const;
  double expect_x(int site) const;
  std::vector<double> expect_z_all() const;
  std::vector<double> expect_x_all() const;

  /// <this|other>
  Complex overlap(const StateVector& other) const { return amplitudes_.dot(other.amplitudes_); }

 private:
  int sites_;
  Eigen::VectorXcd amplitudes_;
};

/// Applies exp(-i angle/2 sigma^x) to every site.
void rotate_all_x(Eigen::VectorXcd& amplitudes, int sites, double angle);

/// Global spin flip X = prod_i sigma^x_i.
Eigen::VectorXcd apply_global_flip(const Eigen::VectorXcd& amplitudes);

}  // namespace tcsim::quantum
