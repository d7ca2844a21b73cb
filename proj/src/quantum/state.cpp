#include "tcsim/quantum/state.hpp"

#include <cmath>

#include "tcsim/core/errors.hpp"

namespace tcsim::quantum {

namespace {
constexpr int kMaxSites = 20;

std::size_t dim(int sites) { return std::size_t{1} << sites; }
}  // namespace

StateVector::StateVector(int sites) : sites_(sites) {
  require(sites >= 1 && sites <= kMaxSites, "StateVector: site count out of range");
  amplitudes_ = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim(sites)));
  amplitudes_(0) = 1.0;
}

StateVector::StateVector(int sites, Eigen::VectorXcd amplitudes)
    : sites_(sites), amplitudes_(std::move(amplitudes)) {
  require(sites >= 1 && sites <= kMaxSites, "StateVector: site count out of range");
  require(static_cast<std::size_t>(amplitudes_.size()) == dim(sites),
          "StateVector: amplitude count must be 2^L");
}

StateVector StateVector::product_z(std::span<const int> orientation) {
  const int sites = static_cast<int>(orientation.size());
  StateVector state(sites);
  std::size_t index = 0;
  for (int i = 0; i < sites; ++i) {
    require(orientation[i] == 1 || orientation[i] == -1, "product_z: orientations must be +1 or -1");
    if (orientation[i] == -1) index |= std::size_t{1} << i;
  }
  state.amplitudes_.setZero();
  state.amplitudes_(static_cast<Eigen::Index>(index)) = 1.0;
  return state;
}

StateVector StateVector::neel(int sites) {
  std::vector<int> o(static_cast<std::size_t>(sites));
  for (int i = 0; i < sites; ++i) o[i] = (i % 2 == 0) ? 1 : -1;
  return product_z(o);
}

StateVector StateVector::x_polarized(int sites) {
  StateVector state(sites);
  state.amplitudes_.setConstant(1.0 / std::sqrt(static_cast<double>(dim(sites))));
  return state;
}

StateVector StateVector::random_bitstring(int sites, core::RandomSource& rng) {
  StateVector state(sites);
  state.amplitudes_.setZero();
  state.amplitudes_(static_cast<Eigen::Index>(rng.uniform_index(dim(sites)))) = 1.0;
  return state;
}

double StateVector::expect_z(int site) const {
  const std::size_t mask = std::size_t{1} << site;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < amplitudes_.size(); ++k) {
    const double p = std::norm(amplitudes_(k));
    sum += (static_cast<std::size_t>(k) & mask) ? -p : p;
  }
  return sum;
}

double StateVector::expect_x(int site) const {
  const std::size_t mask = std::size_t{1} << site;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < amplitudes_.size(); ++k) {
    const auto partner = static_cast<Eigen::Index>(static_cast<std::size_t>(k) ^ mask);
    sum += (std::conj(amplitudes_(k)) * amplitudes_(partner)).real();
  }
  return sum;
}

std::vector<double> StateVector::expect_z_all() const {
  std::vector<double> out(static_cast<std::size_t>(sites_), 0.0);
  for (Eigen::Index k = 0; k < amplitudes_.size(); ++k) {
    const double p = std::norm(amplitudes_(k));
    if (p == 0.0) continue;
    for (int i = 0; i < sites_; ++i) out[i] += ((static_cast<std::size_t>(k) >> i) & 1u) ? -p : p;
  }
  return out;
}

std::vector<double> StateVector::expect_x_all() const {
  std::vector<double> out(static_cast<std::size_t>(sites_));
  for (int i = 0; i < sites_; ++i) out[i] = expect_x(i);
  return out;
}

void rotate_all_x(Eigen::VectorXcd& amplitudes, int sites, double angle) {
  const double c = std::cos(0.5 * angle);
  const Complex minus_is(0.0, -std::sin(0.5 * angle));
  const std::size_t n = static_cast<std::size_t>(amplitudes.size());
  for (int i = 0; i < sites; ++i) {
    const std::size_t mask = std::size_t{1} << i;
    for (std::size_t k = 0; k < n; ++k) {
      if (k & mask) continue;
      const Complex a = amplitudes(static_cast<Eigen::Index>(k));
      const Complex b = amplitudes(static_cast<Eigen::Index>(k | mask));
      amplitudes(static_cast<Eigen::Index>(k)) = c * a + minus_is * b;
      amplitudes(static_cast<Eigen::Index>(k | mask)) = minus_is * a + c * b;
    }
  }
}

Eigen::VectorXcd apply_global_flip(const Eigen::VectorXcd& amplitudes) {
  const auto n = amplitudes.size();
  Eigen::VectorXcd out(n);
  for (Eigen::Index k = 0; k < n; ++k) out(k) = amplitudes(n - 1 - k);
  return out;
}

}  // namespace tcsim::quantum
