#include "tcsim/quantum/floquet.hpp"

#include <cmath>

#include "linalg.hpp"
#include "tcsim/core/errors.hpp"

namespace tcsim::quantum {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t dim(int sites) { return std::size_t{1} << sites; }

inline int spin_z(std::size_t index, int site) { return ((index >> site) & 1u) ? -1 : 1; }

// Diagonal of the z-part of H1.
Eigen::VectorXd diagonal_energies(const SpinChainParams& p) {
  const std::size_t n = dim(p.sites);
  Eigen::VectorXd energy(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    double e = 0.0;
    for (int i = 0; i < p.sites; ++i) {
      const int zi = spin_z(k, i);
      e -= p.hz[i] * zi;
      for (int j = i + 1; j < p.sites; ++j) e -= p.couplings(i, j) * zi * spin_z(k, j);
    }
    energy(static_cast<Eigen::Index>(k)) = e;
  }
  return energy;
}

/// exp(-i E_k) phases followed or preceded by a global x rotation.
class DiagonalKickStepper final : public FloquetStepper {
 public:
  DiagonalKickStepper(int sites, Eigen::VectorXcd phases, double angle, bool kick_first,
                      double period)
      : sites_(sites), phases_(std::move(phases)), angle_(angle), kick_first_(kick_first),
        period_(period) {}

  void apply(StateVector& state) const override {
    check(state);
    auto& a = state.amplitudes();
    if (kick_first_) {
      rotate_all_x(a, sites_, angle_);
      a.array() *= phases_.array();
    } else {
      a.array() *= phases_.array();
      rotate_all_x(a, sites_, angle_);
    }
  }

  void apply_inverse(StateVector& state) const override {
    check(state);
    auto& a = state.amplitudes();
    if (kick_first_) {
      a.array() *= phases_.array().conjugate();
      rotate_all_x(a, sites_, -angle_);
    } else {
      rotate_all_x(a, sites_, -angle_);
      a.array() *= phases_.array().conjugate();
    }
  }

  int sites() const override { return sites_; }
  double period() const override { return period_; }

 private:
  void check(const StateVector& state) const {
    require(state.sites() == sites_, "FloquetStepper: state has the wrong number of sites");
  }

  int sites_;
  Eigen::VectorXcd phases_;
  double angle_;
  bool kick_first_;
  double period_;
};

/// Dense exp(-i t1 H1) followed by the x rotation.
class DenseStepper final : public FloquetStepper {
 public:
  DenseStepper(int sites, Eigen::MatrixXcd segment, double angle, double period)
      : sites_(sites), segment_(std::move(segment)), angle_(angle), period_(period) {}

  void apply(StateVector& state) const override {
    require(state.sites() == sites_, "FloquetStepper: state has the wrong number of sites");
    Eigen::VectorXcd next = segment_ * state.amplitudes();
    rotate_all_x(next, sites_, angle_);
    state.amplitudes() = std::move(next);
  }

  void apply_inverse(StateVector& state) const override {
    require(state.sites() == sites_, "FloquetStepper: state has the wrong number of sites");
    auto& a = state.amplitudes();
    rotate_all_x(a, sites_, -angle_);
    a = segment_.adjoint() * a;
  }

  int sites() const override { return sites_; }
  double period() const override { return period_; }

 private:
  int sites_;
  Eigen::MatrixXcd segment_;
  double angle_;
  double period_;
};

Eigen::MatrixXcd dense_segment(const SpinChainParams& p) {
  const std::size_t n = dim(p.sites);
  const auto energy = diagonal_energies(p);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    h(col, col) = energy(col);
    for (int i = 0; i < p.sites; ++i) {
      const auto row = static_cast<Eigen::Index>(k ^ (std::size_t{1} << i));
      // <k'|s^y|k> = +i if site i is up in k, -i if down.
      const Complex sy = spin_z(k, i) == 1 ? Complex(0.0, 1.0) : Complex(0.0, -1.0);
      h(row, col) -= p.hx[i] + p.hy[i] * sy;
    }
  }
  const auto eig = detail::hermitian_eigen(h);
  Eigen::VectorXcd phases(eig.values.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::polar(1.0, -p.t1 * eig.values(k));
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

}  // namespace

SpinChainParams SpinChainParams::uniform(int sites) {
  SpinChainParams p;
  p.sites = sites;
  p.couplings = Eigen::MatrixXd::Zero(sites, sites);
  p.hx.assign(static_cast<std::size_t>(sites), 0.0);
  p.hy = p.hx;
  p.hz = p.hx;
  return p;
}

void SpinChainParams::validate() const {
  require(sites >= 1, "SpinChainParams: need at least one site");
  require(t1 > 0.0 && t2 > 0.0, "SpinChainParams: segment durations must be positive");
  require(couplings.rows() == sites && couplings.cols() == sites,
          "SpinChainParams: couplings must be L x L");
  require(hx.size() == static_cast<std::size_t>(sites) && hy.size() == hx.size() &&
              hz.size() == hx.size(),
          "SpinChainParams: field arrays must have L entries");
  for (int i = 0; i < sites; ++i) {
    require(couplings(i, i) == 0.0, "SpinChainParams: couplings must have zero diagonal");
    for (int j = 0; j < i; ++j)
      require(couplings(i, j) == couplings(j, i), "SpinChainParams: couplings must be symmetric");
  }
}

double SpinChainParams::pulse_imperfection() const { return 1.0 - 2.0 * g * t2 / kPi; }

void SpinChainParams::set_pulse_imperfection(double epsilon) { g = 0.5 * kPi * (1.0 - epsilon) / t2; }

bool SpinChainParams::z_diagonal() const {
  for (std::size_t i = 0; i < hx.size(); ++i)
    if (hx[i] != 0.0 || hy[i] != 0.0) return false;
  return true;
}

SpinChainParams ChainTemplate::realize(core::RandomSource& rng) const {
  require(sites >= 1, "ChainTemplate: need at least one site");
  require(t1 > 0.0 && t2 > 0.0, "ChainTemplate: segment durations must be positive");
  SpinChainParams p = SpinChainParams::uniform(sites);
  p.t1 = t1;
  p.t2 = t2;
  p.set_pulse_imperfection(epsilon);

  if (coupling == CouplingModel::nearest_neighbor) {
    for (int i = 0; i + 1 < sites; ++i) {
      const double j = rng.uniform(j_min, j_max) / t1 * interaction_scale;
      p.couplings(i, i + 1) = p.couplings(i + 1, i) = j;
    }
  } else {
    for (int i = 0; i < sites; ++i)
      for (int k = i + 1; k < sites; ++k)
        p.couplings(i, k) = p.couplings(k, i) =
            interaction_scale * j0 / std::pow(static_cast<double>(k - i), alpha);
  }
  for (int i = 0; i < sites; ++i) {
    p.hz[i] = rng.uniform(hz_min, hz_max) / t1;
    p.hx[i] = hx;
    p.hy[i] = hy;
  }
  return p;
}

ChainTemplate long_range_template(int sites, double alpha, double j0, double transverse,
                                  double epsilon) {
  ChainTemplate t;
  t.sites = sites;
  t.coupling = CouplingModel::power_law;
  t.alpha = alpha;
  t.j0 = j0;
  t.hx = transverse;
  t.hz_min = t.hz_max = 0.0;
  t.epsilon = epsilon;
  return t;
}

SycamoreParams sample_sycamore(int sites, double g, core::RandomSource& rng) {
  require(sites >= 1, "sample_sycamore: need at least one site");
  SycamoreParams p;
  p.sites = sites;
  p.g = g;
  for (int i = 0; i < sites; ++i) p.h.push_back(rng.uniform(-kPi, kPi));
  for (int i = 0; i + 1 < sites; ++i) p.j.push_back(rng.uniform(-1.5 * kPi, -0.5 * kPi));
  return p;
}

std::unique_ptr<FloquetStepper> build_floquet(const SpinChainParams& params, FloquetPath path) {
  params.validate();
  const bool diagonal = params.z_diagonal();
  if (path == FloquetPath::automatic) path = diagonal ? FloquetPath::diagonal : FloquetPath::dense;

  if (path == FloquetPath::diagonal) {
    require(diagonal, "build_floquet: diagonal path requires hx = hy = 0");
    require(params.sites <= kMaxDiagonalSites,
            "build_floquet: diagonal path supports at most " + std::to_string(kMaxDiagonalSites) + " sites");
    const auto energy = diagonal_energies(params);
    Eigen::VectorXcd phases(energy.size());
    for (Eigen::Index k = 0; k < energy.size(); ++k) phases(k) = std::polar(1.0, -params.t1 * energy(k));
    return std::make_unique<DiagonalKickStepper>(params.sites, std::move(phases),
                                                 2.0 * params.g * params.t2, false, params.period());
  }
  require(params.sites <= kMaxDenseSites,
          "build_floquet: dense path supports at most " + std::to_string(kMaxDenseSites) + " sites");
  return std::make_unique<DenseStepper>(params.sites, dense_segment(params),
                                        2.0 * params.g * params.t2, params.period());
}

std::unique_ptr<FloquetStepper> build_mbl_floquet(const ChainTemplate& recipe,
                                                  core::RandomSource& rng, FloquetPath path) {
  return build_floquet(recipe.realize(rng), path);
}

std::unique_ptr<FloquetStepper> build_sycamore_floquet(const SycamoreParams& p) {
  require(p.sites >= 1 && p.sites <= kMaxDiagonalSites, "build_sycamore_floquet: site count out of range");
  require(p.h.size() == static_cast<std::size_t>(p.sites), "build_sycamore_floquet: need L fields");
  require(p.j.size() == static_cast<std::size_t>(p.sites - 1),
          "build_sycamore_floquet: nearest-neighbor couplings only (L-1 values)");
  const std::size_t n = dim(p.sites);
  Eigen::VectorXcd phases(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    double exponent = 0.0;
    for (int i = 0; i < p.sites; ++i) exponent += 0.5 * p.h[i] * spin_z(k, i);
    for (int i = 0; i + 1 < p.sites; ++i) exponent += 0.25 * p.j[i] * spin_z(k, i) * spin_z(k, i + 1);
    phases(static_cast<Eigen::Index>(k)) = std::polar(1.0, -exponent);
  }
  // exp(-i/2 pi g X) is a rotation by pi g; one circuit layer is one period.
  return std::make_unique<DiagonalKickStepper>(p.sites, std::move(phases), kPi * p.g, true, 1.0);
}

std::unique_ptr<FloquetStepper> build_sycamore_floquet(int sites, double g, core::RandomSource& rng) {
  return build_sycamore_floquet(sample_sycamore(sites, g, rng));
}

}  // namespace tcsim::quantum
