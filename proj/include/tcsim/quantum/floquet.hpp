#pragma once

#include <memory>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "tcsim/core/random.hpp"
#include "tcsim/quantum/state.hpp"

namespace tcsim::quantum {

inline constexpr int kMaxDiagonalSites = 14;
inline constexpr int kMaxDenseSites = 12;
inline constexpr int kMaxSpectrumSites = 10;

/// Concrete two-segment drive: H1 for t1, then H2 = g sum_i sigma^x_i for t2,
///   H1 = -sum_{i<j} J_ij s^z_i s^z_j - sum_i (hz_i s^z_i + hy_i s^y_i + hx_i s^x_i).
/// Fields are angular frequencies; g t2 = (pi/2)(1 - epsilon).
struct SpinChainParams {
  int sites = 1;
  Eigen::MatrixXd couplings;  // symmetric, zero diagonal
  std::vector<double> hx, hy, hz;
  double g = std::numbers::pi / 2;
  double t1 = 1.0;
  double t2 = 1.0;

  static SpinChainParams uniform(int sites);  // zero couplings and fields, perfect pi pulse
  void validate() const;
  double pulse_imperfection() const;
  void set_pulse_imperfection(double epsilon);
  bool z_diagonal() const;  // hx = hy = 0
  double period() const { return t1 + t2; }
};

enum class CouplingModel { nearest_neighbor, power_law };

/// Disorder recipe realized once per replica. Values marked "x t1" are
/// dimensionless products with the segment duration.
struct ChainTemplate {
  int sites = 8;
  double t1 = 1.0;
  double t2 = 1.0;
  double epsilon = 0.0;
  CouplingModel coupling = CouplingModel::nearest_neighbor;
  double j_min = std::numbers::pi / 8;      // x t1, nearest-neighbor model
  double j_max = 3 * std::numbers::pi / 8;  // x t1
  double j0 = 1.0;                          // power-law amplitude (angular frequency)
  double alpha = 1.5;
  /// Multiplies every coupling after sampling; 0 gives the non-interacting
  /// chain with the same fields (paired comparisons).
  double interaction_scale = 1.0;
  double hz_min = 0.0;  // x t1
  double hz_max = std::numbers::pi;
  double hx = 0.0;  // uniform transverse fields (angular frequency)
  double hy = 0.0;

  /// Couplings are drawn before fields, so the field realization does not
  /// depend on interaction_scale.
  SpinChainParams realize(core::RandomSource& rng) const;
};

/// Long-range ion-style chain: J_ij = j0 / |i-j|^alpha, no disorder. The
/// transverse field lies along the pulse axis (h^x) so that it survives the
/// pi flip and enters the effective Hamiltonian.
ChainTemplate long_range_template(int sites, double alpha, double j0, double transverse,
                                  double epsilon);

/// Digital circuit U = exp(-i/2 sum h_i Z_i) exp(-i/4 sum J_i Z_i Z_{i+1})
/// exp(-i/2 pi g sum X_i), open chain, rightmost factor first.
struct SycamoreParams {
  int sites = 1;
  double g = 1.0;
  std::vector<double> h;  // size L
  std::vector<double> j;  // size L-1
};
/// h_i ~ U[-pi, pi], J_i ~ U[-1.5 pi, -0.5 pi].
SycamoreParams sample_sycamore(int sites, double g, core::RandomSource& rng);

/// Advances a state by one drive period (and back).
class FloquetStepper {
 public:
  virtual ~FloquetStepper() = default;
  virtual void apply(StateVector& state) const = 0;
  virtual void apply_inverse(StateVector& state) const = 0;
  virtual int sites() const = 0;
  virtual double period() const = 0;

  void apply_periods(StateVector& state, int periods) const {
    for (int n = 0; n < periods; ++n) apply(state);
  }
};

enum class FloquetPath {
  automatic,  // diagonal when hx = hy = 0, dense otherwise
  diagonal,   // H1 diagonal in z; errors if hx or hy is nonzero
  dense,      // full exponential of H1
};

std::unique_ptr<FloquetStepper> build_floquet(const SpinChainParams& params,
                                              FloquetPath path = FloquetPath::automatic);
/// Realizes the disorder from rng, then builds.
std::unique_ptr<FloquetStepper> build_mbl_floquet(const ChainTemplate& recipe,
                                                  core::RandomSource& rng,
                                                  FloquetPath path = FloquetPath::automatic);
std::unique_ptr<FloquetStepper> build_sycamore_floquet(const SycamoreParams& params);
std::unique_ptr<FloquetStepper> build_sycamore_floquet(int sites, double g,
                                                       core::RandomSource& rng);

}  // namespace tcsim::quantum
