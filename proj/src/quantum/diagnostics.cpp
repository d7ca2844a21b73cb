#include "tcsim/quantum/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "linalg.hpp"
#include "tcsim/core/errors.hpp"
#include "tcsim/core/spectral.hpp"

namespace tcsim::quantum {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kUnitarityTolerance = 1e-8;
constexpr double kTieTolerance = 1e-12;
}  // namespace

MagnetizationTrajectory magnetization_trajectory(const FloquetStepper& stepper,
                                                 const StateVector& initial, int n_periods,
                                                 Axis axis) {
  require(n_periods >= 1, "magnetization_trajectory: n_periods must be >= 1");
  const int sites = initial.sites();
  const auto measure = [axis](const StateVector& s) {
    return axis == Axis::z ? s.expect_z_all() : s.expect_x_all();
  };

  StateVector state = initial;
  const auto reference = measure(state);
  std::vector<std::vector<double>> expectation(static_cast<std::size_t>(sites));
  std::vector<std::vector<double>> autocorrelation(static_cast<std::size_t>(sites));
  std::vector<double> average;
  for (int n = 0; n <= n_periods; ++n) {
    if (n > 0) stepper.apply(state);
    const auto values = measure(state);
    double mean = 0.0;
    for (int i = 0; i < sites; ++i) {
      expectation[i].push_back(values[i]);
      autocorrelation[i].push_back(values[i] * reference[i]);
      mean += values[i] * reference[i];
    }
    average.push_back(mean / sites);
  }

  const char* axis_name = axis == Axis::z ? "z" : "x";
  MagnetizationTrajectory out{{}, {}, core::StroboscopicSeries(std::move(average), stepper.period(),
                                                               std::string("M_") + axis_name)};
  for (int i = 0; i < sites; ++i) {
    const std::string site = std::to_string(i);
    out.site_expectation.emplace_back(std::move(expectation[i]), stepper.period(),
                                      std::string("sigma_") + axis_name + "_" + site);
    out.site_autocorrelation.emplace_back(std::move(autocorrelation[i]), stepper.period(),
                                          std::string("autocorr_") + axis_name + "_" + site);
  }
  return out;
}

double FloquetOperator::unitarity_defect() const {
  const Eigen::MatrixXcd gram = matrix.adjoint() * matrix;
  return (gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

FloquetOperator floquet_operator(const FloquetStepper& stepper) {
  const int sites = stepper.sites();
  require(sites <= kMaxSpectrumSites,
          "floquet_operator: dense operator limited to " + std::to_string(kMaxSpectrumSites) + " sites");
  const auto n = static_cast<Eigen::Index>(std::size_t{1} << sites);
  FloquetOperator op{Eigen::MatrixXcd(n, n), stepper.period()};
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::VectorXcd basis = Eigen::VectorXcd::Zero(n);
    basis(k) = 1.0;
    StateVector column(sites, std::move(basis));
    stepper.apply(column);
    op.matrix.col(k) = column.amplitudes();
  }
  return op;
}

double wrap_phase(double angle) {
  double wrapped = std::remainder(angle, 2.0 * kPi);  // [-pi, pi]
  if (wrapped <= -kPi) wrapped += 2.0 * kPi;
  return wrapped;
}

std::vector<double> QuasienergySpectrum::pair_splittings() const {
  std::vector<double> out;
  for (std::size_t j = 0; j < partner.size(); ++j)
    if (static_cast<int>(j) < partner[j]) out.push_back(splittings[j]);
  return out;
}

QuasienergySpectrum floquet_spectrum(const FloquetStepper& stepper) {
  const FloquetOperator op = floquet_operator(stepper);
  const double defect = op.unitarity_defect();
  if (defect >= kUnitarityTolerance)
    throw NumericalError("floquet_spectrum: Floquet operator not unitary (defect " +
                         std::to_string(defect) + ")");

  const auto schur = detail::complex_schur(op.matrix);
  const Eigen::Index n = op.matrix.rows();

  QuasienergySpectrum spec;
  spec.period = op.period;
  spec.eigenvectors = schur.vectors;
  spec.eigenphases.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) spec.eigenphases(j) = wrap_phase(std::arg(schur.eigenvalues(j)));

  // x(j, k) = |<psi_j| X |psi_k>|
  Eigen::MatrixXcd flipped(n, n);
  for (Eigen::Index k = 0; k < n; ++k) flipped.col(k) = apply_global_flip(schur.vectors.col(k));
  const Eigen::MatrixXd x = (schur.vectors.adjoint() * flipped).cwiseAbs();
  // Weight of X kept inside span{psi_j, psi_k}: sqrt(tr(P X P X) / 2).
  const auto overlap = [&](Eigen::Index j, Eigen::Index k) {
    return std::sqrt(0.5 * (x(j, j) * x(j, j) + x(k, k) * x(k, k)) + x(j, k) * x(j, k));
  };

  const auto splitting = [&](Eigen::Index j, Eigen::Index k) {
    return std::abs(wrap_phase(spec.eigenphases(j) - spec.eigenphases(k) - kPi));
  };

  spec.partner.assign(static_cast<std::size_t>(n), -1);
  spec.splittings.assign(static_cast<std::size_t>(n), 0.0);
  spec.cat_overlaps.assign(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (spec.partner[j] >= 0) continue;
    Eigen::Index best = -1;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == j || spec.partner[k] >= 0) continue;
      if (best < 0) {
        best = k;
        continue;
      }
      const double diff = overlap(j, k) - overlap(j, best);
      if (diff > kTieTolerance || (std::abs(diff) <= kTieTolerance && splitting(j, k) < splitting(j, best)))
        best = k;
    }
    require(best >= 0, "floquet_spectrum: odd Hilbert-space dimension");
    spec.partner[j] = static_cast<int>(best);
    spec.partner[best] = static_cast<int>(j);
    spec.splittings[j] = spec.splittings[best] = splitting(j, best);
    spec.cat_overlaps[j] = spec.cat_overlaps[best] = std::min(1.0, overlap(j, best));
  }
  return spec;
}

QuasienergySpectrum floquet_spectrum(const SpinChainParams& params) {
  require(params.sites <= kMaxSpectrumSites, "floquet_spectrum: at most 10 sites");
  return floquet_spectrum(*build_floquet(params));
}

double echo_benchmark(const FloquetStepper& stepper, const StateVector& initial, int n_periods) {
  require(n_periods >= 0, "echo_benchmark: n_periods must be non-negative");
  StateVector state = initial;
  for (int n = 0; n < n_periods; ++n) stepper.apply(state);
  for (int n = 0; n < n_periods; ++n) stepper.apply_inverse(state);
  return std::min(1.0, std::norm(initial.overlap(state)));
}

double forward_return_probability(const FloquetStepper& stepper, const StateVector& initial,
                                  int n_periods) {
  StateVector state = initial;
  stepper.apply_periods(state, n_periods);
  return std::norm(initial.overlap(state));
}

VarianceScanResult variance_peak_scan(std::span<const double> epsilons, const ChainTemplate& recipe,
                                      std::span<const std::uint64_t> seeds,
                                      VarianceScanOptions options) {
  require(!epsilons.empty(), "variance_peak_scan: epsilon grid is empty");
  require(!seeds.empty(), "variance_peak_scan: need at least one realization");
  require(options.n_periods >= 2, "variance_peak_scan: need at least 2 periods");

  VarianceScanResult out;
  out.epsilons.assign(epsilons.begin(), epsilons.end());
  for (double eps : epsilons) {
    ChainTemplate local = recipe;
    local.epsilon = eps;
    const auto run = core::ensemble_run(
        seeds,
        [&](core::RandomSource& rng) {
          const auto params = local.realize(rng);
          const auto initial = StateVector::random_bitstring(local.sites, rng);
          const auto stepper = build_floquet(params);
          const auto traj = magnetization_trajectory(*stepper, initial, options.n_periods, Axis::z);
          return core::subharmonic_amplitudes(traj.site_autocorrelation, 2);
        },
        {.workers = options.workers});

    double sum = 0.0, sum_sq = 0.0;
    std::size_t count = 0;
    for (const auto& amplitudes : run.results)
      for (double a : amplitudes) {
        sum += a;
        sum_sq += a * a;
        ++count;
      }
    const double mean = sum / static_cast<double>(count);
    out.mean_amplitude.push_back(mean);
    out.variance.push_back(std::max(0.0, sum_sq / static_cast<double>(count) - mean * mean));
  }
  const auto peak = std::ranges::max_element(out.variance) - out.variance.begin();
  out.peak_epsilon = out.epsilons[static_cast<std::size_t>(peak)];
  return out;
}

}  // namespace tcsim::quantum
