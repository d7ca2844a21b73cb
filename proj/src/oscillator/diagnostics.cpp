#include "tcsim/oscillator/diagnostics.hpp"

#include <cmath>

#include "tcsim/core/ensemble.hpp"
#include "tcsim/core/errors.hpp"

namespace tcsim::oscillator {

namespace {
constexpr int kMinRecordPeriods = 20;
}  // namespace

double DomainWalls::mean_density() const {
  if (counts.empty() || spins.front().empty()) return 0.0;
  double total = 0.0;
  for (int c : counts) total += c;
  return total / (static_cast<double>(counts.size()) * static_cast<double>(spins.front().size()));
}

DomainWalls domain_wall_extract(std::span<const PhaseState> snapshots, Boundary boundary,
                                Binarization mode, double omega_d) {
  require(!snapshots.empty(), "domain_wall_extract: record is empty");
  DomainWalls out;
  for (const auto& snap : snapshots) {
    std::vector<int> spins(static_cast<std::size_t>(snap.sites()));
    if (mode == Binarization::position_sign) {
      for (int i = 0; i < snap.sites(); ++i) spins[i] = snap.q[i] < 0.0 ? -1 : 1;
    } else {
      const auto frame = rotating_frame(snap, omega_d);
      for (int i = 0; i < snap.sites(); ++i)
        spins[i] = frame.angle[i] && std::sin(*frame.angle[i]) < 0.0 ? -1 : 1;
    }
    std::vector<int> walls;
    const int n = snap.sites();
    for (int i = 0; i + 1 < n; ++i)
      if (spins[i] != spins[i + 1]) walls.push_back(i);
    if (boundary == Boundary::periodic && n >= 3 && spins[n - 1] != spins[0]) walls.push_back(n - 1);
    out.counts.push_back(static_cast<int>(walls.size()));
    out.walls.push_back(std::move(walls));
    out.spins.push_back(std::move(spins));
  }
  return out;
}

std::vector<double> stroboscopic_autocorrelation(const StroboscopicRecord& record) {
  require(!record.samples.empty(), "stroboscopic_autocorrelation: record is empty");
  const auto& ref = record.samples.front();
  std::vector<double> c;
  c.reserve(record.samples.size());
  for (const auto& s : record.samples) {
    double sum = 0.0;
    for (int i = 0; i < s.sites(); ++i) sum += s.q[i] * ref.q[i];
    c.push_back(sum / s.sites());
  }
  return c;
}

AutocorrelationResult ttsb_autocorrelation(std::span<const double> correlation,
                                           AutocorrelationOptions options) {
  require(correlation.size() > kMinRecordPeriods, "ttsb_autocorrelation: need at least 20 periods");
  require(correlation[0] > 0.0, "ttsb_autocorrelation: C(0) must be positive");
  AutocorrelationResult out;
  out.correlation.assign(correlation.begin(), correlation.end());
  for (std::size_t n = 0; n < correlation.size(); ++n)
    out.envelope.push_back((n % 2 == 0 ? 1.0 : -1.0) * correlation[n] / correlation[0]);

  std::size_t end = 0;
  const auto transient = static_cast<std::size_t>(std::max(options.transient, 0));
  while (end < out.envelope.size() && out.envelope[end] > 0.0 &&
         (end < transient || out.envelope[end] >= options.cutoff))
    ++end;
  if (end < 5) {
    out.fit.warnings.push_back("envelope falls below the cutoff within " + std::to_string(end) +
                               " periods; no lifetime");
    return out;
  }
  std::vector<double> head(out.envelope.begin(), out.envelope.begin() + static_cast<std::ptrdiff_t>(end));
  out.fit = core::fit_exponential_decay(core::StroboscopicSeries(std::move(head), 1.0, "envelope"));
  if (out.fit.has("tau") && out.fit.param("tau") > options.resolvable_factor * static_cast<double>(end)) {
    out.fit.params.erase("tau");
    out.fit.divergent = true;
    out.fit.warnings.push_back("lifetime exceeds the resolvable range of the record");
  }
  return out;
}

AutocorrelationResult ttsb_autocorrelation(std::span<const StroboscopicRecord> records,
                                           AutocorrelationOptions options) {
  require(!records.empty(), "ttsb_autocorrelation: no records");
  std::vector<double> mean;
  for (const auto& record : records) {
    const auto c = stroboscopic_autocorrelation(record);
    if (mean.empty()) mean.assign(c.size(), 0.0);
    require(c.size() == mean.size(), "ttsb_autocorrelation: records differ in length");
    for (std::size_t n = 0; n < c.size(); ++n) mean[n] += c[n] / static_cast<double>(records.size());
  }
  return ttsb_autocorrelation(std::span<const double>(mean), options);
}

ArrheniusScan arrhenius_scan(std::span<const double> temperatures,
                             const std::function<core::FitResult(double)>& lifetime) {
  require(temperatures.size() >= 3, "arrhenius_scan: need at least 3 temperatures");
  ArrheniusScan out;
  std::vector<std::pair<double, double>> points;
  for (double t : temperatures) {
    require(t > 0.0, "arrhenius_scan: temperatures must be positive");
    const auto fit = lifetime(t);
    out.temperatures.push_back(t);
    if (fit.has("tau")) {
      out.lifetimes.emplace_back(fit.param("tau"));
      points.emplace_back(t, fit.param("tau"));
    } else {
      out.lifetimes.emplace_back(std::nullopt);
      out.fit.warnings.push_back("T = " + std::to_string(t) + " excluded: no finite lifetime");
    }
  }
  if (points.size() < 3) {
    out.fit.warnings.push_back("fewer than 3 finite lifetimes; no Arrhenius fit");
    return out;
  }
  auto warnings = std::move(out.fit.warnings);
  out.fit = core::arrhenius_fit(points);
  out.fit.warnings.insert(out.fit.warnings.begin(), warnings.begin(), warnings.end());
  return out;
}

ArrheniusScan arrhenius_scan(std::span<const double> temperatures, const ArrheniusSetup& setup) {
  require(!setup.seeds.empty(), "arrhenius_scan: need at least one seed");
  require(setup.max_lag >= kMinRecordPeriods, "arrhenius_scan: max_lag must cover 20 periods");
  require(setup.record_periods >= setup.max_lag, "arrhenius_scan: record shorter than max_lag");
  require(setup.origin_stride >= 1, "arrhenius_scan: origin_stride must be positive");
  const auto lags = static_cast<std::size_t>(setup.max_lag);
  return arrhenius_scan(temperatures, [&](double temperature) {
    const BathParams bath{setup.friction, temperature};
    const auto run = core::ensemble_run(
        setup.seeds,
        [&](core::RandomSource& rng) {
          ChainIntegrator integrator(setup.drive, setup.chain, setup.initial, setup.integration, bath, &rng);
          for (int n = 0; n < setup.burn_in_periods; ++n)
            if (!integrator.advance_period()) throw NumericalError("arrhenius_scan: blow-up during burn-in");
          std::vector<std::vector<double>> q{integrator.state().q};
          for (int n = 0; n < setup.record_periods; ++n) {
            if (!integrator.advance_period()) throw NumericalError("arrhenius_scan: blow-up");
            q.push_back(integrator.state().q);
          }
          std::vector<double> c(lags + 1, 0.0);
          std::size_t origins = 0;
          for (std::size_t m = 0; m + lags < q.size(); m += static_cast<std::size_t>(setup.origin_stride)) {
            for (std::size_t n = 0; n <= lags; ++n) {
              double sum = 0.0;
              for (std::size_t i = 0; i < q[m].size(); ++i) sum += q[m + n][i] * q[m][i];
              c[n] += sum / static_cast<double>(q[m].size());
            }
            ++origins;
          }
          for (double& v : c) v /= static_cast<double>(origins);
          return c;
        },
        {.workers = setup.workers});
    return ttsb_autocorrelation(std::span<const double>(run.summary->mean), setup.autocorrelation).fit;
  });
}

std::vector<HeatingPoint> heating_time(const DriveParams& drive, const ChainParams& chain,
                                       const PhaseState& initial, std::span<const double> omega_grid,
                                       HeatingOptions options) {
  require(!omega_grid.empty(), "heating_time: frequency grid is empty");
  require(drive.kappa > 0.0, "heating_time: needs kappa > 0");
  require(options.plateau_fraction > 0.0 && options.plateau_fraction < 1.0,
          "heating_time: plateau_fraction must lie in (0, 1)");
  std::vector<HeatingPoint> out;
  for (double omega : omega_grid) {
    DriveParams d = drive;
    d.omega_d = omega;
    const auto periods = static_cast<long long>(std::ceil(options.max_time / d.period()));
    require(periods >= 10, "heating_time: budget covers fewer than 10 periods");
    ChainIntegrator integrator(d, chain, initial, {.substeps = options.substeps});
    std::vector<double> energy{undriven_energy(d, chain, initial)};
    for (long long n = 0; n < periods; ++n) {
      if (!integrator.advance_period()) throw NumericalError("heating_time: trajectory blew up");
      energy.push_back(undriven_energy(d, chain, integrator.state()));
    }

    HeatingPoint point;
    point.omega_d = omega;
    point.initial_energy = energy.front();
    const auto tail = static_cast<std::size_t>(std::max(1.0, options.plateau_fraction * energy.size()));
    double plateau = 0.0;
    for (std::size_t n = energy.size() - tail; n < energy.size(); ++n) plateau += energy[n];
    plateau /= static_cast<double>(tail);
    point.plateau_energy = plateau;

    const double rise = plateau - point.initial_energy;
    if (rise > options.min_rise * std::abs(point.initial_energy)) {
      const double mid = point.initial_energy + 0.5 * rise;
      for (std::size_t n = 1; n < energy.size(); ++n)
        if (energy[n] >= mid) {
          point.t_star = static_cast<double>(n) * d.period();
          break;
        }
    }
    point.energy = core::StroboscopicSeries(std::move(energy), d.period(), "E_eff");
    out.push_back(std::move(point));
  }
  return out;
}

}  // namespace tcsim::oscillator
