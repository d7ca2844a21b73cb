#include "tcsim/cli/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numbers>
#include <sstream>

#include "tcsim/cdw/phase.hpp"
#include "tcsim/cli/output.hpp"
#include "tcsim/core/ensemble.hpp"
#include "tcsim/core/errors.hpp"
#include "tcsim/core/spectral.hpp"
#include "tcsim/oscillator/chain.hpp"
#include "tcsim/oscillator/diagnostics.hpp"
#include "tcsim/oscillator/mathieu.hpp"
#include "tcsim/pca/automaton.hpp"
#include "tcsim/quantum/diagnostics.hpp"
#include "tcsim/quantum/floquet.hpp"

#ifndef TCSIM_VERSION_STRING
#define TCSIM_VERSION_STRING "unknown"
#endif

namespace tcsim::cli {
namespace {

double num(const Json& p, const char* key) { return p.at(key).get<double>(); }
int integer(const Json& p, const char* key) {
  const auto v = p.at(key).get<long long>();
  if (v < INT32_MIN || v > INT32_MAX) throw ConfigError(std::string("params.") + key + ": out of range");
  return static_cast<int>(v);
}
std::string text(const Json& p, const char* key) { return p.at(key).get<std::string>(); }

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? NAN : s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) return NAN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> indices(std::size_t n, double scale = 1.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i) * scale;
  return x;
}

core::EnsembleOptions pool(unsigned workers) { return {.workers = workers}; }

// quantum

quantum::ChainTemplate chain_template(const Json& p) {
  quantum::ChainTemplate r;
  r.sites = integer(p, "sites");
  r.t1 = num(p, "t1");
  r.t2 = num(p, "t2");
  r.epsilon = num(p, "epsilon");
  r.coupling = text(p, "coupling") == "power_law" ? quantum::CouplingModel::power_law
                                                   : quantum::CouplingModel::nearest_neighbor;
  r.j_min = num(p, "j_min");
  r.j_max = num(p, "j_max");
  r.j0 = num(p, "j0");
  r.alpha = num(p, "alpha");
  r.interaction_scale = num(p, "interaction_scale");
  r.hz_min = num(p, "hz_min");
  r.hz_max = num(p, "hz_max");
  r.hx = num(p, "hx");
  r.hy = num(p, "hy");
  return r;
}

quantum::StateVector initial_state(const std::string& kind, int sites, core::RandomSource& rng) {
  if (kind == "neel") return quantum::StateVector::neel(sites);
  if (kind == "x_polarized") return quantum::StateVector::x_polarized(sites);
  if (kind == "random") return quantum::StateVector::random_bitstring(sites, rng);
  return quantum::StateVector::all_up(sites);
}

Outcome quantum_magnetization(const Json& p, std::span<const std::uint64_t> seeds, unsigned workers, Bundle* bundle) {
  const auto recipe = chain_template(p);
  const int periods = integer(p, "periods");
  require(periods >= 1, "params.periods: must be at least 1");
  const std::string initial = text(p, "initial");
  const auto axis = text(p, "axis") == "x" ? quantum::Axis::x : quantum::Axis::z;
  const bool echo = p.at("echo").get<bool>();

  struct Replica {
    std::vector<double> average, site_amplitudes;
    double subharmonic = 0.0, echo = NAN;
  };
  const auto run = core::ensemble_run(
      seeds,
      [&](core::RandomSource& rng) {
        const auto stepper = quantum::build_floquet(recipe.realize(rng));
        const auto start = initial_state(initial, recipe.sites, rng);
        const auto traj = quantum::magnetization_trajectory(*stepper, start, periods, axis);
        Replica r;
        const auto values = traj.average.values();
        r.average.assign(values.begin(), values.end());
        r.site_amplitudes = core::subharmonic_amplitudes(traj.site_autocorrelation, 2);
        r.subharmonic = core::dft_subharmonic(traj.average, 2).subharmonic_amplitude();
        if (echo) r.echo = quantum::echo_benchmark(*stepper, start, periods);
        return r;
      },
      pool(workers));

  std::vector<std::vector<double>> curves;
  std::vector<double> amplitudes, echoes;
  for (const auto& r : run.results) {
    curves.push_back(r.average);
    amplitudes.insert(amplitudes.end(), r.site_amplitudes.begin(), r.site_amplitudes.end());
    echoes.push_back(r.echo);
  }
  const auto agg = core::aggregate(curves);
  const double amp_mean = mean_of(amplitudes);
  double amp_sq = 0.0;
  for (double a : amplitudes) amp_sq += a * a;
  const double amp_var = std::max(0.0, amp_sq / static_cast<double>(amplitudes.size()) - amp_mean * amp_mean);

  Outcome out;
  out.metrics = {{"subharmonic", core::dft_subharmonic(core::StroboscopicSeries(agg.mean), 2).subharmonic_amplitude()},
                 {"site_amplitude_mean", amp_mean},
                 {"site_amplitude_variance", amp_var}};
  if (echo) out.metrics.push_back({"echo_min_fidelity", *std::min_element(echoes.begin(), echoes.end())});

  if (bundle) {
    CsvTable m({"period", "M", "M_stderr"});
    for (std::size_t n = 0; n < agg.mean.size(); ++n)
      m.add_row({static_cast<long long>(n), agg.mean[n], agg.standard_error[n]});
    bundle->add("magnetization.csv", m.str());
    CsvTable per_seed({"seed", "subharmonic", "echo_fidelity"});
    for (std::size_t i = 0; i < run.seeds.size(); ++i)
      per_seed.add_row({static_cast<long long>(run.seeds[i]), run.results[i].subharmonic, run.results[i].echo});
    bundle->add("replicas.csv", per_seed.str());
    bundle->add("magnetization.svg",
                svg_line_plot({{"M(n)", indices(agg.mean.size()), agg.mean}}, "Stroboscopic magnetization", "period n", "M(n)"));
  }
  return out;
}

Outcome quantum_spectrum(const Json& p, std::span<const std::uint64_t> seeds, unsigned workers, Bundle* bundle) {
  const auto recipe = chain_template(p);
  require(recipe.sites <= quantum::kMaxSpectrumSites,
          "params.sites: spectrum needs at most " + std::to_string(quantum::kMaxSpectrumSites) + " sites");
  const auto run = core::ensemble_run(
      seeds, [&](core::RandomSource& rng) { return quantum::floquet_spectrum(recipe.realize(rng)); }, pool(workers));

  std::vector<double> splittings, overlaps;
  for (const auto& s : run.results) {
    const auto pairs = s.pair_splittings();
    splittings.insert(splittings.end(), pairs.begin(), pairs.end());
    overlaps.insert(overlaps.end(), s.cat_overlaps.begin(), s.cat_overlaps.end());
  }
  Outcome out;
  out.metrics = {{"median_splitting", median_of(splittings)},
                 {"max_splitting", *std::max_element(splittings.begin(), splittings.end())},
                 {"min_cat_overlap", *std::min_element(overlaps.begin(), overlaps.end())}};
  if (bundle) {
    CsvTable t({"seed", "index", "quasienergy", "partner", "splitting", "cat_overlap"});
    for (std::size_t i = 0; i < run.seeds.size(); ++i) {
      const auto& s = run.results[i];
      for (int j = 0; j < static_cast<int>(s.eigenphases.size()); ++j)
        t.add_row({static_cast<long long>(run.seeds[i]), static_cast<long long>(j), s.quasienergy(j),
                   static_cast<long long>(s.partner[j]), s.splittings[j], s.cat_overlaps[j]});
    }
    bundle->add("quasienergies.csv", t.str());
  }
  return out;
}

// oscillator

Outcome oscillator_mathieu(const Json& p, std::span<const std::uint64_t>, unsigned, Bundle* bundle) {
  const double a = num(p, "a"), delta = num(p, "delta"), damping = num(p, "damping");
  const auto m = oscillator::mathieu_monodromy(a, delta, damping, integer(p, "substeps"));
  Outcome out;
  out.metrics = {{"max_multiplier", m.max_magnitude}, {"determinant", m.determinant}, {"stable", m.stable ? 1.0 : 0.0, true}};
  if (bundle) {
    CsvTable t({"a", "delta", "damping", "m00", "m01", "m10", "m11", "max_multiplier", "determinant", "stable"});
    t.add_row({a, delta, damping, m.matrix[0], m.matrix[1], m.matrix[2], m.matrix[3], m.max_magnitude, m.determinant, m.stable});
    bundle->add("monodromy.csv", t.str());
  }
  return out;
}

oscillator::DriveParams drive_params(const Json& p) {
  return {num(p, "omega0"), num(p, "delta"), num(p, "omega_d"), num(p, "kappa")};
}

Outcome oscillator_chain(const Json& p, std::span<const std::uint64_t> seeds, unsigned workers, Bundle* bundle) {
  const auto drive = drive_params(p);
  const oscillator::ChainParams chain{integer(p, "sites"), num(p, "coupling"),
                                      text(p, "boundary") == "open" ? oscillator::Boundary::open : oscillator::Boundary::periodic};
  const oscillator::BathParams bath{num(p, "friction"), num(p, "temperature")};
  const int periods = integer(p, "periods");
  const auto initial = oscillator::PhaseState::uniform(chain.sites, num(p, "q0"), num(p, "p0"));
  const oscillator::IntegrationOptions options{integer(p, "substeps"), num(p, "blowup_bound")};
  const bool closed = bath.friction == 0.0 && bath.temperature == 0.0;

  const auto run = core::ensemble_run(
      seeds,
      [&](core::RandomSource& rng) {
        return closed ? oscillator::integrate_chain_hamiltonian(drive, chain, initial, periods, options)
                      : oscillator::integrate_chain_langevin(drive, chain, bath, initial, periods, rng, options);
      },
      pool(workers));

  std::vector<oscillator::StroboscopicRecord> complete;
  std::vector<double> actions;
  bool blew_up = false;
  for (const auto& r : run.results) {
    blew_up = blew_up || r.blew_up;
    if (r.blew_up) continue;
    complete.push_back(r.record);
    actions.push_back(oscillator::measured_resonant_action(r.record));
  }

  double tau = NAN, subharmonic = NAN;
  std::optional<oscillator::AutocorrelationResult> corr;
  if (!complete.empty()) {
    try {
      corr = oscillator::ttsb_autocorrelation(complete);
      if (corr->fit.has("tau")) tau = corr->fit.param("tau");
    } catch (const PreconditionError&) {
    } catch (const NumericalError&) {
    }
    const auto c = oscillator::stroboscopic_autocorrelation(complete.front());
    if (corr) subharmonic = core::dft_subharmonic(core::StroboscopicSeries(corr->correlation), 2).subharmonic_amplitude();
    else if (c.size() >= 4) subharmonic = core::dft_subharmonic(core::StroboscopicSeries(c), 2).subharmonic_amplitude();
  }

  Outcome out;
  out.blew_up = blew_up;
  out.metrics = {{"tau", tau}, {"subharmonic", subharmonic}, {"resonant_action", mean_of(actions)}, {"blew_up", blew_up ? 1.0 : 0.0, true}};

  if (bundle) {
    CsvTable replicas({"seed", "blew_up", "blowup_period", "final_energy"});
    for (std::size_t i = 0; i < run.seeds.size(); ++i) {
      const auto& r = run.results[i];
      replicas.add_row({static_cast<long long>(run.seeds[i]), r.blew_up, static_cast<long long>(r.blowup_period),
                        oscillator::undriven_energy(drive, chain, r.final_state)});
    }
    bundle->add("replicas.csv", replicas.str());

    const auto& first = run.results.front().record;
    CsvTable positions({"period", "q_site0", "q_mean"});
    std::vector<double> q0, qm;
    for (std::size_t n = 0; n < first.samples.size(); ++n) {
      const auto& s = first.samples[n];
      double mean = 0.0;
      for (double q : s.q) mean += q;
      mean /= static_cast<double>(s.q.size());
      positions.add_row({static_cast<long long>(n), s.q[0], mean});
      q0.push_back(s.q[0]);
      qm.push_back(mean);
    }
    bundle->add("positions.csv", positions.str());
    bundle->add("positions.svg", svg_line_plot({{"q_0", indices(q0.size()), q0}, {"mean q", indices(qm.size()), qm}},
                                               "Stroboscopic positions (seed " + std::to_string(run.seeds.front()) + ")",
                                               "period n", "q(nT)"));
    if (corr) {
      CsvTable t({"period", "C", "envelope"});
      for (std::size_t n = 0; n < corr->correlation.size(); ++n)
        t.add_row({static_cast<long long>(n), corr->correlation[n], corr->envelope[n]});
      bundle->add("autocorrelation.csv", t.str());
      bundle->add("autocorrelation.svg", svg_line_plot({{"envelope", indices(corr->envelope.size()), corr->envelope}},
                                                       "Demodulated autocorrelation", "period n", "(-1)^n C(n)/C(0)"));
    }
  }
  return out;
}

Outcome oscillator_heating(const Json& p, std::span<const std::uint64_t>, unsigned, Bundle* bundle) {
  const auto drive = drive_params(p);
  const int sites = integer(p, "sites");
  const oscillator::ChainParams chain{sites, 0.0, oscillator::Boundary::periodic};
  auto initial = oscillator::PhaseState::uniform(sites, num(p, "q0"), 0.0);
  const double spread = num(p, "p_spread");
  for (int i = 0; i < sites; ++i)
    initial.p[i] = sites > 1 ? spread * (2.0 * i / (sites - 1) - 1.0) : 0.0;
  const oscillator::HeatingOptions options{num(p, "max_time"), integer(p, "substeps"), num(p, "plateau_fraction"), num(p, "min_rise")};
  const std::vector<double> grid{drive.omega_d};
  const auto point = oscillator::heating_time(drive, chain, initial, grid, options).front();

  Outcome out;
  out.metrics = {{"t_star", point.t_star.value_or(NAN)},
                 {"censored", point.censored() ? 1.0 : 0.0, true},
                 {"initial_energy", point.initial_energy},
                 {"plateau_energy", point.plateau_energy}};
  if (bundle) {
    const auto e = point.energy.values();
    const auto t = indices(e.size(), point.energy.period());
    CsvTable table({"time", "energy"});
    for (std::size_t n = 0; n < e.size(); ++n) table.add_row({t[n], e[n]});
    bundle->add("energy.csv", table.str());
    bundle->add("energy.svg", svg_line_plot({{"E_eff", t, {e.begin(), e.end()}}}, "Undriven energy", "time", "energy"));
  }
  return out;
}

// pca

Outcome pca_retention(const Json& p, std::span<const std::uint64_t> seeds, unsigned workers, Bundle* bundle) {
  const std::string rule = text(p, "rule");
  const auto noise = pca::NoiseParams::from_bias(num(p, "bias"), num(p, "amplitude"));
  const pca::PcaModel model = rule == "glauber" ? pca::glauber_model(noise)
                              : rule == "pi_toom" ? pca::pi_toom_model(noise)
                                                  : pca::toom_model(noise);
  const int lx = integer(p, "lx"), ly = integer(p, "ly"), steps = integer(p, "steps");
  const bool demodulate = pca::period_two(model.rule);

  struct Replica {
    std::vector<double> m;
    double subharmonic = NAN;
    std::optional<pca::SpinLattice2D> final_state;
  };
  const std::uint64_t first_seed = *std::min_element(seeds.begin(), seeds.end());
  const auto run = core::ensemble_run(
      seeds,
      [&](core::RandomSource& rng) {
        const std::uint64_t seed = rng.master_seed();
        auto r = pca::run_pca(pca::SpinLattice2D::uniform(lx, ly, 1), model.rule, model.noise, steps, rng);
        Replica out;
        const auto m = r.magnetization.values();
        out.m.assign(m.begin(), m.end());
        if (r.spectrum) out.subharmonic = r.spectrum->subharmonic_amplitude();
        if (bundle && seed == first_seed) out.final_state = std::move(r.final_state);
        return out;
      },
      pool(workers));

  std::vector<std::vector<double>> curves;
  std::vector<double> retained, subharmonics;
  for (const auto& r : run.results) {
    const double last = r.m.back() * (demodulate && steps % 2 ? -1.0 : 1.0);
    retained.push_back(last > 0.0 ? 1.0 : 0.0);
    subharmonics.push_back(r.subharmonic);
    curves.push_back(r.m);
  }
  const double probability = mean_of(retained);
  Outcome out;
  out.metrics = {{"retention", probability},
                 {"standard_error", std::sqrt(probability * (1.0 - probability) / static_cast<double>(retained.size()))}};
  if (demodulate) out.metrics.push_back({"subharmonic_mean", mean_of(subharmonics)});

  if (bundle) {
    const auto agg = core::aggregate(curves);
    std::vector<std::string> header{"step", "m_mean", "m_stderr"};
    if (demodulate) header.push_back("demodulated_mean");
    CsvTable t(header);
    std::vector<double> demod(agg.mean.size());
    for (std::size_t s = 0; s < agg.mean.size(); ++s) {
      demod[s] = s % 2 ? -agg.mean[s] : agg.mean[s];
      std::vector<Cell> row{static_cast<long long>(s), agg.mean[s], agg.standard_error[s]};
      if (demodulate) row.emplace_back(demod[s]);
      t.add_row(std::move(row));
    }
    bundle->add("magnetization.csv", t.str());
    CsvTable replicas({"seed", "retained", "final_m", "subharmonic"});
    for (std::size_t i = 0; i < run.seeds.size(); ++i)
      replicas.add_row({static_cast<long long>(run.seeds[i]), retained[i] > 0.5, run.results[i].m.back(), subharmonics[i]});
    bundle->add("replicas.csv", replicas.str());
    std::ostringstream pbm;
    pca::write_pbm(pbm, *run.results.front().final_state);
    bundle->add("final_state.pbm", pbm.str());
    bundle->add("magnetization.svg", svg_line_plot({{demodulate ? "(-1)^t m(t)" : "m(t)", indices(demod.size()),
                                                      demodulate ? demod : agg.mean}},
                                                    "Seed-averaged magnetization", "step t", "m"));
  }
  return out;
}

// cdw

Outcome cdw_staircase(const Json& p, std::span<const std::uint64_t> seeds, unsigned workers, Bundle* bundle) {
  cdw::PhaseEomParams drive;
  drive.omega0_tau = num(p, "omega0_tau");
  drive.e_threshold = num(p, "e_threshold");
  drive.e_ac = num(p, "e_ac");
  drive.omega_d = num(p, "omega_d");
  drive.inertial = p.at("inertial").get<bool>();
  drive.validate();
  const int points = integer(p, "e_dc_points");
  require(points >= 2, "params.e_dc_points: need at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    grid[i] = num(p, "e_dc_min") + (num(p, "e_dc_max") - num(p, "e_dc_min")) * i / (points - 1);
  cdw::PhaseIntegration integration;
  integration.t_max = integer(p, "periods") * drive.drive_period();
  integration.substeps = integer(p, "substeps");
  integration.temperature = num(p, "temperature");
  cdw::IvOptions options;
  options.warm_start = p.at("warm_start").get<bool>();
  const int chain_sites = integer(p, "chain_sites");
  const double stiffness = num(p, "stiffness");

  const auto run = core::ensemble_run(
      seeds,
      [&](core::RandomSource& rng) {
        core::RandomSource* noise = integration.temperature > 0.0 ? &rng : nullptr;
        if (chain_sites > 0) {
          const auto chain = cdw::ChainCdwParams::random(chain_sites, stiffness, rng);
          return cdw::chain_iv(chain, drive, grid, integration, options, noise);
        }
        return cdw::iv_curve(drive, grid, integration, options, noise);
      },
      pool(workers));

  auto candidates = options.candidates;
  std::stable_partition(candidates.begin(), candidates.end(), [](const auto& c) { return c == std::pair{1, 2}; });
  Outcome out;
  for (const auto& [pn, qn] : candidates) {
    std::vector<double> widths;
    for (const auto& s : run.results) widths.push_back(cdw::find_plateau(s.plateaus, pn, qn).value_or(cdw::Plateau{}).width);
    out.metrics.push_back({"width_" + std::to_string(pn) + "_" + std::to_string(qn), mean_of(widths)});
  }
  std::vector<double> max_rates;
  for (const auto& s : run.results) max_rates.push_back(*std::max_element(s.winding_rate.begin(), s.winding_rate.end()));
  out.metrics.push_back({"max_rate", mean_of(max_rates)});

  if (bundle) {
    CsvTable stairs({"seed", "e_dc", "winding_rate", "rate_over_omega_d", "differential"});
    CsvTable plateaus({"seed", "p", "q", "center", "width"});
    std::vector<LineSeries> lines;
    for (std::size_t i = 0; i < run.seeds.size(); ++i) {
      const auto& s = run.results[i];
      const auto seed = static_cast<long long>(run.seeds[i]);
      LineSeries line{"seed " + std::to_string(seed), s.e_dc, {}};
      for (std::size_t k = 0; k < s.e_dc.size(); ++k) {
        stairs.add_row({seed, s.e_dc[k], s.winding_rate[k], s.winding_rate[k] / drive.omega_d, s.differential[k]});
        line.y.push_back(s.winding_rate[k] / drive.omega_d);
      }
      for (const auto& pl : s.plateaus)
        plateaus.add_row({seed, static_cast<long long>(pl.p), static_cast<long long>(pl.q), pl.center, pl.width});
      if (lines.size() < 6) lines.push_back(std::move(line));
    }
    bundle->add("staircase.csv", stairs.str());
    bundle->add("plateaus.csv", plateaus.str());
    bundle->add("staircase.svg", svg_line_plot(lines, "Devil's staircase", "E_dc / E_T", "<dtheta/dt> / omega_d"));
  }
  return out;
}

using Evaluator = Outcome (*)(const Json&, std::span<const std::uint64_t>, unsigned, Bundle*);

Evaluator lookup(const std::string& experiment, const std::string& name) {
  static const std::map<std::pair<std::string, std::string>, Evaluator> table{
      {{"quantum", "magnetization"}, quantum_magnetization},
      {{"quantum", "spectrum"}, quantum_spectrum},
      {{"oscillator", "mathieu"}, oscillator_mathieu},
      {{"oscillator", "chain"}, oscillator_chain},
      {{"oscillator", "heating"}, oscillator_heating},
      {{"pca", "retention"}, pca_retention},
      {{"cdw", "staircase"}, cdw_staircase},
  };
  const auto it = table.find({experiment, name});
  if (it == table.end()) throw ConfigError("experiment/name: unknown pair '" + experiment + "/" + name + "'");
  return it->second;
}

// bundle writing

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class BundleWriter {
 public:
  explicit BundleWriter(const ExperimentConfig& config, const char* command) : config_(config), command_(command) {
    std::filesystem::create_directories(config.out);
    started_ = std::chrono::steady_clock::now();
    started_utc_ = utc_now();
    write("effective_config.json", config.effective_text());
  }

  void write(const std::string& name, const std::string& content) {
    const auto path = config_.out / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), "cannot write " + path.string());
    out << content;
    out.close();
    files_.push_back(name);
  }

  std::filesystem::path finish(bool blew_up, const std::string& error, Json extra = Json::object()) {
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
    Json listed = Json::array();
    for (const auto& name : files_)
      listed.push_back({{"path", name},
                        {"bytes", std::filesystem::file_size(config_.out / name)},
                        {"sha256", sha256_file(config_.out / name)}});
    Json manifest{{"tcsim_version", TCSIM_VERSION_STRING},
                  {"command", command_},
                  {"experiment", config_.experiment},
                  {"name", config_.name},
                  {"config_hash", config_.hash()},
                  {"seeds", config_.seeds},
                  {"started_utc", started_utc_},
                  {"wall_clock_seconds", elapsed},
                  {"status", !error.empty() ? "failed" : blew_up ? "blow_up" : "ok"},
                  {"blew_up", blew_up},
                  {"files", listed}};
    if (!error.empty()) manifest["error"] = error;
    for (const auto& item : extra.items()) manifest[item.key()] = item.value();
    const auto path = config_.out / "manifest.json";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << manifest.dump(2) << "\n";
    return path;
  }

 private:
  const ExperimentConfig& config_;
  std::string command_;
  std::chrono::steady_clock::time_point started_;
  std::string started_utc_;
  std::vector<std::string> files_;
};

CsvTable metrics_table(const std::vector<Metric>& metrics) {
  CsvTable t({"metric", "value"});
  for (const auto& m : metrics) {
    if (m.boolean)
      t.add_row({m.name, m.value != 0.0});
    else
      t.add_row({m.name, m.value});
  }
  return t;
}

}  // namespace

Outcome evaluate(const std::string& experiment, const std::string& name, const Json& params,
                 std::span<const std::uint64_t> seeds, unsigned workers, Bundle* bundle) {
  require(!seeds.empty(), "evaluate: need at least one seed");
  return lookup(experiment, name)(params, seeds, workers, bundle);
}

RunReport run_experiment(const ExperimentConfig& config, unsigned workers) {
  lookup(config.experiment, config.name);
  BundleWriter writer(config, "run");
  Bundle bundle;
  Outcome outcome;
  try {
    outcome = evaluate(config.experiment, config.name, config.params, config.seeds, workers, &bundle);
  } catch (const NumericalError& e) {
    writer.finish(true, e.what());
    throw;
  }
  for (const auto& [file, content] : bundle.files) writer.write(file, content);
  writer.write("metrics.csv", metrics_table(outcome.metrics).str());
  return {writer.finish(outcome.blew_up, {}), outcome.metrics, outcome.blew_up};
}

RunReport scan_experiment(const ExperimentConfig& config, unsigned workers) {
  if (!config.scan) throw ConfigError("scan: missing scan block");
  lookup(config.experiment, config.name);
  const auto& axes = config.scan->axes;
  for (const auto& axis : axes)
    if (axis.values.empty()) throw ConfigError("scan.axes: empty grid for " + axis.param);
  const std::vector<double> inner = axes.size() == 2 ? axes[1].values : std::vector<double>{0.0};

  BundleWriter writer(config, "scan");
  std::vector<std::string> metric_names;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::vector<double>> values;  // per point, per metric
  bool blew_up = false;
  auto set_param = [&](Json& params, const std::string& key, double v) {
    if (params[key].is_number_integer())
      params[key] = static_cast<long long>(v);
    else
      params[key] = v;
  };
  try {
    for (double outer : axes[0].values)
      for (double second : inner) {
        Json params = config.params;
        set_param(params, axes[0].param, outer);
        if (axes.size() == 2) set_param(params, axes[1].param, second);
        const auto outcome = evaluate(config.experiment, config.name, params, config.seeds, workers, nullptr);
        if (metric_names.empty()) {
          for (const auto& m : outcome.metrics) metric_names.push_back(m.name);
          if (!config.scan->metric.empty() &&
              std::find(metric_names.begin(), metric_names.end(), config.scan->metric) == metric_names.end()) {
            std::string known;
            for (const auto& n : metric_names) known += (known.empty() ? "" : ", ") + n;
            throw ConfigError("scan.metric: '" + config.scan->metric + "' is not a metric (known: " + known + ")");
          }
        }
        blew_up = blew_up || outcome.blew_up;
        std::vector<Cell> row{outer};
        if (axes.size() == 2) row.emplace_back(second);
        std::vector<double> v;
        for (const auto& m : outcome.metrics) {
          if (m.boolean)
            row.emplace_back(m.value != 0.0);
          else
            row.emplace_back(m.value);
          v.push_back(m.value);
        }
        rows.push_back(std::move(row));
        values.push_back(std::move(v));
      }
  } catch (const NumericalError& e) {
    writer.finish(true, e.what());
    throw;
  }

  std::vector<std::string> header;
  for (const auto& axis : axes) header.push_back(axis.param);
  header.insert(header.end(), metric_names.begin(), metric_names.end());
  CsvTable table(header);
  for (auto& row : rows) table.add_row(std::move(row));
  writer.write("scan.csv", table.str());

  const std::string metric = config.scan->metric.empty() ? metric_names.front() : config.scan->metric;
  const auto k = static_cast<std::size_t>(std::find(metric_names.begin(), metric_names.end(), metric) - metric_names.begin());
  const std::size_t nx = axes[0].values.size(), ny = inner.size();
  std::vector<double> grid(nx * ny);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) grid[j * nx + i] = values[i * ny + j][k];
  writer.write("scan.svg", svg_heat_map(axes[0].values, inner, grid, config.experiment + "/" + config.name + ": " + metric,
                                        axes[0].param, axes.size() == 2 ? axes[1].param : ""));
  if (axes.size() == 1) {
    std::vector<double> y;
    for (const auto& v : values) y.push_back(v[k]);
    writer.write("scan_line.svg", svg_line_plot({{metric, axes[0].values, y}}, config.experiment + "/" + config.name,
                                                axes[0].param, metric));
  }

  Json grid_doc = Json::array();
  for (const auto& axis : axes) grid_doc.push_back({{"param", axis.param}, {"values", axis.values}});
  Json extra{{"grid", grid_doc},
             {"points", nx * ny},
             {"point_seeds", config.seeds},
             {"seeding", "paired: every grid point reuses point_seeds"}};
  return {writer.finish(blew_up, {}, extra), {}, blew_up};
}

}  // namespace tcsim::cli
