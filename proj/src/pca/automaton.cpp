#include "tcsim/pca/automaton.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "tcsim/core/ensemble.hpp"
#include "tcsim/core/errors.hpp"

namespace tcsim::pca {

namespace {

template <class... F>
struct Overload : F... {
  using F::operator()...;
};

void toom_into(const SpinLattice2D& in, SpinLattice2D& out, bool negate) {
  const int lx = in.lx, ly = in.ly;
  const int sign = negate ? -1 : 1;
  for (int y = 0; y < ly; ++y) {
    const std::int8_t* row = &in.spins[in.index(0, y)];
    const std::int8_t* north = &in.spins[in.index(0, (y + 1) % ly)];
    std::int8_t* dst = &out.spins[out.index(0, y)];
    for (int x = 0; x + 1 < lx; ++x) {
      const int s = row[x] + row[x + 1] + north[x];
      dst[x] = static_cast<std::int8_t>(sign * ((s >> 31) | 1));
    }
    const int s = row[lx - 1] + row[0] + north[lx - 1];
    dst[lx - 1] = static_cast<std::int8_t>(sign * ((s >> 31) | 1));
  }
}

void check_glauber(const SpinLattice2D& lattice, const GlauberIsing& rule) {
  require(lattice.lx % 2 == 0 && lattice.ly % 2 == 0, "GlauberIsing: checkerboard needs even dimensions");
  require(rule.temperature >= 0.0 && std::isfinite(rule.temperature), "GlauberIsing: temperature must be >= 0");
  require(std::isfinite(rule.field) && std::isfinite(rule.coupling), "GlauberIsing: parameters must be finite");
}

// In place; one 32-bit draw per cell.
void glauber_sweep(SpinLattice2D& lattice, const GlauberIsing& rule, core::RandomSource& rng) {
  // Threshold on u32 for +1, indexed by the neighbor sum S = -4, -2, 0, 2, 4.
  std::array<std::uint64_t, 5> threshold{};
  for (int k = 0; k < 5; ++k) {
    const double local = rule.coupling * (2 * k - 4) + rule.field;
    double p_up;
    if (rule.temperature == 0.0)
      p_up = local > 0.0 ? 1.0 : (local < 0.0 ? 0.0 : 0.5);
    else
      p_up = 1.0 / (1.0 + std::exp(-2.0 * local / rule.temperature));
    threshold[k] = static_cast<std::uint64_t>(std::llround(p_up * 4294967296.0));
  }
  const int lx = lattice.lx, ly = lattice.ly;
  auto& s = lattice.spins;
  for (int parity = 0; parity < 2; ++parity)
    for (int y = 0; y < ly; ++y) {
      const std::size_t up = lattice.index(0, (y + 1) % ly), down = lattice.index(0, (y + ly - 1) % ly);
      const std::size_t row = lattice.index(0, y);
      for (int x = (y + parity) % 2; x < lx; x += 2) {
        const int east = x + 1 == lx ? 0 : x + 1, west = x == 0 ? lx - 1 : x - 1;
        const int sum = s[row + east] + s[row + west] + s[up + x] + s[down + x];
        s[row + x] = rng.next_u32() < threshold[(sum + 4) / 2] ? 1 : -1;
      }
    }
}

void check_rule(const SpinLattice2D& lattice, const PcaRule& rule, bool have_rng) {
  std::visit(Overload{
                 [](const ToomNEC&) {},
                 [](const PiToom&) {},
                 [&](const GlauberIsing& g) {
                   require(have_rng, "step_rule: GlauberIsing is stochastic and needs a RandomSource");
                   check_glauber(lattice, g);
                 },
                 [&](const Rotated& r) {
                   require(r.base != nullptr, "step_rule: rotated rule has no base");
                   require(r.m == 2, "step_rule: binary lattices support only the Z_2 rotation");
                   check_rule(lattice, *r.base, have_rng);
                 },
             },
             rule);
}

// Unchecked step from `in` into `out` (same shape, distinct buffers).
void step_into(const SpinLattice2D& in, SpinLattice2D& out, const PcaRule& rule, core::RandomSource* rng) {
  std::visit(Overload{
                 [&](const ToomNEC&) { toom_into(in, out, false); },
                 [&](const PiToom&) { toom_into(in, out, true); },
                 [&](const GlauberIsing& g) {
                   out.spins = in.spins;
                   glauber_sweep(out, g, *rng);
                 },
                 [&](const Rotated& r) {
                   step_into(in, out, *r.base, rng);
                   for (auto& s : out.spins) s = static_cast<std::int8_t>(-s);
                 },
             },
             rule);
}

void noise_in_place(SpinLattice2D& lattice, const NoiseParams& noise, core::RandomSource& rng) {
  const double p = noise.amplitude();
  if (p <= 0.0) return;
  const double up_share = noise.up / p;
  const std::size_t n = lattice.cells();
  if (p >= 1.0) {
    for (auto& s : lattice.spins) s = rng.uniform() < up_share ? 1 : -1;
    return;
  }
  // Geometric gaps between hit cells: same law as one Bernoulli(p) per cell.
  const double log_miss = std::log1p(-p);
  std::size_t i = 0;
  while (true) {
    const double gap = std::floor(std::log1p(-rng.uniform()) / log_miss);
    if (gap >= static_cast<double>(n - i)) break;
    i += static_cast<std::size_t>(gap);
    lattice.spins[i] = rng.uniform() < up_share ? 1 : -1;
    if (++i >= n) break;
  }
}

// Rule then noise, double-buffered.
class Evolver {
 public:
  Evolver(SpinLattice2D initial, const PcaModel& model) : model_(model), current_(std::move(initial)) {
    current_.validate();
    model_.noise.validate();
    check_rule(current_, model_.rule, true);
    scratch_ = current_;
  }

  void advance(core::RandomSource& rng) {
    step_into(current_, scratch_, model_.rule, &rng);
    noise_in_place(scratch_, model_.noise, rng);
    std::swap(current_, scratch_);
  }

  const SpinLattice2D& state() const { return current_; }
  SpinLattice2D take() { return std::move(current_); }

 private:
  const PcaModel& model_;
  SpinLattice2D current_, scratch_;
};

bool is_rotated_toom(const PcaRule& rule, int m) {
  const auto* r = std::get_if<Rotated>(&rule);
  return r != nullptr && r->m == m && r->base && std::holds_alternative<ToomNEC>(*r->base);
}

long long first_negative(const PcaModel& model, int lx, int ly, long long max_steps, core::RandomSource& rng) {
  const bool demodulate = period_two(model.rule);
  Evolver evolver(SpinLattice2D::uniform(lx, ly, 1), model);
  for (long long t = 1; t <= max_steps; ++t) {
    evolver.advance(rng);
    const double m = evolver.state().magnetization() * (demodulate && t % 2 ? -1.0 : 1.0);
    if (m < 0.0) return t;
  }
  return -1;
}

}  // namespace

PcaRule make_rotated_rule(const PcaRule& base, int m) {
  require(m >= 2, "make_rotated_rule: m must be at least 2");
  const bool toom = std::holds_alternative<ToomNEC>(base);
  const bool glauber = std::holds_alternative<GlauberIsing>(base);
  require(toom || glauber, "make_rotated_rule: base must be ToomNEC or GlauberIsing");
  require(toom || m == 2, "make_rotated_rule: GlauberIsing has a binary alphabet, so only m = 2");
  return Rotated{std::make_shared<const PcaRule>(base), m};
}

SpinLattice2D step_rule(const SpinLattice2D& lattice, const PcaRule& rule) {
  lattice.validate();
  check_rule(lattice, rule, false);
  SpinLattice2D out = lattice;
  step_into(lattice, out, rule, nullptr);
  return out;
}

SpinLattice2D step_rule(const SpinLattice2D& lattice, const PcaRule& rule, core::RandomSource& rng) {
  lattice.validate();
  check_rule(lattice, rule, true);
  SpinLattice2D out = lattice;
  step_into(lattice, out, rule, &rng);
  return out;
}

ClockLattice2D step_rule(const ClockLattice2D& lattice, const PcaRule& rule) {
  lattice.validate();
  const bool plain = std::holds_alternative<ToomNEC>(rule);
  require(plain || is_rotated_toom(rule, lattice.m),
          "step_rule: clock lattices support ToomNEC or Rotated(ToomNEC, m) with matching m");
  const int shift = plain ? 0 : 1;
  const int lx = lattice.lx, ly = lattice.ly, m = lattice.m;
  ClockLattice2D out = lattice;
  for (int y = 0; y < ly; ++y) {
    const std::uint8_t* row = &lattice.states[lattice.index(0, y)];
    const std::uint8_t* north = &lattice.states[lattice.index(0, (y + 1) % ly)];
    std::uint8_t* dst = &out.states[out.index(0, y)];
    for (int x = 0; x < lx; ++x) {
      const int self = row[x], east = row[(x + 1) % lx], up = north[x];
      const int winner = (self == east || self == up) ? self : (east == up ? east : self);
      dst[x] = static_cast<std::uint8_t>((winner + shift) % m);
    }
  }
  return out;
}

SpinLattice2D apply_noise(const SpinLattice2D& lattice, const NoiseParams& noise, core::RandomSource& rng) {
  noise.validate();
  SpinLattice2D out = lattice;
  noise_in_place(out, noise, rng);
  return out;
}

ClockLattice2D apply_clock_noise(const ClockLattice2D& lattice, double rate, core::RandomSource& rng) {
  require(rate >= 0.0 && rate <= 1.0, "apply_clock_noise: rate must lie in [0, 1]");
  ClockLattice2D out = lattice;
  for (auto& s : out.states)
    if (rng.uniform() < rate)
      s = static_cast<std::uint8_t>((s + 1 + rng.uniform_index(static_cast<std::uint64_t>(lattice.m - 1))) % lattice.m);
  return out;
}

GlauberIsing matched_glauber(const NoiseParams& noise) {
  require(noise.up > 0.0 && noise.up < 0.5 && noise.down > 0.0 && noise.down < 0.5,
          "matched_glauber: rates must lie in (0, 1/2)");
  const double lp = std::log(1.0 / noise.up - 1.0);
  const double lq = std::log(1.0 / noise.down - 1.0);
  GlauberIsing g;
  g.temperature = 16.0 / (lp + lq);
  g.field = g.temperature * (lq - lp) / 4.0;
  return g;
}

bool period_two(const PcaRule& rule) {
  if (std::holds_alternative<PiToom>(rule)) return true;
  const auto* r = std::get_if<Rotated>(&rule);
  return r != nullptr && r->m == 2;
}

PcaRun run_pca(const SpinLattice2D& initial, const PcaRule& rule, const NoiseParams& noise, int steps,
               core::RandomSource& rng) {
  require(steps >= 1, "run_pca: steps must be at least 1");
  const PcaModel model{rule, noise};
  Evolver evolver(initial, model);
  std::vector<double> m{initial.magnetization()};
  m.reserve(static_cast<std::size_t>(steps) + 1);
  for (int t = 1; t <= steps; ++t) {
    evolver.advance(rng);
    m.push_back(evolver.state().magnetization());
  }
  PcaRun out;
  if (period_two(rule)) {
    std::vector<double> demod(m.size());
    for (std::size_t t = 0; t < m.size(); ++t) demod[t] = t % 2 ? -m[t] : m[t];
    out.demodulated.emplace(std::move(demod), 1.0, "demodulated m");
    out.magnetization = core::StroboscopicSeries(std::move(m), 1.0, "m");
    if (out.magnetization.size() >= 4) out.spectrum.emplace(core::dft_subharmonic(out.magnetization, 2));
  } else {
    out.magnetization = core::StroboscopicSeries(std::move(m), 1.0, "m");
  }
  out.final_state = evolver.take();
  return out;
}

ClockRun run_clock(const ClockLattice2D& initial, const PcaRule& rule, double noise_rate, int steps,
                   core::RandomSource& rng) {
  require(steps >= 2 * initial.m, "run_clock: need at least 2m steps");
  ClockLattice2D lattice = initial;
  std::vector<double> order{lattice.order_parameter()};
  for (int t = 1; t <= steps; ++t) {
    lattice = apply_clock_noise(step_rule(lattice, rule), noise_rate, rng);
    order.push_back(lattice.order_parameter());
  }
  core::StroboscopicSeries series(std::move(order), 1.0, "clock order");
  auto spectrum = core::dft_subharmonic(series, initial.m);
  return {std::move(series), std::move(spectrum), std::move(lattice)};
}

LifetimeResult memory_lifetime(const PcaModel& model, int lx, int ly, long long max_steps,
                               std::span<const std::uint64_t> seeds, unsigned workers) {
  require(max_steps >= 1, "memory_lifetime: max_steps must be positive");
  require(!seeds.empty(), "memory_lifetime: need at least one seed");
  const auto run = core::ensemble_run(
      seeds, [&](core::RandomSource& rng) { return first_negative(model, lx, ly, max_steps, rng); },
      {.workers = workers});
  LifetimeResult out;
  out.seeds = run.seeds;
  std::vector<double> sorted;
  for (long long t : run.results) {
    if (t < 0) {
      out.flip_times.emplace_back(std::nullopt);
      ++out.censored;
      sorted.push_back(std::numeric_limits<double>::infinity());
    } else {
      out.flip_times.emplace_back(t);
      sorted.push_back(static_cast<double>(t));
    }
  }
  std::ranges::sort(sorted);
  const std::size_t n = sorted.size();
  const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  if (std::isfinite(median)) out.median = median;
  return out;
}

Retention retention(const PcaModel& model, int lx, int ly, int steps, std::span<const std::uint64_t> seeds,
                    unsigned workers) {
  require(steps >= 1, "retention: steps must be positive");
  require(!seeds.empty(), "retention: need at least one seed");
  const bool demodulate = period_two(model.rule);
  const auto run = core::ensemble_run(
      seeds,
      [&](core::RandomSource& rng) {
        Evolver evolver(SpinLattice2D::uniform(lx, ly, 1), model);
        for (int t = 1; t <= steps; ++t) evolver.advance(rng);
        const double m = evolver.state().magnetization() * (demodulate && steps % 2 ? -1.0 : 1.0);
        return m > 0.0 ? 1.0 : 0.0;
      },
      {.workers = workers});
  Retention out;
  for (double r : run.results) out.retained.push_back(r > 0.5);
  const double n = static_cast<double>(run.results.size());
  out.probability = run.summary->mean[0];
  out.standard_error = std::sqrt(out.probability * (1.0 - out.probability) / n);
  return out;
}

PcaModel toom_model(const NoiseParams& noise) { return {ToomNEC{}, noise}; }
PcaModel pi_toom_model(const NoiseParams& noise) { return {PiToom{}, noise}; }
PcaModel glauber_model(const NoiseParams& noise) { return {matched_glauber(noise), {}}; }

PhaseMap phase_scan(std::span<const double> biases, std::span<const double> amplitudes, const ModelFactory& model,
                    int lx, int ly, int steps, std::span<const std::uint64_t> seeds, unsigned workers) {
  require(!biases.empty() && !amplitudes.empty(), "phase_scan: grids must be nonempty");
  PhaseMap out;
  out.biases.assign(biases.begin(), biases.end());
  out.amplitudes.assign(amplitudes.begin(), amplitudes.end());
  for (double b : biases)
    for (double a : amplitudes) {
      const auto r = retention(model(NoiseParams::from_bias(b, a)), lx, ly, steps, seeds, workers);
      out.retention.push_back(r.probability);
      out.standard_error.push_back(r.standard_error);
    }
  return out;
}

}  // namespace tcsim::pca
