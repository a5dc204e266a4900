#include "kac/experiment.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include "kac/meanfield.hpp"

namespace kac {

Estimate batch_means(const std::vector<std::vector<double>>& series, std::uint64_t batches) {
  std::vector<double> means;
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& s : series) {
    for (double v : s) total += v;
    count += s.size();
    const std::size_t b = std::min<std::size_t>(batches, s.size());
    if (b == 0) continue;
    const std::size_t len = s.size() / b;
    for (std::size_t i = 0; i < b; ++i) {
      double a = 0.0;
      for (std::size_t j = i * len; j < (i + 1) * len; ++j) a += s[j];
      means.push_back(a / static_cast<double>(len));
    }
  }
  Estimate e;
  if (count == 0) return e;
  e.mean = total / static_cast<double>(count);
  if (means.size() < 2) return e;
  double mu = 0.0;
  for (double m : means) mu += m;
  mu /= static_cast<double>(means.size());
  double var = 0.0;
  for (double m : means) var += (m - mu) * (m - mu);
  var /= static_cast<double>(means.size() - 1);
  e.stderr_ = std::sqrt(var / static_cast<double>(means.size()));
  return e;
}

BoundarySample make_boundary(const RunConfig& cfg) {
  switch (cfg.boundary) {
    case BoundaryKind::PlusOnes:
      return {BoundaryCondition::plus_ones(), 0};
    case BoundaryKind::MinusOnes:
      return {BoundaryCondition::minus_ones(), 0};
    case BoundaryKind::Free:
      return {BoundaryCondition::free(), 0};
    case BoundaryKind::SampledSPlus:
    case BoundaryKind::SampledSMinus:
      return sample_boundary(cfg.boundary, cfg.seed, cfg.coupling(), cfg.scales(), cfg.m_beta(), cfg.psi());
    case BoundaryKind::Explicit:
      break;
  }
  throw ConfigError("explicit boundaries cannot be built from a config");
}

namespace {

struct ChainAccumulator {
  std::vector<double> sigma0, magnetization, not_plus, minus, contains0;
  std::vector<std::array<std::uint64_t, 3>> eta;
  std::map<std::int64_t, std::uint64_t> sizes;
  std::uint64_t contours = 0;
  std::uint64_t plus_blocks = 0;
  std::uint64_t steps = 0;
  std::vector<ContourRecord> records;
  std::uint64_t last_step = 0;
  SpinConfig last;
};

}  // namespace

RunStats run_experiment(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  RunStats stats;
  stats.warnings = cfg.validate();
  const CouplingSpec coupling = cfg.coupling();
  const Scales scales = cfg.scales();
  const double mb = cfg.m_beta();
  const double psi = cfg.psi();
  const double varpi = cfg.effective_varpi();
  stats.m_beta = mb;
  stats.psi = psi;
  stats.origin_block = cfg.blocks / 2;

  const BoundarySample bs = make_boundary(cfg);
  stats.boundary_attempts = bs.attempts;
  const int sign = bs.boundary.outside_sign();
  const auto n = static_cast<std::size_t>(cfg.sites());
  const SpinConfig initial = SpinConfig::uniform(cfg.first_site(), n, static_cast<Spin>(sign), bs.boundary);
  const auto origin_site = static_cast<std::size_t>(stats.origin_block * scales.ellp);
  const auto nb = static_cast<std::size_t>(cfg.blocks);

  std::vector<ChainAccumulator> acc(cfg.chains);
  auto work = [&](std::size_t c) {
    ChainAccumulator& a = acc[c];
    a.eta.assign(nb, {0, 0, 0});
    ChainConfig cc;
    cc.beta = cfg.beta;
    cc.kernel = cfg.kernel;
    cc.seed = cfg.seed;
    cc.chain_id = c;
    cc.burn_in_sweeps = cfg.burn_in;
    cc.sweeps = cfg.sweeps;
    cc.snapshot_every = cfg.snapshot_every;
    cc.strategy = cfg.strategy;
    const std::uint64_t per_sweep = n;
    run_chain_streaming(coupling, initial, cc, [&](const Snapshot& s) {
      const auto values = s.spins.values();
      a.sigma0.push_back(values[origin_site]);
      double m = 0.0;
      for (Spin v : values) m += v;
      a.magnetization.push_back(m / static_cast<double>(n));
      EtaField eta;
      if (mb > 0.0) {
        eta = eta_field(s.spins, scales, mb, psi);
      } else {
        eta.outside_sign = sign;
        eta.values.assign(nb, 0);
      }
      for (std::size_t b = 0; b < nb; ++b) {
        ++a.eta[b][static_cast<std::size_t>(eta.values[b] + 1)];
        if (eta.values[b] == 1) ++a.plus_blocks;
      }
      const int e0 = eta.values[static_cast<std::size_t>(stats.origin_block)];
      a.not_plus.push_back(e0 != 1 ? 1.0 : 0.0);
      a.minus.push_back(e0 == -1 ? 1.0 : 0.0);
      const ElementSet es = elements_from_eta(eta);
      std::vector<Contour> contours = group_contours(es.elements, varpi, scales.ellp);
      double hit = 0.0;
      for (const Contour& g : contours) {
        ++a.sizes[g.size];
        ++a.contours;
        if (g.contains_block(stats.origin_block)) hit += 1.0;
      }
      a.contains0.push_back(hit);
      if (cfg.record_contours) a.records.push_back({c, s.step, std::move(contours)});
      if (c == 0) {
        a.last_step = s.step;
        a.last = s.spins;
      }
    });
    a.steps = (cfg.burn_in + cfg.sweeps) * per_sweep;
  };

  std::vector<std::thread> threads;
  for (std::size_t c = 0; c < cfg.chains; ++c) threads.emplace_back(work, c);
  for (auto& t : threads) t.join();

  std::vector<std::vector<double>> s0, mag, np, mi, c0;
  stats.eta_histogram.assign(nb, {0, 0, 0});
  std::uint64_t plus = 0;
  for (ChainAccumulator& a : acc) {
    s0.push_back(std::move(a.sigma0));
    mag.push_back(std::move(a.magnetization));
    np.push_back(std::move(a.not_plus));
    mi.push_back(std::move(a.minus));
    c0.push_back(std::move(a.contains0));
    for (std::size_t b = 0; b < nb; ++b) {
      for (std::size_t k = 0; k < 3; ++k) stats.eta_histogram[b][k] += a.eta[b][k];
    }
    for (const auto& [size, count] : a.sizes) stats.contour_sizes[size] += count;
    stats.contours += a.contours;
    plus += a.plus_blocks;
    stats.steps += a.steps;
    for (ContourRecord& r : a.records) stats.contour_records.push_back(std::move(r));
  }
  stats.final_step = acc[0].last_step;
  stats.final_state = std::move(acc[0].last);
  for (const auto& s : s0) stats.samples += s.size();
  stats.sigma0 = batch_means(s0, cfg.batches);
  stats.magnetization = batch_means(mag, cfg.batches);
  stats.p_eta0_not_plus = batch_means(np, cfg.batches);
  stats.p_eta0_minus = batch_means(mi, cfg.batches);
  stats.union_bound = batch_means(c0, cfg.batches);
  if (stats.samples > 0) {
    stats.plus_fraction = static_cast<double>(plus) / static_cast<double>(stats.samples * nb);
  }
  stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return stats;
}

}  // namespace kac
