#include "kac/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kac {

double acceptance_probability(Kernel kernel, double beta, double delta_h) {
  const double x = beta * delta_h;
  if (kernel == Kernel::Metropolis) return x <= 0.0 ? 1.0 : std::exp(-x);
  return 1.0 / (1.0 + std::exp(x));
}

ChainState::ChainState(const CouplingSpec& spec, SpinConfig initial, double beta_, std::uint64_t seed_,
                       std::uint64_t chain_id_, UpdateStrategy strategy)
    : coupling(spec),
      spins(std::move(initial)),
      cache(spec, spins, strategy),
      rng(seed_, chain_id_),
      seed(seed_),
      chain_id(chain_id_),
      beta(beta_) {
  if (spins.size() == 0) throw std::invalid_argument("ChainState: empty volume");
  if (!(beta >= 0.0)) throw std::invalid_argument("ChainState: beta must be non-negative");
}

bool mcmc_step(ChainState& s, Kernel kernel) {
  const auto i = static_cast<std::size_t>(s.rng.below(s.spins.size()));
  const double u = s.rng.uniform();
  ++s.step_count;
  const double dh = 2.0 * s.spins[i] * s.cache.field(i);
  const double x = s.beta * dh;
  bool accept;
  if (kernel == Kernel::Metropolis) {
    accept = x <= 0.0 || u < std::exp(-x);
  } else {
    accept = u < 1.0 / (1.0 + std::exp(x));
  }
  if (accept) apply_flip(s.spins, s.cache, i);
  return accept;
}

void mcmc_sweep(ChainState& s, Kernel kernel) {
  const std::size_t n = s.spins.size();
  for (std::size_t k = 0; k < n; ++k) mcmc_step(s, kernel);
}

void run_chain_streaming(const CouplingSpec& spec, const SpinConfig& initial, const ChainConfig& c,
                         const SnapshotSink& sink) {
  if (c.sweeps == 0) return;
  if (c.snapshot_every == 0) throw std::invalid_argument("run_chain: snapshot_every must be >= 1");
  ChainState s(spec, initial, c.beta, c.seed, c.chain_id, c.strategy);
  for (std::uint64_t k = 0; k < c.burn_in_sweeps; ++k) mcmc_sweep(s, c.kernel);
  for (std::uint64_t k = 1; k <= c.sweeps; ++k) {
    mcmc_sweep(s, c.kernel);
    if (k % c.snapshot_every == 0 && sink) sink(Snapshot{s.step_count, s.spins});
  }
}

std::vector<Snapshot> run_chain(const CouplingSpec& spec, const SpinConfig& initial, const ChainConfig& c,
                                const SnapshotSink& sink) {
  std::vector<Snapshot> out;
  run_chain_streaming(spec, initial, c, [&](const Snapshot& snap) {
    if (sink) sink(snap);
    out.push_back(snap);
  });
  return out;
}

SpinConfig config_from_index(const SpinConfig& shape, std::uint64_t index) {
  std::vector<Spin> v(shape.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = (index >> k) & 1U ? Spin{1} : Spin{-1};
  return SpinConfig(shape.first(), std::move(v), shape.boundary());
}

std::uint64_t index_of(const SpinConfig& sigma) {
  std::uint64_t idx = 0;
  for (std::size_t k = 0; k < sigma.size(); ++k) {
    if (sigma[k] == 1) idx |= std::uint64_t{1} << k;
  }
  return idx;
}

std::vector<double> energy_table(const CouplingSpec& spec, const SpinConfig& shape) {
  const std::size_t n = shape.size();
  if (n > kExactGibbsMaxSites) {
    throw std::invalid_argument("enumeration limited to " + std::to_string(kExactGibbsMaxSites) + " sites");
  }
  validate_boundary(spec, shape.boundary());
  const std::vector<double> hb = boundary_fields(spec, shape);
  std::vector<double> jm(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) jm[i * n + j] = spec(static_cast<std::int64_t>(j - i));
  }
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<double> e(count);
  std::vector<int> s(n);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    for (std::size_t k = 0; k < n; ++k) s[k] = (idx >> k) & 1U ? 1 : -1;
    double pair = 0.0;
    double edge = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) row += jm[i * n + j] * s[j];
      pair += s[i] * row;
      edge += s[i] * hb[i];
    }
    e[idx] = -pair - edge;
  }
  return e;
}

GibbsTable exact_gibbs(const CouplingSpec& spec, const SpinConfig& shape, double beta) {
  const std::vector<double> e = energy_table(spec, shape);
  double lmax = -beta * e[0];
  for (double v : e) lmax = std::max(lmax, -beta * v);
  GibbsTable t;
  t.prob.resize(e.size());
  double z = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    t.prob[k] = std::exp(-beta * e[k] - lmax);
    z += t.prob[k];
  }
  for (double& p : t.prob) p /= z;
  t.log_z = lmax + std::log(z);
  return t;
}

std::vector<double> transition_matrix(const CouplingSpec& spec, const SpinConfig& shape, double beta,
                                      Kernel kernel) {
  const std::size_t n = shape.size();
  if (n > 12) throw std::invalid_argument("transition_matrix: at most 12 sites");
  const std::size_t count = std::size_t{1} << n;
  std::vector<double> p(count * count, 0.0);
  for (std::size_t x = 0; x < count; ++x) {
    SpinConfig sigma = config_from_index(shape, x);
    FieldCache cache(spec, sigma);
    double stay = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = acceptance_probability(kernel, beta, delta_energy(sigma, cache, i)) /
                       static_cast<double>(n);
      p[x * count + (x ^ (std::size_t{1} << i))] = a;
      stay -= a;
    }
    p[x * count + x] = stay;
  }
  return p;
}

bool in_s_plus(const BoundaryCondition& bc, const Scales& scales, double m_beta, double psi, int sign) {
  for (const auto* w : {&bc.left, &bc.right}) {
    if (w->empty() || static_cast<std::int64_t>(w->size()) % scales.ellp != 0) return false;
    const EtaField eta = eta_field(*w, 0, scales, m_beta, psi, sign);
    for (int v : eta.values) {
      if (v != sign) return false;
    }
  }
  return true;
}

BoundarySample sample_boundary(BoundaryKind kind, std::uint64_t seed, const CouplingSpec& spec,
                               const Scales& scales, double m_beta, double psi, int max_retries) {
  if (kind != BoundaryKind::SampledSPlus && kind != BoundaryKind::SampledSMinus) {
    throw std::invalid_argument("sample_boundary: kind must be SampledSPlus or SampledSMinus");
  }
  const int sign = kind == BoundaryKind::SampledSPlus ? 1 : -1;
  const std::int64_t w = (spec.cutoff_window() + scales.ellp - 1) / scales.ellp * scales.ellp;
  const double p_plus = 0.5 * (1.0 + sign * m_beta);
  CounterRng rng(seed, 0x5EEDB0A7ULL);
  BoundarySample out;
  out.boundary.kind = kind;
  out.boundary.seed = seed;
  out.boundary.far_left = out.boundary.far_right = sign * m_beta;
  std::vector<Spin> block(static_cast<std::size_t>(scales.ellp));
  for (auto* win : {&out.boundary.left, &out.boundary.right}) {
    win->reserve(static_cast<std::size_t>(w));
    for (std::int64_t b = 0; b < w / scales.ellp; ++b) {
      int tries = 0;
      for (;;) {
        ++out.attempts;
        for (auto& s : block) s = rng.uniform() < p_plus ? Spin{1} : Spin{-1};
        const EtaField eta = eta_field(block, 0, scales, m_beta, psi, sign);
        if (eta.values[0] == sign) break;
        if (++tries > max_retries) {
          throw std::runtime_error("sample_boundary: retry budget of " + std::to_string(max_retries) +
                                   " exhausted; psi or ell_- too tight");
        }
      }
      win->insert(win->end(), block.begin(), block.end());
    }
  }
  if (!in_s_plus(out.boundary, scales, m_beta, psi, sign)) {
    throw std::logic_error("sample_boundary: produced window fails the membership check");
  }
  return out;
}

}  // namespace kac
