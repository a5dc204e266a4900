#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "kac/coarsegrain.hpp"
#include "kac/coupling.hpp"
#include "kac/field_cache.hpp"
#include "kac/rng.hpp"
#include "kac/spin_config.hpp"

namespace kac {

enum class Kernel { Metropolis, Glauber };

double acceptance_probability(Kernel kernel, double beta, double delta_h);

struct ChainState {
  ChainState(const CouplingSpec& spec, SpinConfig initial, double beta, std::uint64_t seed,
             std::uint64_t chain_id = 0, UpdateStrategy strategy = UpdateStrategy::Eager);

  CouplingSpec coupling;
  SpinConfig spins;
  FieldCache cache;
  CounterRng rng;
  std::uint64_t seed;
  std::uint64_t chain_id;
  std::uint64_t step_count = 0;
  double beta;
};

// One proposal: uniform site, then one uniform for the acceptance test. Returns true on flip.
bool mcmc_step(ChainState& state, Kernel kernel);
void mcmc_sweep(ChainState& state, Kernel kernel);

struct Snapshot {
  std::uint64_t step = 0;
  SpinConfig spins;
};

struct ChainConfig {
  double beta = 1.0;
  Kernel kernel = Kernel::Metropolis;
  std::uint64_t seed = 1;
  std::uint64_t chain_id = 0;
  std::uint64_t burn_in_sweeps = 0;
  std::uint64_t sweeps = 0;
  std::uint64_t snapshot_every = 1;
  UpdateStrategy strategy = UpdateStrategy::Eager;
};

using SnapshotSink = std::function<void(const Snapshot&)>;

// Snapshots are taken after every snapshot_every recorded sweeps.
void run_chain_streaming(const CouplingSpec& spec, const SpinConfig& initial, const ChainConfig& config,
                         const SnapshotSink& sink);
std::vector<Snapshot> run_chain(const CouplingSpec& spec, const SpinConfig& initial,
                                const ChainConfig& config, const SnapshotSink& sink = {});

constexpr std::size_t kExactGibbsMaxSites = 20;

// Configuration index: bit k set <=> spin k is +1.
std::vector<double> energy_table(const CouplingSpec& spec, const SpinConfig& shape);

struct GibbsTable {
  std::vector<double> prob;
  double log_z = 0.0;
};

GibbsTable exact_gibbs(const CouplingSpec& spec, const SpinConfig& shape, double beta);

// Dense single-flip transition matrix, row-major, 2^n x 2^n (n <= 12).
std::vector<double> transition_matrix(const CouplingSpec& spec, const SpinConfig& shape, double beta,
                                      Kernel kernel);

SpinConfig config_from_index(const SpinConfig& shape, std::uint64_t index);
std::uint64_t index_of(const SpinConfig& sigma);

struct BoundarySample {
  BoundaryCondition boundary;
  std::uint64_t attempts = 0;
};

// Window of cutoff_window() sites rounded up to ell_+ blocks on each side, with eta = +1
// (SampledSPlus) or -1 (SampledSMinus) on every block. The volume is assumed to start on an
// ell_+ boundary. Throws when a block needs more than max_retries redraws.
BoundarySample sample_boundary(BoundaryKind kind, std::uint64_t seed, const CouplingSpec& spec,
                               const Scales& scales, double m_beta, double psi, int max_retries = 100);

bool in_s_plus(const BoundaryCondition& bc, const Scales& scales, double m_beta, double psi, int sign);

}  // namespace kac
