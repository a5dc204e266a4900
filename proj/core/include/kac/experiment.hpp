#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "kac/config.hpp"
#include "kac/geometry.hpp"

namespace kac {

struct Estimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct ContourRecord {
  std::uint64_t chain = 0;
  std::uint64_t step = 0;
  std::vector<Contour> contours;
};

struct RunStats {
  std::uint64_t samples = 0;
  std::int64_t origin_block = 0;
  double m_beta = 0.0;
  double psi = 0.0;
  Estimate sigma0;                                // <sigma_0>
  Estimate magnetization;                         // volume average
  Estimate p_eta0_not_plus;
  Estimate p_eta0_minus;
  Estimate union_bound;                           // frequency of a contour containing block 0
  double plus_fraction = 0.0;                     // share of eta = +1 over blocks and samples
  std::vector<std::array<std::uint64_t, 3>> eta_histogram;  // per block: eta = -1, 0, +1
  std::map<std::int64_t, std::uint64_t> contour_sizes;
  std::uint64_t contours = 0;
  std::uint64_t steps = 0;
  std::uint64_t boundary_attempts = 0;
  double seconds = 0.0;
  std::vector<std::string> warnings;
  std::vector<ContourRecord> contour_records;
  std::uint64_t final_step = 0;
  SpinConfig final_state;  // last snapshot of chain 0
};

// Batch-means estimate from per-chain series: each chain is cut into `batches` batches and the
// standard error is taken over all batch means.
Estimate batch_means(const std::vector<std::vector<double>>& series, std::uint64_t batches);

RunStats run_experiment(const RunConfig& config);

// Boundary condition for a configuration; sampled kinds use the config seed.
BoundarySample make_boundary(const RunConfig& config);

}  // namespace kac
