#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kac/coarsegrain.hpp"
#include "kac/coupling.hpp"
#include "kac/field_cache.hpp"
#include "kac/sampler.hpp"
#include "kac/spin_config.hpp"

namespace kac {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Flat key = value run description. Lengths are in sites unless the key says blocks.
struct RunConfig {
  std::int64_t half_range = 16;       // gamma = 1 / (2 half_range)
  double lambda = 5.0;
  double beta = 3.0;
  std::int64_t blocks = 64;           // volume length in ell_+ blocks
  BoundaryKind boundary = BoundaryKind::SampledSPlus;
  double psi_divisor = 10.0;          // psi = m_beta^2 / psi_divisor
  std::optional<std::int64_t> ell0;
  std::optional<std::int64_t> ellm;
  std::optional<std::int64_t> ellp;
  double varpi = 0.0;                 // 0 selects the smallest integer with varpi m_beta^2 > 10
  Kernel kernel = Kernel::Metropolis;
  UpdateStrategy strategy = UpdateStrategy::Eager;
  std::uint64_t seed = 1;
  std::uint64_t chains = 4;
  std::uint64_t sweeps = 1000;
  std::uint64_t burn_in = 200;
  std::uint64_t snapshot_every = 1;   // sweeps
  std::uint64_t batches = 10;         // batch means per chain
  bool record_contours = false;
  bool allow_subcritical = false;
  std::string out = "out";

  CouplingSpec coupling() const;
  Scales scales() const;
  double m_beta() const;
  double psi() const;
  double effective_varpi() const;
  std::int64_t sites() const;
  // First site of the volume; block blocks/2 starts at site 0.
  std::int64_t first_site() const;

  // Throws ConfigError on invalid values. Returns warnings (subcritical runs when allowed).
  std::vector<std::string> validate() const;

  std::string to_text() const;
  std::vector<std::pair<std::string, std::string>> entries() const;
};

RunConfig parse_config(std::string_view text, const RunConfig& base = {});
RunConfig load_config(const std::filesystem::path& path, const RunConfig& base = {});
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

std::string_view to_string(Kernel kernel);
Kernel parse_kernel(std::string_view name);
std::string_view to_string(UpdateStrategy strategy);
UpdateStrategy parse_strategy(std::string_view name);

}  // namespace kac
