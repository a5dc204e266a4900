#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "kac/coupling.hpp"
#include "kac/spin_config.hpp"

namespace kac {

enum class UpdateStrategy { Eager, Lazy };

class StaleCacheError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Local fields h(i) = Sum_{j != i} J(|i-j|) sigma(j) + hbar(i).
// Eager updates every field on a flip; Lazy updates the Kac band at once and queues the
// long-range part, flushing after `batch` flips.
class FieldCache {
 public:
  FieldCache(const CouplingSpec& spec, const SpinConfig& sigma,
             UpdateStrategy strategy = UpdateStrategy::Eager, std::size_t batch = 64);

  UpdateStrategy strategy() const { return strategy_; }
  std::size_t size() const { return base_.size(); }

  double field(std::size_t i) const;
  std::vector<double> fields() const;

  // Hash of the configuration the cache was last synchronized with.
  std::uint64_t synced_hash() const { return hash_; }
  void require_sync(const SpinConfig& sigma) const;

  // Apply the field change caused by flipping site i away from old_value.
  void record_flip(std::size_t i, Spin old_value, std::uint64_t new_hash);
  void flush();

  std::size_t pending() const { return pending_.size(); }

 private:
  UpdateStrategy strategy_;
  std::size_t batch_;
  std::int64_t band_;
  std::vector<double> table_;
  std::vector<double> base_;
  struct Pending {
    std::size_t site;
    double delta;
  };
  std::vector<Pending> pending_;
  std::uint64_t hash_ = 0;
};

// Naive O(N^2) fields, used as a reference.
std::vector<double> naive_fields(const CouplingSpec& spec, const SpinConfig& sigma);

double delta_energy(const SpinConfig& sigma, const FieldCache& cache, std::size_t i);
void apply_flip(SpinConfig& sigma, FieldCache& cache, std::size_t i);

}  // namespace kac
