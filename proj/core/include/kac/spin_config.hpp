#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "kac/coupling.hpp"

namespace kac {

using Spin = std::int8_t;

enum class BoundaryKind { PlusOnes, MinusOnes, SampledSPlus, SampledSMinus, Explicit, Free };

std::string_view to_string(BoundaryKind kind);
BoundaryKind parse_boundary_kind(std::string_view name);

// Spins outside [a,b): an explicit window on each side, then a constant far value.
// left holds sites [a - left.size(), a) in increasing order, right holds [b, b + right.size()).
struct BoundaryCondition {
  BoundaryKind kind = BoundaryKind::Free;
  std::uint64_t seed = 0;
  std::vector<Spin> left;
  std::vector<Spin> right;
  double far_left = 0.0;
  double far_right = 0.0;

  static BoundaryCondition plus_ones();
  static BoundaryCondition minus_ones();
  static BoundaryCondition free();
  static BoundaryCondition explicit_window(std::vector<Spin> left, std::vector<Spin> right,
                                           double far_left = 0.0, double far_right = 0.0);

  // +1 or -1 for the phase imposed outside; Free and Explicit report the sign of the far
  // values, +1 when those vanish.
  int outside_sign() const;

  // Value of the boundary spin (or far mean) at distance d >= 1 to the left / right of the volume.
  double left_at(std::int64_t d) const;
  double right_at(std::int64_t d) const;

  BoundaryCondition flipped() const;

  bool operator==(const BoundaryCondition&) const = default;
};

class SpinConfig {
 public:
  SpinConfig() = default;
  SpinConfig(std::int64_t first, std::vector<Spin> values, BoundaryCondition boundary);

  static SpinConfig uniform(std::int64_t first, std::size_t length, Spin value,
                            BoundaryCondition boundary);

  std::int64_t first() const { return first_; }
  std::int64_t end() const { return first_ + static_cast<std::int64_t>(values_.size()); }
  std::size_t size() const { return values_.size(); }

  Spin operator[](std::size_t i) const { return values_[i]; }
  std::span<const Spin> values() const { return values_; }
  const BoundaryCondition& boundary() const { return boundary_; }
  void set_boundary(BoundaryCondition boundary) { boundary_ = std::move(boundary); }

  void flip(std::size_t i);
  void set(std::size_t i, Spin value);

  // Zobrist-style hash of the spin values, maintained incrementally.
  std::uint64_t hash() const { return hash_; }

  // Global flip of spins and boundary.
  SpinConfig flipped() const;

  bool operator==(const SpinConfig& o) const {
    return first_ == o.first_ && values_ == o.values_ && boundary_ == o.boundary_;
  }

 private:
  std::int64_t first_ = 0;
  std::vector<Spin> values_;
  BoundaryCondition boundary_;
  std::uint64_t hash_ = 0;
};

std::uint64_t site_key(std::size_t i);

// Throws unless the explicit windows cover cutoff_window() sites on each side.
void validate_boundary(const CouplingSpec& spec, const BoundaryCondition& bc);

// hbar(i) = Sum_{j outside} J(|i-j|) sigmabar(j), i is an index into the volume.
double boundary_field(const CouplingSpec& spec, const SpinConfig& sigma, std::size_t i);
std::vector<double> boundary_fields(const CouplingSpec& spec, const SpinConfig& sigma);

// H = -1/2 Sum_{i != j in volume} J sigma_i sigma_j - Sum_i sigma_i hbar(i).
double hamiltonian(const CouplingSpec& spec, const SpinConfig& sigma);

}  // namespace kac
