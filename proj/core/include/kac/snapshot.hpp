#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "kac/coupling.hpp"
#include "kac/spin_config.hpp"

namespace kac {

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::uint16_t kSnapshotVersion = 1;

// KAC1 layout, little-endian: magic "KAC1", u16 version, u64 gamma numerator, u64 gamma
// denominator, f64 lambda, f64 beta, i64 first site, i64 end site, u64 step, u64 seed,
// spins bit-packed LSB-first (1 = +1), u32 CRC32 of everything before it.
struct SnapshotRecord {
  CouplingSpec coupling;
  double beta = 0.0;
  std::uint64_t step = 0;
  std::uint64_t seed = 0;
  SpinConfig spins;
};

std::vector<std::uint8_t> encode_snapshot(const SnapshotRecord& rec);
SnapshotRecord decode_snapshot(const std::vector<std::uint8_t>& bytes);

void write_snapshot(const std::filesystem::path& path, const SnapshotRecord& rec);
SnapshotRecord read_snapshot(const std::filesystem::path& path);

}  // namespace kac
