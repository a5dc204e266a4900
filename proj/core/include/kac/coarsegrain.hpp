#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kac/coupling.hpp"
#include "kac/spin_config.hpp"

namespace kac {

struct Scales {
  std::int64_t ell0 = 1;
  std::int64_t ellm = 1;
  std::int64_t ellp = 2;
  double gamma = 0.25;
  double delta0 = 0.25;
  double deltam = 0.25;
  double deltap = 0.5;
};

struct ScaleOverrides {
  std::optional<std::int64_t> ell0;
  std::optional<std::int64_t> ellm;
  std::optional<std::int64_t> ellp;
  std::int64_t mult_m = 2;
  std::int64_t mult_p = 4;
};

// Validated triple: ell0 | ellm | ellp and ellm < half_range < ellp.
Scales make_scales(const CouplingSpec& spec, std::int64_t ell0, std::int64_t ellm, std::int64_t ellp);
Scales derive_scales(const CouplingSpec& spec, const ScaleOverrides& overrides = {});

struct IdealScales {
  double ell0, ellm, ellp;
};
IdealScales ideal_scales(double gamma);

// Block magnetizations on scale ell; block k covers sites [origin + k ell, origin + (k+1) ell).
struct MagProfile {
  std::int64_t ell = 1;
  std::int64_t origin = 0;
  std::vector<std::int64_t> sums;
  std::vector<double> values;
};

MagProfile block_mag(std::span<const Spin> spins, std::int64_t origin, std::int64_t ell);
MagProfile block_mag(const SpinConfig& sigma, std::int64_t ell);

// One value per ell_+ block of the volume; outside_sign extends the field beyond it.
struct EtaField {
  double psi = 0.0;
  int outside_sign = 1;
  std::vector<int> values;

  std::int64_t size() const { return static_cast<std::int64_t>(values.size()); }
  int at(std::int64_t block) const {
    return block < 0 || block >= size() ? outside_sign : values[static_cast<std::size_t>(block)];
  }
};

int eta_of_block(std::span<const std::int64_t> sub_sums, std::int64_t ellm, double m_beta, double psi);
EtaField eta_field(std::span<const Spin> spins, std::int64_t origin, const Scales& scales,
                   double m_beta, double psi, int outside_sign);
EtaField eta_field(const SpinConfig& sigma, const Scales& scales, double m_beta, double psi);
EtaField flipped(const EtaField& eta);

// Theta on blocks -1 .. n (one halo block on each side), stored with offset 1.
struct ThetaField {
  int outside_sign = 1;
  std::int64_t blocks = 0;
  std::vector<int> values;

  std::int64_t lo() const { return -1; }
  std::int64_t hi() const { return blocks + 1; }
  int at(std::int64_t block) const {
    return block < -1 || block > blocks ? outside_sign : values[static_cast<std::size_t>(block + 1)];
  }
  bool operator==(const ThetaField&) const = default;
};

ThetaField theta_field(const EtaField& eta);

// Half-open interval of ell_+ blocks.
struct BlockInterval {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::int64_t length() const { return hi - lo; }
  bool operator==(const BlockInterval&) const = default;
  auto operator<=>(const BlockInterval&) const = default;
};

struct IntervalClassification {
  std::vector<BlockInterval> rectangles;
  std::vector<bool> interface;
  std::vector<BlockInterval> almost_positive;
  std::vector<BlockInterval> almost_negative;
};

IntervalClassification classify_intervals(const ThetaField& theta);

}  // namespace kac
