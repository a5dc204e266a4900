#include "kac/coarsegrain.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kac {

namespace {

std::int64_t round_pos(double x) { return static_cast<std::int64_t>(std::llround(x)); }

}  // namespace

Scales make_scales(const CouplingSpec& spec, std::int64_t ell0, std::int64_t ellm, std::int64_t ellp) {
  const std::int64_t k = spec.half_range();
  if (ell0 < 1 || ellm < 1 || ellp < 1) throw std::invalid_argument("scales must be positive");
  if (ellm % ell0 != 0 || ellp % ellm != 0) {
    throw std::invalid_argument("scales must satisfy ell0 | ellm | ellp, got (" + std::to_string(ell0) +
                                "," + std::to_string(ellm) + "," + std::to_string(ellp) + ")");
  }
  if (!(ellm < k && k < ellp)) {
    throw std::invalid_argument("scales must satisfy ellm < " + std::to_string(k) + " < ellp, got ellm=" +
                                std::to_string(ellm) + ", ellp=" + std::to_string(ellp));
  }
  Scales s;
  s.ell0 = ell0;
  s.ellm = ellm;
  s.ellp = ellp;
  s.gamma = spec.gamma();
  s.delta0 = static_cast<double>(ell0) * s.gamma;
  s.deltam = static_cast<double>(ellm) * s.gamma;
  s.deltap = static_cast<double>(ellp) * s.gamma;
  return s;
}

IdealScales ideal_scales(double gamma) {
  const double inv = 1.0 / gamma;
  const double lg = std::log(inv);
  return {std::sqrt(inv), inv / lg, std::pow(inv, 1.5) / (lg * lg * lg)};
}

Scales derive_scales(const CouplingSpec& spec, const ScaleOverrides& ov) {
  const std::int64_t k = spec.half_range();
  const IdealScales ideal = ideal_scales(spec.gamma());
  std::int64_t ell0 = ov.ell0.value_or(std::max<std::int64_t>(1, round_pos(ideal.ell0)));
  const bool ideal_ordered = ideal.ellm < static_cast<double>(k) && static_cast<double>(k) < ideal.ellp;

  if (ideal_ordered && !ov.ellm && !ov.ellp) {
    const std::int64_t ellm =
        ell0 * std::max<std::int64_t>(1, round_pos(ideal.ellm / static_cast<double>(ell0)));
    const std::int64_t ellp =
        ellm * std::max<std::int64_t>(2, round_pos(ideal.ellp / static_cast<double>(ellm)));
    if (ellm < k && k < ellp) return make_scales(spec, ell0, ellm, ellp);
  }

  std::int64_t ellm = 0;
  if (ov.ellm) {
    ellm = *ov.ellm;
  } else {
    if (ov.mult_m < 1) throw std::invalid_argument("mult_m must be >= 1");
    std::int64_t mult = ov.mult_m;
    while (ell0 * mult >= k) {
      if (mult > 1) {
        --mult;
      } else if (!ov.ell0 && ell0 > 1) {
        --ell0;
      } else {
        throw std::invalid_argument("no ellm below half_range " + std::to_string(k) +
                                    " is compatible with ell0 = " + std::to_string(ell0));
      }
    }
    ellm = ell0 * mult;
  }
  std::int64_t ellp = 0;
  if (ov.ellp) {
    ellp = *ov.ellp;
  } else {
    if (ov.mult_p < 1) throw std::invalid_argument("mult_p must be >= 1");
    ellp = ellm * ov.mult_p;
    while (ellp <= k) ellp += ellm;
  }
  return make_scales(spec, ell0, ellm, ellp);
}

MagProfile block_mag(std::span<const Spin> spins, std::int64_t origin, std::int64_t ell) {
  if (ell < 1) throw std::invalid_argument("block_mag: ell must be >= 1");
  const auto n = static_cast<std::int64_t>(spins.size());
  if (origin % ell != 0 || n % ell != 0) {
    throw std::invalid_argument("block_mag: volume is not aligned to blocks of " + std::to_string(ell));
  }
  MagProfile p;
  p.ell = ell;
  p.origin = origin;
  const std::int64_t nb = n / ell;
  p.sums.assign(static_cast<std::size_t>(nb), 0);
  p.values.assign(static_cast<std::size_t>(nb), 0.0);
  for (std::int64_t b = 0; b < nb; ++b) {
    std::int64_t s = 0;
    for (std::int64_t i = b * ell; i < (b + 1) * ell; ++i) s += spins[static_cast<std::size_t>(i)];
    p.sums[static_cast<std::size_t>(b)] = s;
    p.values[static_cast<std::size_t>(b)] = static_cast<double>(s) / static_cast<double>(ell);
  }
  return p;
}

MagProfile block_mag(const SpinConfig& sigma, std::int64_t ell) {
  return block_mag(sigma.values(), sigma.first(), ell);
}

int eta_of_block(std::span<const std::int64_t> sub_sums, std::int64_t ellm, double m_beta, double psi) {
  bool plus = true;
  bool minus = true;
  const double l = static_cast<double>(ellm);
  for (std::int64_t s : sub_sums) {
    const double v = static_cast<double>(s) / l;
    if (!(std::abs(v - m_beta) < psi)) plus = false;
    if (!(std::abs(v + m_beta) < psi)) minus = false;
  }
  if (plus && !minus) return 1;
  if (minus && !plus) return -1;
  return 0;
}

EtaField eta_field(std::span<const Spin> spins, std::int64_t origin, const Scales& scales,
                   double m_beta, double psi, int outside_sign) {
  if (!(psi > 0.0)) throw std::invalid_argument("eta_field: psi must be positive");
  const MagProfile sub = block_mag(spins, origin, scales.ellm);
  if (origin % scales.ellp != 0 || static_cast<std::int64_t>(spins.size()) % scales.ellp != 0) {
    throw std::invalid_argument("eta_field: volume is not aligned to ell_+ blocks");
  }
  const std::int64_t per = scales.ellp / scales.ellm;
  EtaField eta;
  eta.psi = psi;
  eta.outside_sign = outside_sign;
  const std::size_t nb = sub.sums.size() / static_cast<std::size_t>(per);
  eta.values.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    eta.values[b] = eta_of_block(
        std::span<const std::int64_t>(sub.sums).subspan(b * static_cast<std::size_t>(per),
                                                        static_cast<std::size_t>(per)),
        scales.ellm, m_beta, psi);
  }
  return eta;
}

EtaField eta_field(const SpinConfig& sigma, const Scales& scales, double m_beta, double psi) {
  return eta_field(sigma.values(), sigma.first(), scales, m_beta, psi, sigma.boundary().outside_sign());
}

EtaField flipped(const EtaField& eta) {
  EtaField out = eta;
  out.outside_sign = -eta.outside_sign;
  for (int& v : out.values) v = -v;
  return out;
}

ThetaField theta_field(const EtaField& eta) {
  ThetaField th;
  th.outside_sign = eta.outside_sign;
  th.blocks = eta.size();
  th.values.resize(static_cast<std::size_t>(th.blocks + 2));
  for (std::int64_t h = -1; h <= th.blocks; ++h) {
    const int a = eta.at(h - 1), b = eta.at(h), c = eta.at(h + 1);
    th.values[static_cast<std::size_t>(h + 1)] = (a == b && b == c && b != 0) ? b : 0;
  }
  return th;
}

IntervalClassification classify_intervals(const ThetaField& theta) {
  IntervalClassification out;
  const std::int64_t lo = theta.lo(), hi = theta.hi();
  for (std::int64_t h = lo; h < hi;) {
    if (theta.at(h) != 0) {
      ++h;
      continue;
    }
    std::int64_t k = h;
    while (k < hi && theta.at(k) == 0) ++k;
    out.rectangles.push_back({h, k});
    out.interface.push_back(theta.at(h - 1) != theta.at(k));
    h = k;
  }
  // Pieces between consecutive interface rectangles carry a single phase.
  std::int64_t start = lo;
  int phase = theta.outside_sign;
  auto emit = [&](std::int64_t a, std::int64_t b) {
    if (a >= b) return;
    (phase > 0 ? out.almost_positive : out.almost_negative).push_back({a, b});
  };
  for (std::size_t r = 0; r < out.rectangles.size(); ++r) {
    if (!out.interface[r]) continue;
    emit(start, out.rectangles[r].lo);
    start = out.rectangles[r].hi;
    phase = theta.at(out.rectangles[r].hi);
  }
  emit(start, hi);
  return out;
}

}  // namespace kac
