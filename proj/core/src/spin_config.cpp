#include "kac/spin_config.hpp"

#include <stdexcept>
#include <string>

namespace kac {

std::string_view to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::PlusOnes: return "plus";
    case BoundaryKind::MinusOnes: return "minus";
    case BoundaryKind::SampledSPlus: return "splus";
    case BoundaryKind::SampledSMinus: return "sminus";
    case BoundaryKind::Explicit: return "explicit";
    case BoundaryKind::Free: return "free";
  }
  return "free";
}

BoundaryKind parse_boundary_kind(std::string_view name) {
  if (name == "plus") return BoundaryKind::PlusOnes;
  if (name == "minus") return BoundaryKind::MinusOnes;
  if (name == "splus") return BoundaryKind::SampledSPlus;
  if (name == "sminus") return BoundaryKind::SampledSMinus;
  if (name == "explicit") return BoundaryKind::Explicit;
  if (name == "free") return BoundaryKind::Free;
  throw std::invalid_argument("unknown boundary kind '" + std::string(name) + "'");
}

BoundaryCondition BoundaryCondition::plus_ones() {
  BoundaryCondition bc;
  bc.kind = BoundaryKind::PlusOnes;
  bc.far_left = bc.far_right = 1.0;
  return bc;
}

BoundaryCondition BoundaryCondition::minus_ones() {
  BoundaryCondition bc;
  bc.kind = BoundaryKind::MinusOnes;
  bc.far_left = bc.far_right = -1.0;
  return bc;
}

BoundaryCondition BoundaryCondition::free() { return BoundaryCondition{}; }

BoundaryCondition BoundaryCondition::explicit_window(std::vector<Spin> left, std::vector<Spin> right,
                                                     double far_left, double far_right) {
  BoundaryCondition bc;
  bc.kind = BoundaryKind::Explicit;
  bc.left = std::move(left);
  bc.right = std::move(right);
  bc.far_left = far_left;
  bc.far_right = far_right;
  return bc;
}

int BoundaryCondition::outside_sign() const {
  switch (kind) {
    case BoundaryKind::PlusOnes:
    case BoundaryKind::SampledSPlus: return 1;
    case BoundaryKind::MinusOnes:
    case BoundaryKind::SampledSMinus: return -1;
    default: break;
  }
  const double f = far_left + far_right;
  return f < 0.0 ? -1 : 1;
}

double BoundaryCondition::left_at(std::int64_t d) const {
  const auto n = static_cast<std::int64_t>(left.size());
  return d <= n ? static_cast<double>(left[static_cast<std::size_t>(n - d)]) : far_left;
}

double BoundaryCondition::right_at(std::int64_t d) const {
  const auto n = static_cast<std::int64_t>(right.size());
  return d <= n ? static_cast<double>(right[static_cast<std::size_t>(d - 1)]) : far_right;
}

BoundaryCondition BoundaryCondition::flipped() const {
  BoundaryCondition bc = *this;
  switch (kind) {
    case BoundaryKind::PlusOnes: bc.kind = BoundaryKind::MinusOnes; break;
    case BoundaryKind::MinusOnes: bc.kind = BoundaryKind::PlusOnes; break;
    case BoundaryKind::SampledSPlus: bc.kind = BoundaryKind::SampledSMinus; break;
    case BoundaryKind::SampledSMinus: bc.kind = BoundaryKind::SampledSPlus; break;
    default: break;
  }
  for (auto& s : bc.left) s = static_cast<Spin>(-s);
  for (auto& s : bc.right) s = static_cast<Spin>(-s);
  bc.far_left = -far_left;
  bc.far_right = -far_right;
  return bc;
}

std::uint64_t site_key(std::size_t i) {
  std::uint64_t z = static_cast<std::uint64_t>(i) + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SpinConfig::SpinConfig(std::int64_t first, std::vector<Spin> values, BoundaryCondition boundary)
    : first_(first), values_(std::move(values)), boundary_(std::move(boundary)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] != 1 && values_[i] != -1) {
      throw std::invalid_argument("spin values must be +1 or -1");
    }
    if (values_[i] == 1) hash_ ^= site_key(i);
  }
}

SpinConfig SpinConfig::uniform(std::int64_t first, std::size_t length, Spin value,
                               BoundaryCondition boundary) {
  return SpinConfig(first, std::vector<Spin>(length, value), std::move(boundary));
}

void SpinConfig::flip(std::size_t i) {
  values_[i] = static_cast<Spin>(-values_[i]);
  hash_ ^= site_key(i);
}

void SpinConfig::set(std::size_t i, Spin value) {
  if (value != 1 && value != -1) throw std::invalid_argument("spin values must be +1 or -1");
  if (values_[i] != value) flip(i);
}

SpinConfig SpinConfig::flipped() const {
  std::vector<Spin> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<Spin>(-values_[i]);
  return SpinConfig(first_, std::move(v), boundary_.flipped());
}

void validate_boundary(const CouplingSpec& spec, const BoundaryCondition& bc) {
  if (bc.kind != BoundaryKind::Explicit && bc.kind != BoundaryKind::SampledSPlus &&
      bc.kind != BoundaryKind::SampledSMinus) {
    return;
  }
  const auto w = static_cast<std::size_t>(spec.cutoff_window());
  if (bc.left.size() < w || bc.right.size() < w) {
    throw std::invalid_argument("boundary window shorter than the cutoff window of " +
                                std::to_string(w) + " sites");
  }
}

double boundary_field(const CouplingSpec& spec, const SpinConfig& sigma, std::size_t i) {
  const BoundaryCondition& bc = sigma.boundary();
  const auto n = static_cast<std::int64_t>(sigma.size());
  const auto ii = static_cast<std::int64_t>(i);
  const auto nl = static_cast<std::int64_t>(bc.left.size());
  const auto nr = static_cast<std::int64_t>(bc.right.size());
  double h = 0.0;
  for (std::int64_t d = 1; d <= nl; ++d) h += spec(ii + d) * bc.left[static_cast<std::size_t>(nl - d)];
  if (bc.far_left != 0.0) h += bc.far_left * coupling_tail(spec, ii + nl + 1);
  const std::int64_t dr = n - 1 - ii;
  for (std::int64_t d = 1; d <= nr; ++d) h += spec(dr + d) * bc.right[static_cast<std::size_t>(d - 1)];
  if (bc.far_right != 0.0) h += bc.far_right * coupling_tail(spec, dr + nr + 1);
  return h;
}

std::vector<double> boundary_fields(const CouplingSpec& spec, const SpinConfig& sigma) {
  std::vector<double> h(sigma.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = boundary_field(spec, sigma, i);
  return h;
}

double hamiltonian(const CouplingSpec& spec, const SpinConfig& sigma) {
  validate_boundary(spec, sigma.boundary());
  const auto v = sigma.values();
  const std::size_t n = v.size();
  double bulk = 0.0;
  for (std::size_t r = 1; r < n; ++r) {
    long long s = 0;
    for (std::size_t i = 0; i + r < n; ++i) s += v[i] * v[i + r];
    bulk += spec(static_cast<std::int64_t>(r)) * static_cast<double>(s);
  }
  double edge = 0.0;
  for (std::size_t i = 0; i < n; ++i) edge += v[i] * boundary_field(spec, sigma, i);
  return -bulk - edge;
}

}  // namespace kac
