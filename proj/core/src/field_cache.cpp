#include "kac/field_cache.hpp"

namespace kac {

FieldCache::FieldCache(const CouplingSpec& spec, const SpinConfig& sigma, UpdateStrategy strategy,
                       std::size_t batch)
    : strategy_(strategy), batch_(batch == 0 ? 1 : batch), band_(spec.half_range()) {
  validate_boundary(spec, sigma.boundary());
  const std::size_t n = sigma.size();
  table_.assign(n, 0.0);
  for (std::size_t r = 1; r < n; ++r) table_[r] = spec(static_cast<std::int64_t>(r));
  base_ = boundary_fields(spec, sigma);
  const auto v = sigma.values();
  std::vector<double> inner(n, 0.0);
  for (std::size_t r = 1; r < n; ++r) {
    const double j = table_[r];
    for (std::size_t i = 0; i + r < n; ++i) {
      inner[i] += j * v[i + r];
      inner[i + r] += j * v[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) base_[i] += inner[i];
  hash_ = sigma.hash();
}

double FieldCache::field(std::size_t i) const {
  double h = base_[i];
  for (const Pending& p : pending_) {
    const std::size_t d = p.site > i ? p.site - i : i - p.site;
    if (static_cast<std::int64_t>(d) > band_) h += table_[d] * p.delta;
  }
  return h;
}

std::vector<double> FieldCache::fields() const {
  std::vector<double> h(base_.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = field(i);
  return h;
}

void FieldCache::require_sync(const SpinConfig& sigma) const {
  if (sigma.size() != base_.size() || sigma.hash() != hash_) {
    throw StaleCacheError("field cache is out of sync with the spin configuration");
  }
}

void FieldCache::record_flip(std::size_t i, Spin old_value, std::uint64_t new_hash) {
  const double delta = -2.0 * old_value;
  const std::size_t n = base_.size();
  const double* t = table_.data();
  double* h = base_.data();
  if (strategy_ == UpdateStrategy::Eager) {
    for (std::size_t j = 0; j < i; ++j) h[j] += t[i - j] * delta;
    for (std::size_t j = i + 1; j < n; ++j) h[j] += t[j - i] * delta;
  } else {
    const auto b = static_cast<std::size_t>(band_);
    const std::size_t lo = i > b ? i - b : 0;
    const std::size_t hi = i + b + 1 < n ? i + b + 1 : n;
    for (std::size_t j = lo; j < hi; ++j) {
      if (j != i) h[j] += t[j > i ? j - i : i - j] * delta;
    }
    pending_.push_back({i, delta});
    if (pending_.size() >= batch_) flush();
  }
  hash_ = new_hash;
}

void FieldCache::flush() {
  const std::size_t n = base_.size();
  const auto b = static_cast<std::size_t>(band_);
  const double* t = table_.data();
  double* h = base_.data();
  for (const Pending& p : pending_) {
    const std::size_t i = p.site;
    if (i > b) {
      for (std::size_t j = 0; j + b < i; ++j) h[j] += t[i - j] * p.delta;
    }
    for (std::size_t j = i + b + 1; j < n; ++j) h[j] += t[j - i] * p.delta;
  }
  pending_.clear();
}

std::vector<double> naive_fields(const CouplingSpec& spec, const SpinConfig& sigma) {
  const std::size_t n = sigma.size();
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = boundary_field(spec, sigma, i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      s += spec(static_cast<std::int64_t>(j > i ? j - i : i - j)) * sigma[j];
    }
    h[i] = s;
  }
  return h;
}

double delta_energy(const SpinConfig& sigma, const FieldCache& cache, std::size_t i) {
  cache.require_sync(sigma);
  return 2.0 * sigma[i] * cache.field(i);
}

void apply_flip(SpinConfig& sigma, FieldCache& cache, std::size_t i) {
  cache.require_sync(sigma);
  const Spin old = sigma[i];
  sigma.flip(i);
  cache.record_flip(i, old, sigma.hash());
}

}  // namespace kac
