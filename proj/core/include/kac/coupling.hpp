#pragma once

#include <cstdint>

namespace kac {

// Kac coupling: gamma for 1 <= r <= half_range, lambda / r^2 beyond.
class CouplingSpec {
 public:
  CouplingSpec() = default;

  // half_range = 1/(2 gamma); must be a positive even integer.
  static CouplingSpec from_half_range(std::int64_t half_range, double lambda);
  static CouplingSpec from_gamma(double gamma, double lambda);

  double gamma() const { return gamma_; }
  double lambda() const { return lambda_; }
  double lambda_tilde() const { return lambda_ * gamma_; }
  std::int64_t half_range() const { return half_range_; }

  // 10 * half_range sites are resolved explicitly around a finite volume.
  std::int64_t cutoff_window() const { return 10 * half_range_; }

  double operator()(std::int64_t r) const;

  // Same gamma with lambda = 0.
  CouplingSpec short_range() const;

  bool operator==(const CouplingSpec&) const = default;

 private:
  CouplingSpec(std::int64_t half_range, double lambda);

  std::int64_t half_range_ = 2;
  double gamma_ = 0.25;
  double lambda_ = 0.0;
};

double coupling(const CouplingSpec& spec, std::int64_t r);

// Sum_{r >= R} 1/r^2, absolute error below 1e-14 for every R >= 1.
double tail_sum(std::int64_t R);

// Sum_{r >= d} J(r) for d >= 1, closed form.
double coupling_tail(const CouplingSpec& spec, std::int64_t d);

// Sum_{k >= k0} J(k * ell) for k0 >= 1.
double block_coupling_tail(const CouplingSpec& spec, std::int64_t ell, std::int64_t k0);

}  // namespace kac
