#include "kac/coupling.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kac {

CouplingSpec::CouplingSpec(std::int64_t half_range, double lambda)
    : half_range_(half_range), gamma_(0.5 / static_cast<double>(half_range)), lambda_(lambda) {}

CouplingSpec CouplingSpec::from_half_range(std::int64_t half_range, double lambda) {
  if (half_range <= 0 || half_range % 2 != 0) {
    throw std::invalid_argument("half_range must be a positive even integer, got " +
                                std::to_string(half_range));
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be finite and non-negative");
  }
  return CouplingSpec(half_range, lambda);
}

CouplingSpec CouplingSpec::from_gamma(double gamma, double lambda) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
  const double k = 0.5 / gamma;
  const double kr = std::round(k);
  if (std::abs(k - kr) > 1e-9 * kr) {
    throw std::invalid_argument("gamma must be of the form 1/(2k)");
  }
  return from_half_range(static_cast<std::int64_t>(kr), lambda);
}

double CouplingSpec::operator()(std::int64_t r) const {
  if (r < 0) r = -r;
  if (r == 0) throw std::invalid_argument("coupling: r = 0 has no self-coupling");
  if (r <= half_range_) return gamma_;
  const double rd = static_cast<double>(r);
  return lambda_ / (rd * rd);
}

CouplingSpec CouplingSpec::short_range() const { return CouplingSpec(half_range_, 0.0); }

double coupling(const CouplingSpec& spec, std::int64_t r) { return spec(r); }

namespace {

// Asymptotic expansion of the trigamma function for x >= 64.
double trigamma_asymptotic(double x) {
  const double t = 1.0 / x;
  const double t2 = t * t;
  double s = 5.0 / 66.0;
  s = s * t2 - 1.0 / 30.0;
  s = s * t2 + 1.0 / 42.0;
  s = s * t2 - 1.0 / 30.0;
  s = s * t2 + 1.0 / 6.0;
  return t + 0.5 * t2 + t * t2 * s;
}

}  // namespace

double tail_sum(std::int64_t R) {
  if (R < 1) throw std::invalid_argument("tail_sum: R must be >= 1");
  constexpr std::int64_t kShift = 64;
  if (R >= kShift) return trigamma_asymptotic(static_cast<double>(R));
  double s = trigamma_asymptotic(static_cast<double>(kShift));
  for (std::int64_t r = kShift - 1; r >= R; --r) {
    const double rd = static_cast<double>(r);
    s += 1.0 / (rd * rd);
  }
  return s;
}

double coupling_tail(const CouplingSpec& spec, std::int64_t d) {
  if (d < 1) throw std::invalid_argument("coupling_tail: d must be >= 1");
  const std::int64_t k = spec.half_range();
  double s = 0.0;
  if (d <= k) s += spec.gamma() * static_cast<double>(k - d + 1);
  if (spec.lambda() > 0.0) s += spec.lambda() * tail_sum(d > k ? d : k + 1);
  return s;
}

double block_coupling_tail(const CouplingSpec& spec, std::int64_t ell, std::int64_t k0) {
  if (ell < 1 || k0 < 1) throw std::invalid_argument("block_coupling_tail: ell, k0 must be >= 1");
  const std::int64_t k = spec.half_range();
  const std::int64_t kmax = k / ell;  // last k with k*ell <= half_range
  double s = 0.0;
  if (k0 <= kmax) s += spec.gamma() * static_cast<double>(kmax - k0 + 1);
  if (spec.lambda() > 0.0) {
    const std::int64_t first = k0 > kmax ? k0 : kmax + 1;
    const double e = static_cast<double>(ell);
    s += spec.lambda() / (e * e) * tail_sum(first);
  }
  return s;
}

}  // namespace kac
