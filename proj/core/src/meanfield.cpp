#include "kac/meanfield.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kac {

double solve_m_beta(double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("solve_m_beta: beta must be nonnegative");
  if (beta <= 1.0) return 0.0;
  // g(m) = tanh(beta m) - m is positive on (0, m_beta) and negative above.
  double hi = std::nextafter(1.0, 0.0);
  if (std::tanh(beta * hi) >= hi) return hi;
  double lo = 0.5;
  while (std::tanh(beta * lo) - lo <= 0.0 && lo > 1e-300) lo *= 0.5;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (std::tanh(beta * mid) - mid > 0.0) lo = mid; else hi = mid;
  }
  double m = 0.5 * (lo + hi);
  // Fixed-point polish; contraction factor beta (1 - m^2) < 1 at the root.
  for (int it = 0; it < 8; ++it) {
    const double next = std::tanh(beta * m);
    if (next >= 1.0) break;
    m = next;
  }
  return m;
}

MeanFieldPoint mean_field_point(double beta) { return {beta, solve_m_beta(beta)}; }

double entropy(double m, bool closure) {
  if (std::abs(m) >= 1.0) {
    if (closure && std::abs(m) == 1.0) return 0.0;
    throw std::domain_error("entropy: |m| must be < 1");
  }
  const double p = 0.5 * (1.0 + m);
  const double q = 0.5 * (1.0 - m);
  return -p * std::log(p) - q * std::log(q);
}

double f_beta(double beta, double m, bool closure) {
  return -0.5 * m * m - entropy(m, closure) / beta;
}

double f_beta_prime(double beta, double m) {
  if (std::abs(m) >= 1.0) throw std::domain_error("f_beta_prime: |m| must be < 1");
  return -m + std::atanh(m) / beta;
}

double beta_tilde(double b) {
  if (!(b > 0.0)) throw std::invalid_argument("beta_tilde: b must be positive");
  auto g = [](double beta) {
    const double m = solve_m_beta(beta);
    return beta * m * m;
  };
  double lo = 1.0;
  double hi = 2.0;
  while (g(hi) < b) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) < b) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double beta_bar(double lambda, double b_bar) {
  if (!(lambda > 0.0) || !(b_bar > 0.0)) throw std::invalid_argument("beta_bar: lambda, b_bar must be positive");
  return beta_tilde(b_bar / lambda);
}

double dobrushin_lower(double gamma, double lambda) { return 1.0 / (1.0 + 4.0 * lambda * gamma); }

int default_varpi(double beta) {
  const double m = solve_m_beta(beta);
  if (m <= 0.0) throw std::invalid_argument("default_varpi: needs beta > 1");
  const double v = 10.0 / (m * m);
  int w = static_cast<int>(std::floor(v)) + 1;
  while (static_cast<double>(w - 1) * m * m > 10.0) --w;
  return w;
}

}  // namespace kac
