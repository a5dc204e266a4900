#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kac/freeenergy.hpp"
#include "kac/meanfield.hpp"

namespace kac {

PeierlsParams make_peierls_params(double beta, const CouplingSpec& coupling, const Scales& scales, double psi,
                                  double varpi, double epsilon, double j_tilde, double b_bar, double rho) {
  PeierlsParams p;
  p.beta = beta;
  p.m_beta = solve_m_beta(beta);
  if (p.m_beta == 0.0) throw std::invalid_argument("Peierls parameters need beta > 1");
  p.varpi = varpi;
  p.psi = psi;
  p.b_bar = b_bar;
  p.rho = rho;
  p.epsilon = epsilon;
  p.j_tilde = j_tilde;
  p.lambda_tilde = coupling.lambda_tilde();
  p.gamma = coupling.gamma();
  p.delta_minus = scales.deltam;
  p.delta_plus = scales.deltap;
  p.ell_plus = scales.ellp;
  p.ell_minus = scales.ellm;
  const double m = p.m_beta;
  p.a_beta = (1.0 - 10.0 / (varpi * m * m)) * (1.0 - psi / m) * (1.0 - psi / m);
  p.b_beta = 2.0 * coupling.lambda() * beta * m * m * p.a_beta;

  double c = beta / p.gamma * (j_tilde - 5.0 * p.lambda_tilde * std::log(5.0));
  const double per_block = beta * epsilon * static_cast<double>(scales.ellm) / 7.0 - std::log(3.0);
  for (int n = 2; n <= 100000; ++n) {
    c = std::min(c, n * per_block - p.b_beta * std::log(n * p.delta_plus));
  }
  p.c_gamma = c;
  return p;
}

double peierls_weight(const PeierlsParams& p, const Contour& contour) {
  const double m = p.m_beta - p.psi;
  double w = 0.0;
  for (const Element& e : contour.elements) {
    const auto len = static_cast<double>(e.length());
    if (e.kind == ElementKind::Rectangle) {
      w += p.delta_minus * p.epsilon / 7.0 * len;
    } else {
      w += 2.0 * p.lambda_tilde * m * m * std::log(len * p.delta_plus) + p.j_tilde -
           5.0 * p.lambda_tilde * std::log(5.0);
    }
  }
  return w;
}

double peierls_weight_damped(const PeierlsParams& p, const Contour& contour) {
  return peierls_weight(p, contour) * (1.0 - 10.0 / (p.varpi * p.m_beta * p.m_beta));
}

std::pair<double, double> sarava_condition(const PeierlsParams& p, double b, int terms) {
  const double e = 6.0 - b * (1.0 - p.rho) / 2.0;
  double lhs = 0.0;
  for (int m = terms; m >= 1; --m) lhs += std::pow(static_cast<double>(m), e);
  return {lhs, std::exp(p.c_gamma) / (2.0 * p.varpi)};
}

BlockInteraction block_interaction_diff(const CouplingSpec& coupling, const MagProfile& m, SiteInterval a,
                                        SiteInterval b, const Scales& scales) {
  const std::int64_t l0 = scales.ell0, lm = scales.ellm, lp = scales.ellp;
  if (m.ell != l0) throw std::invalid_argument("profile is not on the ell0 scale");
  auto check = [&](SiteInterval s) {
    if (s.lo >= s.hi || (s.lo - m.origin) % lp != 0 || (s.hi - m.origin) % lp != 0 || s.lo < m.origin ||
        s.hi > m.origin + l0 * static_cast<std::int64_t>(m.values.size())) {
      throw std::invalid_argument("interval is not ell_+-measurable inside the profile");
    }
  };
  check(a);
  check(b);
  if (a.lo < b.hi && b.lo < a.hi) throw std::invalid_argument("intervals overlap");
  auto value = [&](std::int64_t site) { return m.values[static_cast<std::size_t>((site - m.origin) / l0)]; };
  auto coarse = [&](std::int64_t site) {
    double s = 0.0;
    for (std::int64_t x = site; x < site + lm; x += l0) s += value(x);
    return s * static_cast<double>(l0) / static_cast<double>(lm);
  };
  BlockInteraction r;
  for (std::int64_t x = a.lo; x < a.hi; x += l0) {
    for (std::int64_t y = b.lo; y < b.hi; y += l0) r.fine += coupling(std::abs(x - y)) * value(x) * value(y);
  }
  r.fine *= static_cast<double>(l0 * l0);
  for (std::int64_t u = a.lo; u < a.hi; u += lm) {
    const double mu = coarse(u);
    for (std::int64_t v = b.lo; v < b.hi; v += lm) r.coarse += coupling(std::abs(u - v)) * mu * coarse(v);
  }
  r.coarse *= static_cast<double>(lm * lm);
  r.difference = std::abs(r.fine - r.coarse);
  r.adjacent = a.hi == b.lo || b.hi == a.lo;
  r.scale = static_cast<double>(lm);
  r.deltam = scales.deltam;
  r.lambda = coupling.lambda();
  return r;
}

}  // namespace kac
