#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kac/freeenergy.hpp"
#include "kac/meanfield.hpp"
#include "kac/rng.hpp"

namespace kac {

namespace {

constexpr double kBox = 1.0 - 1e-10;

struct Slab {
  double lo = -kBox;
  double hi = kBox;
};

// Euclidean projection onto the box intersected with lo <= mean <= hi.
void project_group(std::span<double> v, Slab s) {
  auto mean_at = [&](double tau) {
    double a = 0.0;
    for (double x : v) a += std::clamp(x - tau, -kBox, kBox);
    return a / static_cast<double>(v.size());
  };
  double target;
  const double m0 = mean_at(0.0);
  if (m0 < s.lo) {
    target = s.lo;
  } else if (m0 > s.hi) {
    target = s.hi;
  } else {
    for (double& x : v) x = std::clamp(x, -kBox, kBox);
    return;
  }
  double a = *std::min_element(v.begin(), v.end()) - 2.0;
  double b = *std::max_element(v.begin(), v.end()) + 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mean_at(mid) > target) a = mid; else b = mid;
  }
  const double tau = 0.5 * (a + b);
  for (double& x : v) x = std::clamp(x - tau, -kBox, kBox);
}

struct Component {
  std::vector<Slab> slabs;  // one per ell_- sub-block
};

class Problem {
 public:
  Problem(const ProfileContext& ctx, const Scales& scales)
      : f_(ctx, static_cast<std::size_t>(scales.ellp / scales.ell0), std::nullopt),
        mb_(solve_m_beta(ctx.beta)),
        group_(static_cast<std::size_t>(scales.ellm / scales.ell0)) {}

  std::size_t size() const { return f_.blocks(); }
  std::size_t group() const { return group_; }

  double value(std::span<const double> m) const { return f_.local_excess(m, mb_) + f_.terms(m).interior; }
  void gradient(std::span<const double> m, std::span<double> g) const { f_.gradient(m, g); }

  void project(std::span<double> m, const Component& c) const {
    for (std::size_t j = 0; j < c.slabs.size(); ++j) project_group(m.subspan(j * group_, group_), c.slabs[j]);
  }

  bool feasible(std::span<const double> m, const Component& c) const {
    for (std::size_t j = 0; j < c.slabs.size(); ++j) {
      double a = 0.0;
      for (std::size_t x = 0; x < group_; ++x) {
        const double v = m[j * group_ + x];
        if (std::abs(v) > kBox + 1e-15) return false;
        a += v;
      }
      a /= static_cast<double>(group_);
      if (a < c.slabs[j].lo - 1e-12 || a > c.slabs[j].hi + 1e-12) return false;
    }
    return true;
  }

 private:
  Functional f_;
  double mb_;
  std::size_t group_;
};

struct Minimum {
  double value = std::numeric_limits<double>::infinity();
  std::vector<double> argmin;
};

Minimum descend(const Problem& p, const Component& c, std::vector<double> x, const EpsilonOptions& opt) {
  const std::size_t n = p.size();
  p.project(x, c);
  std::vector<double> g(n), y(n);
  double fx = p.value(x);
  double t = 1e-3;
  for (int it = 0; it < opt.max_iterations; ++it) {
    p.gradient(x, g);
    double fy = 0.0, lin = 0.0, dist2 = 0.0;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i) y[i] = x[i] - t * g[i];
      p.project(y, c);
      lin = 0.0;
      dist2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        lin += g[i] * (y[i] - x[i]);
        dist2 += (y[i] - x[i]) * (y[i] - x[i]);
      }
      fy = p.value(y);
      if (fy <= fx + lin + dist2 / (2.0 * t)) break;
      t *= 0.5;
    }
    const double pg = std::sqrt(dist2) / t;
    x.swap(y);
    fx = fy;
    if (pg < opt.tolerance || dist2 == 0.0) break;
    t *= 2.0;
  }
  if (!p.feasible(x, c)) return {};
  return {fx, x};
}

Minimum minimize(const Problem& p, const Component& c, std::uint64_t stream, const EpsilonOptions& opt) {
  Minimum best;
  for (int s = 0; s < opt.starts; ++s) {
    std::vector<double> x(p.size());
    if (s == 0) {
      for (std::size_t j = 0; j < c.slabs.size(); ++j) {
        const double mid = 0.5 * (c.slabs[j].lo + c.slabs[j].hi);
        for (std::size_t k = 0; k < p.group(); ++k) x[j * p.group() + k] = mid;
      }
    } else {
      CounterRng rng(opt.seed, stream * 1000 + static_cast<std::uint64_t>(s));
      for (double& v : x) v = 2.0 * rng.uniform() - 1.0;
    }
    Minimum m = descend(p, c, std::move(x), opt);
    if (m.value < best.value) best = std::move(m);
  }
  return best;
}

}  // namespace

double block_excess(const ProfileContext& ctx, std::span<const double> m) {
  const Functional f(ctx, m.size(), std::nullopt);
  return f.local_excess(m, solve_m_beta(ctx.beta)) + f.terms(m).interior;
}

EpsilonResult epsilon_ab(const ProfileContext& ctx, const Scales& scales, double psi, const EpsilonOptions& opt) {
  const double mb = solve_m_beta(ctx.beta);
  if (mb == 0.0) throw std::invalid_argument("epsilon_ab needs beta > 1");
  if (!(psi > 0.0 && psi < mb)) throw std::invalid_argument("psi must lie in (0, m_beta)");
  if (scales.ell0 != ctx.ell0) throw std::invalid_argument("context and scales disagree on ell0");
  const Problem p(ctx, scales);
  const auto k = static_cast<std::size_t>(scales.ellp / scales.ellm);
  const Slab free_slab{-kBox, kBox};
  EpsilonResult out;
  std::uint64_t stream = 0;

  Minimum best_a;
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<Slab> options{{-mb + psi, mb - psi}};
    if (mb + psi < kBox) options.push_back({mb + psi, kBox});
    for (Slab s : options) {
      Component c{std::vector<Slab>(k, free_slab)};
      c.slabs[j] = s;
      Minimum m = minimize(p, c, stream++, opt);
      if (m.value < best_a.value) best_a = std::move(m);
    }
  }

  Minimum best_b;
  for (std::uint64_t pattern = 1; pattern < (std::uint64_t{1} << (k - 1)); ++pattern) {
    Component c;
    for (std::size_t j = 0; j < k; ++j) {
      const bool plus = j == 0 || ((pattern >> (j - 1)) & 1U) == 0U;
      const double centre = plus ? mb : -mb;
      c.slabs.push_back({std::max(centre - psi, -kBox), std::min(centre + psi, kBox)});
    }
    Minimum m = minimize(p, c, stream++, opt);
    if (m.value < best_b.value) best_b = std::move(m);
  }

  out.feasible = std::isfinite(best_a.value) && std::isfinite(best_b.value);
  if (!out.feasible) throw std::runtime_error("epsilon_ab: no feasible minimum found");
  out.eps_a = best_a.value;
  out.eps_b = best_b.value;
  out.argmin_a = std::move(best_a.argmin);
  out.argmin_b = std::move(best_b.argmin);
  return out;
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs matching samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0 || y[i] <= 0.0) throw std::invalid_argument("slope fit needs positive samples");
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  const auto n = static_cast<double>(x.size());
  return (sxy - sx * sy / n) / (sxx - sx * sx / n);
}

}  // namespace kac
