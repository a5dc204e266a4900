#include "kac/freeenergy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kac/meanfield.hpp"
#include "kac/sampler.hpp"

namespace kac {

namespace {

double log_sum_exp(std::span<const double> v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  const double mx = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

std::vector<double> window_blocks(std::span<const Spin> spins, std::int64_t ell0) {
  if (spins.size() % static_cast<std::size_t>(ell0) != 0) {
    throw std::invalid_argument("boundary window is not a whole number of ell0 blocks");
  }
  std::vector<double> out(spins.size() / static_cast<std::size_t>(ell0));
  for (std::size_t b = 0; b < out.size(); ++b) {
    double s = 0.0;
    for (std::int64_t i = 0; i < ell0; ++i) s += spins[b * static_cast<std::size_t>(ell0) + static_cast<std::size_t>(i)];
    out[b] = s / static_cast<double>(ell0);
  }
  return out;
}

}  // namespace

ProfileBoundary ProfileBoundary::from_spins(const BoundaryCondition& bc, std::int64_t ell0) {
  ProfileBoundary p;
  p.left = window_blocks(bc.left, ell0);
  p.right = window_blocks(bc.right, ell0);
  p.far_left = bc.far_left;
  p.far_right = bc.far_right;
  return p;
}

double ProfileBoundary::left_at(std::int64_t d) const {
  const auto n = static_cast<std::int64_t>(left.size());
  return d <= n ? left[static_cast<std::size_t>(n - d)] : far_left;
}

double ProfileBoundary::right_at(std::int64_t d) const {
  const auto n = static_cast<std::int64_t>(right.size());
  return d <= n ? right[static_cast<std::size_t>(d - 1)] : far_right;
}

Functional::Functional(const ProfileContext& ctx, std::size_t blocks, std::optional<ProfileBoundary> boundary)
    : ctx_(ctx), eff_(ctx.effective()), n_(blocks), boundary_(std::move(boundary)) {
  if (ctx.ell0 < 1) throw std::invalid_argument("ell0 must be positive");
  if (blocks == 0) throw std::invalid_argument("empty volume");
  const std::int64_t nl = boundary_ ? static_cast<std::int64_t>(boundary_->left.size()) : 0;
  const std::int64_t nr = boundary_ ? static_cast<std::int64_t>(boundary_->right.size()) : 0;
  const auto n = static_cast<std::int64_t>(n_);
  kernel_.resize(static_cast<std::size_t>(n + std::max(nl, nr) + 1));
  kernel_[0] = ctx.gamma();
  for (std::size_t k = 1; k < kernel_.size(); ++k) kernel_[k] = eff_(static_cast<std::int64_t>(k) * ctx.ell0);

  range_ = n_;
  if (eff_.lambda() == 0.0) range_ = static_cast<std::size_t>(eff_.half_range() / ctx.ell0);
  weight_.assign(n_, 0.0);
  outside_.assign(n_, 0.0);
  outside_sq_.assign(n_, 0.0);
  outside_w_.assign(n_, 0.0);
  for (std::int64_t x = 0; x < n; ++x) {
    double w = 0.0;
    for (std::int64_t y = 0; y < n; ++y) {
      if (y != x) w += kernel_[static_cast<std::size_t>(std::abs(x - y))];
    }
    if (boundary_) {
      double ow = 0.0, of = 0.0, osq = 0.0;
      auto add = [&](double j, double v) {
        ow += j;
        of += j * v;
        osq += j * v * v;
      };
      for (std::int64_t d = 1; d <= nl; ++d) add(kernel_[static_cast<std::size_t>(x + d)], boundary_->left_at(d));
      add(block_coupling_tail(eff_, ctx.ell0, x + nl + 1), boundary_->far_left);
      for (std::int64_t d = 1; d <= nr; ++d) {
        add(kernel_[static_cast<std::size_t>(n - 1 - x + d)], boundary_->right_at(d));
      }
      add(block_coupling_tail(eff_, ctx.ell0, n - x + nr), boundary_->far_right);
      outside_w_[static_cast<std::size_t>(x)] = ow;
      outside_[static_cast<std::size_t>(x)] = of;
      outside_sq_[static_cast<std::size_t>(x)] = osq;
      w += ow;
    }
    weight_[static_cast<std::size_t>(x)] = w;
  }
}

double Functional::neighbour_sum(std::span<const double> m, std::size_t x) const {
  const std::size_t lo = x > range_ ? x - range_ : 0;
  const std::size_t hi = std::min(n_, x + range_ + 1);
  double a = 0.0;
  for (std::size_t y = lo; y < hi; ++y) {
    if (y != x) a += kernel_[x > y ? x - y : y - x] * m[y];
  }
  return a;
}

double Functional::kernel(std::int64_t k) const {
  k = std::abs(k);
  if (k < static_cast<std::int64_t>(kernel_.size())) return kernel_[static_cast<std::size_t>(k)];
  return eff_(k * ctx_.ell0);
}

FTerms Functional::terms(std::span<const double> m) const {
  if (m.size() != n_) throw std::invalid_argument("profile length mismatch");
  const double d0 = ctx_.delta0();
  const double q = d0 * d0 / (2.0 * ctx_.gamma());
  FTerms t;
  for (std::size_t x = 0; x < n_; ++x) {
    if (std::abs(m[x]) > 1.0) throw std::invalid_argument("profile value outside [-1,1]");
    t.local += d0 * f_beta(ctx_.beta, m[x], true);
    for (std::size_t y = x + 1; y < std::min(n_, x + range_ + 1); ++y) {
      const double j = kernel_[y - x];
      if (j == 0.0) continue;
      const double d = m[x] - m[y];
      t.interior += q * j * d * d;
    }
  }
  if (boundary_) {
    const auto n = static_cast<std::int64_t>(n_);
    const auto nl = static_cast<std::int64_t>(boundary_->left.size());
    const auto nr = static_cast<std::int64_t>(boundary_->right.size());
    for (std::int64_t x = 0; x < n; ++x) {
      const double mx = m[static_cast<std::size_t>(x)];
      double b = 0.0;
      for (std::int64_t d = 1; d <= nl; ++d) {
        const double diff = mx - boundary_->left_at(d);
        b += kernel_[static_cast<std::size_t>(x + d)] * diff * diff;
      }
      b += block_coupling_tail(eff_, ctx_.ell0, x + nl + 1) * (mx - boundary_->far_left) * (mx - boundary_->far_left);
      for (std::int64_t d = 1; d <= nr; ++d) {
        const double diff = mx - boundary_->right_at(d);
        b += kernel_[static_cast<std::size_t>(n - 1 - x + d)] * diff * diff;
      }
      b += block_coupling_tail(eff_, ctx_.ell0, n - x + nr) * (mx - boundary_->far_right) * (mx - boundary_->far_right);
      t.boundary += q * b;
      t.boundary_sq += q * outside_sq_[static_cast<std::size_t>(x)];
    }
  }
  return t;
}

double Functional::local_excess(std::span<const double> m, double c) const {
  const double d0 = ctx_.delta0();
  const double fc = f_beta(ctx_.beta, c, true);
  double s = 0.0;
  for (double v : m) s += d0 * (f_beta(ctx_.beta, v, true) - fc);
  return s;
}

void Functional::gradient(std::span<const double> m, std::span<double> g) const {
  const double d0 = ctx_.delta0();
  const double q = d0 * d0 / ctx_.gamma();
  for (std::size_t x = 0; x < n_; ++x) {
    const double a = neighbour_sum(m, x);
    g[x] = d0 * f_beta_prime(ctx_.beta, m[x]) + q * (weight_[x] * m[x] - a - outside_[x]);
  }
}

void Functional::el_map(std::span<const double> m, std::span<double> out) const {
  const double r = ctx_.delta0() / ctx_.gamma();
  for (std::size_t x = 0; x < n_; ++x) {
    const double a = neighbour_sum(m, x);
    out[x] = std::tanh(ctx_.beta * ((1.0 - r * weight_[x]) * m[x] + r * (a + outside_[x])));
  }
}

double Functional::el_residual(std::span<const double> m) const {
  std::vector<double> t(n_);
  el_map(m, t);
  double r = 0.0;
  for (std::size_t x = 0; x < n_; ++x) r = std::max(r, std::abs(m[x] - t[x]));
  return r;
}

bool on_grid(double v, std::int64_t ell0) {
  const double k = (v + 1.0) * static_cast<double>(ell0) / 2.0;
  return k >= -1e-9 && k <= static_cast<double>(ell0) + 1e-9 && std::abs(k - std::round(k)) < 1e-9;
}

double grid_project(double v, std::int64_t ell0) {
  const double l = static_cast<double>(ell0);
  const double k = std::clamp(std::round((v + 1.0) * l / 2.0), 0.0, l);
  return 2.0 * k / l - 1.0;
}

std::vector<double> grid_project(std::span<const double> m, std::int64_t ell0) {
  std::vector<double> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = grid_project(m[i], ell0);
  return out;
}

FTerms eval_F_terms(const ProfileContext& ctx, std::span<const double> m, const ProfileBoundary& boundary) {
  for (double v : m) {
    if (!on_grid(v, ctx.ell0)) throw std::invalid_argument("profile value off the ell0 grid");
  }
  return Functional(ctx, m.size(), boundary).terms(m);
}

double eval_F(const ProfileContext& ctx, std::span<const double> m, const ProfileBoundary& boundary) {
  return eval_F_terms(ctx, m, boundary).total();
}

double eval_F_AB(const ProfileContext& ctx, const MagProfile& m, SiteInterval a, SiteInterval b) {
  const std::int64_t l = ctx.ell0;
  if (m.ell != l) throw std::invalid_argument("profile is not on the ell0 scale");
  auto check = [&](SiteInterval s) {
    if (s.lo > s.hi || (s.lo - m.origin) % l != 0 || (s.hi - m.origin) % l != 0 || s.lo < m.origin ||
        s.hi > m.origin + l * static_cast<std::int64_t>(m.values.size())) {
      throw std::invalid_argument("interval is not ell0-measurable inside the profile");
    }
  };
  check(a);
  check(b);
  if (a.lo < b.hi && b.lo < a.hi && a.lo < a.hi && b.lo < b.hi) throw std::invalid_argument("intervals overlap");
  const CouplingSpec eff = ctx.effective();
  const double d0 = ctx.delta0();
  const double q = d0 * d0 / (2.0 * ctx.gamma());
  auto idx = [&](std::int64_t site) { return static_cast<std::size_t>((site - m.origin) / l); };
  double local = 0.0, cross = 0.0;
  for (std::int64_t x = a.lo; x < a.hi; x += l) {
    const double mx = m.values[idx(x)];
    local += d0 * f_beta(ctx.beta, mx, true);
    for (std::int64_t y = b.lo; y < b.hi; y += l) {
      const double d = mx - m.values[idx(y)];
      cross += q * eff(std::abs(x - y)) * d * d;
    }
  }
  return local + cross;
}

namespace {

struct Constrained {
  std::vector<std::uint64_t> configs;
};

Constrained constrained_configs(const SpinConfig& shape, std::int64_t ell0, std::span<const std::int64_t> sums) {
  const std::size_t n = shape.size();
  if (n > kExactGibbsMaxSites) throw std::invalid_argument("volume too large for enumeration");
  if (n % static_cast<std::size_t>(ell0) != 0) throw std::invalid_argument("volume is not ell0-measurable");
  const std::size_t nb = n / static_cast<std::size_t>(ell0);
  if (sums.size() != nb) throw std::invalid_argument("block sums length mismatch");
  Constrained c;
  for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << n); ++idx) {
    bool ok = true;
    for (std::size_t b = 0; b < nb && ok; ++b) {
      std::int64_t s = 0;
      for (std::int64_t i = 0; i < ell0; ++i) {
        s += (idx >> (b * static_cast<std::size_t>(ell0) + static_cast<std::size_t>(i))) & 1U ? 1 : -1;
      }
      ok = s == sums[b];
    }
    if (ok) c.configs.push_back(idx);
  }
  if (c.configs.empty()) throw std::invalid_argument("block sums are not realizable");
  return c;
}

}  // namespace

double log_constrained_partition(const ProfileContext& ctx, const SpinConfig& shape,
                                 std::span<const std::int64_t> sums) {
  const Constrained c = constrained_configs(shape, ctx.ell0, sums);
  const std::vector<double> e = energy_table(ctx.effective(), shape);
  std::vector<double> w;
  w.reserve(c.configs.size());
  for (std::uint64_t idx : c.configs) w.push_back(-ctx.beta * e[idx]);
  return log_sum_exp(w);
}

double eval_G(const ProfileContext& ctx, const SpinConfig& shape, std::span<const std::int64_t> sums) {
  const Constrained c = constrained_configs(shape, ctx.ell0, sums);
  const CouplingSpec eff = ctx.effective();
  validate_boundary(eff, shape.boundary());
  const std::int64_t l = ctx.ell0;
  const std::size_t n = shape.size();
  const std::size_t nb = n / static_cast<std::size_t>(l);
  const double g = ctx.gamma();
  const double d0 = ctx.delta0();
  const double beta = ctx.beta;

  Functional fun(ctx, nb, ProfileBoundary::from_spins(shape.boundary(), l));
  std::vector<double> m(nb);
  for (std::size_t b = 0; b < nb; ++b) m[b] = static_cast<double>(sums[b]) / static_cast<double>(l);

  const double norm0 = static_cast<double>(l) * (g + 2.0 * block_coupling_tail(eff, l, 1));
  double entropy_part = 0.0, square_part = 0.0, outside_part = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    entropy_part += d0 / beta * entropy(m[b], true);
    square_part += d0 / 2.0 * (1.0 - norm0) * m[b] * m[b];
    outside_part -= d0 * d0 / g * fun.outside_sq(b);
  }

  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    h[i] = boundary_field(eff, shape, i) - static_cast<double>(l) * fun.outside_field(i / static_cast<std::size_t>(l));
  }
  std::vector<double> dj(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto bi = static_cast<std::int64_t>(i) / l, bj = static_cast<std::int64_t>(j) / l;
      dj[i * n + j] = eff(static_cast<std::int64_t>(i > j ? i - j : j - i)) - fun.kernel(bi - bj);
    }
  }
  std::vector<double> w;
  w.reserve(c.configs.size());
  for (std::uint64_t idx : c.configs) {
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double si = (idx >> i) & 1U ? 1.0 : -1.0;
      double pair = 0.0;
      for (std::size_t j = 0; j < n; ++j) pair += dj[i * n + j] * ((idx >> j) & 1U ? 1.0 : -1.0);
      e += 0.5 * si * pair + si * h[i];
    }
    w.push_back(beta * e);
  }
  return entropy_part + square_part + outside_part + g * g * static_cast<double>(n) / 2.0 -
         g / beta * log_sum_exp(w);
}

}  // namespace kac
