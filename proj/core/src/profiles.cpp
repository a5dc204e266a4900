#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "kac/freeenergy.hpp"
#include "kac/meanfield.hpp"

namespace kac {

namespace {

constexpr double kEdge = 1.0 - 1e-15;

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Eigen::SparseMatrix<double> hessian(const Functional& f, std::span<const double> m) {
  const ProfileContext& ctx = f.context();
  const double d0 = ctx.delta0();
  const double q = d0 * d0 / ctx.gamma();
  const std::size_t n = f.blocks();
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t x = 0; x < n; ++x) {
    const double diag = d0 * (-1.0 + 1.0 / (ctx.beta * (1.0 - m[x] * m[x]))) + q * f.weight(x);
    t.emplace_back(static_cast<int>(x), static_cast<int>(x), diag);
    const std::size_t hi = std::min(n, x + f.range() + 1);
    for (std::size_t y = x + 1; y < hi; ++y) {
      const double j = f.kernel(static_cast<std::int64_t>(y - x));
      if (j == 0.0) continue;
      t.emplace_back(static_cast<int>(x), static_cast<int>(y), -q * j);
      t.emplace_back(static_cast<int>(y), static_cast<int>(x), -q * j);
    }
  }
  Eigen::SparseMatrix<double> h(static_cast<int>(n), static_cast<int>(n));
  h.setFromTriplets(t.begin(), t.end());
  return h;
}

}  // namespace

SolveResult solve_euler_lagrange(const Functional& f, std::vector<double> seed, const SolveOptions& opt) {
  const std::size_t n = f.blocks();
  if (seed.size() != n) throw std::invalid_argument("seed length mismatch");
  SolveResult r;
  r.profile = std::move(seed);
  for (double& v : r.profile) v = std::clamp(v, -kEdge, kEdge);
  std::vector<double>& m = r.profile;
  std::vector<double> t(n), g(n), trial(n);

  r.residual = f.el_residual(m);
  double previous = r.residual;
  int stalled = 0;
  for (int it = 0; it < opt.fixed_point_iterations && r.residual > opt.tolerance; ++it) {
    f.el_map(m, t);
    for (std::size_t x = 0; x < n; ++x) m[x] = (1.0 - opt.damping) * m[x] + opt.damping * t[x];
    r.residual = f.el_residual(m);
    ++r.iterations;
    stalled = r.residual > 0.95 * previous ? stalled + 1 : 0;
    previous = r.residual;
    if (stalled >= 20 || r.residual < 1e-6) break;
  }

  // Newton steps on F, shifted (Levenberg-Marquardt) until the step is a bounded descent direction.
  for (int it = 0; it < opt.newton_iterations && r.residual > opt.tolerance; ++it) {
    f.gradient(m, g);
    const double gnorm = norm2(g);
    const double f0 = f.value(m);
    Eigen::VectorXd rhs(static_cast<int>(n));
    for (std::size_t x = 0; x < n; ++x) rhs[static_cast<int>(x)] = -g[x];
    const Eigen::SparseMatrix<double> h0 = hessian(f, m);
    double diag = 0.0;
    for (int x = 0; x < h0.rows(); ++x) diag += std::abs(h0.coeff(x, x));
    diag /= static_cast<double>(n);
    Eigen::VectorXd step;
    for (double shift = 0.0; shift <= diag * 1e8; shift = shift == 0.0 ? diag * 1e-14 : shift * 10.0) {
      Eigen::SparseMatrix<double> h = h0;
      for (int x = 0; x < h.rows(); ++x) h.coeffRef(x, x) += shift;
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(h);
      if (ldlt.info() != Eigen::Success) continue;
      Eigen::VectorXd d = ldlt.solve(rhs);
      if (ldlt.info() != Eigen::Success || !d.allFinite() || d.dot(rhs) <= 0.0) continue;
      step = std::move(d);
      if (step.cwiseAbs().maxCoeff() <= opt.max_step) break;
    }
    if (step.size() == 0) break;
    const double slope = -step.dot(rhs);
    double scale = 1.0;
    for (std::size_t x = 0; x < n; ++x) {
      const double s = step[static_cast<int>(x)];
      if (s > 0.0) scale = std::min(scale, 0.99 * (kEdge - m[x]) / s);
      if (s < 0.0) scale = std::min(scale, 0.99 * (-kEdge - m[x]) / s);
    }
    bool moved = false;
    for (int ls = 0; ls < 50; ++ls, scale *= 0.5) {
      for (std::size_t x = 0; x < n; ++x) trial[x] = m[x] + scale * step[static_cast<int>(x)];
      const double ft = f.value(trial);
      if (ft <= f0 + 1e-4 * scale * slope) {
        moved = true;
        break;
      }
      f.gradient(trial, g);
      if (norm2(g) < gnorm && ft <= f0 + 1e-13 * std::max(1.0, std::abs(f0))) {
        moved = true;
        break;
      }
    }
    ++r.iterations;
    if (!moved) break;
    m.swap(trial);
    r.residual = f.el_residual(m);
  }
  r.converged = r.residual <= opt.tolerance;
  return r;
}

SolveResult phi_profile(const ProfileContext& ctx, std::size_t blocks, const ProfileBoundary& boundary,
                        double seed_value, const SolveOptions& opt) {
  if (ctx.beta <= 1.0) throw std::invalid_argument("phi_profile needs beta > 1");
  const Functional f(ctx.without_lambda(), blocks, boundary);
  SolveResult r = solve_euler_lagrange(f, std::vector<double>(blocks, seed_value), opt);
  if (!r.converged) throw std::runtime_error("phi_profile did not converge");
  return r;
}

DecayFit fit_decay(std::span<const double> phi, double m_beta, std::size_t first, std::size_t last) {
  DecayFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t x = first; x < std::min(last, phi.size()); ++x) {
    const double d = std::abs(phi[x] - m_beta);
    if (d <= 0.0) continue;
    const double y = std::log(d);
    const auto xx = static_cast<double>(x);
    sx += xx;
    sy += y;
    sxx += xx * xx;
    sxy += xx * y;
    syy += y * y;
    ++fit.points;
  }
  if (fit.points < 3) throw std::invalid_argument("not enough points for a decay fit");
  const auto k = static_cast<double>(fit.points);
  const double vx = sxx - sx * sx / k, vy = syy - sy * sy / k, cxy = sxy - sx * sy / k;
  fit.slope = cxy / vx;
  fit.intercept = (sy - fit.slope * sx) / k;
  fit.r2 = vy > 0.0 ? cxy * cxy / (vx * vy) : 1.0;
  return fit;
}

double j_tilde_at(const ProfileContext& ctx, std::size_t blocks, double seed_offset) {
  const double mb = solve_m_beta(ctx.beta);
  if (mb == 0.0) return 0.0;
  const ProfileContext c0 = ctx.without_lambda();
  const Functional f(c0, blocks, ProfileBoundary::split(-mb, mb));
  std::vector<double> seed(blocks);
  const double centre = static_cast<double>(blocks) / 2.0 + seed_offset;
  const double width = 1.0 / (c0.delta0() * 2.0);
  for (std::size_t x = 0; x < blocks; ++x) seed[x] = mb * std::tanh((static_cast<double>(x) + 0.5 - centre) / width);
  SolveOptions opt;
  opt.fixed_point_iterations = 20000;
  const SolveResult r = solve_euler_lagrange(f, std::move(seed), opt);
  if (!r.converged) throw std::runtime_error("surface tension profile did not converge");
  const FTerms t = f.terms(r.profile);
  return f.local_excess(r.profile, mb) + t.interior + t.boundary;
}

SurfaceTension j_tilde(const ProfileContext& ctx, std::span<const std::size_t> sizes, double seed_offset) {
  SurfaceTension s;
  for (std::size_t n : sizes) {
    s.sizes.push_back(n);
    s.values.push_back(j_tilde_at(ctx, n, seed_offset));
  }
  if (!s.values.empty()) s.value = s.values.back();
  if (s.values.size() >= 2) s.increment = std::abs(s.values.back() - s.values[s.values.size() - 2]);
  return s;
}

namespace {

struct Span {
  std::size_t lo = 0;
  std::size_t hi = 0;
};

// Replaces m on [lo, hi) by the grid-projected minimizer with the rest of m as boundary.
void fill_collar(const ProfileContext& ctx, std::vector<double>& m, const ProfileBoundary& outer, Span c,
                 double seed) {
  ProfileBoundary b;
  b.left = outer.left;
  b.left.insert(b.left.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(c.lo));
  b.right.assign(m.begin() + static_cast<std::ptrdiff_t>(c.hi), m.end());
  b.right.insert(b.right.end(), outer.right.begin(), outer.right.end());
  b.far_left = outer.far_left;
  b.far_right = outer.far_right;
  const SolveResult r = phi_profile(ctx, c.hi - c.lo, b, seed);
  for (std::size_t x = c.lo; x < c.hi; ++x) m[x] = grid_project(r.profile[x - c.lo], ctx.ell0);
}

std::vector<Span> collars(Span q, std::size_t width) {
  if (q.hi - q.lo <= 2 * width) return {q};
  return {{q.lo, q.lo + width}, {q.hi - width, q.hi}};
}

}  // namespace

Surgery surgery_profiles(const ProfileContext& ctx, std::span<const double> m, const ProfileBoundary& outer,
                         std::span<const Element> elements, std::int64_t ratio) {
  const double mb = solve_m_beta(ctx.beta);
  const auto r = static_cast<std::size_t>(ratio);
  const std::size_t n = m.size();
  auto to_blocks = [&](const BlockInterval& b) {
    if (b.lo < 0 || static_cast<std::size_t>(b.hi) * r > n) throw std::invalid_argument("element outside the volume");
    return Span{static_cast<std::size_t>(b.lo) * r, static_cast<std::size_t>(b.hi) * r};
  };
  const double core = grid_project(mb, ctx.ell0);
  Surgery out;
  out.tilde.assign(m.begin(), m.end());

  if (elements.size() == 1 && elements[0].kind == ElementKind::Rectangle) {
    const Span q = to_blocks(elements[0].blocks);
    const double left = q.lo > 0 ? m[q.lo - 1] : outer.left_at(1);
    const double right = q.hi < n ? m[q.hi] : outer.right_at(1);
    const double s = left + right >= 0.0 ? 1.0 : -1.0;
    for (Span c : collars(q, r)) fill_collar(ctx, out.tilde, outer, c, s * mb);
    out.star = out.tilde;
    const auto ellp = ratio * ctx.ell0;
    for (std::size_t x = q.lo; x < q.hi; ++x) {
      const auto dl = static_cast<std::int64_t>(x - q.lo) * ctx.ell0 + 1;
      const auto dr = static_cast<std::int64_t>(q.hi - 1 - x) * ctx.ell0 + 1;
      if (3 * std::min(dl, dr) > ellp) out.star[x] = s * core;
    }
    return out;
  }

  if (elements.size() == 3) {
    std::vector<Element> e(elements.begin(), elements.end());
    std::sort(e.begin(), e.end(), [](const Element& a, const Element& b) { return a.blocks.lo < b.blocks.lo; });
    if (e[0].kind == ElementKind::Rectangle && e[1].kind == ElementKind::Triangle &&
        e[2].kind == ElementKind::Rectangle && e[0].blocks.hi == e[1].blocks.lo &&
        e[1].blocks.hi == e[2].blocks.lo) {
      const Span ql = to_blocks(e[0].blocks), t = to_blocks(e[1].blocks), qr = to_blocks(e[2].blocks);
      const double s = -static_cast<double>(e[1].sign);
      for (Span q : {ql, qr}) {
        for (Span c : collars(q, r)) fill_collar(ctx, out.tilde, outer, c, s * mb);
      }
      out.star.assign(m.begin(), m.end());
      for (std::size_t x = t.lo; x < t.hi; ++x) out.star[x] = -m[x];
      for (Span q : {ql, qr}) {
        const std::vector<Span> cs = collars(q, r);
        for (std::size_t x = q.lo; x < q.hi; ++x) out.star[x] = s * core;
        for (Span c : cs) fill_collar(ctx, out.star, outer, c, s * mb);
      }
      return out;
    }
  }
  throw std::invalid_argument("surgery needs one rectangle or a triangle with its two rectangles");
}

}  // namespace kac
