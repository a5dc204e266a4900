#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "kac/coarsegrain.hpp"
#include "kac/freeenergy.hpp"
#include "kac/meanfield.hpp"
#include "kac/rng.hpp"
#include "kac/sampler.hpp"

using namespace kac;

namespace {

double ref_j(double gamma, double lambda, std::int64_t r) {
  return static_cast<double>(r) <= 0.5 / gamma ? gamma : lambda / static_cast<double>(r * r);
}

double ref_f(double beta, double m) {
  auto term = [](double p) { return p > 0.0 ? p * std::log(p) : 0.0; };
  const double s = -term((1 + m) / 2) - term((1 - m) / 2);
  return -0.5 * m * m - s / beta;
}

// F by direct summation; outside blocks take the split far values, truncated at `reach` blocks.
double ref_F(double beta, double gamma, double lambda, std::int64_t ell0, const std::vector<double>& m,
             double left, double right, std::int64_t reach) {
  const double d0 = static_cast<double>(ell0) * gamma;
  const auto n = static_cast<std::int64_t>(m.size());
  auto jb = [&](std::int64_t k) { return ref_j(gamma, lambda, std::abs(k) * ell0); };
  double f = 0.0;
  for (double v : m) f += d0 * ref_f(beta, v);
  for (std::int64_t x = 0; x < n; ++x) {
    for (std::int64_t y = 0; y < n; ++y) {
      if (x == y) continue;
      const double d = m[static_cast<std::size_t>(x)] - m[static_cast<std::size_t>(y)];
      f += d0 * d0 / (4 * gamma) * jb(x - y) * d * d;
    }
    for (std::int64_t y = -reach; y < n + reach; ++y) {
      if (y >= 0 && y < n) continue;
      const double mb = y < 0 ? left : right;
      const double d = m[static_cast<std::size_t>(x)] - mb;
      f += d0 * d0 / (2 * gamma) * jb(x - y) * (d * d + mb * mb);
    }
    // Blocks beyond the reach: Sum_{k > K} 1/k^2 = 1/(K + 1/2) + O(K^-3).
    const double dl = m[static_cast<std::size_t>(x)] - left, dr = m[static_cast<std::size_t>(x)] - right;
    const double tl = lambda / static_cast<double>(ell0 * ell0) / (static_cast<double>(reach + x) + 0.5);
    const double tr = lambda / static_cast<double>(ell0 * ell0) / (static_cast<double>(reach + n - 1 - x) + 0.5);
    f += d0 * d0 / (2 * gamma) * (tl * (dl * dl + left * left) + tr * (dr * dr + right * right));
  }
  return f;
}

std::vector<double> random_grid_profile(CounterRng& rng, std::size_t n, std::int64_t ell0) {
  std::vector<double> m(n);
  for (double& v : m) v = -1.0 + 2.0 * static_cast<double>(rng.below(static_cast<std::uint64_t>(ell0) + 1)) / static_cast<double>(ell0);
  return m;
}

// -(gamma/beta) ln Z(m|sigmabar) by enumeration with the library Hamiltonian.
double ref_constrained(const CouplingSpec& spec, const SpinConfig& shape, double beta, std::int64_t ell0,
                       const std::vector<std::int64_t>& sums) {
  const std::size_t n = shape.size();
  std::vector<double> e;
  for (std::uint64_t k = 0; k < (std::uint64_t{1} << n); ++k) {
    std::vector<Spin> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = (k >> i) & 1 ? Spin{1} : Spin{-1};
    bool ok = true;
    for (std::size_t b = 0; b < sums.size(); ++b) {
      std::int64_t s = 0;
      for (std::int64_t i = 0; i < ell0; ++i) s += v[b * static_cast<std::size_t>(ell0) + static_cast<std::size_t>(i)];
      ok = ok && s == sums[b];
    }
    if (ok) e.push_back(hamiltonian(spec, SpinConfig(shape.first(), v, shape.boundary())));
  }
  double emin = e[0];
  for (double x : e) emin = std::min(emin, x);
  double z = 0.0;
  for (double x : e) z += std::exp(-beta * (x - emin));
  return spec.gamma() / beta * (beta * emin - std::log(z));
}

}  // namespace

TEST_CASE("F at the zero profile") {
  for (double lambda : {0.0, 2.0}) {
    const ProfileContext ctx{1.7, CouplingSpec::from_half_range(8, lambda), 4, true};
    const std::vector<double> m(12, 0.0);
    CHECK(eval_F(ctx, m, ProfileBoundary::constant(0.0)) ==
          doctest::Approx(-12.0 * ctx.delta0() * std::numbers::ln2 / 1.7).epsilon(1e-13));
  }
}

TEST_CASE("F at the constant grid magnetization") {
  const ProfileContext ctx{2.0, CouplingSpec::from_half_range(16, 0.0), 4, true};
  const double c = grid_project(solve_m_beta(2.0), 4);
  const std::vector<double> m(10, c);
  const FTerms t = eval_F_terms(ctx, m, ProfileBoundary::constant(c));
  CHECK(t.interior == 0.0);
  CHECK(t.boundary == 0.0);
  CHECK(t.local == doctest::Approx(10 * ctx.delta0() * ref_f(2.0, c)).epsilon(1e-13));
  CHECK(t.total() == doctest::Approx(ref_F(2.0, 1.0 / 32, 0.0, 4, m, c, c, 20)).epsilon(1e-12));
}

TEST_CASE("F against direct summation") {
  CounterRng rng(8, 3);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<double> m = random_grid_profile(rng, 9, 4);
    const double left = grid_project(2.0 * rng.uniform() - 1.0, 4), right = grid_project(2.0 * rng.uniform() - 1.0, 4);
    const ProfileContext ctx0{1.5, CouplingSpec::from_half_range(8, 0.0), 4, true};
    CHECK(eval_F(ctx0, m, ProfileBoundary::split(left, right)) ==
          doctest::Approx(ref_F(1.5, 1.0 / 16, 0.0, 4, m, left, right, 10)).epsilon(1e-12));
    const ProfileContext ctx1{1.5, CouplingSpec::from_half_range(8, 3.0), 4, true};
    CHECK(std::abs(eval_F(ctx1, m, ProfileBoundary::split(left, right)) -
                   ref_F(1.5, 1.0 / 16, 3.0, 4, m, left, right, 200000)) < 1e-7);
  }
}

TEST_CASE("F with lambda dominates F without, quadratic terms nonnegative") {
  CounterRng rng(12, 0);
  const CouplingSpec spec = CouplingSpec::from_half_range(16, 5.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::vector<double> m = random_grid_profile(rng, 40, 6);
    const ProfileBoundary bd = ProfileBoundary::split(grid_project(rng.uniform(), 6), -grid_project(rng.uniform(), 6));
    const ProfileContext on{3.0, spec, 6, true};
    const FTerms a = eval_F_terms(on, m, bd);
    const FTerms b = eval_F_terms(on.without_lambda(), m, bd);
    CHECK(a.total() >= b.total());
    CHECK(a.total() - b.total() <= 10.0 * spec.lambda_tilde() * std::log(40.0 * 6.0) + 10.0);
    for (const FTerms& t : {a, b}) {
      CHECK(t.interior >= 0.0);
      CHECK(t.boundary >= 0.0);
      CHECK(t.boundary_sq >= 0.0);
    }
  }
}

TEST_CASE("F rejects off-grid profiles") {
  const ProfileContext ctx{2.0, CouplingSpec::from_half_range(8, 1.0), 4, true};
  const std::vector<double> m{0.5, 0.3};
  CHECK_THROWS(eval_F(ctx, m, ProfileBoundary::constant(0.0)));
}

TEST_CASE("F_AB") {
  const CouplingSpec spec = CouplingSpec::from_half_range(8, 2.0);
  const ProfileContext ctx{2.0, spec, 4, true};
  MagProfile p;
  p.ell = 4;
  p.origin = -16;
  p.values.assign(12, 0.5);
  const double local8 = 4 * ctx.delta0() * ref_f(2.0, 0.5);
  CHECK(eval_F_AB(ctx, p, {-16, 0}, {0, 32}) == doctest::Approx(local8));
  CHECK(eval_F_AB(ctx, p, {-16, 0}, {0, 0}) == doctest::Approx(local8));
  CHECK_THROWS(eval_F_AB(ctx, p, {-16, 4}, {0, 32}));
  CHECK_THROWS(eval_F_AB(ctx, p, {-15, 1}, {4, 32}));

  CounterRng rng(4, 4);
  for (int trial = 0; trial < 10; ++trial) {
    p.values = random_grid_profile(rng, 12, 4);
    double expect = 0.0;
    const double d0 = ctx.delta0();
    for (std::int64_t x = -16; x < 4; x += 4) {
      const double mx = p.values[static_cast<std::size_t>((x + 16) / 4)];
      expect += d0 * ref_f(2.0, mx);
      for (std::int64_t y = 8; y < 32; y += 4) {
        const double d = mx - p.values[static_cast<std::size_t>((y + 16) / 4)];
        expect += d0 * d0 / (2 * spec.gamma()) * ref_j(spec.gamma(), 2.0, y - x) * d * d;
      }
    }
    CHECK(std::abs(eval_F_AB(ctx, p, {-16, 4}, {8, 32}) - expect) < 1e-12);
  }
}

TEST_CASE("grid projection") {
  CHECK(grid_project(0.5, 4) == 0.5);
  CHECK(grid_project(0.5001, 4) == 0.5);
  CHECK(grid_project(-1.3, 4) == -1.0);
  CHECK(on_grid(0.25, 8));
  CHECK_FALSE(on_grid(0.3, 8));
  CounterRng rng(1, 9);
  for (int k = 0; k < 1000; ++k) {
    const double v = 2.0 * rng.uniform() - 1.0;
    const double g = grid_project(v, 6);
    CHECK(std::abs(g - v) <= 1.0 / 6.0 + 1e-15);
    CHECK(on_grid(g, 6));
    CHECK(grid_project(g, 6) == g);
  }
}

TEST_CASE("F + G identity on single blocks") {
  const CouplingSpec spec = CouplingSpec::from_half_range(2, 0.0);
  const SpinConfig shape = SpinConfig::uniform(0, 4, 1, BoundaryCondition::free());
  for (double beta : {0.7, 2.0}) {
    const ProfileContext ctx{beta, spec, 4, true};
    for (std::int64_t s : {0, 4, -2}) {
      const std::vector<std::int64_t> sums{s};
      const std::vector<double> m{static_cast<double>(s) / 4.0};
      const double lhs = ref_constrained(spec, shape, beta, 4, sums);
      CHECK(std::abs(lhs - (eval_F(ctx, m, ProfileBoundary::constant(0.0)) + eval_G(ctx, shape, sums))) < 1e-12);
      CHECK(std::abs(lhs + spec.gamma() / beta * log_constrained_partition(ctx, shape, sums)) < 1e-12);
    }
  }
  const std::vector<std::int64_t> impossible{3};
  CHECK_THROWS(eval_G(ProfileContext{1.0, spec, 4, true}, shape, impossible));
}

TEST_CASE("F + G identity on two blocks with a plus window") {
  const CouplingSpec spec = CouplingSpec::from_half_range(2, 1.0);
  const SpinConfig shape = SpinConfig::uniform(0, 8, 1, BoundaryCondition::plus_ones());
  const ProfileContext ctx{1.5, spec, 4, true};
  for (std::int64_t a : {-4, 0, 2}) {
    for (std::int64_t b : {4, -2}) {
      const std::vector<std::int64_t> sums{a, b};
      const std::vector<double> m{a / 4.0, b / 4.0};
      const double lhs = ref_constrained(spec, shape, 1.5, 4, sums);
      const double rhs = eval_F(ctx, m, ProfileBoundary::from_spins(shape.boundary(), 4)) + eval_G(ctx, shape, sums);
      CHECK(std::abs(lhs - rhs) < 1e-9);
    }
  }
}

TEST_CASE("phi profile") {
  const CouplingSpec spec = CouplingSpec::from_half_range(16, 0.0);
  const ProfileContext ctx{2.0, spec, 6, false};
  const double mb = solve_m_beta(2.0);
  const SolveResult c = phi_profile(ctx, 40, ProfileBoundary::constant(mb), mb);
  CHECK(c.converged);
  for (double v : c.profile) CHECK(std::abs(v - mb) < 1e-14);

  const SolveResult neg = phi_profile(ctx, 40, ProfileBoundary::constant(-mb), -0.5);
  REQUIRE(neg.converged);
  CHECK(std::abs(neg.profile[20] + mb) < 1e-10);

  const SolveResult mixed = phi_profile(ctx, 60, ProfileBoundary::split(0.0, mb), 0.5);
  REQUIRE(mixed.converged);
  for (std::size_t x = 1; x < 60; ++x) CHECK(mixed.profile[x] >= mixed.profile[x - 1] - 1e-12);
  const Functional f(ctx, 60, ProfileBoundary::split(0.0, mb));
  std::vector<double> g(60);
  f.gradient(mixed.profile, g);
  for (double v : g) CHECK(std::abs(v) < 1e-8);
  std::vector<double> probe = mixed.profile;
  const double h = 1e-6;
  for (std::size_t x : {0u, 17u, 59u}) {
    probe[x] += h;
    const double up = f.value(probe);
    probe[x] -= 2 * h;
    const double down = f.value(probe);
    probe[x] += h;
    CHECK(std::abs((up - down) / (2 * h)) < 1e-6);
  }
  CHECK_THROWS(phi_profile(ProfileContext{0.9, spec, 6, false}, 10, ProfileBoundary::constant(0.0), 0.0));
}

TEST_CASE("decay fit recovers an exponential") {
  std::vector<double> phi(30);
  for (std::size_t x = 0; x < phi.size(); ++x) phi[x] = 0.9 - 0.3 * std::exp(-0.4 * static_cast<double>(x));
  const DecayFit fit = fit_decay(phi, 0.9, 0, 30);
  CHECK(fit.slope == doctest::Approx(-0.4));
  CHECK(fit.r2 == doctest::Approx(1.0));
}

TEST_CASE("surface tension") {
  const CouplingSpec spec = CouplingSpec::from_half_range(16, 5.0);
  CHECK(j_tilde_at(ProfileContext{1.0, spec, 6, true}, 40) == 0.0);
  const ProfileContext ctx{2.0, spec, 6, true};
  const double a = j_tilde_at(ctx, 120);
  CHECK(a > 0.0);
  CHECK(std::abs(j_tilde_at(ctx, 120, 2.25) - a) < 1e-8);
  CHECK(std::abs(j_tilde_at(ctx, 120, -1.75) - a) < 1e-8);
  CHECK(j_tilde_at(ProfileContext{1.5, spec, 6, true}, 120) < a);
  CHECK(a < j_tilde_at(ProfileContext{3.0, spec, 6, true}, 120));
}

TEST_CASE("surgery") {
  const CouplingSpec spec = CouplingSpec::from_half_range(16, 5.0);
  const ProfileContext ctx{3.0, spec, 6, true};
  const double c = grid_project(solve_m_beta(3.0), 6);
  const std::int64_t ratio = 8;
  std::vector<double> m(ratio * 10, c);
  const std::vector<Element> q{{ElementKind::Rectangle, {3, 6}, 0}};
  const Surgery s = surgery_profiles(ctx, m, ProfileBoundary::constant(c), q, ratio);
  for (std::size_t x = 3 * ratio; x < 6 * ratio; ++x) CHECK(s.star[x] == m[x]);
  for (double v : s.tilde) CHECK(on_grid(v, 6));

  CounterRng rng(6, 6);
  std::vector<double> r = random_grid_profile(rng, ratio * 12, 6);
  const std::vector<Element> tq{{ElementKind::Rectangle, {2, 4}, 0},
                                {ElementKind::Triangle, {4, 7}, -1},
                                {ElementKind::Rectangle, {7, 9}, 0}};
  const Surgery t = surgery_profiles(ctx, r, ProfileBoundary::constant(c), tq, ratio);
  for (std::size_t x = 4 * ratio; x < 7 * ratio; ++x) CHECK(t.star[x] == -r[x]);
  for (std::size_t x = 0; x < 2 * ratio; ++x) CHECK(t.star[x] == r[x]);
  const std::vector<Element> bad{{ElementKind::Triangle, {4, 7}, -1}};
  CHECK_THROWS(surgery_profiles(ctx, r, ProfileBoundary::constant(c), bad, ratio));
}

TEST_CASE("rectangle costs") {
  const CouplingSpec spec = CouplingSpec::from_half_range(16, 5.0);
  const Scales sc = derive_scales(spec);
  const ProfileContext ctx{2.0, spec, sc.ell0, true};
  const double mb = solve_m_beta(2.0);
  EpsilonOptions opt;
  opt.starts = 6;
  const EpsilonResult e = epsilon_ab(ctx, sc, mb * mb / 10.0, opt);
  CHECK(e.feasible);
  CHECK(e.eps_a > 0.0);
  CHECK(e.eps_b >= sc.deltam * mb * mb / 4.0);
  CHECK(block_excess(ctx, e.argmin_a) == doctest::Approx(e.eps_a));
  const std::vector<double> flat(static_cast<std::size_t>(sc.ellp / sc.ell0), mb);
  CHECK(std::abs(block_excess(ctx, flat)) < 1e-14);

  const std::vector<double> x{1, 2, 4, 8}, y{3, 24, 192, 1536};
  CHECK(fit_loglog_slope(x, y) == doctest::Approx(3.0));
}

TEST_CASE("hand-built profile with one sign change") {
  const CouplingSpec spec = CouplingSpec::from_half_range(16, 5.0);
  const Scales sc = derive_scales(spec);
  const ProfileContext ctx{2.0, spec, sc.ell0, true};
  const double mb = solve_m_beta(2.0);
  const double psi = mb * mb / 10.0;
  const auto n = static_cast<std::size_t>(sc.ellp / sc.ell0);
  std::vector<double> m(n);
  for (std::size_t x = 0; x < n; ++x) m[x] = x < n / 2 ? -mb : mb;
  const double bound = sc.deltam * sc.deltam / 2.0 * (4.0 * mb * mb - 6.0 * psi);
  CHECK(block_excess(ctx, m) >= bound);
}

TEST_CASE("Peierls weights") {
  const CouplingSpec spec = CouplingSpec::from_half_range(16, 5.0);
  const Scales sc = derive_scales(spec);
  const double mb = solve_m_beta(3.0);
  const double psi = mb * mb / 10.0;
  const PeierlsParams p = make_peierls_params(3.0, spec, sc, psi, 11.0, 0.1, 0.18);
  CHECK(p.a_beta == doctest::Approx((1 - 10 / (11 * mb * mb)) * (1 - psi / mb) * (1 - psi / mb)));
  CHECK(p.a_beta > 0.0);
  CHECK(p.a_beta < 1.0);
  CHECK(p.b_beta == doctest::Approx(2 * 5.0 * 3.0 * mb * mb * p.a_beta));

  const Contour q = make_contour({{ElementKind::Rectangle, {0, 2}, 0}});
  CHECK(peierls_weight(p, q) == doctest::Approx(2 * sc.deltam * 0.1 / 7));
  const Contour t = make_contour({{ElementKind::Triangle, {0, 1}, 1}});
  const double lt = spec.lambda_tilde();
  const double wt = 2 * lt * (mb - psi) * (mb - psi) * std::log(sc.deltap) + 0.18 - 5 * lt * std::log(5.0);
  CHECK(peierls_weight(p, t) == doctest::Approx(wt));
  const Contour both = make_contour({{ElementKind::Rectangle, {0, 2}, 0}, {ElementKind::Triangle, {5, 6}, 1}});
  CHECK(peierls_weight(p, both) == doctest::Approx(peierls_weight(p, q) + peierls_weight(p, t)));
  CHECK(peierls_weight_damped(p, both) == doctest::Approx(peierls_weight(p, both) * (1 - 10 / (11 * mb * mb))));
  const auto [lhs, rhs] = sarava_condition(p, 30.0, 1000);
  CHECK(lhs > 1.0);
  CHECK(rhs >= 0.0);
}

TEST_CASE("block interaction difference") {
  const CouplingSpec spec = CouplingSpec::from_half_range(16, 0.0);
  const Scales sc = derive_scales(spec);
  MagProfile m;
  m.ell = sc.ell0;
  m.origin = 0;
  CounterRng rng(3, 3);
  m.values = random_grid_profile(rng, 80, sc.ell0);
  const BlockInteraction far = block_interaction_diff(spec, m, {0, 48}, {48 * 8, 48 * 9}, sc);
  CHECK(far.fine == 0.0);
  CHECK(far.coarse == 0.0);
  CHECK(far.difference == 0.0);
  CHECK_FALSE(far.adjacent);
  const BlockInteraction near = block_interaction_diff(spec, m, {0, 48}, {48, 96}, sc);
  CHECK(near.adjacent);
  CHECK(near.difference == doctest::Approx(std::abs(near.fine - near.coarse)));
  CHECK_THROWS(block_interaction_diff(spec, m, {0, 48}, {24, 96}, sc));
}

TEST_CASE("Hhat enumeration partitions Z") {
  const CouplingSpec spec = CouplingSpec::from_half_range(2, 5.0);
  const Scales sc = derive_scales(spec);
  const double mb = solve_m_beta(3.0);
  const SpinConfig shape = SpinConfig::uniform(0, 12, 1, BoundaryCondition::plus_ones());
  const HatHTable t = hatH_enumerate(spec, 3.0, shape, sc, mb * mb / 10.0, 11.0);
  const GibbsTable g = exact_gibbs(spec, shape, 3.0);
  CHECK(t.log_z == doctest::Approx(g.log_z).epsilon(1e-12));
  REQUIRE(t.empty.has_value());
  double z = 0.0;
  std::uint64_t count = 0;
  for (const HatHBucket& b : t.buckets) {
    z += std::exp(b.log_weight - t.log_z);
    count += b.count;
    CHECK(b.hat_h == doctest::Approx(-spec.gamma() / 3.0 * b.log_weight));
    CHECK(b.log_weight <= t.buckets[*t.empty].log_weight);
  }
  CHECK(z == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(count == 4096);
  CHECK(t.find("empty") == &t.buckets[*t.empty]);

  const HatHTable r = hatH_enumerate(spec, 3.0, shape, sc, mb * mb / 10.0, 11.0,
                                     [](std::span<const Spin> s) { return s[0] == 1; });
  std::uint64_t rc = 0;
  for (const HatHBucket& b : r.buckets) rc += b.count;
  CHECK(rc == 2048);
}

TEST_CASE("entropy partial sum") {
  const EntropySum zero = entropy_partial_sum(8, 1, 3, 0, 11, 48, 1.5);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.lhs <= zero.rhs);
  EntropyOptions single;
  single.single_element_only = true;
  const EntropySum s3 = entropy_partial_sum(8, 1, 3, 30, 11, 48, 1.5, single);
  CHECK(s3.lhs <= s3.rhs);
  CHECK(s3.rhs == doctest::Approx(6.0 * std::exp(-8.0 * std::log(3.0) - (1.0 - std::numbers::ln2))));
  for (std::int64_t m : {3, 4}) {
    double prev = 0.0;
    for (std::int64_t w : {6, 12, 24, 40}) {
      const EntropySum e = entropy_partial_sum(8, 1, m, w, 11, 48, 1.5);
      CHECK(e.lhs >= prev);
      CHECK(e.lhs <= e.rhs);
      prev = e.lhs;
    }
  }
}
