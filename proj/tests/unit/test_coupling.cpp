#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "kac/coupling.hpp"
#include "kac/field_cache.hpp"
#include "kac/rng.hpp"
#include "kac/spin_config.hpp"

using namespace kac;

namespace {

double ref_coupling(double gamma, double lambda, std::int64_t r) {
  return static_cast<double>(r) <= 0.5 / gamma ? gamma : lambda / static_cast<double>(r * r);
}

double ref_energy_free(double gamma, double lambda, const std::vector<Spin>& s) {
  double e = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (i == j) continue;
      e -= 0.5 * ref_coupling(gamma, lambda, std::abs(static_cast<std::int64_t>(i) - static_cast<std::int64_t>(j))) *
           s[i] * s[j];
    }
  }
  return e;
}

std::vector<double> ref_fields(const CouplingSpec& spec, const SpinConfig& sigma) {
  const std::size_t n = sigma.size();
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = boundary_field(spec, sigma, i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) v += coupling(spec, std::abs(static_cast<std::int64_t>(i) - static_cast<std::int64_t>(j))) * sigma[j];
    }
    h[i] = v;
  }
  return h;
}

}  // namespace

TEST_CASE("coupling values") {
  const CouplingSpec s = CouplingSpec::from_gamma(0.125, 2.0);
  CHECK(coupling(s, 4) == doctest::Approx(0.125));
  CHECK(coupling(s, 8) == doctest::Approx(0.03125));
  CHECK(coupling(s, 5) == doctest::Approx(0.08));
  CHECK_THROWS(coupling(s, 0));
  for (std::int64_t r = 4; r < 200; ++r) CHECK(coupling(s, r + 1) <= coupling(s, r));
}

TEST_CASE("gamma must be 1/(2k) with k even") {
  CHECK_THROWS(CouplingSpec::from_half_range(3, 1.0));
  CHECK_THROWS(CouplingSpec::from_gamma(0.3, 1.0));
  CHECK(CouplingSpec::from_gamma(1.0 / 64.0, 1.0).half_range() == 32);
}

TEST_CASE("tail_sum") {
  const double z2 = std::numbers::pi * std::numbers::pi / 6.0;
  CHECK(std::abs(tail_sum(1) - z2) < 1e-12);
  CHECK(std::abs(tail_sum(5) - (z2 - (1.0 + 0.25 + 1.0 / 9.0 + 1.0 / 16.0))) < 1e-12);
  const double big = tail_sum(1'000'000);
  CHECK(big >= 1e-6);
  CHECK(big <= 1.0 / 999'999.0);
  for (std::int64_t r : {2, 3, 7, 50, 1000, 123456}) {
    CHECK(tail_sum(r) >= 1.0 / static_cast<double>(r));
    CHECK(tail_sum(r) <= 1.0 / static_cast<double>(r - 1));
    CHECK(tail_sum(r + 1) < tail_sum(r));
  }
}

TEST_CASE("coupling_tail matches a direct sum") {
  const CouplingSpec s = CouplingSpec::from_gamma(0.125, 2.0);
  for (std::int64_t d : {1, 3, 4, 5, 20}) {
    double direct = 0.0;
    for (std::int64_t r = d; r < 2'000'000; ++r) direct += ref_coupling(0.125, 2.0, r);
    direct += 2.0 / 1'999'999.5;
    CHECK(coupling_tail(s, d) == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("hamiltonian examples") {
  const CouplingSpec s = CouplingSpec::from_gamma(0.125, 2.0);
  CHECK(hamiltonian(s, SpinConfig(0, {1, 1}, BoundaryCondition::free())) == doctest::Approx(-0.125));
  CHECK(hamiltonian(s, SpinConfig(0, {1, -1}, BoundaryCondition::free())) == doctest::Approx(0.125));
  const std::vector<Spin> ten(10, 1);
  const double e = hamiltonian(s, SpinConfig(0, ten, BoundaryCondition::free()));
  CHECK(e == doctest::Approx(ref_energy_free(0.125, 2.0, ten)).epsilon(1e-13));
  const double closed = -(30 * 0.125 + 2 * (5.0 / 25 + 4.0 / 36 + 3.0 / 49 + 2.0 / 64 + 1.0 / 81));
  CHECK(e == doctest::Approx(closed).epsilon(1e-13));
}

TEST_CASE("boundary_field") {
  const CouplingSpec s = CouplingSpec::from_gamma(0.125, 2.0);
  const std::size_t L = 200'000;
  const SpinConfig plus = SpinConfig::uniform(0, L, 1, BoundaryCondition::plus_ones());
  const double expect = 0.5 + 2.0 * tail_sum(5);
  CHECK(std::abs(boundary_field(s, plus, 0) - expect) < 4.0 / static_cast<double>(L));
  CHECK(expect == doctest::Approx(0.9426458).epsilon(1e-6));
  const SpinConfig minus = SpinConfig::uniform(0, L, 1, BoundaryCondition::minus_ones());
  CHECK(boundary_field(s, minus, 0) == -boundary_field(s, plus, 0));
  CHECK(std::abs(boundary_field(s, plus, L / 2)) < 1e-4);
  const SpinConfig free = SpinConfig::uniform(0, 10, 1, BoundaryCondition::free());
  CHECK(boundary_field(s, free, 3) == 0.0);
}

TEST_CASE("global flip symmetry is bit-exact") {
  const CouplingSpec s = CouplingSpec::from_half_range(8, 1.5);
  CounterRng rng(3, 0);
  for (int t = 0; t < 20; ++t) {
    std::vector<Spin> v(64);
    for (Spin& x : v) x = rng.uniform() < 0.5 ? Spin{1} : Spin{-1};
    const SpinConfig a(0, v, t % 2 ? BoundaryCondition::plus_ones() : BoundaryCondition::minus_ones());
    CHECK(hamiltonian(s, a) == hamiltonian(s, a.flipped()));
  }
}

TEST_CASE("delta_energy") {
  const CouplingSpec s = CouplingSpec::from_gamma(0.125, 2.0);
  {
    SpinConfig two(0, {1, 1}, BoundaryCondition::free());
    FieldCache c(s, two);
    CHECK(delta_energy(two, c, 0) == doctest::Approx(0.25));
  }
  SpinConfig ten(0, std::vector<Spin>(10, 1), BoundaryCondition::free());
  FieldCache cache(s, ten);
  double row = 0.0;
  for (std::int64_t r = 1; r < 10; ++r) row += ref_coupling(0.125, 2.0, r);
  CHECK(row == doctest::Approx(0.5 + 2.0 * (1.0 / 25 + 1.0 / 36 + 1.0 / 49 + 1.0 / 64 + 1.0 / 81)));
  CHECK(delta_energy(ten, cache, 0) == doctest::Approx(2.0 * row).epsilon(1e-12));

  CounterRng rng(9, 1);
  for (int t = 0; t < 30; ++t) {
    const auto i = static_cast<std::size_t>(rng.below(10));
    const double before = hamiltonian(s, ten);
    const double d = delta_energy(ten, cache, i);
    apply_flip(ten, cache, i);
    CHECK(hamiltonian(s, ten) - before == doctest::Approx(d).epsilon(1e-10));
    const double back = delta_energy(ten, cache, i);
    CHECK(d + back == doctest::Approx(0.0));
    apply_flip(ten, cache, i);
    apply_flip(ten, cache, i);
  }
}

TEST_CASE("stale cache is detected") {
  const CouplingSpec s = CouplingSpec::from_gamma(0.125, 2.0);
  SpinConfig sigma(0, std::vector<Spin>(10, 1), BoundaryCondition::free());
  FieldCache cache(s, sigma);
  sigma.flip(3);
  CHECK_THROWS_AS(delta_energy(sigma, cache, 0), StaleCacheError);
}

TEST_CASE("flip twice restores the cache") {
  const CouplingSpec s = CouplingSpec::from_half_range(4, 2.0);
  SpinConfig sigma = SpinConfig::uniform(0, 300, 1, BoundaryCondition::plus_ones());
  for (UpdateStrategy st : {UpdateStrategy::Eager, UpdateStrategy::Lazy}) {
    FieldCache cache(s, sigma, st, 4);
    const std::vector<double> h0 = cache.fields();
    apply_flip(sigma, cache, 17);
    apply_flip(sigma, cache, 17);
    const std::vector<double> h1 = cache.fields();
    for (std::size_t i = 0; i < h0.size(); ++i) CHECK(std::abs(h0[i] - h1[i]) < 1e-12);
  }
}

TEST_CASE("single flip on the all-plus chain lowers nearby fields") {
  const CouplingSpec s = CouplingSpec::from_half_range(4, 2.0);
  SpinConfig sigma = SpinConfig::uniform(0, 100, 1, BoundaryCondition::plus_ones());
  FieldCache cache(s, sigma);
  const std::vector<double> before = cache.fields();
  apply_flip(sigma, cache, 50);
  for (std::size_t j = 46; j <= 54; ++j) {
    if (j == 50) continue;
    CHECK(cache.field(j) < before[j]);
    CHECK(cache.field(j) > 0.0);
  }
  CHECK(cache.field(50) == doctest::Approx(before[50]));
}

TEST_CASE("cached fields follow random flips") {
  const CouplingSpec s = CouplingSpec::from_half_range(8, 2.0);
  CounterRng rng(17, 2);
  std::vector<Spin> v(1500);
  for (Spin& x : v) x = rng.uniform() < 0.6 ? Spin{1} : Spin{-1};
  for (UpdateStrategy st : {UpdateStrategy::Eager, UpdateStrategy::Lazy}) {
    SpinConfig sigma(-700, v, BoundaryCondition::plus_ones());
    FieldCache cache(s, sigma, st, 32);
    for (int k = 0; k < 500; ++k) apply_flip(sigma, cache, static_cast<std::size_t>(rng.below(v.size())));
    cache.flush();
    const std::vector<double> ref = ref_fields(s, sigma);
    double scale = 0.0, err = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      scale = std::max(scale, std::abs(ref[i]));
      err = std::max(err, std::abs(ref[i] - cache.field(i)));
    }
    CHECK(err / scale < 1e-10);
    const std::vector<double> lib = naive_fields(s, sigma);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(lib[i] - ref[i]) < 1e-10 * scale);
  }
}

TEST_CASE("explicit boundary windows must cover the cutoff") {
  const CouplingSpec s = CouplingSpec::from_half_range(2, 1.0);
  const auto w = static_cast<std::size_t>(s.cutoff_window());
  CHECK_NOTHROW(validate_boundary(s, BoundaryCondition::explicit_window(std::vector<Spin>(w, 1),
                                                                         std::vector<Spin>(w, 1))));
  CHECK_THROWS(validate_boundary(s, BoundaryCondition::explicit_window(std::vector<Spin>(w - 1, 1),
                                                                        std::vector<Spin>(w, 1))));
}
