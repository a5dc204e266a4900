#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <numbers>

#include "kac/meanfield.hpp"

using namespace kac;

namespace {

double bisect_root(double beta) {
  double lo = 1e-9, hi = 1.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (std::tanh(beta * mid) > mid ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("m_beta") {
  CHECK(solve_m_beta(1.0) == 0.0);
  CHECK(solve_m_beta(0.5) == 0.0);
  CHECK(solve_m_beta(100.0) > 0.999);
  CHECK(solve_m_beta(2.0) == doctest::Approx(0.95750).epsilon(1e-5));
  for (double b : {1.1, 1.5, 2.0, 3.0, 5.0, 10.0}) {
    const double m = solve_m_beta(b);
    CHECK(std::abs(m - std::tanh(b * m)) < 1e-12);
    CHECK(std::abs(m - bisect_root(b)) < 1e-10);
    CHECK(mean_field_point(b).m_beta == m);
  }
}

TEST_CASE("entropy and free energy") {
  CHECK(entropy(0.0) == doctest::Approx(std::numbers::ln2));
  CHECK_THROWS(entropy(1.0));
  CHECK(entropy(1.0, true) == 0.0);
  CHECK(f_beta(2.0, 0.0) == doctest::Approx(-std::numbers::ln2 / 2.0));
  const double m2 = solve_m_beta(2.0);
  CHECK(f_beta(2.0, m2) < f_beta(2.0, 0.0));
  for (double m : {0.1, 0.5, 0.9}) {
    CHECK(entropy(m) == entropy(-m));
    CHECK(f_beta(3.0, m) == f_beta(3.0, -m));
    const double h = 1e-6;
    CHECK(f_beta_prime(3.0, m) == doctest::Approx((f_beta(3.0, m + h) - f_beta(3.0, m - h)) / (2 * h)).epsilon(1e-6));
  }
  for (double b : {1.5, 2.0, 3.0}) {
    const double m = solve_m_beta(b);
    const double h = 1e-4;
    const double second = (f_beta(b, m + h) - 2 * f_beta(b, m) + f_beta(b, m - h)) / (h * h);
    CHECK(second > 1e-6);
    CHECK(std::abs(f_beta_prime(b, m)) < 1e-9);
  }
}

TEST_CASE("beta_tilde") {
  double prev = 0.0;
  for (double b : {1.1, 1.5, 2.0, 3.0, 5.0, 10.0}) {
    const double m = solve_m_beta(b);
    CHECK(b * m * m > prev);
    prev = b * m * m;
  }
  for (double b : {1.2, 2.0, 3.0, 5.0}) {
    const double m = solve_m_beta(b);
    CHECK(std::abs(beta_tilde(b * m * m) - b) < 1e-8);
  }
  CHECK(beta_tilde(1e-6) > 1.0);
  CHECK(beta_tilde(1e-6) < 1.01);
  const double b7 = beta_tilde(7.0);
  const double m7 = solve_m_beta(b7);
  CHECK(std::abs(b7 * m7 * m7 - 7.0) < 1e-10);
  CHECK(beta_tilde(2.0) < beta_tilde(3.0));
}

TEST_CASE("beta_bar and the Dobrushin bound") {
  CHECK(beta_bar(7.5, 7.5) == doctest::Approx(beta_tilde(1.0)));
  CHECK(beta_bar(5.0) == doctest::Approx(beta_tilde(1.5)));
  CHECK(beta_bar(10.0) < beta_bar(5.0));
  CHECK(dobrushin_lower(0.125, 2.0) == doctest::Approx(0.5));
  CHECK(dobrushin_lower(1e-9, 1e-3) == doctest::Approx(1.0));
  for (double lambda : {0.5, 1.0, 5.0, 20.0}) CHECK(dobrushin_lower(1.0 / 1024, lambda) < beta_bar(lambda));
}

TEST_CASE("default varpi") {
  for (double b : {1.5, 2.0, 3.0}) {
    const double m = solve_m_beta(b);
    const int v = default_varpi(b);
    CHECK(v * m * m > 10.0);
    CHECK((v - 1) * m * m <= 10.0);
  }
  CHECK(default_varpi(3.0) == 11);
}
