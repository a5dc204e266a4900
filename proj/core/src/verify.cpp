#include "kac/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "kac/coarsegrain.hpp"
#include "kac/config.hpp"
#include "kac/experiment.hpp"
#include "kac/field_cache.hpp"
#include "kac/freeenergy.hpp"
#include "kac/geometry.hpp"
#include "kac/meanfield.hpp"
#include "kac/rng.hpp"
#include "kac/sampler.hpp"
#include "kac/snapshot.hpp"

namespace kac {

namespace {

using Fn = std::function<CheckResult(const VerifyOptions&)>;

struct Check {
  std::string id;
  std::string name;
  std::string suite;
  bool criterion;
  Fn run;
};

CheckResult result(bool passed, double measured, double threshold, std::string detail) {
  CheckResult r;
  r.passed = passed;
  r.measured = measured;
  r.threshold = threshold;
  r.detail = std::move(detail);
  return r;
}

CheckResult check_mean_field(const VerifyOptions&) {
  const double betas[] = {1.1, 1.5, 2.0, 3.0, 5.0, 10.0};
  double worst = 0.0, trip = 0.0;
  bool increasing = true;
  double prev = -1.0;
  for (double b : betas) {
    const double m = solve_m_beta(b);
    worst = std::max(worst, std::abs(m - std::tanh(b * m)));
    const double x = b * m * m;
    increasing = increasing && x > prev;
    prev = x;
    trip = std::max(trip, std::abs(beta_tilde(x) - b));
  }
  return result(worst < 1e-12 && increasing && trip < 1e-8, worst, 1e-12,
                fmt::format("max |m - tanh(beta m)| = {:.3e}; beta m^2 increasing: {}; beta_tilde round trip {:.3e}",
                            worst, increasing, trip));
}

CheckResult check_energy_kernel(const VerifyOptions& o) {
  const CouplingSpec spec = CouplingSpec::from_half_range(32, 2.0);
  const std::size_t n = 10000;
  CounterRng rng(o.seed, 2);
  std::vector<Spin> v(n);
  for (Spin& s : v) s = rng.uniform() < 0.5 ? Spin{1} : Spin{-1};
  double worst = 0.0;
  for (UpdateStrategy st : {UpdateStrategy::Eager, UpdateStrategy::Lazy}) {
    SpinConfig sigma(0, v, BoundaryCondition::plus_ones());
    FieldCache cache(spec, sigma, st);
    CounterRng flips(o.seed, 3);
    for (int k = 0; k < 1000; ++k) apply_flip(sigma, cache, static_cast<std::size_t>(flips.below(n)));
    const std::vector<double> got = cache.fields();
    const std::vector<double> want = naive_fields(spec, sigma);
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diff = std::max(diff, std::abs(got[i] - want[i]));
      scale = std::max(scale, std::abs(want[i]));
    }
    worst = std::max(worst, diff / scale);
  }
  return result(worst < 1e-10, worst, 1e-10,
                fmt::format("N = 10^4, 10^3 flips, eager and lazy caches; max error relative to max |h| = {:.3e}",
                            worst));
}

CheckResult check_sampler(const VerifyOptions& o) {
  const CouplingSpec spec = CouplingSpec::from_half_range(2, 1.0);
  const double beta = 1.5;
  const SpinConfig shape = SpinConfig::uniform(0, 10, 1, BoundaryCondition::plus_ones());
  const GibbsTable exact = exact_gibbs(spec, shape, beta);
  ChainState state(spec, shape, beta, o.seed, 0);
  std::vector<double> counts(exact.prob.size(), 0.0);
  const std::uint64_t steps = o.quick ? 2'000'000 : 10'000'000;
  for (std::uint64_t k = 0; k < steps; ++k) {
    mcmc_step(state, Kernel::Metropolis);
    counts[index_of(state.spins)] += 1.0;
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) tv += std::abs(counts[i] / static_cast<double>(steps) - exact.prob[i]);
  tv *= 0.5;
  double db = 0.0;
  for (Kernel k : {Kernel::Metropolis, Kernel::Glauber}) {
    const std::vector<double> p = transition_matrix(spec, shape, beta, k);
    const std::size_t s = exact.prob.size();
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t j = 0; j < s; ++j) {
        db = std::max(db, std::abs(exact.prob[i] * p[i * s + j] - exact.prob[j] * p[j * s + i]));
      }
    }
  }
  return result(tv < 0.02 && db < 1e-12, tv, 0.02,
                fmt::format("{} Metropolis steps, TV distance {:.4f}; detailed balance residual {:.3e}", steps, tv, db));
}

CheckResult check_fg_identity(const VerifyOptions& o) {
  double worst = 0.0;
  std::size_t instances = 0;
  CounterRng rng(o.seed, 4);
  for (double lambda : {0.0, 1.0}) {
    const CouplingSpec spec = CouplingSpec::from_half_range(2, lambda);
    for (std::size_t nb : {1, 2}) {
      for (int kind = 0; kind < 3; ++kind) {
        BoundaryCondition bc = BoundaryCondition::free();
        if (kind == 1) bc = BoundaryCondition::plus_ones();
        if (kind == 2) {
          std::vector<Spin> l(20), r(20);
          for (Spin& s : l) s = rng.uniform() < 0.7 ? Spin{1} : Spin{-1};
          for (Spin& s : r) s = rng.uniform() < 0.3 ? Spin{1} : Spin{-1};
          bc = BoundaryCondition::explicit_window(l, r, 0.4, -0.6);
        }
        const SpinConfig shape = SpinConfig::uniform(0, nb * 4, 1, bc);
        for (double beta : {0.5, 1.5, 3.0}) {
          const ProfileContext ctx{beta, spec, 4, true};
          std::vector<std::int64_t> sums(nb);
          std::size_t total = nb == 1 ? 5 : 25;
          for (std::size_t c = 0; c < total; ++c) {
            std::size_t t = c;
            std::vector<double> m(nb);
            for (std::size_t b = 0; b < nb; ++b) {
              sums[b] = 2 * static_cast<std::int64_t>(t % 5) - 4;
              m[b] = static_cast<double>(sums[b]) / 4.0;
              t /= 5;
            }
            const double lhs = -spec.gamma() / beta * log_constrained_partition(ctx, shape, sums);
            const double rhs = eval_F(ctx, m, ProfileBoundary::from_spins(bc, 4)) + eval_G(ctx, shape, sums);
            worst = std::max(worst, std::abs(lhs - rhs));
            ++instances;
          }
        }
      }
    }
  }
  return result(worst < 1e-9, worst, 1e-9,
                fmt::format("{} instances (1-2 blocks of 4, free/plus/explicit, lambda 0 and 1); max gap {:.3e}",
                            instances, worst));
}

EtaField random_eta(CounterRng& rng, std::int64_t blocks) {
  EtaField eta;
  eta.psi = 0.1;
  eta.outside_sign = rng.uniform() < 0.5 ? 1 : -1;
  int v = eta.outside_sign;
  const double stay = 0.5 + 0.45 * rng.uniform();
  for (std::int64_t b = 0; b < blocks; ++b) {
    if (rng.uniform() > stay) v = static_cast<int>(rng.below(3)) - 1;
    eta.values.push_back(v);
  }
  return eta;
}

CheckResult check_contours(const VerifyOptions& o) {
  const std::int64_t ellp = 48;
  const double varpi = 11.0;
  CounterRng rng(o.seed, 5);
  std::size_t bad_compat = 0, bad_theta = 0, bad_sep = 0, bad_order = 0, elements = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::int64_t n = 16 + static_cast<std::int64_t>(rng.below(241));
    const EtaField eta = random_eta(rng, n);
    const ElementSet es = elements_from_eta(eta);
    elements += es.elements.size();
    if (!check_compatibility(es.elements, ellp, &eta).empty()) ++bad_compat;
    try {
      if (reconstruct_theta(es.elements, n, eta.outside_sign) != es.theta) ++bad_theta;
    } catch (const std::invalid_argument&) {
      ++bad_theta;
    }
    const std::vector<Contour> g = group_contours(es.elements, varpi, ellp);
    if (!separation_violations(g, varpi, ellp).empty()) ++bad_sep;
    for (std::uint64_t s = 0; s < 10; ++s) {
      if (group_contours(es.elements, varpi, ellp, o.seed * 1000 + static_cast<std::uint64_t>(trial) * 10 + s) != g) {
        ++bad_order;
        break;
      }
    }
  }
  const std::size_t bad = bad_compat + bad_theta + bad_sep + bad_order;
  return result(bad == 0, static_cast<double>(bad), 0.0,
                fmt::format("1000 eta fields, {} elements; compatibility failures {}, Theta round-trip failures {}, "
                            "separation failures {}, merge-order dependence {}",
                            elements, bad_compat, bad_theta, bad_sep, bad_order));
}

CheckResult check_epsilon(const VerifyOptions&) {
  const CouplingSpec spec = CouplingSpec::from_half_range(16, 5.0);
  const Scales sc = derive_scales(spec);
  const double beta = 2.0;
  const double mb = solve_m_beta(beta);
  const ProfileContext ctx{beta, spec, sc.ell0, true};
  std::vector<double> psis, eas;
  double eb_min = std::numeric_limits<double>::infinity();
  bool positive = true;
  for (int i = 0; i < 5; ++i) {
    const double psi = mb * mb / 20.0 * std::pow(4.0, i / 4.0);
    const EpsilonResult e = epsilon_ab(ctx, sc, psi);
    psis.push_back(psi);
    eas.push_back(e.eps_a);
    eb_min = std::min(eb_min, e.eps_b);
    positive = positive && e.eps_a > 0.0;
  }
  const double bound = sc.deltam * mb * mb / 4.0;
  const double slope = positive ? fit_loglog_slope(psis, eas) : 0.0;
  const bool ok = eb_min >= bound && positive && slope >= 2.5 && slope <= 3.5;
  std::string eas_text;
  for (double v : eas) eas_text += fmt::format(" {:.4e}", v);
  return result(ok, slope, 2.5,
                fmt::format("scales ({}, {}, {}); min eps_b = {:.4e} vs delta_- m^2/4 = {:.4e}; eps_a over psi grid:{}; "
                            "fitted exponent {:.3f} (accepted range [2.5, 3.5])",
                            sc.ell0, sc.ellm, sc.ellp, eb_min, bound, eas_text, slope));
}

CheckResult check_phi(const VerifyOptions&) {
  const CouplingSpec spec = CouplingSpec::from_half_range(16, 0.0);
  const Scales sc = derive_scales(spec);
  const double beta = 2.0;
  const double mb = solve_m_beta(beta);
  const ProfileContext ctx{beta, spec, sc.ell0, false};
  const std::size_t blocks = static_cast<std::size_t>(std::lround(20.0 / spec.gamma() / static_cast<double>(sc.ell0)));
  const SolveResult flat = phi_profile(ctx, blocks, ProfileBoundary::constant(mb), mb);
  const ProfileBoundary mixed = ProfileBoundary::split(0.0, mb);
  const SolveResult phi = phi_profile(ctx, blocks, mixed, mb);
  bool monotone = true;
  for (std::size_t x = 1; x < blocks; ++x) monotone = monotone && phi.profile[x] >= phi.profile[x - 1];
  std::size_t last = 1;
  while (last < blocks && std::abs(phi.profile[last] - mb) > 1e-10) ++last;
  const DecayFit fit = fit_decay(phi.profile, mb, 1, last);
  const Functional f(ctx, blocks, mixed);
  double fd = 0.0;
  std::vector<double> m = phi.profile;
  const double h = 1e-6;
  for (std::size_t x = 0; x < blocks; ++x) {
    const double keep = m[x];
    m[x] = keep + h;
    const double up = f.value(m);
    m[x] = keep - h;
    const double down = f.value(m);
    m[x] = keep;
    fd = std::max(fd, std::abs(up - down) / (2.0 * h));
  }
  const bool ok = flat.residual < 1e-12 && monotone && fit.r2 > 0.99 && fd < 1e-6;
  return result(ok, fit.r2, 0.99,
                fmt::format("{} blocks of {}; constant boundary residual {:.2e}; mixed boundary monotone {}, "
                            "decay fit over {} blocks slope {:.4f} R^2 {:.6f}; max finite-difference gradient {:.2e}",
                            blocks, sc.ell0, flat.residual, monotone, fit.points, fit.slope, fit.r2, fd));
}

CheckResult check_j_tilde(const VerifyOptions&) {
  const CouplingSpec spec = CouplingSpec::from_half_range(16, 0.0);
  const Scales sc = derive_scales(spec);
  std::vector<std::size_t> sizes;
  for (double s : {10.0, 20.0, 40.0, 80.0, 160.0}) {
    sizes.push_back(static_cast<std::size_t>(std::lround(s / spec.gamma() / static_cast<double>(sc.ell0))));
  }
  const SurfaceTension st = j_tilde({2.0, spec, sc.ell0, false}, sizes);
  const double inc = std::max(std::abs(st.values[3] - st.values[2]), std::abs(st.values[4] - st.values[3]));
  std::vector<double> by_beta;
  for (double b : {1.5, 2.0, 3.0}) by_beta.push_back(j_tilde_at({b, spec, sc.ell0, false}, sizes[2]));
  const bool ok = inc < 1e-6 && by_beta[0] > 0.0 && by_beta[0] < by_beta[1] && by_beta[1] < by_beta[2];
  std::string seq;
  for (double v : st.values) seq += fmt::format(" {:.10f}", v);
  return result(ok, inc, 1e-6,
                fmt::format("beta = 2 sequence over 10..160 / gamma:{}; increment beyond 40 / gamma {:.2e}; "
                            "J(1.5, 2, 3) = {:.6f}, {:.6f}, {:.6f}",
                            seq, inc, by_beta[0], by_beta[1], by_beta[2]));
}

CheckResult check_physics(const VerifyOptions& o) {
  RunConfig cfg;
  cfg.half_range = 16;
  cfg.lambda = 5.0;
  cfg.beta = 3.0;
  cfg.blocks = 683;
  cfg.boundary = BoundaryKind::SampledSPlus;
  cfg.seed = o.seed;
  cfg.chains = 4;
  cfg.burn_in = o.quick ? 50 : 200;
  cfg.sweeps = o.quick ? 200 : 2000;
  const RunStats s = run_experiment(cfg);
  const double dev = std::abs(s.sigma0.mean - s.m_beta);
  const bool ok = dev <= 0.05 && s.plus_fraction >= 0.95 && s.p_eta0_minus.mean == 0.0;
  return result(ok, dev, 0.05,
                fmt::format("{} sites, {} samples; <sigma_0> = {:.5f} +- {:.5f} vs m_beta = {:.5f}; "
                            "eta = +1 fraction {:.4f}; P(eta(0) != 1) = {:.4f}, P(eta(0) = -1) = {:.4f}; "
                            "contour-at-0 frequency {:.4f}",
                            cfg.sites(), s.samples, s.sigma0.mean, s.sigma0.stderr_, s.m_beta, s.plus_fraction,
                            s.p_eta0_not_plus.mean, s.p_eta0_minus.mean, s.union_bound.mean));
}

CheckResult check_entropy(const VerifyOptions&) {
  const double beta = 3.0;
  const double varpi = default_varpi(beta);
  const CouplingSpec spec = CouplingSpec::from_half_range(16, 5.0);
  const Scales sc = derive_scales(spec);
  bool ok = true;
  double worst = 0.0;
  std::string detail;
  for (std::int64_t m : {3, 4}) {
    const EntropySum s = entropy_partial_sum(8.0, 1.0, m, 100, varpi, sc.ellp, sc.deltap);
    EntropyOptions all;
    all.realizable_only = false;
    const EntropySum u = entropy_partial_sum(8.0, 1.0, m, 100, varpi, sc.ellp, sc.deltap, all);
    ok = ok && s.lhs <= s.rhs;
    worst = std::max(worst, s.lhs / s.rhs);
    detail += fmt::format("m = {}: {} contours, lhs {:.4e} <= rhs {:.4e}; compatible element sets without the "
                          "realizability filter: {} with sum {:.4e}. ",
                          m, s.contours, s.lhs, s.rhs, u.contours, u.lhs);
  }
  return result(ok, worst, 1.0, detail + "measured = max lhs / rhs");
}

CheckResult check_peierls_enumeration(const VerifyOptions&) {
  const CouplingSpec spec = CouplingSpec::from_half_range(2, 5.0);
  const Scales sc = derive_scales(spec);
  const double beta = 3.0;
  const double mb = solve_m_beta(beta);
  const double varpi = default_varpi(beta);
  double min_gap = std::numeric_limits<double>::infinity();
  double sum_err = 0.0;
  std::size_t buckets = 0;
  bool ok = true;
  for (std::size_t n : {16, 20}) {
    for (BoundaryCondition bc : {BoundaryCondition::plus_ones(), BoundaryCondition::minus_ones()}) {
      const SpinConfig shape = SpinConfig::uniform(0, n, 1, bc);
      const HatHTable t = hatH_enumerate(spec, beta, shape, sc, mb * mb / 10.0, varpi);
      if (!t.empty) {
        ok = false;
        continue;
      }
      const double h0 = t.buckets[*t.empty].hat_h;
      double z = 0.0;
      for (std::size_t b = 0; b < t.buckets.size(); ++b) {
        z += std::exp(t.buckets[b].log_weight - t.log_z);
        if (b != *t.empty) min_gap = std::min(min_gap, t.buckets[b].hat_h - h0);
      }
      sum_err = std::max(sum_err, std::abs(z - 1.0));
      buckets += t.buckets.size() - 1;
    }
  }
  ok = ok && min_gap > 0.0 && sum_err < 1e-9;
  return result(ok, min_gap, 0.0,
                fmt::format("16 and 20 spins, plus and minus boundaries, scales ({}, {}, {}); {} nonempty buckets; "
                            "min Hhat(Gamma) - Hhat(empty) = {:.4e}; bucket sum vs Z relative error {:.2e}",
                            sc.ell0, sc.ellm, sc.ellp, buckets, min_gap, sum_err));
}

CheckResult check_coarsegrain(const VerifyOptions&) {
  const CouplingSpec spec = CouplingSpec::from_half_range(16, 5.0);
  const Scales sc = derive_scales(spec);
  const double mb = solve_m_beta(3.0);
  const SpinConfig plus = SpinConfig::uniform(0, static_cast<std::size_t>(4 * sc.ellp), 1, BoundaryCondition::plus_ones());
  const EtaField eta = eta_field(plus, sc, mb, 1.0 - mb + 0.01);
  bool ok = std::all_of(eta.values.begin(), eta.values.end(), [](int v) { return v == 1; });
  std::vector<Spin> spins(plus.values().begin(), plus.values().end());
  for (std::int64_t i = 0; i < sc.ellm; i += 2) spins[static_cast<std::size_t>(sc.ellp + i)] = -1;
  const EtaField holed = eta_field(spins, 0, sc, mb, mb * mb / 10.0, 1);
  ok = ok && holed.values[1] == 0 && holed.values[0] == 1;
  ok = ok && sc.ell0 == 6 && sc.ellm == 12 && sc.ellp == 48;
  return result(ok, ok ? 1.0 : 0.0, 1.0,
                fmt::format("scales at gamma = 1/32: ({}, {}, {}); all-plus eta and zeroed sub-block cases", sc.ell0,
                            sc.ellm, sc.ellp));
}

CheckResult check_snapshot(const VerifyOptions& o) {
  CounterRng rng(o.seed, 6);
  std::vector<Spin> v(1000);
  for (Spin& s : v) s = rng.uniform() < 0.5 ? Spin{1} : Spin{-1};
  SnapshotRecord rec{CouplingSpec::from_half_range(16, 5.0), 3.0, 42, o.seed, SpinConfig(-500, v, BoundaryCondition::free())};
  std::vector<std::uint8_t> bytes = encode_snapshot(rec);
  const SnapshotRecord back = decode_snapshot(bytes);
  bool ok = back.spins == rec.spins && back.step == rec.step && back.coupling == rec.coupling && back.beta == rec.beta;
  bytes[bytes.size() / 2] ^= 0x10;
  try {
    (void)decode_snapshot(bytes);
    ok = false;
  } catch (const SnapshotError&) {
  }
  return result(ok, ok ? 1.0 : 0.0, 1.0, "KAC1 round trip and corrupted-byte detection");
}

const std::vector<Check>& registry() {
  static const std::vector<Check> checks = {
      {"C1", "mean-field solver", "meanfield", true, check_mean_field},
      {"C2", "energy kernel cache", "model-core", true, check_energy_kernel},
      {"C3", "sampler exactness", "sampler", true, check_sampler},
      {"C4", "F + G identity", "freeenergy", true, check_fg_identity},
      {"C5", "contour pipeline", "geometry", true, check_contours},
      {"C6", "rectangle cost bounds", "freeenergy", true, check_epsilon},
      {"C7", "minimizer profile", "freeenergy", true, check_phi},
      {"C8", "surface tension convergence", "freeenergy", true, check_j_tilde},
      {"C9", "physics proxy", "harness-cli", true, check_physics},
      {"C10", "entropy partial sum", "freeenergy", true, check_entropy},
      {"C11", "desk-scale Peierls positivity", "freeenergy", true, check_peierls_enumeration},
      {"coarsegrain.eta", "phase labels and scales", "coarsegrain", false, check_coarsegrain},
      {"harness.snapshot", "snapshot round trip", "harness-cli", false, check_snapshot},
  };
  return checks;
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"model-core", "meanfield", "sampler", "coarsegrain", "geometry", "freeenergy", "harness-cli"};
}

std::vector<CheckResult> run_verify(std::string_view selector, const VerifyOptions& options) {
  std::vector<const Check*> chosen;
  for (const Check& c : registry()) {
    if (selector.empty() || selector == c.suite || selector == c.id || (selector == "criteria" && c.criterion)) {
      chosen.push_back(&c);
    }
  }
  if (chosen.empty()) throw std::invalid_argument(fmt::format("unknown verify selector '{}'", selector));
  std::vector<CheckResult> out;
  for (const Check* c : chosen) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = c->run(options);
    } catch (const std::exception& e) {
      r = result(false, std::numeric_limits<double>::quiet_NaN(), 0.0, std::string("exception: ") + e.what());
    }
    r.id = c->id;
    r.name = c->name;
    r.suite = c->suite;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_result(const CheckResult& r) {
  return fmt::format("{} {:<4} {:<30} measured={:.6g} threshold={:.6g} ({:.2f} s) {}", r.passed ? "PASS" : "FAIL",
                     r.id, r.name, r.measured, r.threshold, r.seconds, r.detail);
}

std::string results_json(const std::vector<CheckResult>& results) {
  nlohmann::json j = nlohmann::json::array();
  for (const CheckResult& r : results) {
    j.push_back({{"id", r.id},
                 {"name", r.name},
                 {"suite", r.suite},
                 {"passed", r.passed},
                 {"measured", r.measured},
                 {"threshold", r.threshold},
                 {"detail", r.detail},
                 {"seconds", r.seconds}});
  }
  return j.dump(2);
}

}  // namespace kac
