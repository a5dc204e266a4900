#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "kac/config.hpp"
#include "kac/experiment.hpp"
#include "kac/report.hpp"
#include "kac/snapshot.hpp"
#include "kac/verify.hpp"

using namespace kac;

namespace {

RunConfig small_run() {
  RunConfig c;
  c.blocks = 8;
  c.chains = 2;
  c.sweeps = 40;
  c.burn_in = 10;
  c.batches = 4;
  return c;
}

std::string csv_text(const RunStats& s, const RunConfig& c) {
  std::ostringstream out;
  write_csv(out, stats_rows(s, c));
  return out.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(
      "# comment\n"
      "gamma = 1/64\n"
      "lambda = 2.5   # trailing\n"
      "beta = 2\n"
      "boundary = plus\n"
      "kernel = glauber\n"
      "ellp = 96\n"
      "record_contours = true\n");
  CHECK(c.half_range == 32);
  CHECK(c.lambda == 2.5);
  CHECK(c.beta == 2.0);
  CHECK(c.boundary == BoundaryKind::PlusOnes);
  CHECK(c.kernel == Kernel::Glauber);
  CHECK(c.ellp == 96);
  CHECK(c.record_contours);
  CHECK(parse_config("gamma = 0.03125\n").half_range == 16);

  CHECK_THROWS_AS(parse_config("gamma = 1/10\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("beta = hot\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("beta 3\n"), ConfigError);

  const RunConfig d;
  const RunConfig back = parse_config(d.to_text());
  CHECK(back.to_text() == d.to_text());
}

TEST_CASE("config validation") {
  RunConfig c;
  CHECK(c.validate().empty());
  CHECK(c.effective_varpi() == 11.0);
  CHECK(c.psi() == doctest::Approx(c.m_beta() * c.m_beta() / 10.0));
  CHECK(c.sites() == 64 * 48);
  CHECK(c.first_site() == -32 * 48);
  c.beta = 1.2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.allow_subcritical = true;
  c.boundary = BoundaryKind::PlusOnes;
  CHECK(c.validate().size() == 1);
  c.ellm = 16;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("batch means") {
  const Estimate e = batch_means({{1, 1, 3, 3}, {2, 2, 2, 2}}, 2);
  CHECK(e.mean == doctest::Approx(2.0));
  CHECK(e.stderr_ == doctest::Approx(std::sqrt(2.0 / 3.0 / 4.0)));
  CHECK(batch_means({}, 4).mean == 0.0);
}

TEST_CASE("report rows") {
  std::ostringstream empty;
  write_csv(empty, stats_rows(RunStats{}, RunConfig{}));
  CHECK(empty.str() == "variable,index,value\n");

  const std::vector<CsvRow> rows{{"a", 0, "1.5"}, {"b,c", 3, "say \"hi\""}, {"d", -2, ""}};
  std::ostringstream out;
  write_csv(out, rows);
  std::istringstream in(out.str());
  CHECK(parse_csv(in) == rows);
}

TEST_CASE("small experiment") {
  const RunConfig cfg = small_run();
  const RunStats s = run_experiment(cfg);
  CHECK(s.samples == cfg.chains * cfg.sweeps);
  for (const Estimate* e : {&s.p_eta0_not_plus, &s.p_eta0_minus, &s.union_bound}) {
    CHECK(e->mean >= 0.0);
    CHECK(e->mean <= 1.0);
  }
  CHECK(s.plus_fraction >= 0.0);
  CHECK(s.plus_fraction <= 1.0);
  REQUIRE(s.eta_histogram.size() == 8);
  for (const auto& h : s.eta_histogram) CHECK(h[0] + h[1] + h[2] == s.samples);
  std::uint64_t total = 0;
  for (const auto& [size, n] : s.contour_sizes) total += n;
  CHECK(total == s.contours);
  CHECK(s.p_eta0_not_plus.mean <= s.union_bound.mean + 3 * (s.p_eta0_not_plus.stderr_ + s.union_bound.stderr_) + 1e-12);
  CHECK(s.final_state.size() == static_cast<std::size_t>(cfg.sites()));

  const std::vector<CsvRow> rows = stats_rows(s, cfg);
  std::uint64_t hist = 0, contours = 0;
  for (const CsvRow& r : rows) {
    if (r.variable == "contour_size") hist += std::stoull(r.value);
    if (r.variable == "contours") contours = std::stoull(r.value);
  }
  CHECK(hist == contours);
  CHECK(rows.front().variable.rfind("config.", 0) == 0);
}

TEST_CASE("identical configurations give identical reports") {
  const RunConfig cfg = small_run();
  CHECK(csv_text(run_experiment(cfg), cfg) == csv_text(run_experiment(cfg), cfg));
}

TEST_CASE("mirrored boundary negates the statistics") {
  RunConfig cfg = small_run();
  cfg.boundary = BoundaryKind::PlusOnes;
  cfg.sweeps = 100;
  const RunStats p = run_experiment(cfg);
  cfg.boundary = BoundaryKind::MinusOnes;
  const RunStats m = run_experiment(cfg);
  const double tol = 3.0 * std::hypot(p.sigma0.stderr_, m.sigma0.stderr_) + 1e-3;
  CHECK(std::abs(p.sigma0.mean + m.sigma0.mean) <= tol);
  CHECK(std::abs(p.magnetization.mean + m.magnetization.mean) <= 3.0 * std::hypot(p.magnetization.stderr_, m.magnetization.stderr_) + 1e-3);
}

TEST_CASE("infinite temperature run") {
  RunConfig cfg = small_run();
  cfg.beta = 0.0;
  cfg.allow_subcritical = true;
  cfg.boundary = BoundaryKind::PlusOnes;
  cfg.sweeps = 200;
  const RunStats s = run_experiment(cfg);
  CHECK(std::abs(s.sigma0.mean) <= 3.0 * s.sigma0.stderr_ + 0.02);
}

TEST_CASE("snapshot io") {
  const CouplingSpec spec = CouplingSpec::from_half_range(16, 5.0);
  std::vector<Spin> v(101);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (i * 7) % 3 ? Spin{1} : Spin{-1};
  const SnapshotRecord rec{spec, 3.0, 12345, 99, SpinConfig(-50, v, BoundaryCondition::free())};
  const std::vector<std::uint8_t> bytes = encode_snapshot(rec);
  const SnapshotRecord back = decode_snapshot(bytes);
  CHECK(back.coupling == spec);
  CHECK(back.beta == 3.0);
  CHECK(back.step == 12345);
  CHECK(back.seed == 99);
  CHECK(back.spins.first() == -50);
  CHECK(std::vector<Spin>(back.spins.values().begin(), back.spins.values().end()) == v);
  CHECK(encode_snapshot(back) == bytes);

  std::vector<std::uint8_t> bad = bytes;
  bad[bytes.size() / 2] ^= 0x10;
  CHECK_THROWS_AS(decode_snapshot(bad), SnapshotError);
  std::vector<std::uint8_t> version = bytes;
  version[4] = 9;
  CHECK_THROWS_WITH_AS(decode_snapshot(version), doctest::Contains("version"), SnapshotError);
  std::vector<std::uint8_t> magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_AS(decode_snapshot(magic), SnapshotError);
}

TEST_CASE("verify selectors") {
  const std::vector<std::string> names = suite_names();
  CHECK(std::find(names.begin(), names.end(), "freeenergy") != names.end());
  const auto one = run_verify("C1", {});
  REQUIRE(one.size() == 1);
  CHECK(one[0].passed);
  const auto mf = run_verify("meanfield", {});
  for (const CheckResult& r : mf) CHECK(r.suite == "meanfield");
  CHECK_THROWS_AS(run_verify("no-such-suite", {}), std::invalid_argument);
  CHECK(results_json(one).find("\"C1\"") != std::string::npos);
}

TEST_CASE("doubling the sweeps shrinks the standard error") {
  RunConfig cfg;
  cfg.beta = 1.2;
  cfg.allow_subcritical = true;
  cfg.boundary = BoundaryKind::PlusOnes;
  cfg.blocks = 4;
  cfg.chains = 4;
  cfg.batches = 25;
  cfg.burn_in = 50;
  cfg.sweeps = 2000;
  const double a = run_experiment(cfg).magnetization.stderr_;
  cfg.sweeps = 4000;
  const double b = run_experiment(cfg).magnetization.stderr_;
  CHECK(b / a == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.3));
}
