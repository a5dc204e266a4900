#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "kac/coarsegrain.hpp"
#include "kac/config.hpp"
#include "kac/experiment.hpp"
#include "kac/freeenergy.hpp"
#include "kac/geometry.hpp"
#include "kac/meanfield.hpp"
#include "kac/report.hpp"
#include "kac/snapshot.hpp"
#include "kac/verify.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> settings;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "key = value run configuration file")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "master seed (overrides the config)");
  app->add_option("--out", c.out, "output directory (overrides the config)");
  app->add_option("--set", c.settings, "extra key=value setting, may repeat");
}

kac::RunConfig build_config(const Common& c) {
  kac::RunConfig cfg;
  if (!c.config.empty()) cfg = kac::load_config(c.config);
  for (const std::string& s : c.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw kac::ConfigError("--set expects key=value, got '" + s + "'");
    kac::apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out.empty()) cfg.out = c.out;
  return cfg;
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

kac::SpinConfig load_spins(const std::string& path, const kac::RunConfig& cfg) {
  kac::SnapshotRecord rec = kac::read_snapshot(path);
  kac::SpinConfig s = rec.spins;
  s.set_boundary(kac::make_boundary(cfg).boundary);
  return s;
}

int cmd_simulate(const Common& c, const std::string& format, const std::string& snapshot) {
  kac::RunConfig cfg = build_config(c);
  for (const std::string& w : cfg.validate()) std::fprintf(stderr, "warning: %s\n", w.c_str());
  const kac::RunStats stats = kac::run_experiment(cfg);
  const auto files = kac::emit_report(stats, cfg, cfg.out,
                                      format == "text" ? kac::ReportFormat::Text : kac::ReportFormat::Csv);
  for (const auto& f : files) std::printf("%s\n", f.string().c_str());
  if (!snapshot.empty()) {
    kac::write_snapshot(snapshot, {cfg.coupling(), cfg.beta, stats.final_step, cfg.seed, stats.final_state});
    std::printf("%s\n", snapshot.c_str());
  }
  std::fprintf(stderr, "%llu samples in %.2f s; <sigma_0> = %.5f +- %.5f\n",
               static_cast<unsigned long long>(stats.samples), stats.seconds, stats.sigma0.mean,
               stats.sigma0.stderr_);
  return kOk;
}

int cmd_coarse_grain(const Common& c, const std::string& snapshot) {
  const kac::RunConfig cfg = build_config(c);
  const kac::SpinConfig spins = load_spins(snapshot, cfg);
  const kac::Scales sc = cfg.scales();
  const double mb = cfg.m_beta();
  std::vector<kac::CsvRow> rows;
  for (auto [name, ell] : {std::pair{"m_ell0", sc.ell0}, std::pair{"m_ellm", sc.ellm}, std::pair{"m_ellp", sc.ellp}}) {
    const kac::MagProfile p = kac::block_mag(spins, ell);
    for (std::size_t b = 0; b < p.values.size(); ++b) {
      rows.push_back({name, static_cast<std::int64_t>(b), fmt::format("{}", p.values[b])});
    }
  }
  const kac::EtaField eta = kac::eta_field(spins, sc, mb, cfg.psi());
  for (std::size_t b = 0; b < eta.values.size(); ++b) {
    rows.push_back({"eta", static_cast<std::int64_t>(b), std::to_string(eta.values[b])});
  }
  const kac::ThetaField th = kac::theta_field(eta);
  for (std::int64_t h = th.lo(); h < th.hi(); ++h) rows.push_back({"theta", h, std::to_string(th.at(h))});
  auto out = open_out(fs::path(cfg.out) / "coarse.csv");
  kac::write_csv(out, rows);
  std::printf("%s\n", (fs::path(cfg.out) / "coarse.csv").string().c_str());
  return kOk;
}

int cmd_contours(const Common& c, const std::string& snapshot) {
  const kac::RunConfig cfg = build_config(c);
  const kac::SpinConfig spins = load_spins(snapshot, cfg);
  const kac::Scales sc = cfg.scales();
  const kac::EtaField eta = kac::eta_field(spins, sc, cfg.m_beta(), cfg.psi());
  const kac::ElementSet es = kac::elements_from_eta(eta);
  const auto violations = kac::check_compatibility(es.elements, sc.ellp, &eta);
  const std::vector<kac::Contour> g = kac::group_contours(es.elements, cfg.effective_varpi(), sc.ellp);
  const auto path = fs::path(cfg.out) / "contours.jsonl";
  auto out = open_out(path);
  kac::write_contours_jsonl(out, {{0, kac::read_snapshot(snapshot).step, g}});
  std::printf("%s\n", path.string().c_str());
  std::fprintf(stderr, "%zu elements, %zu contours, %zu compatibility violations\n", es.elements.size(), g.size(),
               violations.size());
  return violations.empty() ? kOk : kFailed;
}

int cmd_freeenergy(const Common& c, const std::string& snapshot) {
  const kac::RunConfig cfg = build_config(c);
  const kac::CouplingSpec spec = cfg.coupling();
  const kac::Scales sc = cfg.scales();
  const double psi = cfg.psi();
  const kac::ProfileContext ctx{cfg.beta, spec, sc.ell0, true};
  const kac::EpsilonResult eps = kac::epsilon_ab(ctx, sc, psi);
  const auto blocks = static_cast<std::size_t>(40.0 / spec.gamma() / static_cast<double>(sc.ell0) + 0.5);
  const double jt = kac::j_tilde_at(ctx, blocks);
  const double epsilon = std::min(eps.eps_a, eps.eps_b) / sc.deltam;
  const kac::PeierlsParams p =
      kac::make_peierls_params(cfg.beta, spec, sc, psi, cfg.effective_varpi(), epsilon, jt);
  const fs::path dir(cfg.out);
  {
    auto out = open_out(dir / "freeenergy.csv");
    out << "beta,gamma,lambda,psi,eps_a,eps_b,j_tilde,a_beta,b_beta,c_gamma\n";
    out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", cfg.beta, spec.gamma(), spec.lambda(), psi, eps.eps_a,
                       eps.eps_b, jt, p.a_beta, p.b_beta, p.c_gamma);
    std::printf("%s\n", (dir / "freeenergy.csv").string().c_str());
  }
  if (!snapshot.empty()) {
    const kac::SpinConfig spins = load_spins(snapshot, cfg);
    const kac::EtaField eta = kac::eta_field(spins, sc, p.m_beta, psi);
    const auto g = kac::group_contours(kac::elements_from_eta(eta).elements, p.varpi, sc.ellp);
    auto out = open_out(dir / "weights.csv");
    out << "contour,lo,hi,size,W,W_damped\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
      out << fmt::format("{},{},{},{},{},{}\n", i, g[i].envelope.lo, g[i].envelope.hi, g[i].size,
                         kac::peierls_weight(p, g[i]), kac::peierls_weight_damped(p, g[i]));
    }
    std::printf("%s\n", (dir / "weights.csv").string().c_str());
  }
  return kOk;
}

int cmd_meanfield(const std::vector<double>& betas, double lambda, const std::string& out_path) {
  std::string text = "beta,m_beta,beta_m2,residual\n";
  for (double b : betas) {
    const double m = kac::solve_m_beta(b);
    text += fmt::format("{},{},{},{}\n", b, m, b * m * m, std::abs(m - std::tanh(b * m)));
  }
  if (lambda > 0.0) text += fmt::format("# beta_bar({}) = {}\n", lambda, kac::beta_bar(lambda));
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    auto out = open_out(out_path);
    out << text;
  }
  return kOk;
}

int cmd_verify(const std::string& selector, bool json, bool quick, std::optional<std::uint64_t> seed) {
  kac::VerifyOptions o;
  o.quick = quick;
  if (seed) o.seed = *seed;
  const std::vector<kac::CheckResult> results = kac::run_verify(selector, o);
  bool ok = true;
  for (const auto& r : results) ok = ok && r.passed;
  if (json) {
    std::printf("%s\n", kac::results_json(results).c_str());
  } else {
    for (const auto& r : results) std::printf("%s\n", kac::format_result(r).c_str());
  }
  return ok ? kOk : kFailed;
}

int cmd_report(const std::string& in_path) {
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot read " + in_path);
  const std::vector<kac::CsvRow> rows = kac::parse_csv(in);
  for (const kac::CsvRow& r : rows) {
    if (r.variable.rfind("eta_", 0) == 0 || r.variable == "contour_size") continue;
    std::printf("%s: %s\n", r.variable.c_str(), r.value.c_str());
  }
  std::uint64_t hist = 0, total = 0;
  for (const kac::CsvRow& r : rows) {
    if (r.variable == "contour_size") hist += std::stoull(r.value);
    if (r.variable == "contours") total = std::stoull(r.value);
  }
  std::printf("contour histogram total: %llu (contours row %llu)\n", static_cast<unsigned long long>(hist),
              static_cast<unsigned long long>(total));
  return hist == total ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo and free-energy tools for the 1D Ising model with Kac plus 1/r^2 coupling"};
  app.require_subcommand(1);

  Common common;
  std::string format = "csv", snapshot, selector, out_path;
  std::vector<double> betas{1.1, 1.5, 2.0, 3.0, 5.0, 10.0};
  double lambda = 0.0;
  bool json = false, quick = false;

  auto* sim = app.add_subcommand("simulate", "run Markov chains and write statistics");
  add_common(sim, common);
  sim->add_option("--format", format, "csv or text")->check(CLI::IsMember({"csv", "text"}));
  sim->add_option("--snapshot", snapshot, "write the last state of chain 0 to this KAC1 file");

  auto* cg = app.add_subcommand("coarse-grain", "block magnetizations, eta and Theta of a snapshot");
  add_common(cg, common);
  cg->add_option("--snapshot", snapshot, "KAC1 snapshot")->required()->check(CLI::ExistingFile);

  auto* ct = app.add_subcommand("contours", "triangles, rectangles and contours of a snapshot");
  add_common(ct, common);
  ct->add_option("--snapshot", snapshot, "KAC1 snapshot")->required()->check(CLI::ExistingFile);

  auto* fe = app.add_subcommand("freeenergy", "rectangle costs, surface tension and Peierls weights");
  add_common(fe, common);
  fe->add_option("--snapshot", snapshot, "KAC1 snapshot whose contours get weights")->check(CLI::ExistingFile);

  auto* mf = app.add_subcommand("meanfield", "mean-field magnetization table");
  mf->add_option("--beta", betas, "inverse temperatures");
  mf->add_option("--lambda", lambda, "report beta_bar for this lambda");
  mf->add_option("--out", out_path, "CSV file (stdout when omitted)");

  auto* vf = app.add_subcommand("verify", "run the verification suites");
  vf->add_option("selector", selector, "module name, check id or 'criteria'; empty runs everything");
  vf->add_flag("--json", json, "machine-readable output");
  vf->add_flag("--quick", quick, "shorter Monte Carlo runs");
  vf->add_option("--seed", common.seed, "seed for randomized checks");

  auto* rp = app.add_subcommand("report", "summarize a stats.csv file");
  rp->add_option("--in", out_path, "stats.csv")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(common, format, snapshot);
    if (cg->parsed()) return cmd_coarse_grain(common, snapshot);
    if (ct->parsed()) return cmd_contours(common, snapshot);
    if (fe->parsed()) return cmd_freeenergy(common, snapshot);
    if (mf->parsed()) return cmd_meanfield(betas, lambda, out_path);
    if (vf->parsed()) return cmd_verify(selector, json, quick, common.seed);
    if (rp->parsed()) return cmd_report(out_path);
  } catch (const kac::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailed;
  }
  return kUsage;
}
