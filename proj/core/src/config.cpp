#include "kac/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "kac/meanfield.hpp"

namespace kac {

namespace {

std::string_view trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

template <class T>
T parse_integer(std::string_view key, std::string_view v) {
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ConfigError(fmt::format("{}: expected an integer, got '{}'", key, v));
  }
  return out;
}

double parse_real(std::string_view key, std::string_view v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(std::string(v), &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, v));
  }
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(fmt::format("{}: expected true or false, got '{}'", key, v));
}

// Accepts "1/32", "0.03125" or an explicit half range through the key half_range.
std::int64_t parse_gamma(std::string_view v) {
  double g = 0.0;
  if (const auto slash = v.find('/'); slash != std::string_view::npos) {
    const double num = parse_real("gamma", trim(v.substr(0, slash)));
    const double den = parse_real("gamma", trim(v.substr(slash + 1)));
    g = num / den;
  } else {
    g = parse_real("gamma", v);
  }
  if (!(g > 0.0)) throw ConfigError("gamma must be positive");
  const double k = 1.0 / (2.0 * g);
  const auto r = static_cast<std::int64_t>(std::llround(k));
  if (std::abs(k - static_cast<double>(r)) > 1e-9 || r < 2 || r % 2 != 0) {
    throw ConfigError(fmt::format("gamma = {} is not 1/(2k) with k a positive even integer", v));
  }
  return r;
}

std::string opt_text(const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : "auto"; }

}  // namespace

std::string_view to_string(Kernel kernel) { return kernel == Kernel::Metropolis ? "metropolis" : "glauber"; }

Kernel parse_kernel(std::string_view name) {
  if (name == "metropolis") return Kernel::Metropolis;
  if (name == "glauber") return Kernel::Glauber;
  throw ConfigError(fmt::format("unknown kernel '{}'", name));
}

std::string_view to_string(UpdateStrategy s) { return s == UpdateStrategy::Eager ? "eager" : "lazy"; }

UpdateStrategy parse_strategy(std::string_view name) {
  if (name == "eager") return UpdateStrategy::Eager;
  if (name == "lazy") return UpdateStrategy::Lazy;
  throw ConfigError(fmt::format("unknown update strategy '{}'", name));
}

CouplingSpec RunConfig::coupling() const { return CouplingSpec::from_half_range(half_range, lambda); }

Scales RunConfig::scales() const {
  ScaleOverrides ov;
  ov.ell0 = ell0;
  ov.ellm = ellm;
  ov.ellp = ellp;
  return derive_scales(coupling(), ov);
}

double RunConfig::m_beta() const { return solve_m_beta(beta); }

double RunConfig::psi() const {
  const double m = m_beta();
  return m > 0.0 ? m * m / psi_divisor : 1.0 / psi_divisor;
}

double RunConfig::effective_varpi() const {
  if (varpi > 0.0) return varpi;
  return m_beta() > 0.0 ? default_varpi(beta) : 11.0;
}

std::int64_t RunConfig::sites() const { return blocks * scales().ellp; }

std::int64_t RunConfig::first_site() const { return -(blocks / 2) * scales().ellp; }

std::vector<std::string> RunConfig::validate() const {
  std::vector<std::string> warnings;
  try {
    (void)coupling();
    (void)scales();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be finite and nonnegative");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be nonnegative");
  if (blocks < 1) throw ConfigError("blocks must be positive");
  if (!(psi_divisor > 0.0)) throw ConfigError("psi_divisor must be positive");
  if (chains < 1) throw ConfigError("chains must be positive");
  if (snapshot_every < 1) throw ConfigError("snapshot_every must be positive");
  if (batches < 1) throw ConfigError("batches must be positive");
  if (boundary == BoundaryKind::Explicit) throw ConfigError("explicit boundaries cannot be given in a config file");
  const double bb = lambda > 0.0 ? beta_bar(lambda) : std::numeric_limits<double>::infinity();
  if (beta <= bb) {
    const std::string msg = fmt::format("beta = {} is not above beta_bar = {}", beta, bb);
    if (!allow_subcritical) throw ConfigError(msg + " (set allow_subcritical = true to run anyway)");
    warnings.push_back("subcritical: " + msg);
  }
  if ((boundary == BoundaryKind::SampledSPlus || boundary == BoundaryKind::SampledSMinus) && m_beta() == 0.0) {
    throw ConfigError("sampled boundaries need beta > 1");
  }
  return warnings;
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  return {
      {"gamma", fmt::format("1/{}", 2 * half_range)},
      {"lambda", fmt::format("{}", lambda)},
      {"beta", fmt::format("{}", beta)},
      {"blocks", std::to_string(blocks)},
      {"boundary", std::string(to_string(boundary))},
      {"psi_divisor", fmt::format("{}", psi_divisor)},
      {"ell0", opt_text(ell0)},
      {"ellm", opt_text(ellm)},
      {"ellp", opt_text(ellp)},
      {"varpi", fmt::format("{}", varpi)},
      {"kernel", std::string(to_string(kernel))},
      {"strategy", std::string(to_string(strategy))},
      {"seed", std::to_string(seed)},
      {"chains", std::to_string(chains)},
      {"sweeps", std::to_string(sweeps)},
      {"burn_in", std::to_string(burn_in)},
      {"snapshot_every", std::to_string(snapshot_every)},
      {"batches", std::to_string(batches)},
      {"record_contours", record_contours ? "true" : "false"},
      {"allow_subcritical", allow_subcritical ? "true" : "false"},
      {"out", out},
  };
}

std::string RunConfig::to_text() const {
  std::string s;
  for (const auto& [k, v] : entries()) s += k + " = " + v + "\n";
  return s;
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  auto opt_int = [&](std::optional<std::int64_t>& dst) {
    if (value == "auto") {
      dst.reset();
    } else {
      dst = parse_integer<std::int64_t>(key, value);
    }
  };
  if (key == "gamma") {
    cfg.half_range = parse_gamma(value);
  } else if (key == "half_range") {
    cfg.half_range = parse_integer<std::int64_t>(key, value);
  } else if (key == "lambda") {
    cfg.lambda = parse_real(key, value);
  } else if (key == "beta") {
    cfg.beta = parse_real(key, value);
  } else if (key == "blocks") {
    cfg.blocks = parse_integer<std::int64_t>(key, value);
  } else if (key == "boundary") {
    try {
      cfg.boundary = parse_boundary_kind(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "psi_divisor") {
    cfg.psi_divisor = parse_real(key, value);
  } else if (key == "ell0") {
    opt_int(cfg.ell0);
  } else if (key == "ellm") {
    opt_int(cfg.ellm);
  } else if (key == "ellp") {
    opt_int(cfg.ellp);
  } else if (key == "varpi") {
    cfg.varpi = parse_real(key, value);
  } else if (key == "kernel") {
    cfg.kernel = parse_kernel(value);
  } else if (key == "strategy") {
    cfg.strategy = parse_strategy(value);
  } else if (key == "seed") {
    cfg.seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "chains") {
    cfg.chains = parse_integer<std::uint64_t>(key, value);
  } else if (key == "sweeps") {
    cfg.sweeps = parse_integer<std::uint64_t>(key, value);
  } else if (key == "burn_in") {
    cfg.burn_in = parse_integer<std::uint64_t>(key, value);
  } else if (key == "snapshot_every") {
    cfg.snapshot_every = parse_integer<std::uint64_t>(key, value);
  } else if (key == "batches") {
    cfg.batches = parse_integer<std::uint64_t>(key, value);
  } else if (key == "record_contours") {
    cfg.record_contours = parse_bool(key, value);
  } else if (key == "allow_subcritical") {
    cfg.allow_subcritical = parse_bool(key, value);
  } else if (key == "out") {
    cfg.out = std::string(value);
  } else {
    throw ConfigError(fmt::format("unknown key '{}'", key));
  }
}

RunConfig parse_config(std::string_view text, const RunConfig& base) {
  RunConfig cfg = base;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(fmt::format("line {}: expected key = value", line_no));
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    try {
      apply_setting(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const RunConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base);
}

}  // namespace kac
