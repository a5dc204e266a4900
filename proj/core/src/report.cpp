#include "kac/report.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

namespace kac {

namespace {

std::string num(double v) { return fmt::format("{}", v); }

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

}  // namespace

std::vector<CsvRow> stats_rows(const RunStats& s, const RunConfig& cfg) {
  std::vector<CsvRow> rows;
  if (s.samples == 0) return rows;
  for (const auto& [k, v] : cfg.entries()) rows.push_back({"config." + k, 0, v});
  auto scalar = [&](const std::string& name, const std::string& v) { rows.push_back({name, 0, v}); };
  auto estimate = [&](const std::string& name, const Estimate& e) {
    scalar(name + "_mean", num(e.mean));
    scalar(name + "_stderr", num(e.stderr_));
  };
  scalar("m_beta", num(s.m_beta));
  scalar("psi", num(s.psi));
  scalar("samples", std::to_string(s.samples));
  scalar("origin_block", std::to_string(s.origin_block));
  scalar("steps", std::to_string(s.steps));
  scalar("boundary_attempts", std::to_string(s.boundary_attempts));
  estimate("sigma0", s.sigma0);
  estimate("magnetization", s.magnetization);
  estimate("p_eta0_not_plus", s.p_eta0_not_plus);
  estimate("p_eta0_minus", s.p_eta0_minus);
  estimate("union_bound", s.union_bound);
  scalar("plus_fraction", num(s.plus_fraction));
  const char* names[3] = {"eta_minus", "eta_zero", "eta_plus"};
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t b = 0; b < s.eta_histogram.size(); ++b) {
      rows.push_back({names[k], static_cast<std::int64_t>(b), std::to_string(s.eta_histogram[b][k])});
    }
  }
  for (const auto& [size, count] : s.contour_sizes) rows.push_back({"contour_size", size, std::to_string(count)});
  scalar("contours", std::to_string(s.contours));
  return rows;
}

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows) {
  out << "variable,index,value\n";
  for (const CsvRow& r : rows) out << quote(r.variable) << ',' << r.index << ',' << quote(r.value) << '\n';
}

std::vector<CsvRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "variable,index,value") throw std::runtime_error("missing CSV header");
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 3) throw std::runtime_error("malformed CSV row: " + line);
    rows.push_back({f[0], std::stoll(f[1]), f[2]});
  }
  return rows;
}

std::string contour_json(const Contour& c) {
  nlohmann::json j;
  j["lo"] = c.envelope.lo;
  j["hi"] = c.envelope.hi;
  j["size"] = c.size;
  j["elements"] = nlohmann::json::array();
  for (const Element& e : c.elements) {
    j["elements"].push_back({{"kind", e.kind == ElementKind::Triangle ? "T" : "Q"},
                             {"lo", e.blocks.lo},
                             {"hi", e.blocks.hi},
                             {"sign", e.sign}});
  }
  return j.dump();
}

void write_contours_jsonl(std::ostream& out, const std::vector<ContourRecord>& records) {
  for (const ContourRecord& r : records) {
    nlohmann::json j;
    j["chain"] = r.chain;
    j["step"] = r.step;
    j["contours"] = nlohmann::json::array();
    for (const Contour& c : r.contours) j["contours"].push_back(nlohmann::json::parse(contour_json(c)));
    out << j.dump() << '\n';
  }
}

std::vector<std::filesystem::path> emit_report(const RunStats& stats, const RunConfig& cfg,
                                               const std::filesystem::path& dir, ReportFormat format) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const std::vector<CsvRow> rows = stats_rows(stats, cfg);
  if (format == ReportFormat::Csv) {
    const auto p = dir / "stats.csv";
    std::ofstream out(p);
    write_csv(out, rows);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    written.push_back(p);
  } else {
    const auto p = dir / "stats.txt";
    std::ofstream out(p);
    for (const CsvRow& r : rows) {
      out << r.variable;
      if (r.index != 0 || r.variable.rfind("eta_", 0) == 0 || r.variable == "contour_size") out << '[' << r.index << ']';
      out << ": " << r.value << '\n';
    }
    for (const std::string& w : stats.warnings) out << "warning: " << w << '\n';
    if (!out) throw std::runtime_error("cannot write " + p.string());
    written.push_back(p);
  }
  if (!stats.contour_records.empty()) {
    const auto p = dir / "contours.jsonl";
    std::ofstream out(p);
    write_contours_jsonl(out, stats.contour_records);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    written.push_back(p);
  }
  return written;
}

}  // namespace kac
