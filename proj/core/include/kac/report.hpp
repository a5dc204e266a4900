#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "kac/config.hpp"
#include "kac/experiment.hpp"

namespace kac {

// Long-format CSV: header "variable,index,value". Run metadata rows come first
// (variable "config.<key>"), then the named statistics.
struct CsvRow {
  std::string variable;
  std::int64_t index = 0;
  std::string value;
  bool operator==(const CsvRow&) const = default;
};

std::vector<CsvRow> stats_rows(const RunStats& stats, const RunConfig& config);
void write_csv(std::ostream& out, const std::vector<CsvRow>& rows);
std::vector<CsvRow> parse_csv(std::istream& in);

// One JSON object per line: {"chain", "step", "contours": [{"lo", "hi", "size", "elements": [...]}]}.
std::string contour_json(const Contour& contour);
void write_contours_jsonl(std::ostream& out, const std::vector<ContourRecord>& records);

enum class ReportFormat { Csv, Text };

// Writes stats.csv or stats.txt (plus contours.jsonl when records exist) into dir.
std::vector<std::filesystem::path> emit_report(const RunStats& stats, const RunConfig& config,
                                               const std::filesystem::path& dir, ReportFormat format);

}  // namespace kac
