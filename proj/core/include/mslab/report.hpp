#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace mslab {

using CsvCell = std::variant<std::string, double, std::int64_t>;

// One experiment output: "# key=value ..." metadata line, a header line,
// then rows. Serialization is byte-deterministic (%.17g, LF endings).
struct CsvTable {
  std::map<std::string, std::string> meta;  // ordered so the header line is stable
  std::vector<std::string> columns;
  std::vector<std::vector<CsvCell>> rows;

  void add_row(std::vector<CsvCell> cells);
  std::string serialize() const;
  void write(const std::string& path) const;
};

std::string format_double(double v);

// FNV-1a of the canonical "key=value;" expansion; recorded in CSV metadata
// so re-runs can be matched to their configuration.
std::string config_hash(const std::map<std::string, std::string>& config);

// Minimal static SVG log-log chart: one polyline+markers per named series.
struct SvgSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series);

}  // namespace mslab
