#include "mslab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mslab {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void CsvTable::add_row(std::vector<CsvCell> cells) {
  if (cells.size() != columns.size()) {
    throw std::invalid_argument("CsvTable: row width does not match the header");
  }
  rows.push_back(std::move(cells));
}

std::string CsvTable::serialize() const {
  std::string out = "#";
  for (const auto& [key, value] : meta) {
    out += " " + key + "=" + value;
  }
  out += "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out += (i ? "," : "") + columns[i];
  }
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      if (std::holds_alternative<std::string>(row[i])) {
        out += std::get<std::string>(row[i]);
      } else if (std::holds_alternative<double>(row[i])) {
        out += format_double(std::get<double>(row[i]));
      } else {
        out += std::to_string(std::get<std::int64_t>(row[i]));
      }
    }
    out += "\n";
  }
  return out;
}

void CsvTable::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << serialize();
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string config_hash(const std::map<std::string, std::string>& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [key, value] : config) {
    mix(key);
    mix("=");
    mix(value);
    mix(";");
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

struct Range {
  double lo = 0, hi = 0;
};

Range log_range(const std::vector<SvgSeries>& series, bool use_x) {
  Range r{1e300, -1e300};
  for (const auto& s : series) {
    const auto& v = use_x ? s.x : s.y;
    for (double value : v) {
      if (!(value > 0.0)) continue;
      double lv = std::log10(value);
      r.lo = std::min(r.lo, lv);
      r.hi = std::max(r.hi, lv);
    }
  }
  if (r.lo > r.hi) r = {0.0, 1.0};
  if (r.hi - r.lo < 1e-9) {
    r.lo -= 0.5;
    r.hi += 0.5;
  }
  return r;
}

const char* series_color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  return palette[i % 8];
}

}  // namespace

void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series) {
  const double width = 640, height = 480;
  const double ml = 70, mr = 20, mt = 40, mb = 50;
  Range rx = log_range(series, true), ry = log_range(series, false);
  auto px = [&](double v) {
    return ml + (std::log10(v) - rx.lo) / (rx.hi - rx.lo) * (width - ml - mr);
  };
  auto py = [&](double v) {
    return height - mb - (std::log10(v) - ry.lo) / (ry.hi - ry.lo) * (height - mt - mb);
  };
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\">\n";
  svg += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + title +
         "</text>\n";
  svg += "<text x=\"320\" y=\"470\" text-anchor=\"middle\" font-size=\"12\">" + x_label +
         "</text>\n";
  svg += "<text x=\"16\" y=\"240\" text-anchor=\"middle\" font-size=\"12\" "
         "transform=\"rotate(-90 16 240)\">" + y_label + "</text>\n";
  // Decade grid lines.
  for (int e = static_cast<int>(std::floor(rx.lo)); e <= static_cast<int>(std::ceil(rx.hi)); ++e) {
    double v = std::pow(10.0, e);
    double x = px(v);
    if (x < ml - 1 || x > width - mr + 1) continue;
    svg += "<line x1=\"" + format_double(x) + "\" y1=\"" + format_double(mt) + "\" x2=\"" +
           format_double(x) + "\" y2=\"" + format_double(height - mb) +
           "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + format_double(x) + "\" y=\"" + format_double(height - mb + 16) +
           "\" text-anchor=\"middle\" font-size=\"10\">1e" + std::to_string(e) + "</text>\n";
  }
  for (int e = static_cast<int>(std::floor(ry.lo)); e <= static_cast<int>(std::ceil(ry.hi)); ++e) {
    double v = std::pow(10.0, e);
    double y = py(v);
    if (y < mt - 1 || y > height - mb + 1) continue;
    svg += "<line x1=\"" + format_double(ml) + "\" y1=\"" + format_double(y) + "\" x2=\"" +
           format_double(width - mr) + "\" y2=\"" + format_double(y) +
           "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + format_double(ml - 6) + "\" y=\"" + format_double(y + 3) +
           "\" text-anchor=\"end\" font-size=\"10\">1e" + std::to_string(e) + "</text>\n";
  }
  svg += "<rect x=\"" + format_double(ml) + "\" y=\"" + format_double(mt) + "\" width=\"" +
         format_double(width - ml - mr) + "\" height=\"" + format_double(height - mt - mb) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    std::string pts;
    for (std::size_t i = 0; i < ser.x.size(); ++i) {
      if (!(ser.x[i] > 0.0) || !(ser.y[i] > 0.0)) continue;
      pts += format_double(px(ser.x[i])) + "," + format_double(py(ser.y[i])) + " ";
      svg += "<circle cx=\"" + format_double(px(ser.x[i])) + "\" cy=\"" +
             format_double(py(ser.y[i])) + "\" r=\"3\" fill=\"" + series_color(s) + "\"/>\n";
    }
    svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + series_color(s) +
           "\" stroke-width=\"1.5\"/>\n";
    svg += "<text x=\"" + format_double(width - mr - 8) + "\" y=\"" +
           format_double(mt + 16 + 14 * static_cast<double>(s)) +
           "\" text-anchor=\"end\" font-size=\"11\" fill=\"" + series_color(s) + "\">" +
           ser.name + "</text>\n";
  }
  svg += "</svg>\n";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << svg;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace mslab
