#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mslab/fitting.hpp"
#include "mslab/manifold.hpp"
#include "mslab/report.hpp"

namespace mslab {

// Shared configuration for the reproduction harness. Parsed from
// "key=value" files and CLI flags; serialized canonically for hashing.
struct ExperimentConfig {
  std::string experiment = "rates";
  std::string manifold = "S2";
  std::vector<int> n_list = {64, 128, 256, 512, 1024, 2048, 4096, 8192};
  double gamma = 2.0;  // may be infinity
  double alpha = 1.0;
  int trials = 50;
  std::uint64_t seed = 1;
  int resolution = 0;  // quadrature resolution; 0 = auto
  std::string out_dir = ".";
  std::vector<std::string> families = {"random"};
  // recovery-rates parameters
  double s = 2.0;
  double p = 2.0;
  double q = 1.0;  // may be infinity
  std::string function = "exp3";
  double delta = 0.0;  // partition radius; 0 = inj(M)/25
  int eval_resolution = 48;
  double tol = 1e-5;

  void validate() const;
  std::map<std::string, std::string> to_map() const;

  // Applies one key=value assignment (the file format and CLI --config hook).
  void set(const std::string& key, const std::string& value);
  static ExperimentConfig from_file(const std::string& path);
};

struct SvgPlot {
  std::string stem;
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<SvgSeries> series;
};

struct ExperimentReport {
  std::string name;
  std::map<std::string, std::string> meta;     // merged into every CSV header
  std::map<std::string, std::string> summary;  // key figures, also in the summary CSV
  std::vector<std::pair<std::string, CsvTable>> tables;  // filename stem -> table
  std::vector<SvgPlot> plots;
};

// Writes <stem>.csv / <stem>.svg plus <name>_summary.csv under out_dir.
// Re-running with the same config yields byte-identical files.
std::vector<std::string> emit(const ExperimentReport& report, const std::string& out_dir);

// n^{gamma/d} int dist^gamma dvol against the limit constant
// omega_d^{-gamma/d} Gamma(1 + gamma/d) vol(M)^{1 + gamma/d} for uniform
// points, with E|Z_n - z|^p proxies for p in {1,2}.
ExperimentReport run_limit_theorem(const ExperimentConfig& cfg);

// The limit constant itself (uniform density).
double limit_theorem_constant(const Manifold& m, double gamma);

// Moment-vs-n rate study: families may mix "random" (trials, bootstrap CI)
// and deterministic families; covering radius (gamma = inf) is fitted
// against n / log n for random points.
ExperimentReport run_rates(const ExperimentConfig& cfg);

// min-wce vs distortion^{(d+1)/2} across families and n (Corollary-style
// equivalence table with ratio spread and per-family slopes).
ExperimentReport run_equivalence(const ExperimentConfig& cfg);

// L_q recovery error vs the distance functional for the configured
// (s, p, q); reports the log-log correlation and per-family slopes.
ExperimentReport run_recovery_rates(const ExperimentConfig& cfg);

// Built-in smooth test functions by name ("one", "coord3", "exp3", "bump" on
// S^2; "one", "cos2pi", "bump" on T^2).
std::function<double(const Point&)> builtin_function(const Manifold& m,
                                                     const std::string& name);

}  // namespace mslab
