// mslab: point-set quality measurements on S^d / T^d and the reproduction
// experiments (rates, limit theorem, discrepancy equivalence).

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mslab/discrepancy.hpp"
#include "mslab/experiments.hpp"
#include "mslab/families.hpp"
#include "mslab/metrics.hpp"
#include "mslab/numerics.hpp"
#include "mslab/pointset_io.hpp"
#include "mslab/recovery.hpp"
#include "mslab/version.hpp"

namespace {

using namespace mslab;

double parse_gamma(const std::string& text) {
  if (text == "inf" || text == "infinity") return inf;
  try {
    return std::stod(text);
  } catch (...) {
    throw std::invalid_argument("cannot parse '" + text + "' as a real or 'inf'");
  }
}

void print_or_write(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + out_path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + out_path);
}

CsvTable make_row_table(std::uint64_t seed, const std::map<std::string, std::string>& flags,
                        std::vector<std::string> columns) {
  CsvTable table;
  table.meta["seed"] = std::to_string(seed);
  table.meta["config"] = config_hash(flags);
  table.meta["version"] = version_string;
  table.columns = std::move(columns);
  return table;
}

int run_gen(std::uint64_t seed, const std::string& out_path, const std::string& manifold,
            const std::string& family, int n) {
  Manifold m = Manifold::from_name(manifold);
  PointSet ps = make_family(m, family, n, RandomSource{seed, 0});
  std::ostringstream os;
  write_pointset(os, ps);
  print_or_write(out_path, os.str());
  return 0;
}

int run_metrics(std::uint64_t seed, const std::string& out_path, const std::string& points,
                const std::string& gamma_text, double tol, int resolution, bool normalized) {
  PointSet P = read_pointset_file(points);
  const Manifold& m = P.manifold;
  double gamma = parse_gamma(gamma_text);
  DistortionEstimate est;
  if (std::isinf(gamma)) {
    CoveringOptions opts;
    opts.tol = tol;
    opts.resolution = resolution;
    est = covering_radius(m, P, opts);
  } else {
    int res = resolution > 0
                  ? resolution
                  : std::clamp(static_cast<int>(std::ceil(3.0 * std::sqrt(double(P.size())))),
                               64, 320);
    est = distortion(m, P, gamma, quadrature_rule(m, res),
                     normalized ? Normalization::normalized : Normalization::volume);
  }
  CsvTable table = make_row_table(
      seed,
      {{"points", points}, {"gamma", gamma_text}, {"tol", format_double(tol)}},
      {"label", "n", "gamma", "value", "err", "method"});
  const char* method = est.method == DistortionMethod::mesh_max ? "mesh-max"
                       : est.method == DistortionMethod::quadrature ? "quadrature"
                                                                    : "monte-carlo";
  table.add_row({P.label, std::int64_t(P.size()), gamma_text, est.value, est.error,
                 std::string(method)});
  print_or_write(out_path, table.serialize());
  return 0;
}

int run_discrepancy(std::uint64_t seed, const std::string& out_path,
                    const std::string& points, const std::string& weights_arg,
                    std::int64_t mc_samples) {
  PointSet P = read_pointset_file(points);
  const int n = P.size();
  Eigen::VectorXd w;
  if (weights_arg == "equal") {
    w = Eigen::VectorXd::Constant(n, 1.0 / n);
  } else {
    std::ifstream in(weights_arg);
    if (!in) throw std::invalid_argument("cannot open weights file: " + weights_arg);
    std::vector<double> vals;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      vals.push_back(std::stod(line));
    }
    if (static_cast<int>(vals.size()) != n) {
      throw std::invalid_argument("weights file has " + std::to_string(vals.size()) +
                                  " entries for " + std::to_string(n) + " points");
    }
    w = Eigen::Map<Eigen::VectorXd>(vals.data(), n);
  }
  GramSystem sys = build_gram_system(P);
  double wce_equal = std::sqrt(wce_squared(sys, Eigen::VectorXd::Constant(n, 1.0 / n)));
  OptimalWeights opt = optimal_weights(sys);
  // err: MC cross-check of the kernel identity for the requested weights.
  WeightedPointSet wps(P, w);
  auto [d2, se] = d2_direct(wps, mc_samples, RandomSource{seed, 0});
  double kernel_value = std::sqrt(wce_squared(sys, w));
  CsvTable table = make_row_table(
      seed,
      {{"points", points}, {"weights", weights_arg},
       {"mc_samples", std::to_string(mc_samples)}},
      {"label", "n", "wce_equal", "wce_opt", "ratio", "err"});
  table.meta["d2_mc"] = format_double(d2);
  table.meta["d2_mc_se"] = format_double(se);
  table.add_row({P.label, std::int64_t(n), wce_equal, opt.min_wce,
                 opt.min_wce > 0 ? wce_equal / opt.min_wce : 0.0,
                 std::abs(kernel_value - d2)});
  print_or_write(out_path, table.serialize());
  return 0;
}

int run_weights(const std::string& out_path, const std::string& points) {
  PointSet P = read_pointset_file(points);
  GramSystem sys = build_gram_system(P);
  OptimalWeights opt = optimal_weights(sys);
  std::string content;
  for (int i = 0; i < opt.weights.size(); ++i) {
    content += format_double(opt.weights[i]) + "\n";
  }
  content += "# min_wce=" + format_double(opt.min_wce) + "\n";
  print_or_write(out_path, content);
  return 0;
}

int run_recover(std::uint64_t seed, const std::string& out_path, const std::string& points,
                const std::string& function, int degree, double delta, int eval_resolution,
                const std::string& q_text, double s, double p, double tol) {
  PointSet P = read_pointset_file(points);
  const Manifold& m = P.manifold;
  double q = parse_gamma(q_text);
  QualityParams qp = quality_params(s, p, q, m.dim());
  auto f = builtin_function(m, function);
  double dlt = delta > 0.0 ? delta : m.injectivity_radius() / 25.0;
  PartitionOfUnity pou = build_partition(m, dlt);
  MLSConfig mls;
  mls.degree = degree >= 0 ? degree : mls_degree_for_smoothness(s);
  RecoveryOperator op = build_recovery(m, P, pou, mls);

  Eigen::VectorXd samples(P.size());
  for (int i = 0; i < P.size(); ++i) samples[i] = f(P.point(i));
  QuadratureRule rule = quadrature_rule(m, eval_resolution);
  Eigen::VectorXd recovered = recover(op, samples, rule.nodes);
  Eigen::VectorXd diff(rule.size());
  for (int i = 0; i < rule.size(); ++i) diff[i] = std::abs(recovered[i] - f(rule.nodes.col(i)));
  double error;
  if (std::isinf(q)) {
    error = diff.maxCoeff();
  } else {
    double acc = 0.0;
    for (int i = 0; i < rule.size(); ++i) acc += rule.weights[i] * std::pow(diff[i], q);
    error = std::pow(acc, 1.0 / q);
  }
  double functional;
  if (std::isinf(qp.gamma)) {
    CoveringOptions copts;
    copts.tol = tol;
    functional = covering_radius(m, P, copts).value;
  } else {
    int res = std::clamp(static_cast<int>(std::ceil(3.0 * std::sqrt(double(P.size())))), 64, 320);
    functional = distortion_value(m, P, qp.gamma, quadrature_rule(m, res));
  }
  functional = std::pow(functional, qp.alpha);

  CsvTable table = make_row_table(
      seed,
      {{"points", points}, {"function", function}, {"q", q_text},
       {"s", format_double(s)}, {"p", format_double(p)}},
      {"label", "n", "q", "error", "dist_norm_gamma_alpha", "ratio"});
  table.add_row({P.label, std::int64_t(P.size()), q_text, error, functional,
                 functional > 0 ? error / functional : 0.0});
  print_or_write(out_path, table.serialize());
  return 0;
}

int run_experiment(const ExperimentConfig& cfg) {
  ExperimentReport report;
  if (cfg.experiment == "limit-theorem") {
    report = run_limit_theorem(cfg);
  } else if (cfg.experiment == "rates") {
    report = run_rates(cfg);
  } else if (cfg.experiment == "equivalence") {
    report = run_equivalence(cfg);
  } else if (cfg.experiment == "recovery-rates") {
    report = run_recovery_rates(cfg);
  } else {
    throw std::invalid_argument("unknown experiment: " + cfg.experiment);
  }
  auto files = emit(report, cfg.out_dir);
  for (const auto& f : files) std::cout << "wrote " << f << "\n";
  for (const auto& [key, value] : report.summary) {
    std::cout << key << "=" << value << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"point-set quality on compact manifolds: covering radius, distortion, "
               "cap discrepancy, recovery"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out_path;
  std::string config_path;
  app.add_option("--seed", seed, "random seed (global)");
  app.add_option("--out", out_path, "output file or directory (default: stdout / cwd)");
  app.add_option("--config", config_path, "key=value config file for experiment subcommands");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a point-set file");
  std::string gen_manifold = "S2", gen_family = "fibonacci";
  int gen_n = 100;
  gen->add_option("--manifold", gen_manifold, "S1|S2|T2|...");
  gen->add_option("--family", gen_family, "random|fibonacci|cluster-cover|grid|octahedron");
  gen->add_option("--n", gen_n, "point count");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "covering radius / L_gamma distortion");
  std::string met_points, met_gamma = "2";
  double met_tol = 1e-6;
  int met_resolution = 0;
  bool met_normalized = false;
  metrics->add_option("--points", met_points, "point-set file")->required();
  metrics->add_option("--gamma", met_gamma, "exponent, real or 'inf'");
  metrics->add_option("--tol", met_tol, "covering-radius refinement tolerance");
  metrics->add_option("--resolution", met_resolution, "quadrature/mesh resolution (0=auto)");
  metrics->add_flag("--normalized", met_normalized, "use the normalized measure");

  // discrepancy
  auto* disc = app.add_subcommand("discrepancy", "weighted spherical cap L2-discrepancy");
  std::string disc_points, disc_weights = "equal";
  std::int64_t disc_samples = 200000;
  disc->add_option("--points", disc_points, "point-set file (S^2)")->required();
  disc->add_option("--weights", disc_weights, "'equal' or a weights file");
  disc->add_option("--mc-samples", disc_samples, "Monte Carlo samples for the direct check");

  // weights
  auto* weights = app.add_subcommand("weights", "discrepancy-optimal cubature weights");
  std::string w_points;
  weights->add_option("--points", w_points, "point-set file (S^2)")->required();

  // recover
  auto* recover_cmd = app.add_subcommand("recover", "chart-based MLS recovery error");
  std::string rec_points, rec_function = "exp3", rec_q = "2";
  int rec_degree = -1, rec_eval_resolution = 48;
  double rec_delta = 0.0, rec_s = 2.0, rec_p = 2.0, rec_tol = 1e-5;
  recover_cmd->add_option("--points", rec_points, "point-set file")->required();
  recover_cmd->add_option("--function", rec_function, "builtin function name");
  recover_cmd->add_option("--degree", rec_degree, "MLS degree (-1 = from s)");
  recover_cmd->add_option("--delta", rec_delta, "chart radius (0 = inj/25)");
  recover_cmd->add_option("--eval-resolution", rec_eval_resolution, "evaluation rule resolution");
  recover_cmd->add_option("--q", rec_q, "error norm exponent, real or 'inf'");
  recover_cmd->add_option("--s", rec_s, "smoothness");
  recover_cmd->add_option("--p", rec_p, "sample-space integrability");
  recover_cmd->add_option("--tol", rec_tol, "covering-radius tolerance (gamma = inf)");

  // experiments
  auto* rates = app.add_subcommand("rates", "moment-vs-n rate study");
  auto* limit = app.add_subcommand("limit-theorem", "distortion limit-theorem study");
  auto* equiv = app.add_subcommand("equivalence", "min-wce vs distortion equivalence study");
  auto* recrates = app.add_subcommand("recovery-rates", "recovery-error rate study");
  std::vector<std::string> overrides;
  for (auto* cmd : {rates, limit, equiv, recrates}) {
    cmd->add_option("--set", overrides, "config override key=value (repeatable)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return run_gen(seed, out_path, gen_manifold, gen_family, gen_n);
    if (metrics->parsed()) {
      return run_metrics(seed, out_path, met_points, met_gamma, met_tol, met_resolution,
                         met_normalized);
    }
    if (disc->parsed()) return run_discrepancy(seed, out_path, disc_points, disc_weights,
                                               disc_samples);
    if (weights->parsed()) return run_weights(out_path, w_points);
    if (recover_cmd->parsed()) {
      return run_recover(seed, out_path, rec_points, rec_function, rec_degree, rec_delta,
                         rec_eval_resolution, rec_q, rec_s, rec_p, rec_tol);
    }
    // experiment subcommands
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = ExperimentConfig::from_file(config_path);
    if (rates->parsed()) cfg.experiment = "rates";
    if (limit->parsed()) cfg.experiment = "limit-theorem";
    if (equiv->parsed()) cfg.experiment = "equivalence";
    if (recrates->parsed()) cfg.experiment = "recovery-rates";
    if (app.count("--seed") > 0) cfg.seed = seed;
    if (!out_path.empty()) cfg.out_dir = out_path;
    for (const auto& kv : overrides) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return run_experiment(cfg);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
