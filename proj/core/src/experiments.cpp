#include "mslab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mslab/discrepancy.hpp"
#include "mslab/families.hpp"
#include "mslab/metrics.hpp"
#include "mslab/numerics.hpp"
#include "mslab/parallel.hpp"
#include "mslab/recovery.hpp"
#include "mslab/version.hpp"

namespace mslab {

namespace {

std::string format_gamma(double gamma) {
  return std::isinf(gamma) ? "inf" : format_double(gamma);
}

double parse_real_or_inf(const std::string& text) {
  if (text == "inf" || text == "infinity") return inf;
  return std::stod(text);
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

std::vector<std::string> parse_string_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

std::string join_ints(const std::vector<int>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    out += (i ? "," : "") + std::to_string(items[i]);
  }
  return out;
}

// Deterministic per-(family, n, purpose) stream derivation.
RandomSource derive(const ExperimentConfig& cfg, std::uint64_t a, std::uint64_t b,
                    std::uint64_t c) {
  return RandomSource{cfg.seed, 0}.child(a).child(b).child(c);
}

std::map<std::string, std::string> base_meta(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> meta;
  meta["config"] = config_hash(cfg.to_map());
  meta["seed"] = std::to_string(cfg.seed);
  meta["version"] = version_string;
  return meta;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (n_list.empty()) throw std::invalid_argument("config: n_list must be nonempty");
  for (std::size_t i = 1; i < n_list.size(); ++i) {
    if (n_list[i] <= n_list[i - 1]) {
      throw std::invalid_argument("config: n_list must be strictly increasing");
    }
  }
  if (n_list.front() < 1) throw std::invalid_argument("config: n values must be >= 1");
  Manifold::from_name(manifold);
}

std::map<std::string, std::string> ExperimentConfig::to_map() const {
  std::map<std::string, std::string> out;
  out["experiment"] = experiment;
  out["manifold"] = manifold;
  out["n_list"] = join_ints(n_list);
  out["gamma"] = format_gamma(gamma);
  out["alpha"] = format_double(alpha);
  out["trials"] = std::to_string(trials);
  out["seed"] = std::to_string(seed);
  out["resolution"] = std::to_string(resolution);
  out["families"] = join(families);
  out["s"] = format_double(s);
  out["p"] = format_double(p);
  out["q"] = format_gamma(q);
  out["function"] = function;
  out["delta"] = format_double(delta);
  out["eval_resolution"] = std::to_string(eval_resolution);
  out["tol"] = format_double(tol);
  return out;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "experiment") experiment = value;
  else if (key == "manifold") manifold = value;
  else if (key == "n_list") n_list = parse_int_list(value);
  else if (key == "gamma") gamma = parse_real_or_inf(value);
  else if (key == "alpha") alpha = std::stod(value);
  else if (key == "trials") trials = std::stoi(value);
  else if (key == "seed") seed = std::stoull(value);
  else if (key == "resolution") resolution = std::stoi(value);
  else if (key == "out_dir") out_dir = value;
  else if (key == "families") families = parse_string_list(value);
  else if (key == "s") s = std::stod(value);
  else if (key == "p") p = std::stod(value);
  else if (key == "q") q = parse_real_or_inf(value);
  else if (key == "function") function = value;
  else if (key == "delta") delta = std::stod(value);
  else if (key == "eval_resolution") eval_resolution = std::stoi(value);
  else if (key == "tol") tol = std::stod(value);
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected key=value");
    }
    cfg.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

std::vector<std::string> emit(const ExperimentReport& report, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + out_dir + ": " +
                                   ec.message());
  std::vector<std::string> written;
  for (const auto& [stem, table] : report.tables) {
    CsvTable full = table;
    for (const auto& [key, value] : report.meta) full.meta.emplace(key, value);
    std::string path = out_dir + "/" + stem + ".csv";
    full.write(path);
    written.push_back(path);
  }
  {
    CsvTable summary;
    summary.meta = report.meta;
    summary.columns = {"key", "value"};
    for (const auto& [key, value] : report.summary) {
      summary.add_row({key, value});
    }
    std::string path = out_dir + "/" + report.name + "_summary.csv";
    summary.write(path);
    written.push_back(path);
  }
  for (const auto& plot : report.plots) {
    std::string path = out_dir + "/" + plot.stem + ".svg";
    write_loglog_svg(path, plot.title, plot.x_label, plot.y_label, plot.series);
    written.push_back(path);
  }
  return written;
}

double limit_theorem_constant(const Manifold& m, double gamma) {
  if (std::isinf(gamma)) {
    throw std::invalid_argument("limit_theorem_constant: gamma must be finite");
  }
  const double d = m.dim();
  const double vol = m.total_volume();
  // Uniform density h = 1/vol, so the density integral is vol^{1 + gamma/d}.
  return std::pow(unit_ball_volume(m.dim()), -gamma / d) * std::tgamma(1.0 + gamma / d) *
         std::pow(vol, 1.0 + gamma / d);
}

ExperimentReport run_limit_theorem(const ExperimentConfig& cfg) {
  cfg.validate();
  if (std::isinf(cfg.gamma)) {
    throw std::invalid_argument("limit-theorem: gamma must be finite (theorem hypothesis)");
  }
  Manifold m = Manifold::from_name(cfg.manifold);
  const double d = m.dim();
  const double z = limit_theorem_constant(m, cfg.gamma);

  ExperimentReport report;
  report.name = "limit_theorem";
  report.meta = base_meta(cfg);
  report.meta["z"] = format_double(z);
  report.meta["gamma"] = format_gamma(cfg.gamma);
  report.meta["manifold"] = cfg.manifold;

  CsvTable table;
  table.columns = {"n", "mean_Z", "std_error", "z", "rel_dev", "l1_dev", "l2_dev"};
  SvgSeries mean_series{"mean Z_n", {}, {}};
  SvgSeries l1_series{"E|Z_n - z|", {}, {}};

  for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
    const int n = cfg.n_list[ni];
    int resolution = cfg.resolution;
    if (resolution <= 0) {
      resolution = std::clamp(static_cast<int>(std::ceil(3.0 * std::sqrt(double(n)))), 64, 256);
    }
    QuadratureRule rule = quadrature_rule(m, resolution);
    Eigen::VectorXd zvals(cfg.trials);
    parallel_for(cfg.trials, [&](std::int64_t t) {
      PointSet P = sample_uniform(m, n, derive(cfg, 11, ni, t));
      double integral =
          std::pow(distortion_value(m, P, cfg.gamma, rule), cfg.gamma);
      zvals[t] = std::pow(double(n), cfg.gamma / d) * integral;
    });
    double mean = zvals.mean();
    double sd = cfg.trials > 1
                    ? std::sqrt((zvals.array() - mean).square().sum() / (cfg.trials - 1))
                    : 0.0;
    double l1 = (zvals.array() - z).abs().mean();
    double l2 = std::sqrt((zvals.array() - z).square().mean());
    table.add_row({std::int64_t(n), mean, sd / std::sqrt(double(cfg.trials)), z,
                   std::abs(mean - z) / z, l1, l2});
    mean_series.x.push_back(n);
    mean_series.y.push_back(mean);
    l1_series.x.push_back(n);
    l1_series.y.push_back(l1);
    if (ni + 1 == cfg.n_list.size()) {
      report.summary["rel_dev_final"] = format_double(std::abs(mean - z) / z);
      report.summary["mean_Z_final"] = format_double(mean);
    }
  }
  report.summary["z"] = format_double(z);
  report.tables.emplace_back("limit_theorem", std::move(table));
  report.plots.push_back(SvgPlot{"limit_theorem",
                                 "n^{g/d} distortion integral vs limit",
                                 "n", "Z_n", {mean_series, l1_series}});
  return report;
}

ExperimentReport run_rates(const ExperimentConfig& cfg) {
  cfg.validate();
  Manifold m = Manifold::from_name(cfg.manifold);
  const bool infinite_gamma = std::isinf(cfg.gamma);

  ExperimentReport report;
  report.name = "rates";
  report.meta = base_meta(cfg);
  report.meta["gamma"] = format_gamma(cfg.gamma);
  report.meta["alpha"] = format_double(cfg.alpha);
  report.meta["manifold"] = cfg.manifold;

  CsvTable table;
  table.columns = {"family", "n", "mean", "std_error"};

  Eigen::VectorXd ns(cfg.n_list.size());
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) ns[i] = cfg.n_list[i];

  for (std::size_t fi = 0; fi < cfg.families.size(); ++fi) {
    const std::string& family = cfg.families[fi];
    const bool randomized = family == "random";
    // Random points fit against n/log n when gamma = inf (Prop-style log
    // factor); deterministic families always fit against n.
    const bool log_correction = infinite_gamma && randomized;
    SvgSeries series{family, {}, {}};
    Eigen::MatrixXd trial_values(cfg.n_list.size(), randomized ? cfg.trials : 1);
    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
      const int n = cfg.n_list[ni];
      MomentOptions mopts;
      mopts.resolution = cfg.resolution;
      mopts.covering_tol = cfg.tol;
      if (randomized) {
        trial_values.row(ni) =
            moment_trials(m, n, cfg.gamma, cfg.alpha, cfg.trials, derive(cfg, 23, fi, ni),
                          mopts)
                .transpose();
      } else {
        PointSet P = make_family(m, family, n, derive(cfg, 23, fi, ni));
        double v;
        if (infinite_gamma) {
          CoveringOptions copts;
          copts.tol = cfg.tol;
          copts.resolution = cfg.resolution;
          v = covering_radius(m, P, copts).value;
        } else {
          int res = cfg.resolution > 0
                        ? cfg.resolution
                        : std::clamp(static_cast<int>(std::ceil(3.0 * std::sqrt(double(n)))),
                                     64, 320);
          v = distortion_value(m, P, cfg.gamma, quadrature_rule(m, res));
        }
        trial_values(ni, 0) = std::pow(v, cfg.alpha);
      }
      double mean = trial_values.row(ni).mean();
      double se = 0.0;
      if (randomized && cfg.trials > 1) {
        double var = (trial_values.row(ni).array() - mean).square().sum() / (cfg.trials - 1);
        se = std::sqrt(var / cfg.trials);
      }
      table.add_row({family, std::int64_t(n), mean, se});
      series.x.push_back(n);
      series.y.push_back(mean);
    }
    RateFit fit = fit_loglog_bootstrap(ns, trial_values, log_correction, 10,
                                       derive(cfg, 29, fi, 0));
    report.summary["slope_" + family] = format_double(fit.slope);
    report.summary["slope_stderr_" + family] = format_double(fit.slope_stderr);
    report.summary["r2_" + family] = format_double(fit.r_squared);
    report.summary["log_correction_" + family] = fit.log_correction ? "1" : "0";
    report.plots.push_back(SvgPlot{"rates_" + family,
                                   "moment vs n (" + family + ")", "n",
                                   "E ||dist||^a", {series}});
  }
  report.tables.emplace_back("rates", std::move(table));
  return report;
}

ExperimentReport run_equivalence(const ExperimentConfig& cfg) {
  cfg.validate();
  Manifold m = Manifold::from_name(cfg.manifold);
  if (!(m == Manifold::sphere(2))) {
    throw std::invalid_argument("equivalence: runs on S2 (p = 2 branch)");
  }
  std::vector<std::string> families =
      cfg.families.size() > 1 || cfg.families[0] != "random"
          ? cfg.families
          : std::vector<std::string>{"random", "fibonacci", "cluster-cover"};

  ExperimentReport report;
  report.name = "equivalence";
  report.meta = base_meta(cfg);

  CsvTable table;
  table.columns = {"family", "n", "min_wce", "dist_pow", "ratio"};

  const int resolution = cfg.resolution > 0 ? cfg.resolution : 96;
  QuadratureRule rule = quadrature_rule(m, resolution);

  double ratio_min = inf, ratio_max = 0.0;
  Eigen::VectorXd ns(cfg.n_list.size());
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) ns[i] = cfg.n_list[i];

  std::vector<SvgSeries> wce_series, dist_series;
  for (std::size_t fi = 0; fi < families.size(); ++fi) {
    const std::string& family = families[fi];
    Eigen::VectorXd wce_col(cfg.n_list.size()), dist_col(cfg.n_list.size());
    SvgSeries sw{family + " min-wce", {}, {}}, sd{family + " dist^{3/2}", {}, {}};
    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
      const int n = cfg.n_list[ni];
      PointSet P = make_family(m, family, n, derive(cfg, 37, fi, ni));
      GramSystem sys = build_gram_system(P);
      double min_wce = optimal_weights(sys).min_wce;
      double dist_norm = distortion_value(m, P, 3.0, rule, Normalization::normalized);
      double dist_pow = std::pow(dist_norm, 1.5);
      double ratio = min_wce / dist_pow;
      wce_col[ni] = min_wce;
      dist_col[ni] = dist_pow;
      ratio_min = std::min(ratio_min, ratio);
      ratio_max = std::max(ratio_max, ratio);
      table.add_row({family, std::int64_t(n), min_wce, dist_pow, ratio});
      sw.x.push_back(n);
      sw.y.push_back(min_wce);
      sd.x.push_back(n);
      sd.y.push_back(dist_pow);
    }
    report.summary["slope_wce_" + family] = format_double(fit_loglog(ns, wce_col).slope);
    report.summary["slope_dist_" + family] = format_double(fit_loglog(ns, dist_col).slope);
    wce_series.push_back(std::move(sw));
    dist_series.push_back(std::move(sd));
  }
  report.summary["ratio_min"] = format_double(ratio_min);
  report.summary["ratio_max"] = format_double(ratio_max);
  report.summary["spread"] = format_double(ratio_max / ratio_min);
  report.tables.emplace_back("equivalence", std::move(table));
  std::vector<SvgSeries> all = wce_series;
  all.insert(all.end(), dist_series.begin(), dist_series.end());
  report.plots.push_back(SvgPlot{"equivalence", "min-wce vs distortion^{3/2}", "n",
                                 "value", all});
  return report;
}

ExperimentReport run_recovery_rates(const ExperimentConfig& cfg) {
  cfg.validate();
  Manifold m = Manifold::from_name(cfg.manifold);
  QualityParams qp = quality_params(cfg.s, cfg.p, cfg.q, m.dim());
  std::vector<std::string> families =
      cfg.families.size() > 1 || cfg.families[0] != "random"
          ? cfg.families
          : std::vector<std::string>{"random", "fibonacci"};
  auto f = builtin_function(m, cfg.function);

  double delta = cfg.delta > 0.0 ? cfg.delta : m.injectivity_radius() / 25.0;
  PartitionOfUnity pou = build_partition(m, delta);
  MLSConfig mls;
  mls.degree = mls_degree_for_smoothness(cfg.s);

  QuadratureRule eval_rule = quadrature_rule(m, cfg.eval_resolution);
  Eigen::VectorXd f_eval(eval_rule.size());
  for (int i = 0; i < eval_rule.size(); ++i) f_eval[i] = f(eval_rule.nodes.col(i));

  ExperimentReport report;
  report.name = "recovery_rates";
  report.meta = base_meta(cfg);
  report.meta["gamma"] = format_gamma(qp.gamma);
  report.meta["alpha"] = format_double(qp.alpha);

  CsvTable table;
  table.columns = {"family", "n", "q", "error", "dist_norm_gamma_alpha", "ratio"};

  std::vector<double> pooled_err, pooled_dist;
  Eigen::VectorXd ns(cfg.n_list.size());
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) ns[i] = cfg.n_list[i];
  std::vector<SvgSeries> err_series;

  for (std::size_t fi = 0; fi < families.size(); ++fi) {
    const std::string& family = families[fi];
    Eigen::VectorXd err_col(cfg.n_list.size());
    SvgSeries se{family, {}, {}};
    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
      const int n = cfg.n_list[ni];
      PointSet P = make_family(m, family, n, derive(cfg, 41, fi, ni));
      RecoveryOperator op = build_recovery(m, P, pou, mls);
      Eigen::VectorXd samples(n);
      for (int i = 0; i < n; ++i) samples[i] = f(P.point(i));
      Eigen::VectorXd recovered = recover(op, samples, eval_rule.nodes);
      Eigen::VectorXd diff = (recovered - f_eval).cwiseAbs();
      double error;
      if (std::isinf(cfg.q)) {
        error = diff.maxCoeff();
      } else {
        double acc = 0.0;
        for (int i = 0; i < eval_rule.size(); ++i) {
          acc += eval_rule.weights[i] * std::pow(diff[i], cfg.q);
        }
        error = std::pow(acc, 1.0 / cfg.q);
      }
      double functional;
      if (std::isinf(qp.gamma)) {
        CoveringOptions copts;
        copts.tol = cfg.tol;
        functional = covering_radius(m, P, copts).value;
      } else {
        int res = cfg.resolution > 0
                      ? cfg.resolution
                      : std::clamp(static_cast<int>(std::ceil(3.0 * std::sqrt(double(n)))),
                                   64, 320);
        functional = distortion_value(m, P, qp.gamma, quadrature_rule(m, res));
      }
      functional = std::pow(functional, qp.alpha);
      table.add_row({family, std::int64_t(n), format_gamma(cfg.q), error, functional,
                     functional > 0 ? error / functional : 0.0});
      err_col[ni] = error;
      pooled_err.push_back(error);
      pooled_dist.push_back(functional);
      se.x.push_back(n);
      se.y.push_back(error);
    }
    RateFit fit_n = fit_loglog(ns, err_col, false);
    report.summary["slope_" + family] = format_double(fit_n.slope);
    report.summary["r2_n_" + family] = format_double(fit_n.r_squared);
    if (family == "random" && cfg.q >= cfg.p) {
      RateFit fit_log = fit_loglog(ns, err_col, true);
      report.summary["r2_nlogn_" + family] = format_double(fit_log.r_squared);
      report.summary["slope_nlogn_" + family] = format_double(fit_log.slope);
    }
    err_series.push_back(std::move(se));
  }
  if (pooled_err.size() >= 2) {
    Eigen::Map<Eigen::VectorXd> pe(pooled_err.data(), pooled_err.size());
    Eigen::Map<Eigen::VectorXd> pd(pooled_dist.data(), pooled_dist.size());
    report.summary["log_correlation"] =
        format_double(log_correlation(Eigen::VectorXd(pe), Eigen::VectorXd(pd)));
  }
  report.tables.emplace_back("recovery_rates", std::move(table));
  report.plots.push_back(SvgPlot{"recovery_rates", "L_q recovery error vs n", "n",
                                 "error", err_series});
  return report;
}

std::function<double(const Point&)> builtin_function(const Manifold& m,
                                                     const std::string& name) {
  if (name == "one") return [](const Point&) { return 1.0; };
  if (m.kind() == ManifoldKind::sphere) {
    if (name == "coord3") return [](const Point& x) { return x[2]; };
    if (name == "exp3") return [](const Point& x) { return std::exp(x[2]); };
    if (name == "bump") {
      return [](const Point& x) {
        // smooth, concentrated near the north pole but strictly positive
        return std::exp(2.0 * (x[2] - 1.0)) * (2.0 + x[0]);
      };
    }
  } else {
    if (name == "cos2pi") {
      return [](const Point& x) {
        return std::cos(2.0 * M_PI * x[0]) * std::cos(2.0 * M_PI * x[1]);
      };
    }
    if (name == "bump") {
      return [](const Point& x) {
        // periodic and smooth across the torus seams
        return std::exp(std::sin(2.0 * M_PI * x[0]) + std::cos(2.0 * M_PI * x[1]));
      };
    }
  }
  throw std::invalid_argument("builtin_function: unknown function '" + name + "' on " +
                              m.name());
}

}  // namespace mslab
