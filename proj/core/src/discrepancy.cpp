#include "mslab/discrepancy.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

#include "mslab/metrics.hpp"
#include "mslab/numerics.hpp"
#include "mslab/parallel.hpp"

namespace mslab {

WeightedPointSet::WeightedPointSet(PointSet ps, Eigen::VectorXd w)
    : base(std::move(ps)), weights(std::move(w)) {
  if (base.manifold.kind() != ManifoldKind::sphere) {
    throw std::invalid_argument("WeightedPointSet: sphere point sets only");
  }
  if (weights.size() != base.size()) {
    throw std::invalid_argument("WeightedPointSet: weight count != point count");
  }
}

WeightedPointSet WeightedPointSet::equal_weights(PointSet ps) {
  int n = ps.size();
  return WeightedPointSet(std::move(ps), Eigen::VectorXd::Constant(n, 1.0 / n));
}

double cap_measure(int d, double t) {
  if (d < 1) throw std::invalid_argument("cap_measure: d must be >= 1");
  if (!(t >= -1.0 && t <= 1.0)) throw std::invalid_argument("cap_measure: |t| <= 1 required");
  if (d == 1) return std::acos(t) / M_PI;
  if (d == 2) return 0.5 * (1.0 - t);
  double total = sphere_surface_area(d) / sphere_surface_area(d - 1);
  double partial = integrate_gl(
      [d](double u) { return std::pow(1.0 - u * u, 0.5 * d - 1.0); }, t, 1.0, 128);
  return partial / total;
}

namespace {

// Normalized area of C(x,t) cap C(y,t) on S^2 for caps of equal height t and
// center angle theta. Gauss-Bonnet on the lens bounded by the two small
// circles: area = 2(pi - V) - 4 Phi cos(beta), where beta = arccos t, Phi is
// the polar angle of each arc and V the angle of the lens corner triangle.
double cap_intersection_s2(double theta, double t) {
  double c = std::cos(0.5 * theta);
  if (t >= c) return 0.0;        // caps too small to meet
  if (t <= -c) return -t;        // union covers the sphere
  double beta_cos = t;
  double beta_sin = std::sqrt(std::max(0.0, 1.0 - t * t));
  double tan_half = std::sin(theta) / (1.0 + std::cos(theta));
  double phi = std::acos(clamp_unit(beta_cos * tan_half / beta_sin));
  double corner = std::acos(clamp_unit((std::cos(theta) - t * t) / (beta_sin * beta_sin)));
  double area = 2.0 * (M_PI - corner) - 4.0 * phi * beta_cos;
  return std::max(0.0, area / (4.0 * M_PI));
}

// Arc-overlap measure on S^1: arcs of half-width beta = arccos t at angular
// separation theta overlap in front and, for wide arcs, around the back.
double cap_intersection_s1(double theta, double beta) {
  double front = std::max(0.0, 2.0 * beta - theta);
  double back = std::max(0.0, 2.0 * beta - (2.0 * M_PI - theta));
  return (front + back) / (2.0 * M_PI);
}

double kernel_s2(double theta) {
  double c = std::cos(0.5 * theta);
  // Band regime t <= -c contributes int_{-1}^{-c} (-t) dt exactly.
  double value = 0.5 * (1.0 - c * c);
  // Crossing regime: substitute t = c sin(pi u / 2); the vanishing endpoint
  // derivative removes the (c - |t|)^{3/2} kink so Gauss-Legendre converges.
  auto [nodes, weights] = gauss_legendre(64);
  double sum = 0.0;
  for (int i = 0; i < 64; ++i) {
    double u = nodes[i];
    double t = c * std::sin(0.5 * M_PI * u);
    double jac = c * 0.5 * M_PI * std::cos(0.5 * M_PI * u);
    sum += weights[i] * jac * cap_intersection_s2(theta, t);
  }
  return value + sum;
}

double kernel_s1(double theta) {
  // In beta = arccos t coordinates the overlap is piecewise linear and the
  // Jacobian sin(beta) is entire, so per-piece Gauss-Legendre is exact.
  auto piece = [&](double lo, double hi) {
    if (hi <= lo) return 0.0;
    return integrate_gl(
        [&](double beta) { return cap_intersection_s1(theta, beta) * std::sin(beta); },
        lo, hi, 32);
  };
  double a = 0.5 * theta, b = M_PI - 0.5 * theta;
  return piece(0.0, std::min(a, b)) + piece(std::min(a, b), std::max(a, b)) +
         piece(std::max(a, b), M_PI);
}

double center_angle(int d, const Point& x, const Point& y) {
  Manifold m = Manifold::sphere(d);
  m.check_point(x);
  m.check_point(y);
  return std::acos(clamp_unit(x.dot(y)));
}

}  // namespace

CapKernelValue cap_kernel(int d, const Point& x, const Point& y) {
  double theta = center_angle(d, x, y);
  CapKernelValue out;
  out.method = KernelMethod::analytic;
  if (d == 2) {
    out.value = kernel_s2(theta);
  } else if (d == 1) {
    out.value = kernel_s1(theta);
  } else {
    throw std::invalid_argument("cap_kernel: analytic path supports d in {1,2}; use cap_kernel_mc");
  }
  out.value = std::min(1.0, std::max(0.0, out.value));
  return out;
}

CapKernelValue cap_kernel_mc(int d, const Point& x, const Point& y,
                             std::int64_t samples, RandomSource source) {
  center_angle(d, x, y);  // validates both points
  if (samples < 1000) throw std::invalid_argument("cap_kernel_mc: need >= 1000 samples");
  Rng rng(source);
  const int edim = d + 1;
  std::int64_t hits = 0;
  Eigen::VectorXd z(edim);
  for (std::int64_t i = 0; i < samples; ++i) {
    do {
      for (int k = 0; k < edim; ++k) z[k] = rng.normal();
    } while (z.norm() < 1e-12);
    z /= z.norm();
    double t = rng.uniform(-1.0, 1.0);
    if (z.dot(x) >= t && z.dot(y) >= t) ++hits;
  }
  double p = static_cast<double>(hits) / static_cast<double>(samples);
  CapKernelValue out;
  out.method = KernelMethod::monte_carlo;
  // The (z,t) measure has total mass 2.
  out.value = 2.0 * p;
  out.std_error = 2.0 * std::sqrt(std::max(0.0, p * (1.0 - p) / static_cast<double>(samples)));
  return out;
}

double kernel_mean(int d) {
  if (d < 1) throw std::invalid_argument("kernel_mean: d must be >= 1");
  if (d == 2) return 2.0 / 3.0;
  return integrate_gl([d](double t) { double m = cap_measure(d, t); return m * m; },
                      -1.0, 1.0, 128);
}

double kernel_mean(int d, const Point& x) {
  Manifold::sphere(d).check_point(x);
  return kernel_mean(d);
}

std::pair<double, double> kernel_mean_mc(int d, const Point& x, std::int64_t samples,
                                         RandomSource source) {
  Manifold m = Manifold::sphere(d);
  m.check_point(x);
  PointSet ys = sample_uniform(m, static_cast<int>(samples), source);
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < ys.size(); ++i) {
    double k = cap_kernel(d, x, ys.point(i)).value;
    sum += k;
    sumsq += k * k;
  }
  double mean = sum / samples;
  double var = std::max(0.0, sumsq / samples - mean * mean);
  return {mean, std::sqrt(var / samples)};
}

GramSystem build_gram_system(const PointSet& P, const GramOptions& opts) {
  if (P.manifold.kind() != ManifoldKind::sphere || P.manifold.dim() > 2) {
    throw std::invalid_argument("build_gram_system: S^1 or S^2 point sets");
  }
  const int d = P.manifold.dim();
  const int n = P.size();
  GramSystem sys;
  sys.dim = d;
  sys.gram.resize(n, n);
  // One kernel evaluation per unordered pair, mirrored below the diagonal.
  parallel_for(n, [&](std::int64_t i) {
    sys.gram(i, i) = cap_kernel(d, P.point(i), P.point(i)).value;
    for (int j = static_cast<int>(i) + 1; j < n; ++j) {
      sys.gram(i, j) = cap_kernel(d, P.point(i), P.point(j)).value;
    }
  });
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) sys.gram(i, j) = sys.gram(j, i);
  }
  double mean = kernel_mean(d);
  sys.rhs = Eigen::VectorXd::Constant(n, mean);
  sys.kk = mean;
  sys.ridge = opts.ridge_scale * sys.gram.trace() / n;
  return sys;
}

double wce_squared(const GramSystem& sys, const Eigen::VectorXd& w) {
  if (w.size() != sys.gram.rows()) throw std::invalid_argument("wce_squared: dimension mismatch");
  double value = sys.kk - 2.0 * w.dot(sys.rhs) + w.dot(sys.gram * w);
  if (value < -1e-12) {
    throw NumericalError("wce_squared: quadratic form below -1e-12; kernel matrix inconsistent");
  }
  return std::max(0.0, value);
}

std::pair<double, double> d2_direct(const WeightedPointSet& wps, std::int64_t mc_samples,
                                    RandomSource source) {
  if (mc_samples < 1000) throw std::invalid_argument("d2_direct: need >= 1000 samples");
  const int d = wps.base.manifold.dim();
  const int edim = d + 1;
  const int batches = 50;
  const std::int64_t per_batch = mc_samples / batches;
  Eigen::VectorXd batch_mean(batches);
  parallel_for(batches, [&](std::int64_t b) {
    Rng rng(source.child(b));
    Eigen::VectorXd z(edim);
    KahanSum acc;
    for (std::int64_t i = 0; i < per_batch; ++i) {
      do {
        for (int k = 0; k < edim; ++k) z[k] = rng.normal();
      } while (z.norm() < 1e-12);
      z /= z.norm();
      double t = rng.uniform(-1.0, 1.0);
      double covered = 0.0;
      for (int j = 0; j < wps.base.size(); ++j) {
        if (wps.base.points.col(j).dot(z) >= t) covered += wps.weights[j];
      }
      double dev = covered - cap_measure(d, t);
      acc.add(dev * dev);
    }
    batch_mean[b] = acc.value() / static_cast<double>(per_batch);
  });
  // D2^2 = 2 E[dev^2]; the (z,t) measure has mass 2.
  double mean_sq = 2.0 * batch_mean.mean();
  double var_batches =
      4.0 * (batch_mean.array() - batch_mean.mean()).square().sum() / (batches - 1);
  double se_sq = std::sqrt(var_batches / batches);
  double value = std::sqrt(std::max(0.0, mean_sq));
  double se = value > 0 ? 0.5 * se_sq / value : std::sqrt(se_sq);
  return {value, se};
}

OptimalWeights optimal_weights(const GramSystem& sys) {
  const int n = static_cast<int>(sys.gram.rows());
  Eigen::MatrixXd a = sys.gram;
  a.diagonal().array() += sys.ridge;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    double dmax = a.diagonal().maxCoeff(), dmin = a.diagonal().minCoeff();
    throw NumericalError(
        "optimal_weights: LDLT factorization failed (n=" + std::to_string(n) +
        ", diag range [" + std::to_string(dmin) + ", " + std::to_string(dmax) +
        "]); increase the ridge");
  }
  OptimalWeights out;
  out.weights = ldlt.solve(sys.rhs);
  out.min_wce = std::sqrt(std::max(0.0, sys.kk - sys.rhs.dot(out.weights)));
  return out;
}

double equivalence_ratio(const PointSet& P, const EquivalenceOptions& opts) {
  if (!(P.manifold == Manifold::sphere(2))) {
    throw std::invalid_argument("equivalence_ratio: S^2 point sets only");
  }
  GramOptions gopts;
  gopts.ridge_scale = opts.ridge_scale;
  GramSystem sys = build_gram_system(P, gopts);
  double min_wce = optimal_weights(sys).min_wce;
  // Distortion side of the equivalence: gamma = d+1 = 3, power (d+1)/2,
  // measured in the same normalized measure as the discrepancy.
  QuadratureRule rule = quadrature_rule(P.manifold, opts.resolution);
  double dist_norm =
      distortion_value(P.manifold, P, 3.0, rule, Normalization::normalized);
  return min_wce / std::pow(dist_norm, 1.5);
}

}  // namespace mslab
