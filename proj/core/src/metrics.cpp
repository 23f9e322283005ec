#include "mslab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mslab/numerics.hpp"
#include "mslab/parallel.hpp"

namespace mslab {

QualityParams quality_params(double s, double p, double q, int d) {
  if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("quality_params: need 1 < p < inf");
  if (!(q >= 1.0)) throw std::invalid_argument("quality_params: need q >= 1");
  if (d < 1) throw std::invalid_argument("quality_params: need d >= 1");
  if (!(s > d / p)) {
    throw std::invalid_argument("quality_params: need s > d/p (embedding into C(M) fails)");
  }
  QualityParams out;
  out.s = s;
  out.p = p;
  out.q = q;
  out.d = d;
  if (q < p) {
    out.gamma = s / (1.0 / q - 1.0 / p);
    out.alpha = s;
  } else {
    out.gamma = inf;
    out.alpha = s - d * (1.0 / p - (std::isinf(q) ? 0.0 : 1.0 / q));
  }
  return out;
}

double distance_to_set(const Manifold& m, const Point& x, const PointSet& P) {
  if (P.size() < 1) throw std::invalid_argument("distance_to_set: empty point set");
  m.check_point(x);
  if (!(P.manifold == m)) throw std::invalid_argument("distance_to_set: manifold mismatch");
  if (m.kind() == ManifoldKind::sphere) {
    double best = (P.points.transpose() * x).maxCoeff();
    return std::acos(clamp_unit(best));
  }
  double best = inf;
  for (int j = 0; j < P.size(); ++j) {
    double sum = 0.0;
    for (int i = 0; i < m.dim(); ++i) {
      double delta = std::abs(x[i] - P.points(i, j));
      delta = std::min(delta, 1.0 - delta);
      sum += delta * delta;
    }
    best = std::min(best, sum);
  }
  return std::sqrt(best);
}

Eigen::VectorXd distances_to_set(const Manifold& m, const Eigen::MatrixXd& queries,
                                 const PointSet& P) {
  if (P.size() < 1) throw std::invalid_argument("distances_to_set: empty point set");
  if (!(P.manifold == m)) throw std::invalid_argument("distances_to_set: manifold mismatch");
  const std::int64_t nq = queries.cols();
  Eigen::VectorXd out(nq);
  const std::int64_t block = 512;
  const std::int64_t blocks = (nq + block - 1) / block;
  if (m.kind() == ManifoldKind::sphere) {
    parallel_for(blocks, [&](std::int64_t b) {
      std::int64_t lo = b * block, hi = std::min(nq, lo + block);
      Eigen::MatrixXd dots = P.points.transpose() * queries.middleCols(lo, hi - lo);
      for (std::int64_t c = 0; c < hi - lo; ++c) {
        out[lo + c] = std::acos(clamp_unit(dots.col(c).maxCoeff()));
      }
    });
    return out;
  }
  const int d = m.dim();
  parallel_for(blocks, [&](std::int64_t b) {
    std::int64_t lo = b * block, hi = std::min(nq, lo + block);
    for (std::int64_t c = lo; c < hi; ++c) {
      double best = inf;
      for (int j = 0; j < P.size(); ++j) {
        double sum = 0.0;
        for (int i = 0; i < d; ++i) {
          double delta = std::abs(queries(i, c) - P.points(i, j));
          delta = std::min(delta, 1.0 - delta);
          sum += delta * delta;
        }
        best = std::min(best, sum);
      }
      out[c] = std::sqrt(best);
    }
  });
  return out;
}

namespace {

int auto_mesh_resolution(const Manifold& m, int n) {
  // Mesh spacing must undercut the deepest-hole scale ~ (log n / n)^{1/2} so
  // the scan lands in the right basin before refinement.
  double scale = 2.5 * std::sqrt(static_cast<double>(std::max(16, n)));
  int res = static_cast<int>(std::ceil(scale));
  if (m.kind() == ManifoldKind::flat_torus) res *= 2;
  return std::clamp(res, 48, 320);
}

// Local maximization of dist(., P) by a shrinking 5x5 pattern grid in the
// tangent chart (torus: in wrapped coordinates).
std::pair<double, double> refine_candidate(const Manifold& m, const PointSet& P,
                                           Point center, double start_scale, double tol,
                                           int max_iterations) {
  const int d = m.dim();
  double best = distance_to_set(m, center, P);
  double scale = start_scale;
  int iterations = 0;
  const double limit = 0.45 * m.injectivity_radius();
  while (scale > 0.25 * tol && iterations < max_iterations) {
    ++iterations;
    bool moved = false;
    Point best_point = center;
    double best_value = best;
    for (int a = -2; a <= 2; ++a) {
      for (int b = -2; b <= 2; ++b) {
        if (a == 0 && b == 0) continue;
        Eigen::VectorXd v(d);
        if (d == 1) {
          if (b != 0) continue;
          v[0] = 0.5 * scale * a;
        } else {
          v << 0.5 * scale * a, 0.5 * scale * b;
        }
        if (v.norm() >= limit) continue;
        Point q = exp_map(m, center, v);
        double val = distance_to_set(m, q, P);
        if (val > best_value) {
          best_value = val;
          best_point = q;
          moved = true;
        }
      }
    }
    if (moved) {
      center = best_point;
      best = best_value;
    } else {
      scale *= 0.5;
    }
  }
  return {best, scale};
}

}  // namespace

DistortionEstimate covering_radius(const Manifold& m, const PointSet& P,
                                   const CoveringOptions& opts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("covering_radius: tol must be positive");
  if (m.dim() > 2) throw std::invalid_argument("covering_radius: needs a meshable manifold (d <= 2)");
  int resolution = opts.resolution > 0 ? opts.resolution : auto_mesh_resolution(m, P.size());
  QuadratureRule mesh = quadrature_rule(m, resolution);
  Eigen::VectorXd dist = distances_to_set(m, mesh.nodes, P);

  double spacing = m.kind() == ManifoldKind::sphere ? M_PI / resolution : 1.0 / resolution;

  // Top-k mesh maximizers, de-duplicated so several nodes of one hole do not
  // crowd out other holes.
  std::vector<int> order(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return dist[a] > dist[b]; });
  std::vector<int> candidates;
  for (int idx : order) {
    if (static_cast<int>(candidates.size()) >= opts.top_k) break;
    bool fresh = true;
    for (int c : candidates) {
      if (geodesic_distance(m, mesh.nodes.col(idx), mesh.nodes.col(c)) < 2.5 * spacing) {
        fresh = false;
        break;
      }
    }
    if (fresh) candidates.push_back(idx);
  }

  std::vector<double> values(candidates.size()), gaps(candidates.size());
  parallel_for(static_cast<std::int64_t>(candidates.size()), [&](std::int64_t i) {
    auto [value, gap] = refine_candidate(m, P, mesh.nodes.col(candidates[i]), spacing,
                                         opts.tol, opts.max_iterations);
    values[i] = value;
    gaps[i] = gap;
  });

  DistortionEstimate est;
  est.gamma = inf;
  est.method = DistortionMethod::mesh_max;
  est.node_count = mesh.size();
  est.value = dist.maxCoeff();
  est.error = spacing;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (values[i] > est.value) {
      est.value = values[i];
      est.error = gaps[i];
    }
  }
  est.value = std::min(est.value, m.diameter());
  return est;
}

double distortion_value(const Manifold& m, const PointSet& P, double gamma,
                        const QuadratureRule& rule, Normalization norm) {
  if (!(gamma > 0.0) || std::isinf(gamma)) {
    throw std::invalid_argument("distortion: gamma must be finite and positive (use covering_radius)");
  }
  if (!(rule.manifold == m)) throw std::invalid_argument("distortion: rule on wrong manifold");
  Eigen::VectorXd dist = distances_to_set(m, rule.nodes, P);
  double integral = blocked_sum(rule.size(), 4096, [&](std::int64_t lo, std::int64_t hi) {
    KahanSum sum;
    for (std::int64_t i = lo; i < hi; ++i) {
      sum.add(rule.weights[i] * std::pow(dist[i], gamma));
    }
    return sum.value();
  });
  if (norm == Normalization::normalized) integral /= m.total_volume();
  return std::pow(integral, 1.0 / gamma);
}

DistortionEstimate distortion(const Manifold& m, const PointSet& P, double gamma,
                              const QuadratureRule& rule, Normalization norm) {
  double value = distortion_value(m, P, gamma, rule, norm);
  DistortionEstimate est;
  est.gamma = gamma;
  est.method = DistortionMethod::quadrature;
  est.node_count = rule.size();
  est.value = value;
  est.integral = std::pow(value, gamma);
  if (rule.resolution > 0) {
    QuadratureRule fine = quadrature_rule(m, 2 * rule.resolution);
    est.error = std::abs(distortion_value(m, P, gamma, fine, norm) - value);
  }
  return est;
}

Eigen::VectorXd moment_trials(const Manifold& m, int n, double gamma, double alpha,
                              int trials, RandomSource source, const MomentOptions& opts) {
  if (trials < 1) throw std::invalid_argument("moment_trials: trials must be >= 1");
  const bool infinite_gamma = std::isinf(gamma);
  QuadratureRule rule;
  int resolution = opts.resolution;
  if (!infinite_gamma) {
    if (resolution <= 0) resolution = auto_mesh_resolution(m, n);
    rule = quadrature_rule(m, resolution);
  }
  Eigen::VectorXd values(trials);
  parallel_for(trials, [&](std::int64_t t) {
    PointSet P = sample_uniform(m, n, source.child(t));
    double v;
    if (infinite_gamma) {
      CoveringOptions copts;
      copts.tol = opts.covering_tol;
      copts.resolution = opts.resolution;
      v = covering_radius(m, P, copts).value;
    } else {
      v = distortion_value(m, P, gamma, rule);
    }
    values[t] = std::pow(v, alpha);
  });
  return values;
}

std::pair<double, double> moment_over_trials(const Manifold& m, int n, double gamma,
                                             double alpha, int trials, RandomSource source,
                                             const MomentOptions& opts) {
  if (trials < 2) throw std::invalid_argument("moment_over_trials: trials must be >= 2");
  Eigen::VectorXd values = moment_trials(m, n, gamma, alpha, trials, source, opts);
  double mean = values.mean();
  double var = (values.array() - mean).square().sum() / (trials - 1);
  return {mean, std::sqrt(var / trials)};
}

}  // namespace mslab
