#include "mslab/recovery.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "mslab/metrics.hpp"
#include "mslab/numerics.hpp"
#include "mslab/parallel.hpp"

namespace mslab {

double bump_profile(double u) {
  if (u >= 1.0 || u <= -1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

double bump_profile_derivative_sup(int k) {
  if (k < 0) throw std::invalid_argument("bump_profile_derivative_sup: k >= 0");
  // Radial derivative sups measured once on a dense grid; g and g' have
  // closed forms, higher orders by central differences of g'.
  static const std::vector<double> sups = [] {
    const int n = 200001;
    const double h = 1.0 / (n - 1);
    auto g = [](double u) { return bump_profile(u); };
    auto g1 = [&](double u) {
      double den = 1.0 - u * u;
      if (den <= 0.0) return 0.0;
      return g(u) * (-2.0 * u / (den * den));
    };
    std::vector<double> out(5, 0.0);
    std::vector<double> current(n);
    for (int i = 0; i < n; ++i) current[i] = g(-1.0 + 2.0 * i * h);
    out[0] = *std::max_element(current.begin(), current.end());
    for (int i = 0; i < n; ++i) current[i] = g1(-1.0 + 2.0 * i * h);
    out[1] = 0.0;
    for (double v : current) out[1] = std::max(out[1], std::abs(v));
    // orders 2..4 by repeated central differencing (step 2h on [-1,1])
    for (int order = 2; order <= 4; ++order) {
      std::vector<double> next(n, 0.0);
      for (int i = 1; i + 1 < n; ++i) next[i] = (current[i + 1] - current[i - 1]) / (4.0 * h);
      current.swap(next);
      for (double v : current) out[order] = std::max(out[order], std::abs(v));
    }
    return out;
  }();
  if (k < static_cast<int>(sups.size())) return sups[k];
  throw std::invalid_argument("bump_profile_derivative_sup: orders up to 4 supported");
}

double PartitionOfUnity::bump(int j, const Point& x) const {
  return bump_profile(geodesic_distance(centers.manifold, x, centers.point(j)) / delta);
}

double PartitionOfUnity::total_bump(const Point& x) const {
  double sum = 0.0;
  for (int j : covering_charts(x)) sum += bump(j, x);
  return sum;
}

double PartitionOfUnity::psi(int j, const Point& x) const {
  double total = total_bump(x);
  if (total <= 0.0) {
    throw NumericalError("PartitionOfUnity: balls do not cover the query point");
  }
  return bump(j, x) / total;
}

std::vector<int> PartitionOfUnity::covering_charts(const Point& x) const {
  std::vector<int> out;
  const Manifold& m = centers.manifold;
  if (m.kind() == ManifoldKind::sphere) {
    const double cos_delta = std::cos(delta);
    Eigen::VectorXd dots = centers.points.transpose() * x;
    for (int j = 0; j < dots.size(); ++j) {
      if (dots[j] > cos_delta) out.push_back(j);
    }
    return out;
  }
  for (int j = 0; j < centers.size(); ++j) {
    if (geodesic_distance(m, x, centers.point(j)) < delta) out.push_back(j);
  }
  return out;
}

PartitionOfUnity make_partition(PointSet centers, double delta) {
  const Manifold& m = centers.manifold;
  if (!(delta > 0.0 && delta < m.injectivity_radius() / 24.0)) {
    throw std::invalid_argument("make_partition: need 0 < delta < inj(M)/24");
  }
  return PartitionOfUnity{std::move(centers), delta};
}

PartitionOfUnity build_partition(const Manifold& m, double delta,
                                 const PartitionBuildOptions& opts) {
  if (!(delta > 0.0 && delta < m.injectivity_radius() / 24.0)) {
    throw std::invalid_argument("build_partition: need 0 < delta < inj(M)/24");
  }
  int res = opts.mesh_resolution;
  if (res <= 0) {
    double spacing = delta / 6.0;
    res = m.kind() == ManifoldKind::sphere
              ? static_cast<int>(std::ceil(M_PI / spacing))
              : static_cast<int>(std::ceil(1.0 / spacing));
  }
  QuadratureRule mesh = quadrature_rule(m, res);
  const std::int64_t nm = mesh.size();

  std::vector<int> centers;
  Eigen::VectorXd min_dist(nm);
  centers.push_back(0);
  for (std::int64_t i = 0; i < nm; ++i) {
    min_dist[i] = geodesic_distance(m, mesh.nodes.col(i), mesh.nodes.col(0));
  }
  for (;;) {
    std::int64_t far = 0;
    for (std::int64_t i = 1; i < nm; ++i) {
      if (min_dist[i] > min_dist[far]) far = i;
    }
    if (min_dist[far] < 0.5 * delta) break;
    centers.push_back(static_cast<int>(far));
    for (std::int64_t i = 0; i < nm; ++i) {
      double dist = geodesic_distance(m, mesh.nodes.col(i), mesh.nodes.col(far));
      if (dist < min_dist[i]) min_dist[i] = dist;
    }
  }
  Eigen::MatrixXd pts(m.embedding_dim(), centers.size());
  for (std::size_t c = 0; c < centers.size(); ++c) pts.col(c) = mesh.nodes.col(centers[c]);
  return PartitionOfUnity{PointSet(m, std::move(pts), "greedy-cover"), delta};
}

double partition_mesh_covering_radius(const PartitionOfUnity& pou, int mesh_resolution) {
  QuadratureRule mesh = quadrature_rule(pou.centers.manifold, mesh_resolution);
  Eigen::VectorXd dist = distances_to_set(pou.centers.manifold, mesh.nodes, pou.centers);
  return dist.maxCoeff();
}

int mls_degree_for_smoothness(double s) {
  return std::max(1, static_cast<int>(std::ceil(s)) - 1);
}

namespace {

int poly_dim(int degree, int d) {
  // C(degree + d, d)
  int num = 1, den = 1;
  for (int i = 1; i <= d; ++i) {
    num *= degree + i;
    den *= i;
  }
  return num / den;
}

// Monomial basis of total degree <= degree at point z (d <= 2 used here, but
// the enumeration is generic in d via recursion-free odometer).
void monomials(const Eigen::VectorXd& z, int degree, Eigen::VectorXd& out) {
  const int d = static_cast<int>(z.size());
  std::vector<int> expo(d, 0);
  int idx = 0;
  std::function<void(int, int)> walk = [&](int pos, int remaining) {
    if (pos == d) {
      double v = 1.0;
      for (int i = 0; i < d; ++i) {
        for (int e = 0; e < expo[i]; ++e) v *= z[i];
      }
      out[idx++] = v;
      return;
    }
    for (int e = 0; e <= remaining; ++e) {
      expo[pos] = e;
      walk(pos + 1, remaining - e);
    }
    expo[pos] = 0;
  };
  walk(0, degree);
}

// Wendland-type C^2 weight (1 - t)^4 (4t + 1) on [0, 1).
double mls_weight(double t) {
  if (t >= 1.0) return 0.0;
  double a = 1.0 - t;
  double a2 = a * a;
  return a2 * a2 * (4.0 * t + 1.0);
}

}  // namespace

std::optional<MlsFunctional> mls_functional(const Eigen::MatrixXd& chart_points,
                                            const Eigen::VectorXd& eval,
                                            const MLSConfig& cfg) {
  if (cfg.degree < 0) throw std::invalid_argument("mls_functional: degree must be >= 0");
  if (cfg.support_multiplier < 1.5) {
    throw std::invalid_argument("mls_functional: support_multiplier must be >= 1.5");
  }
  if (cfg.min_points_factor < 1.0) {
    throw std::invalid_argument("mls_functional: min_points_factor must be >= 1");
  }
  const int d = static_cast<int>(chart_points.rows());
  const int k = static_cast<int>(chart_points.cols());
  if (k == 0) return std::nullopt;

  Eigen::VectorXd rho(k);
  for (int i = 0; i < k; ++i) rho[i] = (chart_points.col(i) - eval).norm();

  // Local fill distance: radius holding enough points for the requested
  // degree; capped at the farthest chart point when the chart is sparse.
  int wanted = static_cast<int>(std::ceil(poly_dim(cfg.degree, d) * cfg.min_points_factor));
  Eigen::VectorXd sorted = rho;
  std::sort(sorted.data(), sorted.data() + k);
  double fill = sorted[std::min(wanted, k) - 1];
  double radius = cfg.support_multiplier * std::max(fill, 1e-300);

  std::vector<int> active;
  for (int i = 0; i < k; ++i) {
    if (rho[i] < radius) active.push_back(i);
  }
  if (active.empty()) return std::nullopt;

  const int na = static_cast<int>(active.size());
  for (int degree = cfg.degree; degree >= 0; --degree) {
    const int nb = poly_dim(degree, d);
    if (na < nb) continue;
    Eigen::MatrixXd design(na, nb);
    Eigen::VectorXd wvec(na), basis(nb);
    for (int r = 0; r < na; ++r) {
      int i = active[r];
      Eigen::VectorXd z = (chart_points.col(i) - eval) / radius;
      monomials(z, degree, basis);
      design.row(r) = basis;
      wvec[r] = mls_weight(rho[i] / radius);
    }
    Eigen::MatrixXd normal = design.transpose() * wvec.asDiagonal() * design;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(normal, Eigen::ComputeThinU | Eigen::ComputeThinV);
    double smax = svd.singularValues()[0];
    double smin = svd.singularValues()[nb - 1];
    if (!(smin > 0.0) || smax / smin > cfg.max_condition) continue;  // degree fallback
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(nb);
    e0[0] = 1.0;  // constant monomial = value at eval
    Eigen::VectorXd gain = svd.solve(e0);
    MlsFunctional out;
    out.active = active;
    out.coeffs = wvec.asDiagonal() * (design * gain);
    out.degree_used = degree;
    return out;
  }
  return std::nullopt;
}

std::optional<double> mls_fit(const Eigen::MatrixXd& chart_points,
                              const Eigen::VectorXd& values, const Eigen::VectorXd& eval,
                              const MLSConfig& cfg) {
  if (values.size() != chart_points.cols()) {
    throw std::invalid_argument("mls_fit: values do not match chart points");
  }
  auto fn = mls_functional(chart_points, eval, cfg);
  if (!fn) return std::nullopt;
  double out = 0.0;
  for (int r = 0; r < static_cast<int>(fn->active.size()); ++r) {
    out += fn->coeffs[r] * values[fn->active[r]];
  }
  return out;
}

RecoveryOperator build_recovery(const Manifold& m, PointSet P, PartitionOfUnity pou,
                                const MLSConfig& mls) {
  if (!(P.manifold == m) || !(pou.centers.manifold == m)) {
    throw std::invalid_argument("build_recovery: manifold mismatch");
  }
  RecoveryOperator op{m, std::move(P), std::move(pou), mls, {}, {}, {}};
  const int n = op.points.size();
  const int charts = op.pou.size();
  op.chart_members.resize(charts);
  op.chart_coords.resize(charts);
  op.chart_psi.resize(charts);

  // Total bump per sampling point, then per-chart membership and psi values.
  Eigen::VectorXd total(n);
  parallel_for(n, [&](std::int64_t i) { total[i] = op.pou.total_bump(op.points.point(i)); });
  for (int i = 0; i < n; ++i) {
    if (!(total[i] > 0.0)) {
      throw NumericalError("build_recovery: partition balls do not cover sampling point " +
                           std::to_string(i));
    }
  }
  parallel_for(charts, [&](std::int64_t j) {
    const Point center = op.pou.centers.point(static_cast<int>(j));
    std::vector<int>& members = op.chart_members[j];
    for (int i = 0; i < n; ++i) {
      if (geodesic_distance(m, op.points.point(i), center) < op.pou.delta) {
        members.push_back(i);
      }
    }
    Eigen::MatrixXd coords(m.dim(), members.size());
    Eigen::VectorXd psi(members.size());
    for (std::size_t c = 0; c < members.size(); ++c) {
      int i = members[c];
      coords.col(c) = log_map(m, center, op.points.point(i));
      psi[c] = op.pou.bump(static_cast<int>(j), op.points.point(i)) / total[i];
    }
    op.chart_coords[j] = std::move(coords);
    op.chart_psi[j] = std::move(psi);
  });
  return op;
}

MlsFunctional recovery_functional(const RecoveryOperator& op, const Point& x) {
  // Concatenated per-chart contributions; a point shared by several charts
  // appears once per chart (summing duplicates is the caller's dot product).
  std::vector<int> ids;
  std::vector<double> acc;
  for (int j : op.pou.covering_charts(x)) {
    if (op.chart_members[j].empty()) continue;  // hole: zero contribution
    Eigen::VectorXd z = log_map(op.manifold, op.pou.centers.point(j), x);
    auto fn = mls_functional(op.chart_coords[j], z, op.mls);
    if (!fn) continue;  // hole inside this chart
    for (int r = 0; r < static_cast<int>(fn->active.size()); ++r) {
      int local = fn->active[r];
      ids.push_back(op.chart_members[j][local]);
      acc.push_back(fn->coeffs[r] * op.chart_psi[j][local]);
    }
  }
  MlsFunctional out;
  out.active = std::move(ids);
  out.coeffs.resize(static_cast<int>(acc.size()));
  for (std::size_t r = 0; r < acc.size(); ++r) out.coeffs[static_cast<int>(r)] = acc[r];
  return out;
}

Eigen::VectorXd recover(const RecoveryOperator& op, const Eigen::VectorXd& samples,
                        const Eigen::MatrixXd& eval_nodes) {
  if (samples.size() != op.points.size()) {
    throw std::invalid_argument("recover: samples do not match the point set");
  }
  const std::int64_t ne = eval_nodes.cols();
  Eigen::VectorXd out(ne);
  parallel_for(ne, [&](std::int64_t c) {
    MlsFunctional fn = recovery_functional(op, eval_nodes.col(c));
    double v = 0.0;
    for (int r = 0; r < static_cast<int>(fn.active.size()); ++r) {
      v += fn.coeffs[r] * samples[fn.active[r]];
    }
    out[c] = v;
  });
  return out;
}

double integrate_recovered(const RecoveryOperator& op, const Eigen::VectorXd& samples,
                           const QuadratureRule& rule) {
  Eigen::VectorXd values = recover(op, samples, rule.nodes);
  return blocked_sum(rule.size(), 4096, [&](std::int64_t lo, std::int64_t hi) {
    KahanSum sum;
    for (std::int64_t i = lo; i < hi; ++i) sum.add(rule.weights[i] * values[i]);
    return sum.value();
  });
}

Eigen::VectorXd cubature_weights(const RecoveryOperator& op, const QuadratureRule& rule) {
  const std::int64_t nodes = rule.size();
  const std::int64_t block = 2048;
  const std::int64_t blocks = (nodes + block - 1) / block;
  const int n = op.points.size();
  std::vector<Eigen::VectorXd> partial(blocks);
  parallel_for(blocks, [&](std::int64_t b) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
    std::int64_t lo = b * block, hi = std::min(nodes, lo + block);
    for (std::int64_t i = lo; i < hi; ++i) {
      MlsFunctional fn = recovery_functional(op, rule.nodes.col(i));
      for (int r = 0; r < static_cast<int>(fn.active.size()); ++r) {
        acc[fn.active[r]] += rule.weights[i] * fn.coeffs[r];
      }
    }
    partial[b] = std::move(acc);
  });
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(n);
  for (const auto& p : partial) weights += p;
  return weights;
}

double FoolingFunction::evaluate(const Manifold& m, const Point& x) const {
  double u = geodesic_distance(m, x, center) / radius;
  return amplitude * bump_profile(u);
}

FoolingFunction fooling_function(const Manifold& m, const PointSet& P, double s,
                                 const FoolingOptions& opts) {
  if (P.size() < 1) throw std::invalid_argument("fooling_function: empty point set");
  QuadratureRule mesh = quadrature_rule(m, opts.mesh_resolution);
  Eigen::VectorXd dist = distances_to_set(m, mesh.nodes, P);
  // Deepest hole; ties broken by the lowest mesh index.
  int best = 0;
  for (int i = 1; i < mesh.size(); ++i) {
    if (dist[i] > dist[best]) best = i;
  }
  FoolingFunction out;
  out.center = mesh.nodes.col(best);
  out.radius = dist[best];
  out.smoothness = s;
  if (!(out.radius > 1e-12)) {
    throw NumericalError("fooling_function: point set leaves no hole on the mesh");
  }
  out.amplitude = 1.0;
  if (m.kind() == ManifoldKind::sphere && m.dim() == 2) {
    out.norm_kind = SurrogateNorm::spectral;
    QuadratureRule rule = quadrature_rule(m, opts.spectral_resolution);
    Eigen::VectorXd samples(rule.size());
    for (int i = 0; i < rule.size(); ++i) samples[i] = out.evaluate(m, rule.nodes.col(i));
    double norm = sobolev_norm_sphere(rule, samples, s).value;
    if (!(norm > 0.0)) throw NumericalError("fooling_function: spectral norm vanished");
    out.amplitude = 1.0 / norm;
  } else {
    out.norm_kind = SurrogateNorm::derivative_sup;
    int order = static_cast<int>(std::ceil(s));
    double norm = 0.0;
    for (int k = 0; k <= order; ++k) {
      norm += bump_profile_derivative_sup(k) / std::pow(out.radius, k);
    }
    out.amplitude = 1.0 / norm;
  }
  return out;
}

}  // namespace mslab
