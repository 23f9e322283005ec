#include "mslab/families.hpp"

#include <cmath>
#include <stdexcept>

namespace mslab {

namespace {

// Golden-spiral column j of n, with z running over an interval [z_lo, z_hi].
void spiral_points(Eigen::MatrixXd& pts, int first_col, int n, double z_lo, double z_hi) {
  const double golden_angle = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    double z = z_hi - (z_hi - z_lo) * (i + 0.5) / n;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = golden_angle * i;
    pts.col(first_col + i) << r * std::cos(phi), r * std::sin(phi), z;
  }
}

}  // namespace

PointSet fibonacci_sphere(int n) {
  if (n < 1) throw std::invalid_argument("fibonacci_sphere: n must be >= 1");
  Eigen::MatrixXd pts(3, n);
  spiral_points(pts, 0, n, -1.0, 1.0);
  return PointSet(Manifold::sphere(2), std::move(pts), "fibonacci");
}

PointSet cluster_cover_sphere(int n, double cap_radius) {
  if (n < 2) throw std::invalid_argument("cluster_cover_sphere: n must be >= 2");
  if (!(cap_radius > 0.0 && cap_radius < M_PI)) {
    throw std::invalid_argument("cluster_cover_sphere: cap_radius out of range");
  }
  int in_cap = n / 2;
  int global = n - in_cap;
  Eigen::MatrixXd pts(3, n);
  spiral_points(pts, 0, in_cap, std::cos(cap_radius), 1.0);
  spiral_points(pts, in_cap, global, -1.0, 1.0);
  return PointSet(Manifold::sphere(2), std::move(pts), "cluster-cover");
}

PointSet torus_grid(int k) {
  if (k < 1) throw std::invalid_argument("torus_grid: k must be >= 1");
  Eigen::MatrixXd pts(2, k * k);
  int col = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      pts.col(col++) << static_cast<double>(i) / k, static_cast<double>(j) / k;
    }
  }
  return PointSet(Manifold::flat_torus(2), std::move(pts), "grid");
}

PointSet octahedron_sphere() {
  Eigen::MatrixXd pts(3, 6);
  pts.setZero();
  for (int i = 0; i < 3; ++i) {
    pts(i, 2 * i) = 1.0;
    pts(i, 2 * i + 1) = -1.0;
  }
  return PointSet(Manifold::sphere(2), std::move(pts), "octahedron");
}

PointSet make_family(const Manifold& m, const std::string& family, int n,
                     RandomSource source) {
  if (family == "random") {
    PointSet ps = sample_uniform(m, n, source);
    ps.label = "random";
    return ps;
  }
  if (m.kind() == ManifoldKind::sphere && m.dim() == 2) {
    if (family == "fibonacci") return fibonacci_sphere(n);
    if (family == "cluster-cover") return cluster_cover_sphere(n);
    if (family == "octahedron") return octahedron_sphere();
  }
  if (m.kind() == ManifoldKind::flat_torus && m.dim() == 2 && family == "grid") {
    int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    if (k * k != n) throw std::invalid_argument("make_family: grid needs a square n");
    return torus_grid(k);
  }
  throw std::invalid_argument("make_family: unknown family '" + family + "' on " + m.name());
}

}  // namespace mslab
