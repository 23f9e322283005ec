#pragma once

#include <Eigen/Core>
#include <string>

#include "mslab/rng.hpp"

namespace mslab {

// A point is its embedding vector: a unit vector in R^{d+1} on the sphere,
// a d-vector with entries in [0,1) on the flat torus.
using Point = Eigen::VectorXd;

enum class ManifoldKind { sphere, flat_torus };

// Descriptor of the two supported closed manifolds: the round sphere S^d and
// the unit flat torus T^d = [0,1)^d. Metric quantities are evaluated in
// closed form; nothing about the metric tensor is stored.
class Manifold {
 public:
  static Manifold sphere(int dim);
  static Manifold flat_torus(int dim);

  ManifoldKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int embedding_dim() const { return kind_ == ManifoldKind::sphere ? dim_ + 1 : dim_; }

  // Riemannian volume of the whole manifold: 2 pi^{(d+1)/2} / Gamma((d+1)/2)
  // for S^d, 1 for the unit torus.
  double total_volume() const;
  double injectivity_radius() const;  // pi for S^d, 1/2 for T^d
  double diameter() const;            // pi for S^d, sqrt(d)/2 for T^d

  bool is_valid_point(const Point& x) const;
  void check_point(const Point& x) const;  // throws std::invalid_argument

  // Short name used by the point-set text format: S1, S2, T2, ...
  std::string name() const;
  static Manifold from_name(const std::string& name);

  bool operator==(const Manifold& other) const {
    return kind_ == other.kind_ && dim_ == other.dim_;
  }

 private:
  Manifold(ManifoldKind kind, int dim) : kind_(kind), dim_(dim) {}
  ManifoldKind kind_;
  int dim_;
};

// Sampling nodes on one manifold, stored as columns of an
// embedding_dim x n matrix.
struct PointSet {
  Manifold manifold;
  Eigen::MatrixXd points;
  std::string label;

  PointSet(Manifold m, Eigen::MatrixXd pts, std::string lbl = "");

  int size() const { return static_cast<int>(points.cols()); }
  Point point(int i) const { return points.col(i); }
};

// Nodes and positive weights summing to the total volume; resolution is kept
// so error control can rebuild the rule at double resolution.
struct QuadratureRule {
  Manifold manifold;
  Eigen::MatrixXd nodes;
  Eigen::VectorXd weights;
  int resolution = 0;
  int exact_degree = 0;

  int size() const { return static_cast<int>(nodes.cols()); }
};

// Geodesic distance: arccos of the clamped inner product on the sphere,
// minimum over integer shifts on the torus.
double geodesic_distance(const Manifold& m, const Point& x, const Point& y);

// Deterministic orthonormal tangent frame at p (sphere only): Gram-Schmidt
// seeded from coordinate axes ordered by |p_k| ascending, so exp/log are
// reproducible even though no global smooth frame exists.
Eigen::MatrixXd tangent_frame(const Manifold& m, const Point& p);

// exp_p(v) for a tangent coordinate vector v with ||v|| < inj(M).
Point exp_map(const Manifold& m, const Point& p, const Eigen::VectorXd& v);

// Inverse of exp_map on the injectivity ball: ||log_map|| equals the
// geodesic distance.
Eigen::VectorXd log_map(const Manifold& m, const Point& p, const Point& q);

// n i.i.d. points with respect to the normalized Riemannian volume.
PointSet sample_uniform(const Manifold& m, int n, RandomSource source);

// Product quadrature: Gauss-Legendre in the polar cosine x uniform azimuth on
// S^2 (about 2 resolution^2 nodes), uniform offset grid on T^d, uniform
// points on S^1. Exact for constants; spherical harmonics up to the stated
// exact_degree integrate to ~1e-14.
QuadratureRule quadrature_rule(const Manifold& m, int resolution);

// vol(B(p, r)). Closed form on S^1, S^2 and for r < 1/2 on the torus;
// 1-D quadrature of sin^{d-1} on higher spheres, grid fallback on the torus.
double ball_volume(const Manifold& m, const Point& p, double r);

}  // namespace mslab
