#include "mslab/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mslab/numerics.hpp"

namespace mslab {

Manifold Manifold::sphere(int dim) {
  if (dim < 1) throw std::invalid_argument("Manifold::sphere: dim must be >= 1");
  return Manifold(ManifoldKind::sphere, dim);
}

Manifold Manifold::flat_torus(int dim) {
  if (dim < 1) throw std::invalid_argument("Manifold::flat_torus: dim must be >= 1");
  return Manifold(ManifoldKind::flat_torus, dim);
}

double Manifold::total_volume() const {
  return kind_ == ManifoldKind::sphere ? sphere_surface_area(dim_) : 1.0;
}

double Manifold::injectivity_radius() const {
  return kind_ == ManifoldKind::sphere ? M_PI : 0.5;
}

double Manifold::diameter() const {
  return kind_ == ManifoldKind::sphere ? M_PI : 0.5 * std::sqrt(static_cast<double>(dim_));
}

bool Manifold::is_valid_point(const Point& x) const {
  if (x.size() != embedding_dim()) return false;
  if (kind_ == ManifoldKind::sphere) {
    return std::abs(x.norm() - 1.0) <= 1e-12;
  }
  for (int i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0 && x[i] < 1.0)) return false;
  }
  return true;
}

void Manifold::check_point(const Point& x) const {
  if (!is_valid_point(x)) {
    throw std::invalid_argument("invalid point for manifold " + name());
  }
}

std::string Manifold::name() const {
  return (kind_ == ManifoldKind::sphere ? "S" : "T") + std::to_string(dim_);
}

Manifold Manifold::from_name(const std::string& name) {
  if (name.size() >= 2 && (name[0] == 'S' || name[0] == 'T')) {
    int dim = 0;
    try {
      dim = std::stoi(name.substr(1));
    } catch (...) {
      dim = 0;
    }
    if (dim >= 1) {
      return name[0] == 'S' ? sphere(dim) : flat_torus(dim);
    }
  }
  throw std::invalid_argument("unknown manifold name: " + name);
}

PointSet::PointSet(Manifold m, Eigen::MatrixXd pts, std::string lbl)
    : manifold(m), points(std::move(pts)), label(std::move(lbl)) {
  if (points.cols() < 1) throw std::invalid_argument("PointSet: needs at least one point");
  if (points.rows() != manifold.embedding_dim()) {
    throw std::invalid_argument("PointSet: wrong coordinate count for " + manifold.name());
  }
  for (int j = 0; j < points.cols(); ++j) manifold.check_point(points.col(j));
}

namespace {

double torus_distance(const Point& x, const Point& y) {
  double sum = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    double delta = std::abs(x[i] - y[i]);
    delta = std::min(delta, 1.0 - delta);
    sum += delta * delta;
  }
  return std::sqrt(sum);
}

Point wrap_torus(Point x) {
  for (int i = 0; i < x.size(); ++i) {
    x[i] -= std::floor(x[i]);
    if (x[i] >= 1.0) x[i] = 0.0;  // guard against -1e-17 folding to 1.0
  }
  return x;
}

}  // namespace

double geodesic_distance(const Manifold& m, const Point& x, const Point& y) {
  m.check_point(x);
  m.check_point(y);
  if (m.kind() == ManifoldKind::sphere) {
    return std::acos(clamp_unit(x.dot(y)));
  }
  return torus_distance(x, y);
}

Eigen::MatrixXd tangent_frame(const Manifold& m, const Point& p) {
  if (m.kind() != ManifoldKind::sphere) {
    throw std::invalid_argument("tangent_frame: defined for spheres only");
  }
  m.check_point(p);
  const int n = m.embedding_dim();
  const int d = m.dim();
  // Axes ordered by |p_k| ascending (ties by index) give a stable seed basis.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(p[a]) < std::abs(p[b]);
  });
  Eigen::MatrixXd frame(n, d);
  int got = 0;
  for (int idx : order) {
    if (got == d) break;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v[idx] = 1.0;
    v -= p * p.dot(v);
    for (int k = 0; k < got; ++k) v -= frame.col(k) * frame.col(k).dot(v);
    double norm = v.norm();
    if (norm > 1e-8) frame.col(got++) = v / norm;
  }
  if (got != d) throw NumericalError("tangent_frame: Gram-Schmidt failed");
  return frame;
}

Point exp_map(const Manifold& m, const Point& p, const Eigen::VectorXd& v) {
  m.check_point(p);
  if (v.size() != m.dim()) throw std::invalid_argument("exp_map: tangent vector has wrong size");
  double len = v.norm();
  if (len >= m.injectivity_radius()) {
    throw std::invalid_argument("exp_map: ||v|| must be below the injectivity radius");
  }
  if (m.kind() == ManifoldKind::flat_torus) {
    return wrap_torus(p + v);
  }
  if (len == 0.0) return p;
  Eigen::MatrixXd frame = tangent_frame(m, p);
  Eigen::VectorXd dir = frame * (v / len);
  Point q = std::cos(len) * p + std::sin(len) * dir;
  return q / q.norm();
}

Eigen::VectorXd log_map(const Manifold& m, const Point& p, const Point& q) {
  double dist = geodesic_distance(m, p, q);
  if (dist >= m.injectivity_radius()) {
    throw std::invalid_argument("log_map: q outside the injectivity ball of p");
  }
  if (m.kind() == ManifoldKind::flat_torus) {
    Eigen::VectorXd v(m.dim());
    for (int i = 0; i < m.dim(); ++i) {
      double delta = q[i] - p[i];
      delta -= std::round(delta);
      v[i] = delta;
    }
    return v;
  }
  if (dist == 0.0) return Eigen::VectorXd::Zero(m.dim());
  Eigen::VectorXd u = q - p * p.dot(q);
  double norm = u.norm();
  if (norm < 1e-15) return Eigen::VectorXd::Zero(m.dim());
  Eigen::MatrixXd frame = tangent_frame(m, p);
  return frame.transpose() * (u * (dist / norm));
}

PointSet sample_uniform(const Manifold& m, int n, RandomSource source) {
  if (n < 1) throw std::invalid_argument("sample_uniform: n must be >= 1");
  Rng rng(source);
  Eigen::MatrixXd pts(m.embedding_dim(), n);
  if (m.kind() == ManifoldKind::sphere) {
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd g(m.embedding_dim());
      do {
        for (int i = 0; i < g.size(); ++i) g[i] = rng.normal();
      } while (g.norm() < 1e-12);
      pts.col(j) = g / g.norm();
    }
  } else {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < m.dim(); ++i) pts(i, j) = rng.uniform();
    }
  }
  return PointSet(m, std::move(pts), "uniform");
}

QuadratureRule quadrature_rule(const Manifold& m, int resolution) {
  if (resolution < 1) throw std::invalid_argument("quadrature_rule: resolution must be >= 1");
  QuadratureRule rule{m, {}, {}, resolution, 0};
  if (m.kind() == ManifoldKind::sphere) {
    if (m.dim() == 1) {
      int n = 4 * resolution;
      rule.nodes.resize(2, n);
      rule.weights = Eigen::VectorXd::Constant(n, 2.0 * M_PI / n);
      for (int k = 0; k < n; ++k) {
        double phi = 2.0 * M_PI * (k + 0.5) / n;
        rule.nodes.col(k) << std::cos(phi), std::sin(phi);
      }
      rule.exact_degree = n - 1;
      return rule;
    }
    if (m.dim() == 2) {
      // dvol = du dphi with u = cos(theta); Gauss-Legendre in u, uniform
      // midpoint rule in phi.
      int nu = resolution, nphi = 2 * resolution;
      auto [u, wu] = gauss_legendre(nu);
      rule.nodes.resize(3, nu * nphi);
      rule.weights.resize(nu * nphi);
      int col = 0;
      for (int i = 0; i < nu; ++i) {
        double s = std::sqrt(std::max(0.0, 1.0 - u[i] * u[i]));
        for (int k = 0; k < nphi; ++k) {
          double phi = 2.0 * M_PI * (k + 0.5) / nphi;
          rule.nodes.col(col) << s * std::cos(phi), s * std::sin(phi), u[i];
          rule.weights[col] = wu[i] * (2.0 * M_PI / nphi);
          ++col;
        }
      }
      rule.exact_degree = std::min(2 * nu - 1, nphi - 1);
      return rule;
    }
    throw std::invalid_argument("quadrature_rule: spheres are supported for d in {1,2}");
  }
  // Torus: uniform midpoint grid, resolution cells per axis.
  const int d = m.dim();
  std::int64_t count = 1;
  for (int i = 0; i < d; ++i) count *= resolution;
  rule.nodes.resize(d, count);
  rule.weights = Eigen::VectorXd::Constant(count, 1.0 / static_cast<double>(count));
  for (std::int64_t idx = 0; idx < count; ++idx) {
    std::int64_t rest = idx;
    for (int i = 0; i < d; ++i) {
      rule.nodes(i, idx) = (static_cast<double>(rest % resolution) + 0.5) / resolution;
      rest /= resolution;
    }
  }
  rule.exact_degree = resolution - 1;
  return rule;
}

double ball_volume(const Manifold& m, const Point& p, double r) {
  m.check_point(p);
  if (!(r > 0.0)) throw std::invalid_argument("ball_volume: r must be positive");
  if (r > m.diameter()) throw std::invalid_argument("ball_volume: r exceeds the diameter");
  if (m.kind() == ManifoldKind::sphere) {
    if (m.dim() == 1) return 2.0 * r;
    if (m.dim() == 2) return 2.0 * M_PI * (1.0 - std::cos(r));
    const int d = m.dim();
    return sphere_surface_area(d - 1) *
           integrate_gl([d](double t) { return std::pow(std::sin(t), d - 1); }, 0.0, r, 64);
  }
  if (r < 0.5) return unit_ball_volume(m.dim()) * std::pow(r, m.dim());
  // Wrapped balls have no elementary closed form; midpoint-grid fallback.
  const int grid = 1024;
  QuadratureRule rule = quadrature_rule(m, grid);
  double sum = 0.0;
  for (int i = 0; i < rule.size(); ++i) {
    if (torus_distance(rule.nodes.col(i), p) <= r) sum += rule.weights[i];
  }
  return sum;
}

}  // namespace mslab
