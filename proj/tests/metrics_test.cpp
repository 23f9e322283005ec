#include <cmath>

#include "doctest.h"
#include "mslab/families.hpp"
#include "mslab/metrics.hpp"

using namespace mslab;

namespace {

Point sphere_point(double x, double y, double z) {
  Point p(3);
  p << x, y, z;
  return p / p.norm();
}

PointSet single_point_set(const Manifold& m, const Point& p) {
  Eigen::MatrixXd pts(p.size(), 1);
  pts.col(0) = p;
  return PointSet(m, pts, "single");
}

PointSet with_extra_point(const PointSet& ps, const Point& p) {
  Eigen::MatrixXd pts(ps.points.rows(), ps.size() + 1);
  pts.leftCols(ps.size()) = ps.points;
  pts.col(ps.size()) = p;
  return PointSet(ps.manifold, pts, ps.label);
}

}  // namespace

TEST_CASE("quality parameter table") {
  // q < p branch
  QualityParams a = quality_params(2, 2, 1, 2);
  CHECK(a.gamma == doctest::Approx(4.0));
  CHECK(a.alpha == doctest::Approx(2.0));
  // q >= p branch
  QualityParams b = quality_params(2, 2, 2, 2);
  CHECK(std::isinf(b.gamma));
  CHECK(b.alpha == doctest::Approx(2.0));
  // integration problem: q = 1 gives gamma = s p* (Hoelder conjugate)
  QualityParams c = quality_params(1.5, 2, 1, 2);
  CHECK(c.gamma == doctest::Approx(3.0));
  CHECK(c.alpha == doctest::Approx(1.5));
  // q = inf lands in the covering-radius branch with alpha = s - d/p
  QualityParams e = quality_params(2, 2, inf, 2);
  CHECK(std::isinf(e.gamma));
  CHECK(e.alpha == doctest::Approx(1.0));

  CHECK_THROWS_AS(quality_params(0.9, 2, 1, 2), std::invalid_argument);  // s <= d/p
  CHECK_THROWS_AS(quality_params(2, 1, 1, 2), std::invalid_argument);
}

TEST_CASE("distance to set") {
  Manifold s2 = Manifold::sphere(2);
  PointSet octa = octahedron_sphere();
  CHECK(distance_to_set(s2, octa.point(0), octa) == 0.0);

  PointSet north = single_point_set(s2, sphere_point(0, 0, 1));
  CHECK(distance_to_set(s2, sphere_point(0, 0, -1), north) == doctest::Approx(M_PI));

  // deepest octahedron hole: brute-force minimum over the six vertices
  Point hole = sphere_point(1, 1, 1);
  double brute = inf;
  for (int j = 0; j < octa.size(); ++j) {
    brute = std::min(brute, geodesic_distance(s2, hole, octa.point(j)));
  }
  CHECK(brute == doctest::Approx(std::acos(1.0 / std::sqrt(3.0))).epsilon(1e-12));
  CHECK(distance_to_set(s2, hole, octa) == doctest::Approx(brute).epsilon(1e-14));

  // bulk variant agrees with the scalar one
  PointSet probes = sample_uniform(s2, 257, RandomSource{19, 0});
  Eigen::VectorXd bulk = distances_to_set(s2, probes.points, octa);
  for (int i = 0; i < probes.size(); ++i) {
    CHECK(bulk[i] == doctest::Approx(distance_to_set(s2, probes.point(i), octa)).epsilon(1e-14));
  }
}

TEST_CASE("covering radius of reference configurations") {
  Manifold s2 = Manifold::sphere(2);
  CoveringOptions opts;
  opts.tol = 1e-6;

  PointSet north = single_point_set(s2, sphere_point(0, 0, 1));
  CHECK(covering_radius(s2, north, opts).value == doctest::Approx(M_PI).epsilon(1e-6));

  PointSet poles = with_extra_point(north, sphere_point(0, 0, -1));
  CHECK(covering_radius(s2, poles, opts).value == doctest::Approx(M_PI / 2).epsilon(1e-5));

  DistortionEstimate octa = covering_radius(s2, octahedron_sphere(), opts);
  CHECK(octa.value == doctest::Approx(std::acos(1.0 / std::sqrt(3.0))).epsilon(1e-6));
  CHECK(octa.method == DistortionMethod::mesh_max);

  // torus grid: exact half-diagonal
  Manifold t2 = Manifold::flat_torus(2);
  PointSet grid = torus_grid(8);
  CHECK(covering_radius(t2, grid, opts).value ==
        doctest::Approx(std::sqrt(2.0) / 16.0).epsilon(1e-6));
}

TEST_CASE("covering radius matches a mesh brute force") {
  Manifold s2 = Manifold::sphere(2);
  PointSet P = sample_uniform(s2, 128, RandomSource{29, 4});
  CoveringOptions opts;
  opts.tol = 1e-6;
  DistortionEstimate cr = covering_radius(s2, P, opts);
  QuadratureRule mesh = quadrature_rule(s2, 300);  // 180k nodes
  double mesh_max = distances_to_set(s2, mesh.nodes, P).maxCoeff();
  double spacing = M_PI / 300.0;
  CHECK(cr.value >= mesh_max - 1e-9);          // refinement only climbs
  CHECK(cr.value <= mesh_max + 2.0 * spacing);  // mesh resolves the deepest hole
}

TEST_CASE("distortion analytic oracle: single point on the sphere") {
  // gamma = 1: 2 pi int_0^pi theta sin(theta) dtheta = 2 pi^2
  Manifold s2 = Manifold::sphere(2);
  PointSet north = single_point_set(s2, sphere_point(0, 0, 1));
  QuadratureRule rule = quadrature_rule(s2, 128);
  DistortionEstimate est = distortion(s2, north, 1.0, rule);
  CHECK(est.value == doctest::Approx(2.0 * M_PI * M_PI).epsilon(1e-6));
  CHECK(est.integral == doctest::Approx(est.value).epsilon(1e-12));
  CHECK(est.error < 1e-4 * est.value);

  // L_gamma <= L_inf vol^{1/gamma}
  for (double gamma : {1.0, 2.0, 4.0}) {
    double v = distortion_value(s2, north, gamma, rule);
    CHECK(v <= M_PI * std::pow(4.0 * M_PI, 1.0 / gamma) * (1 + 1e-12));
  }

  CHECK_THROWS_AS(distortion(s2, north, inf, rule), std::invalid_argument);
}

TEST_CASE("torus grid distortion: exact cell decomposition oracle") {
  Manifold t2 = Manifold::flat_torus(2);
  QuadratureRule rule = quadrature_rule(t2, 512);
  // per square cell of side h: int dist^2 = h^4/6, int dist = h^3 (sqrt2 + asinh 1)/6
  const double c1 = (std::sqrt(2.0) + std::asinh(1.0)) / 6.0;
  double prev2 = 0.0;
  for (int k : {4, 8, 16}) {
    PointSet grid = torus_grid(k);
    double v2 = distortion_value(t2, grid, 2.0, rule);
    double v1 = distortion_value(t2, grid, 1.0, rule);
    CHECK(v2 == doctest::Approx(1.0 / (std::sqrt(6.0) * k)).epsilon(0.01));
    CHECK(v1 == doctest::Approx(c1 / k).epsilon(0.01));
    if (k > 4) CHECK(v2 * k == doctest::Approx(prev2).epsilon(0.01));  // c/k scaling
    prev2 = v2 * k;
  }
}

TEST_CASE("torus distortion is translation invariant") {
  Manifold t2 = Manifold::flat_torus(2);
  const int res = 256;
  QuadratureRule rule = quadrature_rule(t2, res);
  PointSet P = sample_uniform(t2, 40, RandomSource{41, 7});
  double base = distortion_value(t2, P, 2.0, rule);

  // grid-aligned shift: the integrand is sampled at permuted nodes
  Eigen::MatrixXd shifted = P.points;
  for (int j = 0; j < P.size(); ++j) {
    shifted(0, j) = std::fmod(shifted(0, j) + 7.0 / res, 1.0);
    shifted(1, j) = std::fmod(shifted(1, j) + 3.0 / res, 1.0);
  }
  double v_aligned = distortion_value(t2, PointSet(t2, shifted, "shift"), 2.0, rule);
  CHECK(v_aligned == doctest::Approx(base).epsilon(1e-12));

  // arbitrary shift: equality within the quadrature phase error
  Eigen::MatrixXd shifted2 = P.points;
  for (int j = 0; j < P.size(); ++j) {
    shifted2(0, j) = std::fmod(shifted2(0, j) + 0.2391871, 1.0);
    shifted2(1, j) = std::fmod(shifted2(1, j) + 0.7130569, 1.0);
  }
  double v_any = distortion_value(t2, PointSet(t2, shifted2, "shift2"), 2.0, rule);
  CHECK(v_any == doctest::Approx(base).epsilon(1e-3));
}

TEST_CASE("monotonicity: adding a point never hurts") {
  Manifold s2 = Manifold::sphere(2);
  PointSet P = sample_uniform(s2, 24, RandomSource{43, 1});
  Point extra = sphere_point(0.3, -0.5, 0.9);
  PointSet Q = with_extra_point(P, extra);
  QuadratureRule rule = quadrature_rule(s2, 64);

  PointSet probes = sample_uniform(s2, 200, RandomSource{43, 2});
  for (int i = 0; i < probes.size(); ++i) {
    CHECK(distance_to_set(s2, probes.point(i), Q) <=
          distance_to_set(s2, probes.point(i), P) + 1e-15);
  }
  CoveringOptions opts;
  opts.tol = 1e-5;
  CHECK(covering_radius(s2, Q, opts).value <= covering_radius(s2, P, opts).value + 1e-5);
  CHECK(distortion_value(s2, Q, 2.0, rule) <= distortion_value(s2, P, 2.0, rule) + 1e-15);
}

TEST_CASE("normalized distortion is nondecreasing in gamma") {
  Manifold s2 = Manifold::sphere(2);
  PointSet P = sample_uniform(s2, 16, RandomSource{47, 5});
  QuadratureRule rule = quadrature_rule(s2, 96);
  double prev = 0.0;
  for (double gamma : {1.0, 2.0, 4.0}) {
    double v = distortion_value(s2, P, gamma, rule, Normalization::normalized);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
  CoveringOptions opts;
  opts.tol = 1e-5;
  CHECK(covering_radius(s2, P, opts).value >= prev - 1e-5);
}

TEST_CASE("single random point moment is deterministic by symmetry") {
  // distortion(gamma=1, alpha=1) of one uniform point equals 2 pi^2
  // independent of where the point lands.
  Manifold s2 = Manifold::sphere(2);
  MomentOptions opts;
  opts.resolution = 96;
  auto [mean, se] = moment_over_trials(s2, 1, 1.0, 1.0, 8, RandomSource{53, 0}, opts);
  CHECK(mean == doctest::Approx(2.0 * M_PI * M_PI).epsilon(1e-4));
  CHECK(se < 1e-4 * mean);
}

TEST_CASE("moment trials: determinism and CLT scaling") {
  Manifold s2 = Manifold::sphere(2);
  MomentOptions opts;
  opts.resolution = 48;
  Eigen::VectorXd a = moment_trials(s2, 32, 2.0, 1.0, 20, RandomSource{59, 1}, opts);
  Eigen::VectorXd b = moment_trials(s2, 32, 2.0, 1.0, 20, RandomSource{59, 1}, opts);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);

  // doubling the trial count halves the variance of the mean (within 30%,
  // averaged over 10 repetitions)
  double ratio_sum = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    auto [m1, se1] = moment_over_trials(s2, 32, 2.0, 1.0, 40,
                                        RandomSource{60, std::uint64_t(rep)}, opts);
    auto [m2, se2] = moment_over_trials(s2, 32, 2.0, 1.0, 80,
                                        RandomSource{61, std::uint64_t(rep)}, opts);
    ratio_sum += (se2 * se2) / (se1 * se1);
  }
  double ratio = ratio_sum / 10.0;
  CHECK(ratio > 0.35);
  CHECK(ratio < 0.65);
}

TEST_CASE("small-scale random rate slope") {
  // Prop-style n^{-1/2} decay, looser band than the acceptance run
  Manifold s2 = Manifold::sphere(2);
  MomentOptions opts;
  opts.resolution = 64;
  std::vector<int> ns = {64, 256, 1024};
  Eigen::VectorXd x(3), y(3);
  for (int i = 0; i < 3; ++i) {
    auto [mean, se] = moment_over_trials(s2, ns[i], 2.0, 1.0, 12,
                                         RandomSource{67, std::uint64_t(i)}, opts);
    x[i] = ns[i];
    y[i] = mean;
  }
  double slope = std::log(y[2] / y[0]) / std::log(x[2] / x[0]);
  CHECK(slope == doctest::Approx(-0.5).epsilon(0.2));
}
