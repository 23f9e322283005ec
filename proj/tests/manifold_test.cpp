#include <cmath>
#include <sstream>

#include "doctest.h"
#include "mslab/manifold.hpp"
#include "mslab/numerics.hpp"
#include "mslab/pointset_io.hpp"
#include "mslab/rng.hpp"

using namespace mslab;

namespace {

Point sphere_point(double x, double y, double z) {
  Point p(3);
  p << x, y, z;
  return p / p.norm();
}

Point torus_point(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

}  // namespace

TEST_CASE("rng streams are reproducible and independent") {
  RandomSource src{42, 7};
  Rng a(src), b(src);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(src.child(0)), d(src.child(1));
  int same = 0;
  for (int i = 0; i < 100; ++i) same += c.next_u64() == d.next_u64();
  CHECK(same == 0);
}

TEST_CASE("manifold descriptors") {
  Manifold s2 = Manifold::sphere(2);
  CHECK(s2.total_volume() == doctest::Approx(4.0 * M_PI).epsilon(1e-14));
  CHECK(s2.injectivity_radius() == M_PI);
  CHECK(s2.diameter() == M_PI);
  CHECK(s2.embedding_dim() == 3);

  Manifold t2 = Manifold::flat_torus(2);
  CHECK(t2.total_volume() == 1.0);
  CHECK(t2.injectivity_radius() == 0.5);
  CHECK(t2.diameter() == doctest::Approx(std::sqrt(2.0) / 2.0));

  Manifold s1 = Manifold::sphere(1);
  CHECK(s1.total_volume() == doctest::Approx(2.0 * M_PI).epsilon(1e-14));

  CHECK(Manifold::from_name("S2") == s2);
  CHECK(Manifold::from_name("T2") == t2);
  CHECK_THROWS_AS(Manifold::from_name("X3"), std::invalid_argument);
}

TEST_CASE("geodesic distance closed forms") {
  Manifold s2 = Manifold::sphere(2);
  CHECK(geodesic_distance(s2, sphere_point(0, 0, 1), sphere_point(0, 0, -1)) ==
        doctest::Approx(M_PI).epsilon(1e-15));
  CHECK(geodesic_distance(s2, sphere_point(1, 0, 0), sphere_point(1, 0, 0)) == 0.0);
  CHECK(geodesic_distance(s2, sphere_point(1, 0, 0), sphere_point(0, 1, 0)) ==
        doctest::Approx(M_PI / 2).epsilon(1e-15));

  Manifold t2 = Manifold::flat_torus(2);
  CHECK(geodesic_distance(t2, torus_point(0.1, 0.1), torus_point(0.9, 0.1)) ==
        doctest::Approx(0.2).epsilon(1e-14));
  CHECK(geodesic_distance(t2, torus_point(0.25, 0.5), torus_point(0.25, 0.5)) == 0.0);

  Point bad(3);
  bad << 2.0, 0.0, 0.0;
  CHECK_THROWS_AS(geodesic_distance(s2, bad, sphere_point(1, 0, 0)), std::invalid_argument);
}

TEST_CASE("metric axioms on random triples") {
  for (Manifold m : {Manifold::sphere(2), Manifold::flat_torus(2)}) {
    PointSet pts = sample_uniform(m, 3 * 3334, RandomSource{5, 1});
    for (int t = 0; t < 3333; ++t) {
      Point a = pts.point(3 * t), b = pts.point(3 * t + 1), c = pts.point(3 * t + 2);
      double ab = geodesic_distance(m, a, b);
      double ba = geodesic_distance(m, b, a);
      CHECK(ab == ba);  // symmetry is exact
      double ac = geodesic_distance(m, a, c);
      double cb = geodesic_distance(m, c, b);
      CHECK(ab <= ac + cb + 1e-12);
      CHECK(ab <= m.diameter() + 1e-15);
    }
  }
}

TEST_CASE("exp map basics") {
  Manifold s2 = Manifold::sphere(2);
  Point north = sphere_point(0, 0, 1);

  Eigen::VectorXd zero(2);
  zero << 0.0, 0.0;
  CHECK((exp_map(s2, north, zero) - north).norm() == 0.0);

  // quarter great circle with the deterministic frame at the north pole
  Eigen::VectorXd v(2);
  v << M_PI / 2, 0.0;
  Point q = exp_map(s2, north, v);
  CHECK(q[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(q[1]) < 1e-12);
  CHECK(std::abs(q[2]) < 1e-12);

  Manifold t2 = Manifold::flat_torus(2);
  Eigen::VectorXd shift(2);
  shift << 0.2, 0.2;
  Point wrapped = exp_map(t2, torus_point(0.9, 0.9), shift);
  CHECK(wrapped[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(wrapped[1] == doctest::Approx(0.1).epsilon(1e-12));

  Eigen::VectorXd too_long(2);
  too_long << M_PI, 0.1;
  CHECK_THROWS_AS(exp_map(s2, north, too_long), std::invalid_argument);

  // distance along the geodesic equals the tangent length
  Rng rng(RandomSource{11, 0});
  for (int t = 0; t < 200; ++t) {
    Eigen::VectorXd w(2);
    w << rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5);
    if (w.norm() >= s2.injectivity_radius()) continue;
    Point e = exp_map(s2, north, w);
    CHECK(geodesic_distance(s2, north, e) == doctest::Approx(w.norm()).epsilon(1e-10));
  }
}

TEST_CASE("log map inverts exp inside the injectivity ball") {
  for (Manifold m : {Manifold::sphere(2), Manifold::flat_torus(2)}) {
    PointSet pts = sample_uniform(m, 200, RandomSource{17, 3});
    int done = 0;
    for (int i = 0; i + 1 < pts.size() && done < 100; i += 2) {
      Point p = pts.point(i), q = pts.point(i + 1);
      if (geodesic_distance(m, p, q) >= 0.9 * m.injectivity_radius()) continue;
      Eigen::VectorXd v = log_map(m, p, q);
      CHECK(v.norm() == doctest::Approx(geodesic_distance(m, p, q)).epsilon(1e-12));
      Point back = exp_map(m, p, v);
      CHECK((back - q).norm() < 1e-9);
      ++done;
    }
    CHECK(done == 100);
    Point p = pts.point(0);
    CHECK(log_map(m, p, p).norm() == 0.0);
  }
  Manifold s2 = Manifold::sphere(2);
  CHECK_THROWS_AS(log_map(s2, sphere_point(0, 0, 1), sphere_point(0, 0, -1)),
                  std::invalid_argument);
}

TEST_CASE("exp is bi-Lipschitz on the unit tangent ball") {
  // Lemma-style two-sided bounds: constants exist; on S^2 with rho = 1 the
  // measured ratios stay inside [2/pi, pi/2].
  Manifold s2 = Manifold::sphere(2);
  PointSet base = sample_uniform(s2, 5, RandomSource{23, 9});
  Rng rng(RandomSource{23, 10});
  double lo = 1e300, hi = 0.0;
  int pairs = 0;
  while (pairs < 10000) {
    Point p = base.point(pairs % 5);
    Eigen::VectorXd z1(2), z2(2);
    z1 << rng.uniform(-1, 1), rng.uniform(-1, 1);
    z2 << rng.uniform(-1, 1), rng.uniform(-1, 1);
    if (z1.norm() >= 1.0 || z2.norm() >= 1.0) continue;
    double denom = (z1 - z2).norm();
    if (denom < 1e-9) continue;
    double ratio = geodesic_distance(s2, exp_map(s2, p, z1), exp_map(s2, p, z2)) / denom;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    ++pairs;
  }
  CHECK(lo > 0.0);
  CHECK(std::isfinite(hi));
  CHECK(lo >= (2.0 / M_PI) * (1.0 - 1e-9));
  CHECK(hi <= (M_PI / 2.0) * (1.0 + 1e-9));
}

TEST_CASE("uniform sampling statistics and determinism") {
  Manifold s2 = Manifold::sphere(2);
  const int n = 100000;
  PointSet ps = sample_uniform(s2, n, RandomSource{3, 14});
  double bound = 5.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(ps.points.row(i).mean()) < bound);
  }
  int upper = 0;
  for (int j = 0; j < n; ++j) upper += ps.points(2, j) > 0.0;
  CHECK(std::abs(upper / static_cast<double>(n) - 0.5) < 5.0 * 0.5 / std::sqrt(double(n)));

  PointSet again = sample_uniform(s2, 1000, RandomSource{3, 14});
  CHECK((again.points - ps.points.leftCols(1000)).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(sample_uniform(s2, 0, RandomSource{1, 0}), std::invalid_argument);
}

TEST_CASE("quadrature reproduces analytic integrals") {
  Manifold s2 = Manifold::sphere(2);
  QuadratureRule rule = quadrature_rule(s2, 40);
  CHECK(rule.weights.minCoeff() > 0.0);
  CHECK(rule.weights.sum() == doctest::Approx(4.0 * M_PI).epsilon(1e-12));

  double z2 = 0.0, y21 = 0.0;
  for (int i = 0; i < rule.size(); ++i) {
    double x = rule.nodes(0, i), z = rule.nodes(2, i);
    z2 += rule.weights[i] * z * z;
    y21 += rule.weights[i] * x * z;  // degree-2 harmonic integrates to zero
  }
  CHECK(z2 == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-10));
  CHECK(std::abs(y21) < 1e-12);

  Manifold t2 = Manifold::flat_torus(2);
  QuadratureRule grid = quadrature_rule(t2, 64);
  CHECK(grid.weights.sum() == doctest::Approx(1.0).epsilon(1e-15));
  double cosint = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    cosint += grid.weights[i] * std::cos(2.0 * M_PI * grid.nodes(0, i));
  }
  CHECK(std::abs(cosint) < 1e-13);

  Manifold s1 = Manifold::sphere(1);
  QuadratureRule circle = quadrature_rule(s1, 16);
  CHECK(circle.weights.sum() == doctest::Approx(2.0 * M_PI).epsilon(1e-13));
}

TEST_CASE("ball volume closed forms and small-radius limit") {
  Manifold s2 = Manifold::sphere(2);
  Point north = sphere_point(0, 0, 1);
  CHECK(ball_volume(s2, north, M_PI) == doctest::Approx(4.0 * M_PI).epsilon(1e-14));
  CHECK(ball_volume(s2, north, M_PI / 2) == doctest::Approx(2.0 * M_PI).epsilon(1e-14));

  // vol(B(p,r)) / (omega_d r^d) -> 1, monotone over the tested radii
  double prev_gap = 1e300;
  for (double r : {1e-1, 1e-2, 1e-3}) {
    double ratio = ball_volume(s2, north, r) / (M_PI * r * r);
    double gap = std::abs(ratio - 1.0);
    CHECK(gap < prev_gap);
    prev_gap = gap;
    if (r == 1e-3) CHECK(gap <= 1e-3);
  }

  Manifold t2 = Manifold::flat_torus(2);
  CHECK(ball_volume(t2, torus_point(0.3, 0.7), 0.25) ==
        doctest::Approx(M_PI * 0.0625).epsilon(1e-14));
  // wrapped ball: grid fallback, compared against the whole torus
  CHECK(ball_volume(t2, torus_point(0.5, 0.5), std::sqrt(2.0) / 2.0) ==
        doctest::Approx(1.0).epsilon(1e-3));

  CHECK_THROWS_AS(ball_volume(s2, north, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ball_volume(s2, north, 4.0), std::invalid_argument);
}

TEST_CASE("Ahlfors regularity scan on the sphere") {
  Manifold s2 = Manifold::sphere(2);
  PointSet centers = sample_uniform(s2, 100, RandomSource{31, 2});
  Rng rng(RandomSource{31, 3});
  double lo = 1e300, hi = 0.0;
  for (int i = 0; i < 100; ++i) {
    double r = rng.uniform(1e-3, M_PI);
    double ratio = ball_volume(s2, centers.point(i), r) / (r * r);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  CHECK(lo > 0.0);
  CHECK(std::isfinite(hi));
  CHECK(hi / lo <= 4.0);
}

TEST_CASE("point-set text format round trip and rejection") {
  PointSet ps = sample_uniform(Manifold::sphere(2), 17, RandomSource{8, 8});
  std::ostringstream os;
  write_pointset(os, ps);
  std::istringstream is(os.str());
  PointSet back = read_pointset(is);
  CHECK(back.size() == 17);
  CHECK((back.points - ps.points).cwiseAbs().maxCoeff() == 0.0);

  std::istringstream bad_coords("# manifold=S2 n=1\n0.0 1.0\n");
  CHECK_THROWS_AS(read_pointset(bad_coords), std::invalid_argument);
  std::istringstream bad_count("# manifold=S2 n=2\n0 0 1\n");
  CHECK_THROWS_AS(read_pointset(bad_count), std::invalid_argument);
  std::istringstream bad_header("manifold question\n");
  CHECK_THROWS_AS(read_pointset(bad_header), std::invalid_argument);
}
