#pragma once

#include "mslab/manifold.hpp"

namespace mslab {

// Golden-spiral (Fibonacci) points on S^2: deterministic, quasi-uniform,
// covering radius O(n^{-1/2}).
PointSet fibonacci_sphere(int n);

// Adversarial family on S^2: floor(n/2) points packed into the polar cap of
// radius cap_radius (a golden spiral rescaled into the cap), the rest global
// Fibonacci points. Large local imbalance, near-optimal covering radius.
PointSet cluster_cover_sphere(int n, double cap_radius = 0.15);

// k x k lattice {(i/k, j/k)} on T^2, the optimal-rate family.
PointSet torus_grid(int k);

// The six octahedron vertices +-e_i on S^2.
PointSet octahedron_sphere();

// Named deterministic or seeded family used by experiments and the CLI:
// "random", "fibonacci", "cluster-cover", "grid" (T^2 only, n must be a
// square), "octahedron".
PointSet make_family(const Manifold& m, const std::string& family, int n,
                     RandomSource source);

}  // namespace mslab
