#pragma once

#include <optional>
#include <vector>

#include "mslab/manifold.hpp"
#include "mslab/sphere_harmonics.hpp"

namespace mslab {

// C-infinity compactly supported radial profile exp(-1/(1-u^2)) for u < 1,
// exactly zero for u >= 1 (underflows to zero well before u reaches 1).
double bump_profile(double u);

// Numerically measured sup of the k-th radial derivative of bump_profile.
double bump_profile_derivative_sup(int k);

// Shepard-normalized partition of unity subordinate to the geodesic balls
// B(p_j, delta): psi_j = phi_j / sum_k phi_k with phi_j(x) =
// bump_profile(dist(x, p_j)/delta). Valid when the balls cover M.
struct PartitionOfUnity {
  PointSet centers;
  double delta;

  int size() const { return centers.size(); }
  double bump(int j, const Point& x) const;
  double total_bump(const Point& x) const;
  double psi(int j, const Point& x) const;
  std::vector<int> covering_charts(const Point& x) const;  // {j : dist < delta}
};

// Explicit centers; validates 0 < delta < inj(M)/24 and that every center is
// a point of m. Coverage is the caller's responsibility (checked by
// build_partition and by the verification helpers below).
PartitionOfUnity make_partition(PointSet centers, double delta);

struct PartitionBuildOptions {
  int mesh_resolution = 0;  // 0 = auto so the mesh spacing is << delta
};

// Greedy cover: farthest-point sampling over a verification mesh until the
// mesh covering radius drops below delta/2.
PartitionOfUnity build_partition(const Manifold& m, double delta,
                                 const PartitionBuildOptions& opts = {});

// Max over the mesh of dist(., centers); < delta means the balls cover.
double partition_mesh_covering_radius(const PartitionOfUnity& pou, int mesh_resolution);

struct MLSConfig {
  int degree = 1;                  // polynomial reproduction degree in chart coordinates
  double support_multiplier = 2.0; // weight support = multiplier x local fill distance
  double min_points_factor = 1.5;  // required points per polynomial dimension
  double max_condition = 1e12;     // normal-equation condition triggering degree fallback
};

// degree = max(1, ceil(s) - 1): reproduction order matching smoothness s.
int mls_degree_for_smoothness(double s);

// Linear functional view of one moving-least-squares fit: value =
// sum coeffs[i] * values[active[i]].
struct MlsFunctional {
  std::vector<int> active;
  Eigen::VectorXd coeffs;
  int degree_used = 0;
};

// Weighted local polynomial fit at eval; columns of chart_points are the
// d-dimensional chart coordinates. nullopt = no points in support ("hole",
// callers substitute zero). Falls back to lower degree on rank deficiency.
std::optional<MlsFunctional> mls_functional(const Eigen::MatrixXd& chart_points,
                                            const Eigen::VectorXd& eval,
                                            const MLSConfig& cfg);

std::optional<double> mls_fit(const Eigen::MatrixXd& chart_points,
                              const Eigen::VectorXd& values, const Eigen::VectorXd& eval,
                              const MLSConfig& cfg);

// The chart-local recovery operator A(f) = sum_j A_j(f), where A_j fits
// (psi_j f) o exp_j on the chart point set by MLS. Linear in the samples and
// evaluated through the functionals u_p below.
struct RecoveryOperator {
  Manifold manifold;
  PointSet points;
  PartitionOfUnity pou;
  MLSConfig mls;
  std::vector<std::vector<int>> chart_members;  // indices into points, per chart
  std::vector<Eigen::MatrixXd> chart_coords;    // log-map coordinates, per chart
  std::vector<Eigen::VectorXd> chart_psi;       // psi_j at the chart members
};

RecoveryOperator build_recovery(const Manifold& m, PointSet P, PartitionOfUnity pou,
                                const MLSConfig& mls);

// The sampling functional at x: A(f)(x) = sum_i coeffs[i] f(points[active[i]]).
MlsFunctional recovery_functional(const RecoveryOperator& op, const Point& x);

// A(f) at each eval node, given samples of f on op.points.
Eigen::VectorXd recover(const RecoveryOperator& op, const Eigen::VectorXd& samples,
                        const Eigen::MatrixXd& eval_nodes);

// Q(f) = int A(f) dvol over the rule. Equals cubature_weights(op, rule) dot
// samples up to roundoff (linearity).
double integrate_recovered(const RecoveryOperator& op, const Eigen::VectorXd& samples,
                           const QuadratureRule& rule);

// The induced cubature weights w_p, one per sampling point.
Eigen::VectorXd cubature_weights(const RecoveryOperator& op, const QuadratureRule& rule);

enum class SurrogateNorm { spectral, derivative_sup };

// Non-negative bump supported in the open ball around the deepest hole of P,
// vanishing on P, scaled to unit surrogate H^s norm (spectral on S^2,
// radial-derivative sups elsewhere).
struct FoolingFunction {
  Point center;
  double radius = 0;
  double amplitude = 0;
  double smoothness = 0;
  SurrogateNorm norm_kind = SurrogateNorm::derivative_sup;

  double evaluate(const Manifold& m, const Point& x) const;
};

struct FoolingOptions {
  int mesh_resolution = 224;      // ~1e5 mesh nodes on S^2
  int spectral_resolution = 128;  // rule used for the spectral normalization
};

FoolingFunction fooling_function(const Manifold& m, const PointSet& P, double s,
                                 const FoolingOptions& opts = {});

}  // namespace mslab
