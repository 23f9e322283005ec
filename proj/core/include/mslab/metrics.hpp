#pragma once

#include <cstdint>
#include <limits>
#include <utility>

#include "mslab/manifold.hpp"

namespace mslab {

inline constexpr double inf = std::numeric_limits<double>::infinity();

// Smoothness/integrability parameters (s, p, q, d) together with the derived
// exponent pair: gamma = s (1/q - 1/p)^{-1} and alpha = s when q < p, else
// gamma = infinity and alpha = s - d (1/p - 1/q). The L_gamma norm of
// dist(., P) raised to alpha is the point-set quality functional.
struct QualityParams {
  double s = 0;
  double p = 2;
  double q = 2;
  int d = 2;
  double gamma = inf;
  double alpha = 0;
};

// Requires 1 < p < infinity, 1 <= q <= infinity, s > d/p.
QualityParams quality_params(double s, double p, double q, int d);

enum class DistortionMethod { quadrature, monte_carlo, mesh_max };

// L_gamma norms default to the Riemannian volume; the normalized variant
// divides the measure by vol(M) first.
enum class Normalization { volume, normalized };

struct DistortionEstimate {
  double value = 0;                      // (integral of dist^gamma)^(1/gamma), or the sup
  double gamma = inf;
  DistortionMethod method = DistortionMethod::quadrature;
  double error = 0;                      // std-error or refinement/resolution gap
  std::int64_t node_count = 0;
  double integral = 0;                   // un-rooted integral of dist^gamma (0 when gamma = inf)
};

// min over P of the geodesic distance; brute force.
double distance_to_set(const Manifold& m, const Point& x, const PointSet& P);

// Bulk variant: one distance per column of queries. Same values as the
// scalar call, evaluated blockwise for speed.
Eigen::VectorXd distances_to_set(const Manifold& m, const Eigen::MatrixXd& queries,
                                 const PointSet& P);

struct CoveringOptions {
  double tol = 1e-6;
  int resolution = 0;       // coarse mesh resolution; 0 = auto from |P|
  int top_k = 16;           // candidate holes refined after the mesh scan
  int max_iterations = 200;
};

// sup over M of dist(., P): coarse mesh scan, then shrinking local pattern
// search around the top-k mesh maximizers. error reports the final search
// scale (an upper bound on the remaining local movement).
DistortionEstimate covering_radius(const Manifold& m, const PointSet& P,
                                   const CoveringOptions& opts = {});

// (sum_i w_i dist(x_i, P)^gamma)^(1/gamma) over the given rule; gamma must be
// finite. error is the gap against a rule of double resolution.
DistortionEstimate distortion(const Manifold& m, const PointSet& P, double gamma,
                              const QuadratureRule& rule,
                              Normalization norm = Normalization::volume);

// Single-rule evaluation without the double-resolution comparison; used by
// trial loops where the rule accuracy has been established once.
double distortion_value(const Manifold& m, const PointSet& P, double gamma,
                        const QuadratureRule& rule,
                        Normalization norm = Normalization::volume);

struct MomentOptions {
  int resolution = 0;       // 0 = auto from n
  double covering_tol = 1e-5;
};

// Mean and standard error of distortion(uniform sample of size n)^alpha over
// independent trials; gamma = inf uses the covering radius. Trials run in
// parallel on child streams, one per trial index.
std::pair<double, double> moment_over_trials(const Manifold& m, int n, double gamma,
                                             double alpha, int trials, RandomSource source,
                                             const MomentOptions& opts = {});

// Per-trial values backing moment_over_trials; exposed for rate fits that
// bootstrap over trials.
Eigen::VectorXd moment_trials(const Manifold& m, int n, double gamma, double alpha,
                              int trials, RandomSource source, const MomentOptions& opts = {});

}  // namespace mslab
