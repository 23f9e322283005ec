#pragma once

#include <utility>

#include "mslab/manifold.hpp"

namespace mslab {

// Sphere points with real cubature weights (unconstrained sign).
struct WeightedPointSet {
  PointSet base;
  Eigen::VectorXd weights;

  WeightedPointSet(PointSet ps, Eigen::VectorXd w);
  static WeightedPointSet equal_weights(PointSet ps);  // w_j = 1/n
};

// Normalized measure of the spherical cap C(x,t) = {y : x.y >= t};
// independent of x. (1-t)/2 on S^2, arccos(t)/pi on S^1, an incomplete
// Beta-type integral in general.
double cap_measure(int d, double t);

enum class KernelMethod { analytic, monte_carlo };

struct CapKernelValue {
  double value = 0;
  KernelMethod method = KernelMethod::analytic;
  double std_error = 0;
};

// Cap-averaging kernel K(x,y) = int_{-1}^{1} sigma_d(C(x,t) cap C(y,t)) dt.
// Analytic path for d <= 2 integrates the closed-form two-cap intersection
// area in t; values lie in [0,1] with K(x,x) = 1.
CapKernelValue cap_kernel(int d, const Point& x, const Point& y);

// Monte Carlo of the defining double integral over (z,t); std_error included.
CapKernelValue cap_kernel_mc(int d, const Point& x, const Point& y,
                             std::int64_t samples, RandomSource source);

// int K(x,y) dsigma(y): a rotation-invariant constant (2/3 on S^2); it also
// equals the double average int int K by Fubini.
double kernel_mean(int d);
double kernel_mean(int d, const Point& x);

// MC estimate of the kernel mean at x (mean of the analytic kernel against
// uniform y); used to check rotation invariance.
std::pair<double, double> kernel_mean_mc(int d, const Point& x, std::int64_t samples,
                                         RandomSource source);

// Kernel data of one point set: gram_ij = K(x_i, x_j), rhs_i = kernel mean,
// kk = int int K. wce^2(w) = kk - 2 w.rhs + w.gram.w.
struct GramSystem {
  Eigen::MatrixXd gram;
  Eigen::VectorXd rhs;
  double kk = 0;
  double ridge = 0;
  int dim = 2;  // sphere dimension d
};

struct GramOptions {
  double ridge_scale = 1e-12;  // ridge = ridge_scale * trace(G)/n
};

GramSystem build_gram_system(const PointSet& P, const GramOptions& opts = {});

// Squared worst-case integration error of the rule sum_j w_j f(x_j) over the
// kernel's unit ball; clamped to 0 within -1e-12.
double wce_squared(const GramSystem& sys, const Eigen::VectorXd& w);

// Monte Carlo of the weighted spherical cap L2-discrepancy definition.
// Returns (value, std-error); std-error by batching.
std::pair<double, double> d2_direct(const WeightedPointSet& wps, std::int64_t mc_samples,
                                    RandomSource source);

struct OptimalWeights {
  Eigen::VectorXd weights;
  double min_wce = 0;
};

// Solves (G + ridge I) w = rhs by LDLT; min_wce = sqrt(max(0, kk - rhs.w)).
OptimalWeights optimal_weights(const GramSystem& sys);

struct EquivalenceOptions {
  int resolution = 96;
  double ridge_scale = 1e-12;
};

// min-wce / ||dist(.,P)||_{L_{d+1}, normalized}^{(d+1)/2} on S^2; the two
// sides of the discrepancy-distortion equivalence, measured consistently in
// the normalized measure.
double equivalence_ratio(const PointSet& P, const EquivalenceOptions& opts = {});

}  // namespace mslab
