#pragma once

#include <Eigen/Core>
#include <functional>
#include <stdexcept>
#include <utility>

namespace mslab {

// Gauss-Legendre nodes and weights on [-1, 1], exact for polynomials of
// degree <= 2n - 1.
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n);

// Integrates f over [a, b] with an n-point Gauss-Legendre rule.
double integrate_gl(const std::function<double(double)>& f, double a, double b, int n);

// Volume of the d-dimensional Euclidean unit ball.
double unit_ball_volume(int d);

// Surface measure of the unit sphere S^d embedded in R^{d+1}.
double sphere_surface_area(int d);

inline double clamp_unit(double x) { return x < -1.0 ? -1.0 : (x > 1.0 ? 1.0 : x); }

// Thrown when a numerically required step (factorization, refinement)
// fails; the CLI maps it to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mslab
