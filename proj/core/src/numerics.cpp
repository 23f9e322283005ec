#include "mslab/numerics.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace mslab {

namespace {

// Newton iteration on the Legendre recurrence, seeded by the Chebyshev-like
// root approximation. Standard method; ~1e-15 node accuracy.
std::pair<Eigen::VectorXd, Eigen::VectorXd> compute_gl(int n) {
  Eigen::VectorXd nodes(n), weights(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[n - 1 - i] = x;
    weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return {nodes, weights};
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  if (n == 1) {
    return {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 2.0)};
  }
  static std::mutex mutex;
  static std::map<int, std::pair<Eigen::VectorXd, Eigen::VectorXd>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gl(n)).first;
  return it->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int n) {
  auto [nodes, weights] = gauss_legendre(n);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += weights[i] * f(mid + half * nodes[i]);
  return half * sum;
}

double unit_ball_volume(int d) {
  if (d < 0) throw std::invalid_argument("unit_ball_volume: d must be >= 0");
  return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double sphere_surface_area(int d) {
  if (d < 1) throw std::invalid_argument("sphere_surface_area: d must be >= 1");
  return 2.0 * std::pow(M_PI, 0.5 * (d + 1)) / std::tgamma(0.5 * (d + 1));
}

}  // namespace mslab
