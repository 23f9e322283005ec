#pragma once

#include <vector>

#include "mslab/manifold.hpp"

namespace mslab {

// Real spherical-harmonic coefficients of samples given on an S^2 product
// quadrature rule, bands l = 0..band_limit. coeff[l] has 2l+1 entries in the
// order m = 0, (1,cos), (1,sin), ..., (l,cos), (l,sin); harmonics are
// orthonormal with respect to the (unnormalized) volume measure.
struct SphereCoefficients {
  int band_limit = 0;
  std::vector<std::vector<double>> coeff;

  double band_energy(int l) const;
};

SphereCoefficients sphere_analysis(const QuadratureRule& rule,
                                   const Eigen::VectorXd& samples, int band_limit = -1);

struct SpectralNorm {
  double value = 0;
  double tail_estimate = 0;  // weighted energy of the last resolved band
  int band_limit = 0;
};

// Spectral H^s_2 norm on S^2: (sum_l (1 + l(l+1))^s sum_m c_lm^2)^{1/2},
// computed from samples on the rule. The band limit defaults to
// rule.resolution - 1, for which the analysis integrals are exact.
SpectralNorm sobolev_norm_sphere(const QuadratureRule& rule,
                                 const Eigen::VectorXd& samples, double s,
                                 int band_limit = -1);

}  // namespace mslab
