#include "mslab/sphere_harmonics.hpp"

#include <cmath>
#include <stdexcept>

#include "mslab/parallel.hpp"

namespace mslab {

namespace {

// Column l of the fully normalized associated Legendre values P̄_lm(u) for
// fixed m, via the stable three-term recurrence. Normalization is such that
// Y_l0 = P̄_l0 and Y_lm = sqrt(2) P̄_lm {cos,sin}(m phi) are orthonormal in
// L2(S^2, dvol).
void legendre_column(int m, int lmax, double u, std::vector<double>& out) {
  out.assign(lmax + 1, 0.0);
  double somx2 = std::sqrt(std::max(0.0, 1.0 - u * u));
  double pmm = std::sqrt(1.0 / (4.0 * M_PI));
  for (int k = 1; k <= m; ++k) {
    pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * somx2;
  }
  if (m > lmax) return;
  out[m] = pmm;
  if (m + 1 > lmax) return;
  double pmmp1 = u * std::sqrt(2.0 * m + 3.0) * pmm;
  out[m + 1] = pmmp1;
  for (int l = m + 2; l <= lmax; ++l) {
    double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - m * m));
    double b = std::sqrt(((l - 1.0) * (l - 1.0) - m * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
    double pll = a * (u * pmmp1 - b * pmm);
    pmm = pmmp1;
    pmmp1 = pll;
    out[l] = pll;
  }
}

}  // namespace

double SphereCoefficients::band_energy(int l) const {
  double sum = 0.0;
  for (double c : coeff[l]) sum += c * c;
  return sum;
}

SphereCoefficients sphere_analysis(const QuadratureRule& rule,
                                   const Eigen::VectorXd& samples, int band_limit) {
  if (!(rule.manifold == Manifold::sphere(2))) {
    throw std::invalid_argument("sphere_analysis: rule must live on S^2");
  }
  if (samples.size() != rule.size()) {
    throw std::invalid_argument("sphere_analysis: samples do not match the rule");
  }
  const int nu = rule.resolution;
  const int nphi = 2 * rule.resolution;
  if (nu * nphi != rule.size()) {
    throw std::invalid_argument("sphere_analysis: rule is not the S^2 product rule");
  }
  int lmax = band_limit >= 0 ? band_limit : rule.resolution - 1;
  if (lmax > rule.resolution - 1) {
    throw std::invalid_argument("sphere_analysis: band limit exceeds what the rule resolves");
  }

  // Azimuthal sums per polar ring: g_c(i,m), g_s(i,m). The product rule
  // stores ring i contiguously at columns [i*nphi, (i+1)*nphi).
  Eigen::MatrixXd ring_cos(nu, lmax + 1), ring_sin(nu, lmax + 1);
  parallel_for(nu, [&](std::int64_t i) {
    for (int m = 0; m <= lmax; ++m) {
      KahanSum sc, ss;
      for (int k = 0; k < nphi; ++k) {
        double phi = 2.0 * M_PI * (k + 0.5) / nphi;
        double f = samples[i * nphi + k];
        sc.add(f * std::cos(m * phi));
        ss.add(f * std::sin(m * phi));
      }
      ring_cos(i, m) = sc.value() * (2.0 * M_PI / nphi);
      ring_sin(i, m) = ss.value() * (2.0 * M_PI / nphi);
    }
  });
  // Polar weights: GL weight of ring i (azimuth factor already applied).
  Eigen::VectorXd wu(nu), uu(nu);
  for (int i = 0; i < nu; ++i) {
    uu[i] = rule.nodes(2, i * nphi);
    wu[i] = rule.weights[i * nphi] * nphi / (2.0 * M_PI);
  }

  SphereCoefficients out;
  out.band_limit = lmax;
  out.coeff.resize(lmax + 1);
  for (int l = 0; l <= lmax; ++l) out.coeff[l].assign(2 * l + 1, 0.0);

  std::vector<std::vector<double>> plm(nu);
  for (int m = 0; m <= lmax; ++m) {
    parallel_for(nu, [&](std::int64_t i) { legendre_column(m, lmax, uu[i], plm[i]); });
    for (int l = std::max(1, m); l <= lmax; ++l) {
      KahanSum ac, as;
      for (int i = 0; i < nu; ++i) {
        ac.add(wu[i] * plm[i][l] * ring_cos(i, m));
        as.add(wu[i] * plm[i][l] * ring_sin(i, m));
      }
      if (m == 0) {
        out.coeff[l][0] = ac.value();
      } else {
        out.coeff[l][2 * m - 1] = std::sqrt(2.0) * ac.value();
        out.coeff[l][2 * m] = std::sqrt(2.0) * as.value();
      }
    }
    if (m == 0) {
      KahanSum a0;
      for (int i = 0; i < nu; ++i) a0.add(wu[i] * plm[i][0] * ring_cos(i, 0));
      out.coeff[0][0] = a0.value();
    }
  }
  return out;
}

SpectralNorm sobolev_norm_sphere(const QuadratureRule& rule,
                                 const Eigen::VectorXd& samples, double s,
                                 int band_limit) {
  SphereCoefficients coeffs = sphere_analysis(rule, samples, band_limit);
  SpectralNorm out;
  out.band_limit = coeffs.band_limit;
  KahanSum sum;
  for (int l = 0; l <= coeffs.band_limit; ++l) {
    double factor = std::pow(1.0 + static_cast<double>(l) * (l + 1.0), s);
    double energy = coeffs.band_energy(l);
    sum.add(factor * energy);
    if (l == coeffs.band_limit) out.tail_estimate = std::sqrt(factor * energy);
  }
  out.value = std::sqrt(std::max(0.0, sum.value()));
  return out;
}

}  // namespace mslab
