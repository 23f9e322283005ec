#include "mslab/fitting.hpp"

#include <cmath>
#include <stdexcept>

namespace mslab {

namespace {

Eigen::VectorXd abscissa_log(const Eigen::VectorXd& x, bool log_correction) {
  Eigen::VectorXd out(x.size());
  for (int i = 0; i < x.size(); ++i) {
    double v = x[i];
    if (log_correction) v /= std::log(v);
    if (!(v > 0.0)) throw std::invalid_argument("fit_loglog: abscissa must be positive");
    out[i] = std::log(v);
  }
  return out;
}

}  // namespace

RateFit fit_loglog(const Eigen::VectorXd& x, const Eigen::VectorXd& y, bool log_correction) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_loglog: need >= 2 matching points");
  }
  Eigen::VectorXd lx = abscissa_log(x, log_correction);
  Eigen::VectorXd ly(y.size());
  for (int i = 0; i < y.size(); ++i) {
    if (!(y[i] > 0.0)) throw std::invalid_argument("fit_loglog: ordinates must be positive");
    ly[i] = std::log(y[i]);
  }
  double mx = lx.mean(), my = ly.mean();
  double sxx = (lx.array() - mx).square().sum();
  double sxy = ((lx.array() - mx) * (ly.array() - my)).sum();
  double syy = (ly.array() - my).square().sum();
  RateFit fit;
  fit.log_correction = log_correction;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

RateFit fit_loglog_bootstrap(const Eigen::VectorXd& x, const Eigen::MatrixXd& trial_values,
                             bool log_correction, int resamples, RandomSource source) {
  if (trial_values.rows() != x.size()) {
    throw std::invalid_argument("fit_loglog_bootstrap: rows must match abscissae");
  }
  const int trials = static_cast<int>(trial_values.cols());
  Eigen::VectorXd means = trial_values.rowwise().mean();
  RateFit fit = fit_loglog(x, means, log_correction);
  if (resamples < 2 || trials < 2) return fit;
  Eigen::VectorXd slopes(resamples);
  for (int b = 0; b < resamples; ++b) {
    Rng rng(source.child(b));
    Eigen::VectorXd resampled = Eigen::VectorXd::Zero(x.size());
    for (int t = 0; t < trials; ++t) {
      int pick = static_cast<int>(rng.uniform() * trials);
      if (pick >= trials) pick = trials - 1;
      resampled += trial_values.col(pick);
    }
    resampled /= trials;
    slopes[b] = fit_loglog(x, resampled, log_correction).slope;
  }
  double mean = slopes.mean();
  fit.slope_stderr = std::sqrt((slopes.array() - mean).square().sum() / (resamples - 1));
  return fit;
}

double log_correlation(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("log_correlation: need >= 2 matching points");
  }
  Eigen::VectorXd lx(x.size()), ly(y.size());
  for (int i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw std::invalid_argument("log_correlation: values must be positive");
    }
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = lx.mean(), my = ly.mean();
  double sxx = (lx.array() - mx).square().sum();
  double syy = (ly.array() - my).square().sum();
  double sxy = ((lx.array() - mx) * (ly.array() - my)).sum();
  if (!(sxx > 0.0) || !(syy > 0.0)) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace mslab
