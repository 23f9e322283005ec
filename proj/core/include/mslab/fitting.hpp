#pragma once

#include <Eigen/Core>

#include "mslab/rng.hpp"

namespace mslab {

// Least-squares line through (x_i, y_i) in log-log coordinates.
struct RateFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  bool log_correction = false;  // abscissa was n / log n
  double slope_stderr = 0;      // seed-bootstrap estimate when available
};

RateFit fit_loglog(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                   bool log_correction = false);

// Slope uncertainty by bootstrapping trials: trial_values(i, t) holds trial t
// of abscissa i; resamples trials with replacement, refits, reports the
// sample deviation of the slopes.
RateFit fit_loglog_bootstrap(const Eigen::VectorXd& x,
                             const Eigen::MatrixXd& trial_values, bool log_correction,
                             int resamples, RandomSource source);

// Pearson correlation of (log x_i, log y_i).
double log_correlation(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

}  // namespace mslab
