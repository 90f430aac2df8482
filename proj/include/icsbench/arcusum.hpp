#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "icsbench/errors.hpp"
#include "icsbench/metrics.hpp"

namespace icsbench::arcusum {

struct ArModel {
  std::size_t order = 0;
  Eigen::VectorXd coefficients;  // a_1 .. a_p
  double intercept = 0.0;
  double residual_mean = 0.0;
  double residual_std = 0.0;  // population
  double condition_number = 0.0;
  /// Constant training series: zero coefficients, zero residual spread.
  bool degenerate = false;

  std::string to_json_string() const;
  static ArModel from_json_string(const std::string& text);
};

/// Two-sided tabular CUSUM knobs, both expressed in residual-sigma units.
/// The slack applied per step is kappa = min_mean_shift * sigma / 2.
struct CusumParams {
  double control_limit = 5.5;
  double min_mean_shift = 1.0;

  double slack(double sigma) const { return min_mean_shift * sigma / 2.0; }
};

/// Least-squares AR(p) fit of x_k on its previous p values plus intercept.
ArModel fit_ar(const std::vector<double>& series, std::size_t order = 20);

/// One-step-ahead prediction errors; the first `order` steps emit 0.
std::vector<double> residuals(const ArModel& model, const std::vector<double>& series);

struct CusumTrace {
  std::vector<double> upper;
  std::vector<double> lower;
  AlarmSeries alarms;
  /// sigma <= 0: statistics stay 0 and no alarms are raised.
  bool degenerate = false;
};

/// S+ <- max(0, S+ + (r-mu) - kappa), S- <- max(0, S- - (r-mu) - kappa);
/// alarm when either exceeds control_limit * sigma, then both reset to 0.
/// The first `warmup` residuals are skipped.
CusumTrace cusum_detect(const std::vector<double>& residuals, const CusumParams& params,
                        double sigma, double mu, std::size_t warmup = 0);

/// Residual and statistic series as CSV for external control charts.
void write_cusum_csv(const std::vector<double>& residuals, const CusumTrace& trace,
                     const std::string& path);

}  // namespace icsbench::arcusum
