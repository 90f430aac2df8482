#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace icsbench::invariants {

/// Coordinate-descent solution of
///   min_{b, beta} (1/2n) ||y - X beta - b||^2 + alpha ||beta||_1
/// with an unpenalized intercept.
struct LassoFit {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  double alpha = 0.0;
  std::size_t iterations = 0;
  bool converged = false;

  double objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) const;
};

LassoFit fit_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha,
                   double tol = 1e-8, std::size_t max_sweeps = 100000);

/// Actuator state transition whose occurrences anchor an event-driven
/// predicate; the Lasso predicts `target_sensor` at those steps from the
/// remaining sensors.
struct EventSpec {
  std::string actuator;
  double from_value = 0.0;
  double to_value = 0.0;
  std::string target_sensor;
};

struct LassoModel {
  EventSpec event;
  std::vector<std::string> predictors;
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  double alpha = 0.0;
  double epsilon = 0.05;

  double predict(const Eigen::VectorXd& predictors_at_step) const {
    return intercept + coefficients.dot(predictors_at_step);
  }
};

}  // namespace icsbench::invariants
