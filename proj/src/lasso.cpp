#include "icsbench/lasso.hpp"

#include <cmath>
#include <stdexcept>

namespace icsbench::invariants {

namespace {

double soft_threshold(double value, double threshold) {
  if (value > threshold) return value - threshold;
  if (value < -threshold) return value + threshold;
  return 0.0;
}

}  // namespace

double LassoFit::objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) const {
  const Eigen::VectorXd r = y - x * coefficients - Eigen::VectorXd::Constant(y.size(), intercept);
  return 0.5 * r.squaredNorm() / static_cast<double>(y.size()) + alpha * coefficients.lpNorm<1>();
}

LassoFit fit_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha, double tol,
                   std::size_t max_sweeps) {
  if (x.rows() != y.size()) throw std::invalid_argument("design/target row mismatch");
  if (x.rows() == 0) throw std::invalid_argument("empty design matrix");
  if (alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");

  const auto n = static_cast<double>(x.rows());
  const Eigen::Index p = x.cols();

  Eigen::VectorXd col_sq(p);
  for (Eigen::Index j = 0; j < p; ++j) col_sq(j) = x.col(j).squaredNorm() / n;

  LassoFit fit;
  fit.alpha = alpha;
  fit.coefficients = Eigen::VectorXd::Zero(p);
  fit.intercept = y.mean();

  Eigen::VectorXd residual = y - Eigen::VectorXd::Constant(y.size(), fit.intercept);

  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_delta = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (col_sq(j) == 0.0) continue;
      const double old = fit.coefficients(j);
      const double rho = x.col(j).dot(residual) / n + col_sq(j) * old;
      const double updated = soft_threshold(rho, alpha) / col_sq(j);
      if (updated != old) {
        residual -= (updated - old) * x.col(j);
        fit.coefficients(j) = updated;
        max_delta = std::max(max_delta, std::abs(updated - old));
      }
    }
    const double old_intercept = fit.intercept;
    const double shift = residual.mean();
    fit.intercept += shift;
    residual.array() -= shift;
    max_delta = std::max(max_delta, std::abs(fit.intercept - old_intercept));

    fit.iterations = sweep + 1;
    if (max_delta < tol) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

}  // namespace icsbench::invariants
