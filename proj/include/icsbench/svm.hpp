#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace icsbench::tracesvm {

struct Kernel {
  enum class Type { kRbf, kLinear };
  Type type = Type::kRbf;
  /// RBF width; <= 0 requests the data-driven default
  /// 1 / (dim * variance of all scaled feature values).
  double gamma = 0.0;

  double operator()(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    if (type == Type::kLinear) return a.dot(b);
    return std::exp(-gamma * (a - b).squaredNorm());
  }
};

/// Soft-margin two-class SVM trained by sequential pairwise optimization
/// on the dual (maximal-violating-pair working set selection). Inputs are
/// min-max scaled by bounds captured from the training matrix.
struct SvmModel {
  Kernel kernel;
  double C = 1.0;
  Eigen::MatrixXd support_vectors;  // rows
  Eigen::VectorXd dual_coeffs;      // alpha_i * y_i
  double bias = 0.0;
  Eigen::VectorXd scale_min;
  Eigen::VectorXd scale_max;
  double kkt_residual = 0.0;
  std::size_t iterations = 0;

  std::string to_json_string() const;
  static SvmModel from_json_string(const std::string& text);
  void save(const std::string& path) const;
  static SvmModel load(const std::string& path);
};

/// One-class variant: fraction nu bounds the training outlier rate.
struct OcSvmModel {
  Kernel kernel;
  double nu = 0.1;
  Eigen::MatrixXd support_vectors;
  Eigen::VectorXd coeffs;
  double rho = 0.0;
  Eigen::VectorXd scale_min;
  Eigen::VectorXd scale_max;
  double kkt_residual = 0.0;
  std::size_t iterations = 0;

  std::string to_json_string() const;
  static OcSvmModel from_json_string(const std::string& text);
};

/// labels are 0/1 (1 = anomalous, mapped to the positive class).
SvmModel train_svm(const Eigen::MatrixXd& features, const std::vector<std::uint8_t>& labels,
                   double C, Kernel kernel, double tol = 1e-3);

OcSvmModel train_ocsvm(const Eigen::MatrixXd& features, double nu, Kernel kernel, double tol = 1e-3);

Eigen::VectorXd decision_function(const SvmModel& model, const Eigen::MatrixXd& features);
Eigen::VectorXd decision_function(const OcSvmModel& model, const Eigen::MatrixXd& features);

/// 1 where the decision value is positive (two-class: anomalous side);
/// one-class: 1 where the decision value is negative (outlier).
std::vector<std::uint8_t> predict(const SvmModel& model, const Eigen::MatrixXd& features);
std::vector<std::uint8_t> predict(const OcSvmModel& model, const Eigen::MatrixXd& features);

}  // namespace icsbench::tracesvm
