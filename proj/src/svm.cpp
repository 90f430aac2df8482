#include "icsbench/svm.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>

#include "icsbench/series_frame.hpp"

namespace icsbench::tracesvm {

namespace {

constexpr double kQuadFloor = 1e-12;

struct Scaling {
  Eigen::VectorXd min;
  Eigen::VectorXd max;
};

Scaling fit_scaling(const Eigen::MatrixXd& x) {
  Scaling s;
  s.min = x.colwise().minCoeff();
  s.max = x.colwise().maxCoeff();
  return s;
}

Eigen::MatrixXd apply_scaling(const Eigen::MatrixXd& x, const Eigen::VectorXd& lo,
                              const Eigen::VectorXd& hi) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double span = hi(c) - lo(c);
    if (span == 0.0) {
      out.col(c).setZero();
    } else {
      out.col(c) = (x.col(c).array() - lo(c)) / span;
    }
  }
  return out;
}

double default_gamma(const Eigen::MatrixXd& scaled) {
  const double mean = scaled.mean();
  const double var = (scaled.array() - mean).square().mean();
  const double denom = static_cast<double>(scaled.cols()) * var;
  return denom > 0.0 ? 1.0 / denom : 1.0;
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& x, const Kernel& kernel) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd k(n, n);
  if (kernel.type == Kernel::Type::kLinear) {
    k = x * x.transpose();
  } else {
    const Eigen::VectorXd sq = x.rowwise().squaredNorm();
    k = -2.0 * (x * x.transpose());
    k.colwise() += sq;
    k.rowwise() += sq.transpose();
    k = (-kernel.gamma * k.array()).exp();
  }
  return k;
}

}  // namespace

SvmModel train_svm(const Eigen::MatrixXd& features, const std::vector<std::uint8_t>& labels,
                   double C, Kernel kernel, double tol) {
  const Eigen::Index n = features.rows();
  if (n < 2) throw ValidationError("SVM training needs at least two rows");
  if (static_cast<Eigen::Index>(labels.size()) != n) throw ValidationError("label count mismatch");
  if (C <= 0.0) throw ValidationError("C must be positive");

  bool has_pos = false;
  bool has_neg = false;
  for (std::uint8_t l : labels) (l ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) {
    throw ValidationError("single-class training data; use the one-class trainer instead");
  }

  const Scaling scaling = fit_scaling(features);
  const Eigen::MatrixXd x = apply_scaling(features, scaling.min, scaling.max);
  if (kernel.type == Kernel::Type::kRbf && kernel.gamma <= 0.0) kernel.gamma = default_gamma(x);

  const Eigen::MatrixXd k = gram_matrix(x, kernel);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = labels[static_cast<std::size_t>(i)] ? 1.0 : -1.0;

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);  // (Q alpha - e), alpha = 0

  const std::size_t max_iter = 200000 + 100 * static_cast<std::size_t>(n);
  std::size_t iter = 0;
  double gap = std::numeric_limits<double>::infinity();
  for (; iter < max_iter; ++iter) {
    // Maximal-violating pair: i from the "can increase along +y" set,
    // j from the "can decrease" set.
    Eigen::Index best_i = -1;
    Eigen::Index best_j = -1;
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = -y(t) * grad(t);
      const bool in_up = (y(t) > 0 && alpha(t) < C) || (y(t) < 0 && alpha(t) > 0);
      const bool in_low = (y(t) > 0 && alpha(t) > 0) || (y(t) < 0 && alpha(t) < C);
      if (in_up && v > m_up) {
        m_up = v;
        best_i = t;
      }
      if (in_low && v < m_low) {
        m_low = v;
        best_j = t;
      }
    }
    gap = m_up - m_low;
    if (best_i < 0 || best_j < 0 || gap <= tol) break;

    const Eigen::Index i = best_i;
    const Eigen::Index j = best_j;
    double quad = k(i, i) + k(j, j) - 2.0 * k(i, j);
    if (quad <= kQuadFloor) quad = kQuadFloor;

    // Step along alpha_i += y_i t, alpha_j -= y_j t keeps y^T alpha fixed.
    double t_lo = -std::numeric_limits<double>::infinity();
    double t_hi = std::numeric_limits<double>::infinity();
    if (y(i) > 0) {
      t_lo = std::max(t_lo, -alpha(i));
      t_hi = std::min(t_hi, C - alpha(i));
    } else {
      t_lo = std::max(t_lo, alpha(i) - C);
      t_hi = std::min(t_hi, alpha(i));
    }
    if (y(j) > 0) {
      t_lo = std::max(t_lo, alpha(j) - C);
      t_hi = std::min(t_hi, alpha(j));
    } else {
      t_lo = std::max(t_lo, -alpha(j));
      t_hi = std::min(t_hi, C - alpha(j));
    }

    double step = gap / quad;
    step = std::min(step, t_hi);
    step = std::max(step, t_lo);
    if (step == 0.0) break;

    alpha(i) += y(i) * step;
    alpha(j) -= y(j) * step;
    grad += step * y.asDiagonal() * (k.col(i) - k.col(j));
  }

  // Bias from free support vectors; fall back to the violating-pair
  // midpoint when every alpha sits on a bound.
  double bias_acc = 0.0;
  int bias_count = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (alpha(t) > 0.0 && alpha(t) < C) {
      bias_acc += -y(t) * grad(t);
      ++bias_count;
    }
  }
  double bias;
  if (bias_count > 0) {
    bias = bias_acc / bias_count;
  } else {
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = -y(t) * grad(t);
      const bool in_up = (y(t) > 0 && alpha(t) < C) || (y(t) < 0 && alpha(t) > 0);
      const bool in_low = (y(t) > 0 && alpha(t) > 0) || (y(t) < 0 && alpha(t) < C);
      if (in_up) m_up = std::max(m_up, v);
      if (in_low) m_low = std::min(m_low, v);
    }
    bias = 0.5 * (m_up + m_low);
  }

  SvmModel model;
  model.kernel = kernel;
  model.C = C;
  model.bias = bias;
  model.scale_min = scaling.min;
  model.scale_max = scaling.max;
  model.kkt_residual = std::max(gap, 0.0);
  model.iterations = iter;

  std::vector<Eigen::Index> sv;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (alpha(t) > 0.0) sv.push_back(t);
  }
  model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), features.cols());
  model.dual_coeffs.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t s = 0; s < sv.size(); ++s) {
    model.support_vectors.row(static_cast<Eigen::Index>(s)) = x.row(sv[s]);
    model.dual_coeffs(static_cast<Eigen::Index>(s)) = alpha(sv[s]) * y(sv[s]);
  }
  return model;
}

OcSvmModel train_ocsvm(const Eigen::MatrixXd& features, double nu, Kernel kernel, double tol) {
  const Eigen::Index n = features.rows();
  if (n < 10) throw ValidationError("one-class SVM needs at least 10 rows");
  if (nu <= 0.0 || nu > 1.0) throw ValidationError("nu must be in (0, 1]");

  const Scaling scaling = fit_scaling(features);
  const Eigen::MatrixXd x = apply_scaling(features, scaling.min, scaling.max);
  if (kernel.type == Kernel::Type::kRbf && kernel.gamma <= 0.0) kernel.gamma = default_gamma(x);

  const Eigen::MatrixXd k = gram_matrix(x, kernel);
  const double ub = 1.0 / (nu * static_cast<double>(n));

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  const auto full = static_cast<Eigen::Index>(std::floor(nu * static_cast<double>(n)));
  for (Eigen::Index t = 0; t < full; ++t) alpha(t) = ub;
  if (full < n) alpha(full) = 1.0 - ub * static_cast<double>(full);

  Eigen::VectorXd grad = k * alpha;

  const std::size_t max_iter = 200000 + 100 * static_cast<std::size_t>(n);
  std::size_t iter = 0;
  double gap = std::numeric_limits<double>::infinity();
  for (; iter < max_iter; ++iter) {
    Eigen::Index best_i = -1;
    Eigen::Index best_j = -1;
    double g_min = std::numeric_limits<double>::infinity();
    double g_max = -std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      if (alpha(t) < ub && grad(t) < g_min) {
        g_min = grad(t);
        best_i = t;
      }
      if (alpha(t) > 0.0 && grad(t) > g_max) {
        g_max = grad(t);
        best_j = t;
      }
    }
    gap = g_max - g_min;
    if (best_i < 0 || best_j < 0 || gap <= tol) break;

    const Eigen::Index i = best_i;
    const Eigen::Index j = best_j;
    double quad = k(i, i) + k(j, j) - 2.0 * k(i, j);
    if (quad <= kQuadFloor) quad = kQuadFloor;

    double step = gap / quad;
    step = std::min(step, ub - alpha(i));
    step = std::min(step, alpha(j));
    if (step <= 0.0) break;

    alpha(i) += step;
    alpha(j) -= step;
    grad += step * (k.col(i) - k.col(j));
  }

  double rho_acc = 0.0;
  int rho_count = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (alpha(t) > 0.0 && alpha(t) < ub) {
      rho_acc += grad(t);
      ++rho_count;
    }
  }
  double rho;
  if (rho_count > 0) {
    rho = rho_acc / rho_count;
  } else {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      if (alpha(t) < ub) lo = std::min(lo, grad(t));
      if (alpha(t) > 0.0) hi = std::max(hi, grad(t));
    }
    rho = 0.5 * (lo + hi);
  }

  OcSvmModel model;
  model.kernel = kernel;
  model.nu = nu;
  model.rho = rho;
  model.scale_min = scaling.min;
  model.scale_max = scaling.max;
  model.kkt_residual = std::max(gap, 0.0);
  model.iterations = iter;

  std::vector<Eigen::Index> sv;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (alpha(t) > 0.0) sv.push_back(t);
  }
  model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), features.cols());
  model.coeffs.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t s = 0; s < sv.size(); ++s) {
    model.support_vectors.row(static_cast<Eigen::Index>(s)) = x.row(sv[s]);
    model.coeffs(static_cast<Eigen::Index>(s)) = alpha(sv[s]);
  }
  return model;
}

namespace {

Eigen::VectorXd kernel_decision(const Eigen::MatrixXd& sv, const Eigen::VectorXd& coeffs,
                                const Kernel& kernel, const Eigen::MatrixXd& x, double offset) {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double acc = offset;
    for (Eigen::Index s = 0; s < sv.rows(); ++s) {
      acc += coeffs(s) * kernel(sv.row(s), x.row(r));
    }
    out(r) = acc;
  }
  return out;
}

}  // namespace

Eigen::VectorXd decision_function(const SvmModel& model, const Eigen::MatrixXd& features) {
  if (features.cols() != model.support_vectors.cols()) {
    throw ValidationError("feature dimension mismatch");
  }
  const Eigen::MatrixXd x = apply_scaling(features, model.scale_min, model.scale_max);
  return kernel_decision(model.support_vectors, model.dual_coeffs, model.kernel, x, model.bias);
}

Eigen::VectorXd decision_function(const OcSvmModel& model, const Eigen::MatrixXd& features) {
  if (features.cols() != model.support_vectors.cols()) {
    throw ValidationError("feature dimension mismatch");
  }
  const Eigen::MatrixXd x = apply_scaling(features, model.scale_min, model.scale_max);
  return kernel_decision(model.support_vectors, model.coeffs, model.kernel, x, -model.rho);
}

std::vector<std::uint8_t> predict(const SvmModel& model, const Eigen::MatrixXd& features) {
  const Eigen::VectorXd d = decision_function(model, features);
  std::vector<std::uint8_t> out(static_cast<std::size_t>(d.size()));
  for (Eigen::Index i = 0; i < d.size(); ++i) out[static_cast<std::size_t>(i)] = d(i) > 0.0 ? 1 : 0;
  return out;
}

std::vector<std::uint8_t> predict(const OcSvmModel& model, const Eigen::MatrixXd& features) {
  const Eigen::VectorXd d = decision_function(model, features);
  std::vector<std::uint8_t> out(static_cast<std::size_t>(d.size()));
  for (Eigen::Index i = 0; i < d.size(); ++i) out[static_cast<std::size_t>(i)] = d(i) < 0.0 ? 1 : 0;
  return out;
}

namespace {

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from(const nlohmann::json& j) {
  const auto data = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(data.data(), static_cast<Eigen::Index>(data.size()));
}

}  // namespace

std::string SvmModel::to_json_string() const {
  nlohmann::json j;
  j["format"] = "icsbench-svm-model";
  j["version"] = 1;
  j["kernel"] = kernel.type == Kernel::Type::kRbf ? "rbf" : "linear";
  j["gamma"] = kernel.gamma;
  j["C"] = C;
  j["bias"] = bias;
  j["kkt_residual"] = kkt_residual;
  j["rows"] = support_vectors.rows();
  j["cols"] = support_vectors.cols();
  j["support_vectors_col_major"] =
      std::vector<double>(support_vectors.data(), support_vectors.data() + support_vectors.size());
  j["dual_coeffs"] = vector_json(dual_coeffs);
  j["scale_min"] = vector_json(scale_min);
  j["scale_max"] = vector_json(scale_max);
  return j.dump();
}

SvmModel SvmModel::from_json_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("format", "") != "icsbench-svm-model") throw ValidationError("not an SVM model file");
  SvmModel m;
  m.kernel.type = j.at("kernel").get<std::string>() == "rbf" ? Kernel::Type::kRbf : Kernel::Type::kLinear;
  m.kernel.gamma = j.at("gamma").get<double>();
  m.C = j.at("C").get<double>();
  m.bias = j.at("bias").get<double>();
  m.kkt_residual = j.at("kkt_residual").get<double>();
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("support_vectors_col_major").get<std::vector<double>>();
  m.support_vectors = Eigen::Map<const Eigen::MatrixXd>(data.data(), rows, cols);
  m.dual_coeffs = vector_from(j.at("dual_coeffs"));
  m.scale_min = vector_from(j.at("scale_min"));
  m.scale_max = vector_from(j.at("scale_max"));
  return m;
}

std::string OcSvmModel::to_json_string() const {
  nlohmann::json j;
  j["format"] = "icsbench-ocsvm-model";
  j["version"] = 1;
  j["kernel"] = kernel.type == Kernel::Type::kRbf ? "rbf" : "linear";
  j["gamma"] = kernel.gamma;
  j["nu"] = nu;
  j["rho"] = rho;
  j["kkt_residual"] = kkt_residual;
  j["rows"] = support_vectors.rows();
  j["cols"] = support_vectors.cols();
  j["support_vectors_col_major"] =
      std::vector<double>(support_vectors.data(), support_vectors.data() + support_vectors.size());
  j["coeffs"] = vector_json(coeffs);
  j["scale_min"] = vector_json(scale_min);
  j["scale_max"] = vector_json(scale_max);
  return j.dump();
}

OcSvmModel OcSvmModel::from_json_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("format", "") != "icsbench-ocsvm-model") throw ValidationError("not a one-class SVM model file");
  OcSvmModel m;
  m.kernel.type = j.at("kernel").get<std::string>() == "rbf" ? Kernel::Type::kRbf : Kernel::Type::kLinear;
  m.kernel.gamma = j.at("gamma").get<double>();
  m.nu = j.at("nu").get<double>();
  m.rho = j.at("rho").get<double>();
  m.kkt_residual = j.at("kkt_residual").get<double>();
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("support_vectors_col_major").get<std::vector<double>>();
  m.support_vectors = Eigen::Map<const Eigen::MatrixXd>(data.data(), rows, cols);
  m.coeffs = vector_from(j.at("coeffs"));
  m.scale_min = vector_from(j.at("scale_min"));
  m.scale_max = vector_from(j.at("scale_max"));
  return m;
}

void SvmModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << to_json_string();
}

SvmModel SvmModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json_string(text);
}

}  // namespace icsbench::tracesvm
